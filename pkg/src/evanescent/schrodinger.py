"""Finite-difference 1D Schrodinger spectra and transfer-matrix scattering.

Bound states use the three-point kinetic stencil with Dirichlet walls and a
Sturm-sequence bisection eigensolver (LAPACK ``stebz`` + ``stein`` via
:func:`scipy.linalg.eigh_tridiagonal`). Scattering uses real 2x2 transfer
matrices acting on ``(psi, psi' / k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize

from evanescent.scales import CONSTANTS
from evanescent.wkb import BarrierProfile

__all__ = [
    "Grid1D",
    "PotentialSpec",
    "TridiagonalHamiltonian",
    "SpectrumResult",
    "SplittingResult",
    "ScatteringResult",
    "TransferCheck",
    "EigensolverError",
    "EIGENVALUE_RTOL",
    "grid_for",
    "build_hamiltonian",
    "lowest_eigenpairs",
    "tunnel_splitting",
    "effective_hopping",
    "transfer_period",
    "transmission_rectangular",
    "transmission_numeric",
]

EIGENVALUE_RTOL = 1e-12
# sinh/cosh arguments above this switch to log-magnitude evaluation
_LOG_PATH_ARG = 350.0
_RESIDUAL_LIMIT = 1e-9

FLAG_NOT_TUNNELING = "not in tunneling regime"
FLAG_BELOW_RESOLUTION = "below resolution"
FLAG_COARSE_GRID = "grid too coarse: kinetic scale does not dominate potential"


class EigensolverError(RuntimeError):
    """Raised when the tridiagonal eigensolver fails to converge."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (achieved residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.n_points < 16:
            raise ValueError("n_points must be at least 16")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def refined(self) -> "Grid1D":
        """Same interval with the spacing halved."""
        return Grid1D(self.x_min, self.x_max, 2 * self.n_points - 1)


@dataclass(frozen=True)
class PotentialSpec:
    """Potential landscape centred on ``x = 0``.

    ``double_well``: two flat-bottomed wells (floor 0) of width
    ``well_width`` separated by a central barrier of width ``barrier_width``
    and height ``barrier_height``; outside both wells the potential sits at
    ``well_depth`` (defaults to the barrier height, i.e. two identical
    square wells in a uniform background).

    ``rectangular_barrier``: height ``barrier_height`` on
    ``|x| < barrier_width / 2``, zero elsewhere.

    ``custom_samples``: ``(x, V)`` pairs, linearly interpolated and held
    constant beyond the ends.
    """

    kind: str
    well_width: float = 0.0
    barrier_width: float = 0.0
    barrier_height: float = 0.0
    well_depth: float | None = None
    samples: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind == "double_well":
            if not (self.well_width > 0 and self.barrier_width > 0):
                raise ValueError("double_well needs positive well_width and barrier_width")
            if self.barrier_height < 0:
                raise ValueError("barrier_height must be non-negative")
            if self.well_depth is None:
                object.__setattr__(self, "well_depth", self.barrier_height)
        elif self.kind == "rectangular_barrier":
            if not (self.barrier_width > 0 and self.barrier_height > 0):
                raise ValueError("rectangular_barrier needs positive width and height")
        elif self.kind == "custom_samples":
            if not self.samples or len(self.samples) < 2:
                raise ValueError("custom_samples needs at least two samples")
            xs = np.array([s[0] for s in self.samples], float)
            if not np.all(np.diff(xs) > 0):
                raise ValueError("sample positions must be strictly increasing")
            object.__setattr__(self, "samples", tuple((float(a), float(b)) for a, b in self.samples))
        else:
            raise ValueError(f"unknown potential kind {self.kind!r}")

    @classmethod
    def double_well(cls, well_width, barrier_width, barrier_height, well_depth=None):
        return cls("double_well", well_width, barrier_width, barrier_height, well_depth)

    @property
    def half_extent(self) -> float:
        """Half-width of the structured region around the origin."""
        if self.kind == "double_well":
            return 0.5 * self.barrier_width + self.well_width
        if self.kind == "rectangular_barrier":
            return 0.5 * self.barrier_width
        return max(abs(self.samples[0][0]), abs(self.samples[-1][0]))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "double_well":
            ax = np.abs(x)
            half_gap = 0.5 * self.barrier_width
            v = np.zeros_like(x)
            v[ax < half_gap] = self.barrier_height
            v[ax > half_gap + self.well_width] = self.well_depth
            return v
        if self.kind == "rectangular_barrier":
            return np.where(np.abs(x) < 0.5 * self.barrier_width, self.barrier_height, 0.0)
        xs, vs = map(np.array, zip(*self.samples))
        return np.interp(x, xs, vs)

    def to_profile(self, mass: float) -> BarrierProfile:
        if self.kind == "rectangular_barrier":
            return BarrierProfile.flat(self.barrier_height, self.barrier_width, mass,
                                       start=-0.5 * self.barrier_width)
        if self.kind == "custom_samples":
            return BarrierProfile(mass=mass, samples=self.samples)
        raise ValueError("a double well is a bound-state geometry, not a scattering profile")


def grid_for(potential: PotentialSpec, mass: float, n_points: int,
             padding: float = 8.0) -> Grid1D:
    """Symmetric grid padding the structure by ``padding`` exterior decay lengths.

    The decay length is estimated from the exterior potential and an upper
    bound on the ground-state energy (the infinite-well level).
    """
    hbar = CONSTANTS.hbar
    if potential.kind == "double_well":
        v_out = potential.well_depth
        e_est = min(math.pi**2 * hbar**2 / (2 * mass * potential.well_width**2), 0.9 * v_out)
        gap = v_out - e_est
        decay = hbar / math.sqrt(2 * mass * gap) if gap > 0 else potential.well_width
    else:
        decay = potential.half_extent
    half = potential.half_extent + padding * decay
    return Grid1D(-half, half, n_points)


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    """Operator on the interior nodes; the two end nodes carry ``psi = 0``."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray
    grid: Grid1D
    warnings: tuple[str, ...] = ()

    def to_dense(self) -> np.ndarray:
        return (np.diag(self.diagonal) + np.diag(self.offdiagonal, 1)
                + np.diag(self.offdiagonal, -1))

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diagonal * v
        out[:-1] += self.offdiagonal * v[1:]
        out[1:] += self.offdiagonal * v[:-1]
        return out


def build_hamiltonian(grid: Grid1D, potential, mass: float) -> TridiagonalHamiltonian:
    """Three-point finite-difference Hamiltonian with Dirichlet walls.

    The first and last grid nodes are the walls, so the box width is exactly
    ``x_max - x_min`` and the matrix has ``n_points - 2`` rows.

    ``potential`` is anything callable on the node array (a
    :class:`PotentialSpec` or a plain function). A warning is attached when
    ``hbar**2 / (2 m h**2) < 10 max|V|``.
    """
    if not mass > 0:
        raise ValueError("mass must be positive")
    h = grid.h
    t = CONSTANTS.hbar**2 / (2.0 * mass * h**2)
    v = np.asarray(potential(grid.x[1:-1]), dtype=float)
    warnings = ()
    if t < 10.0 * np.max(np.abs(v)):
        warnings = (FLAG_COARSE_GRID,)
    return TridiagonalHamiltonian(
        diagonal=2.0 * t + v,
        offdiagonal=np.full(grid.n_points - 3, -t),
        grid=grid,
        warnings=warnings,
    )


@dataclass(frozen=True)
class SpectrumResult:
    """Lowest eigenpairs; ``eigenvectors[i]`` satisfies ``h * sum(psi**2) == 1``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    grid: Grid1D
    residuals: np.ndarray
    warnings: tuple[str, ...] = ()


def lowest_eigenpairs(hamiltonian: TridiagonalHamiltonian, k: int) -> SpectrumResult:
    """The ``k`` lowest eigenpairs by Sturm bisection and inverse iteration."""
    n = hamiltonian.diagonal.size
    if not 1 <= k < n:
        raise ValueError(f"k must lie in [1, {n - 1}], got {k}")
    try:
        w, vecs = linalg.eigh_tridiagonal(
            hamiltonian.diagonal, hamiltonian.offdiagonal,
            select="i", select_range=(0, k - 1), lapack_driver="stebz",
        )
    except linalg.LinAlgError as exc:
        raise EigensolverError(f"tridiagonal eigensolver failed: {exc}") from exc

    scale = np.max(np.abs(hamiltonian.diagonal)) + 2 * np.max(np.abs(hamiltonian.offdiagonal))
    residuals = np.array([
        np.linalg.norm(hamiltonian.matvec(vecs[:, i]) - w[i] * vecs[:, i]) / scale
        for i in range(k)
    ])
    if np.any(residuals > _RESIDUAL_LIMIT):
        raise EigensolverError("eigenvectors did not converge", float(residuals.max()))

    vecs = np.pad(vecs.T, ((0, 0), (1, 1)))
    for row in vecs:
        lead = np.argmax(np.abs(row) > 1e-3 * np.max(np.abs(row)))
        if row[lead] < 0:
            row *= -1.0
    vecs /= math.sqrt(hamiltonian.grid.h)
    return SpectrumResult(w, vecs, hamiltonian.grid, residuals, hamiltonian.warnings)


@dataclass(frozen=True)
class SplittingResult:
    splitting: float
    e0: float
    e1: float
    barrier_height: float
    flags: tuple[str, ...] = ()

    @property
    def effective_binding(self) -> float:
        """Barrier top measured from the occupied level, ``V_b - E0``."""
        return self.barrier_height - self.e0

    @property
    def resolved(self) -> bool:
        return FLAG_BELOW_RESOLUTION not in self.flags


def tunnel_splitting(potential: PotentialSpec, mass: float, grid: Grid1D) -> SplittingResult:
    """Gap between the two lowest levels of a double well."""
    if potential.kind != "double_well":
        raise ValueError("tunnel_splitting needs a double_well potential")
    spec = lowest_eigenpairs(build_hamiltonian(grid, potential, mass), 2)
    e0, e1 = (float(e) for e in spec.eigenvalues)
    gap = max(e1 - e0, 0.0)
    flags = list(spec.warnings)
    if e1 > potential.barrier_height:
        flags.append(FLAG_NOT_TUNNELING)
    if gap <= 1e3 * EIGENVALUE_RTOL * abs(e0):
        flags.append(FLAG_BELOW_RESOLUTION)
    return SplittingResult(gap, e0, e1, potential.barrier_height, tuple(flags))


def effective_hopping(splitting: float) -> float:
    """Two-level hopping amplitude ``J = dE / 2``."""
    if splitting < 0:
        raise ValueError("splitting must be non-negative")
    return 0.5 * splitting


@dataclass(frozen=True)
class TransferCheck:
    period_numeric: float
    period_two_level: float
    peak_probability: float

    @property
    def relative_error(self) -> float:
        return abs(self.period_numeric - self.period_two_level) / self.period_two_level


def transfer_period(potential: PotentialSpec, mass: float, grid: Grid1D) -> TransferCheck:
    """Time for a left-localised state to first reach the right well.

    The initial state is the ground state of the same landscape with the right
    well filled up to the barrier top. It is evolved under the full grid
    Hamiltonian and compared with the two-level prediction ``pi hbar / dE``.
    """
    x = grid.x[1:-1]
    ham = build_hamiltonian(grid, potential, mass)
    n_modes = min(ham.diagonal.size - 1, 64)
    w, vecs = linalg.eigh_tridiagonal(ham.diagonal, ham.offdiagonal, select="i",
                                      select_range=(0, n_modes - 1), lapack_driver="stebz")
    gap = w[1] - w[0]
    t_two = math.pi * CONSTANTS.hbar / gap

    def left_only(xx):
        v = potential(xx)
        right = (xx > 0) & (xx < potential.half_extent)
        return np.where(right, np.maximum(v, potential.barrier_height), v)

    start = lowest_eigenpairs(build_hamiltonian(grid, left_only, mass), 1).eigenvectors[0, 1:-1]
    start = start / np.linalg.norm(start)
    coeffs = vecs.T @ start
    missing = 1.0 - float(np.sum(coeffs**2))
    if missing > 1e-8:
        raise RuntimeError(f"initial state not captured by {n_modes} modes (lost norm {missing:.2e})")
    right_block = vecs[x > 0]

    def p_right(t):
        t = np.atleast_1d(t)
        phases = np.exp(-1j * np.outer(w, t) / CONSTANTS.hbar) * coeffs[:, None]
        return np.sum(np.abs(right_block @ phases) ** 2, axis=0)

    ts = np.linspace(0.0, 2.0 * t_two, 801)
    ps = p_right(ts)
    peaks = np.nonzero((ps[1:-1] >= ps[:-2]) & (ps[1:-1] >= ps[2:]) & (ps[1:-1] > 0.5))[0] + 1
    if len(peaks) == 0:
        raise RuntimeError("no transfer to the right well within two predicted periods")
    i = peaks[0]
    res = optimize.minimize_scalar(lambda t: -p_right(t)[0], bounds=(ts[i - 1], ts[i + 1]),
                                   method="bounded", options={"xatol": 1e-9 * t_two})
    return TransferCheck(float(res.x), float(t_two), -float(res.fun))


@dataclass(frozen=True)
class ScatteringResult:
    transmission: float
    reflection: float
    energy: float
    log_transmission: float


def transmission_rectangular(energy: float, height: float, width: float,
                             mass: float) -> ScatteringResult:
    """Closed-form transmission through a rectangular barrier below its top."""
    if not 0 < energy < height:
        raise ValueError("closed form covers 0 < energy < height only")
    hbar = CONSTANTS.hbar
    k2 = 2.0 * mass * energy / hbar**2
    q2 = 2.0 * mass * (height - energy) / hbar**2
    amp = (k2 + q2) ** 2 / (4.0 * k2 * q2)
    arg = math.sqrt(q2) * width
    if arg <= _LOG_PATH_ARG:
        y = amp * math.sinh(arg) ** 2
        return ScatteringResult(1.0 / (1.0 + y), y / (1.0 + y), energy, -math.log1p(y))
    log_y = math.log(amp) + 2.0 * (arg - math.log(2.0) + math.log1p(-math.exp(-2.0 * arg)))
    log_t = -(log_y + math.log1p(math.exp(-log_y)))
    t = math.exp(log_t)
    return ScatteringResult(t, 1.0 / (1.0 + math.exp(-log_y)), energy, log_t)


def _segment_matrix(q2: float, width: float, k: float):
    """Transfer matrix on ``(psi, psi'/k)`` and its log scale factor."""
    if q2 > 0:
        q = math.sqrt(q2)
        c, s = math.cos(q * width), math.sin(q * width)
        return np.array([[c, k / q * s], [-q / k * s, c]]), 0.0
    if q2 == 0:
        return np.array([[1.0, k * width], [0.0, 1.0]]), 0.0
    kap = math.sqrt(-q2)
    x = kap * width
    if x <= _LOG_PATH_ARG:
        c, s = math.cosh(x), math.sinh(x)
        return np.array([[c, k / kap * s], [kap / k * s, c]]), 0.0
    e = math.exp(-2.0 * x)
    c, s = 1.0 + e, 1.0 - e
    return np.array([[c, k / kap * s], [kap / k * s, c]]), x - math.log(2.0)


def transmission_numeric(profile: BarrierProfile, energy: float,
                         n_per_interval: int = 1) -> ScatteringResult:
    """Transmission through a piecewise-constant rendering of ``profile``.

    The potential is taken as zero outside the profile. Segment matrices are
    multiplied left to right with the running product renormalised, so the
    log transmission stays finite for arbitrarily opaque barriers.
    """
    if not energy > 0:
        raise ValueError("energy must be positive")
    hbar = CONSTANTS.hbar
    k = math.sqrt(2.0 * profile.mass * energy) / hbar
    edges, values = profile.piecewise_constant(n_per_interval)
    total = np.eye(2)
    log_scale = 0.0
    for width, v in zip(np.diff(edges), values):
        q2 = 2.0 * profile.mass * (energy - v) / hbar**2
        seg, seg_log = _segment_matrix(q2, float(width), k)
        total = seg @ total
        norm = np.max(np.abs(total))
        total /= norm
        log_scale += seg_log + math.log(norm)
    (a, b), (c, d) = total
    den = (a + d) ** 2 + (b - c) ** 2
    num = (a - d) ** 2 + (b + c) ** 2
    log_t = math.log(4.0) - 2.0 * log_scale - math.log(den)
    t = math.exp(log_t) if log_t > -745.0 else 0.0
    return ScatteringResult(t, num / den, energy, log_t)

"""Entanglement generated and carried by a hopping-only tunneling channel.

None of the Hamiltonians here contain an interaction term between the
bodies; the only coupling is a particle hopping between body A and body B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from evanescent.fitting import FitResult, fit_exponential
from evanescent.scales import CONSTANTS, ScaleParams, suppression_length

__all__ = [
    "StateVector",
    "DensityMatrix",
    "EntanglementReport",
    "RatePoint",
    "RateSweep",
    "evolve",
    "partial_trace",
    "von_neumann_entropy",
    "negativity",
    "hopping_hamiltonian",
    "mode_entanglement_demo",
    "spectator_transfer_demo",
    "rate_vs_separation",
]

MAX_DIMENSION = 2**14
PSD_FLOOR = 1e-10


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        dims = tuple(int(d) for d in self.dims)
        if math.prod(dims) != amps.size:
            raise ValueError(f"dims {dims} do not factor a vector of length {amps.size}")
        if amps.size > MAX_DIMENSION:
            raise ValueError(f"dimension {amps.size} exceeds {MAX_DIMENSION}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalised (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def product(cls, *kets) -> "StateVector":
        amps = np.array([1.0 + 0j])
        dims = []
        for ket in kets:
            ket = np.asarray(ket, dtype=complex)
            amps = np.kron(amps, ket / np.linalg.norm(ket))
            dims.append(ket.size)
        return cls(amps, tuple(dims))

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        n = math.prod(dims)
        if rho.shape != (n, n):
            raise ValueError(f"matrix shape {rho.shape} does not match dims {dims}")
        asym = float(np.max(np.abs(rho - rho.conj().T)))
        if asym > 1e-12:
            raise ValueError(f"density matrix is not Hermitian (max asymmetry {asym:.3e})")
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > 1e-12:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        lam_min = float(np.linalg.eigvalsh(rho).min())
        if lam_min < -PSD_FLOOR:
            raise ValueError(f"density matrix is not positive (eigenvalue {lam_min:.3e})")
        object.__setattr__(self, "matrix", rho)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def mixture(cls, weights, states: Sequence[StateVector]) -> "DensityMatrix":
        rho = sum(w * s.density_matrix().matrix for w, s in zip(weights, states))
        return cls(rho, states[0].dims)


def _check_subsystems(indices, n_sub: int) -> list[int]:
    idx = sorted(set(int(i) for i in indices))
    if not idx:
        raise ValueError("subsystem selection must be non-empty")
    if idx[0] < 0 or idx[-1] >= n_sub:
        raise IndexError(f"subsystem index out of range for {n_sub} subsystems: {idx}")
    if len(idx) == n_sub:
        raise ValueError("subsystem selection must be a proper subset")
    return idx


def evolve(hamiltonian: np.ndarray, initial: StateVector, time: float,
           hbar: float = CONSTANTS.hbar) -> StateVector:
    """``exp(-i H t / hbar) psi`` by full diagonalisation of ``H``."""
    h = np.asarray(hamiltonian, dtype=complex)
    n = initial.amplitudes.size
    if h.shape != (n, n):
        raise ValueError(f"Hamiltonian shape {h.shape} does not match state dimension {n}")
    scale = max(float(np.max(np.abs(h))), np.finfo(float).tiny)
    asym = float(np.max(np.abs(h - h.conj().T)))
    if asym > 1e-12 * scale:
        raise ValueError(f"Hamiltonian is not Hermitian (max asymmetry {asym:.3e})")
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    psi = v @ (np.exp(-1j * w * time / hbar) * (v.conj().T @ initial.amplitudes))
    return StateVector(psi, initial.dims)


def _partial_trace_array(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    n = len(dims)
    t = rho.reshape(tuple(dims) * 2)
    row = list(range(n))
    col = [i if i not in keep else n + i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    reduced = np.einsum(t, row + col, out)
    d = math.prod(dims[i] for i in keep)
    return reduced.reshape(d, d)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep``."""
    idx = _check_subsystems(keep, len(rho.dims))
    reduced = _partial_trace_array(rho.matrix, rho.dims, idx)
    reduced = 0.5 * (reduced + reduced.conj().T)
    return DensityMatrix(reduced, tuple(rho.dims[i] for i in idx))


def _entropy_bits(eigenvalues: np.ndarray) -> float:
    lam = np.clip(eigenvalues, 0.0, 1.0)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits, ``-sum(lam log2 lam)`` with ``0 log 0 = 0``."""
    lam = np.linalg.eigvalsh(rho.matrix)
    if lam.min() < -PSD_FLOOR:
        raise ValueError(f"positivity violation: eigenvalue {lam.min():.3e}")
    return _entropy_bits(lam)


def _partial_transpose(rho: np.ndarray, dims: Sequence[int], transpose: Sequence[int]):
    n = len(dims)
    axes = list(range(2 * n))
    for i in transpose:
        axes[i], axes[n + i] = axes[n + i], axes[i]
    d = math.prod(dims)
    return rho.reshape(tuple(dims) * 2).transpose(axes).reshape(d, d)


def _negativity_array(rho: np.ndarray, dims: Sequence[int], transpose: Sequence[int]) -> float:
    # (||rho^T_B||_1 - tr rho) / 2, valid for sub-normalised rho as well
    lam = np.linalg.eigvalsh(_partial_transpose(rho, dims, transpose))
    return float(-np.sum(lam[lam < 0])) + 0.0


def negativity(rho: DensityMatrix, bipartition: Sequence[int]) -> float:
    """Negativity ``(||rho^{T_B}||_1 - 1) / 2``; ``bipartition`` lists the B subsystems."""
    idx = _check_subsystems(bipartition, len(rho.dims))
    return _negativity_array(rho.matrix, rho.dims, idx)


def hopping_hamiltonian(j_hop: float) -> np.ndarray:
    """Single particle on modes ``(A, B)``: ``-J (|A><B| + |B><A|)``."""
    return np.array([[0.0, -j_hop], [-j_hop, 0.0]])


@dataclass(frozen=True)
class EntanglementReport:
    entropy: float
    negativity: float
    transfer_probability: float
    bipartition: tuple[str, str] = ("body A", "body B")
    extras: dict = field(default_factory=dict)


def _hop(j_hop: float, time: float) -> np.ndarray:
    if j_hop < 0:
        raise ValueError("J_hop must be non-negative")
    start = StateVector(np.array([1.0, 0.0]), (2,))
    return evolve(hopping_hamiltonian(j_hop), start, time).amplitudes


def mode_entanglement_demo(j_hop: float, time: float) -> EntanglementReport:
    """One particle hopping from body A toward body B.

    The spatial bipartition is the occupation of the body-A mode versus the
    body-B mode: ``a |1_A 0_B> + b |0_A 1_B>``. The particle starts in A
    (a product state) and becomes mode-entangled as it delocalises.
    """
    a, b = _hop(j_hop, time)
    amps = np.zeros(4, dtype=complex)
    amps[0b10] = a
    amps[0b01] = b
    rho = StateVector(amps, (2, 2)).density_matrix()
    p = float(abs(b) ** 2)
    return EntanglementReport(
        entropy=von_neumann_entropy(partial_trace(rho, [0])),
        negativity=negativity(rho, [1]),
        transfer_probability=p,
        bipartition=("body-A mode", "body-B mode"),
    )


def spectator_transfer_demo(j_hop: float, time: float) -> EntanglementReport:
    """Carry a local ebit across the gap by tunneling.

    A spectator qubit stays in body A; a mobile particle with an internal
    qubit starts in A, maximally entangled with the spectator, and hops on
    ``{A, B}`` without touching either qubit. The state is rewritten in
    body-local modes (spectator and mode A in body A, mode B in body B; each
    mode is empty or holds the particle with internal state 0/1) and the
    entanglement is resolved by the number of particles in body B. Only the
    sector with the particle in B contributes, so the reported negativity
    rises from 0 to 1/2 at full transfer.
    """
    a, b = _hop(j_hop, time)
    bell = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0)
    pair = bell.reshape(2, 2)  # [spectator, internal]

    # dims: spectator (2), mode A (vac, 0, 1), mode B (vac, 0, 1)
    dims = (2, 3, 3)
    amps = np.zeros(dims, dtype=complex)
    for s in range(2):
        for i in range(2):
            amps[s, i + 1, 0] += a * pair[s, i]
            amps[s, 0, i + 1] += b * pair[s, i]
    state = StateVector(amps.ravel(), dims)

    entropy = neg = 0.0
    sectors = {}
    for n_b, mask in ((0, np.s_[:, :, 0]), (1, np.s_[:, :, 1:])):
        proj = np.zeros(dims, dtype=complex)
        proj[mask] = amps[mask]
        p_n = float(np.sum(np.abs(proj) ** 2))
        sectors[n_b] = p_n
        if p_n < 1e-300:
            continue
        psi = proj.ravel() / math.sqrt(p_n)
        rho_n = np.outer(psi, psi.conj())
        reduced = _partial_trace_array(rho_n, dims, [2])
        entropy += p_n * _entropy_bits(np.linalg.eigvalsh(0.5 * (reduced + reduced.conj().T)))
        neg += p_n * _negativity_array(rho_n, dims, [2])

    mode_rho = state.density_matrix()
    return EntanglementReport(
        entropy=entropy,
        negativity=neg,
        transfer_probability=sectors[1],
        bipartition=("body A: spectator + mode A", "body B: mode B"),
        extras={"mode_negativity": negativity(mode_rho, [2]),
                "sector_probabilities": sectors},
    )


@dataclass(frozen=True)
class RatePoint:
    separation: float
    log_hopping: float
    log_probability: float
    entropy: float
    negativity: float


@dataclass(frozen=True)
class RateSweep:
    points: list[RatePoint]
    probe_time: float
    fit: FitResult | None
    suppression_length: float


def _log_sin(theta_log: float) -> float:
    """``ln sin(theta)`` from ``ln theta`` for ``0 < theta <= 1e-3``."""
    if theta_log < -300.0:
        return theta_log
    theta = math.exp(theta_log)
    return theta_log + math.log(math.sin(theta) / theta)


def rate_vs_separation(base: ScaleParams, j0: float, separations: Sequence[float],
                       theta_max: float = 1e-3) -> RateSweep:
    """Short-time transfer probability versus separation, in the log domain.

    The hopping amplitude is ``J(d) = J0 exp(-d / ell)``. One probe time is
    shared by every separation, chosen so that the phase ``J t / hbar`` equals
    ``theta_max`` at the smallest separation; every point is then in the
    small-angle regime where ``p = sin(theta)**2 ~ theta**2``.
    """
    if not j0 > 0:
        raise ValueError("J0 must be positive")
    if not 0 < theta_max <= 1e-3:
        raise ValueError("theta_max must lie in (0, 1e-3]")
    seps = np.asarray(separations, dtype=float)
    if seps.size == 0 or np.any(seps < 0):
        raise ValueError("separations must be non-negative")
    ell = suppression_length(base)
    kappa = 0.0 if math.isinf(ell) else 1.0 / ell
    log_j = math.log(j0) - seps * kappa
    log_t = math.log(theta_max) + math.log(CONSTANTS.hbar) - float(log_j.max())

    points = []
    for d, lj in zip(seps, log_j):
        ln_theta = float(lj) + log_t - math.log(CONSTANTS.hbar)
        ln_p = 2.0 * _log_sin(ln_theta)
        p = math.exp(ln_p)
        ent = 0.0 if p == 0.0 else float(-p * math.log2(p) - (1 - p) * math.log2(1 - p))
        points.append(RatePoint(float(d), float(lj), ln_p, ent, math.sqrt(p * (1 - p))))
    fit = None
    if len(points) >= 4:
        fit = fit_exponential([(pt.separation, pt.log_probability) for pt in points])
    return RateSweep(points, math.exp(log_t), fit, ell)

"""WKB action through classically forbidden regions of 1D barrier profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from os import PathLike

import numpy as np

from evanescent.scales import CONSTANTS

__all__ = [
    "BarrierProfile",
    "WkbResult",
    "wkb_action",
    "wkb_log_transmission",
    "read_profile",
]


@dataclass(frozen=True)
class BarrierProfile:
    """A 1D potential landscape for a particle of the given mass.

    Exactly one of ``segments`` (``(start, end, V)`` triples, piecewise
    constant) or ``samples`` (``(x, V)`` pairs, linearly interpolated) is set.
    Positions are in metres and energies in joules. Between segments and
    outside the profile the potential is zero.
    """

    mass: float
    segments: tuple[tuple[float, float, float], ...] | None = None
    samples: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if (self.segments is None) == (self.samples is None):
            raise ValueError("give exactly one of segments or samples")
        if self.segments is not None:
            segs = tuple((float(a), float(b), float(v)) for a, b, v in self.segments)
            if not segs:
                raise ValueError("segments must be non-empty")
            prev_end = -math.inf
            for a, b, v in segs:
                if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(v)):
                    raise ValueError("segment values must be finite")
                if not b > a:
                    raise ValueError(f"segment end {b} must exceed start {a}")
                if a < prev_end:
                    raise ValueError("segments must be ordered and non-overlapping")
                prev_end = b
            object.__setattr__(self, "segments", segs)
        else:
            pts = tuple((float(x), float(v)) for x, v in self.samples)
            if len(pts) < 2:
                raise ValueError("need at least two samples")
            xs = np.array([p[0] for p in pts])
            if not np.all(np.isfinite(xs)) or not np.all(np.diff(xs) > 0):
                raise ValueError("sample positions must be finite and strictly increasing")
            if not all(math.isfinite(p[1]) for p in pts):
                raise ValueError("sample potentials must be finite")
            object.__setattr__(self, "samples", pts)

    @classmethod
    def flat(cls, height: float, width: float, mass: float, start: float = 0.0):
        return cls(mass=mass, segments=((start, start + width, height),))

    @classmethod
    def from_arrays(cls, x, V, mass: float):
        return cls(mass=mass, samples=tuple(zip(np.asarray(x, float), np.asarray(V, float))))

    @property
    def extent(self) -> tuple[float, float]:
        if self.segments is not None:
            return self.segments[0][0], self.segments[-1][1]
        return self.samples[0][0], self.samples[-1][0]

    @property
    def max_potential(self) -> float:
        if self.segments is not None:
            return max(v for _, _, v in self.segments)
        return max(v for _, v in self.samples)

    def piecewise_constant(self, n_per_interval: int = 1):
        """Return ``(edges, values)`` of a piecewise-constant rendering.

        Segment profiles are returned as-is (gaps filled with zero); sampled
        profiles use midpoint values on ``n_per_interval`` cells per sample
        interval.
        """
        if self.segments is not None:
            edges, values = [self.segments[0][0]], []
            for a, b, v in self.segments:
                if a > edges[-1]:
                    values.append(0.0)
                    edges.append(a)
                values.append(v)
                edges.append(b)
            return np.array(edges), np.array(values)
        xs, vs = map(np.array, zip(*self.samples))
        fine = np.concatenate(
            [np.linspace(xs[i], xs[i + 1], n_per_interval + 1)[:-1] for i in range(len(xs) - 1)]
            + [xs[-1:]]
        )
        mids = 0.5 * (fine[1:] + fine[:-1])
        return fine, np.interp(mids, xs, vs)


@dataclass(frozen=True)
class WkbResult:
    """Action integral and derived log amplitude; prefactors are not included."""

    action: float
    log_amplitude: float
    turning_points: list[float] = field(default_factory=list)
    includes_prefactor: bool = False


def _segment_action(profile: BarrierProfile, energy: float):
    k_unit = math.sqrt(2.0 * profile.mass) / CONSTANTS.hbar
    action = 0.0
    intervals: list[list[float]] = []
    for a, b, v in profile.segments:
        if v <= energy:
            continue
        action += k_unit * math.sqrt(v - energy) * (b - a)
        if intervals and intervals[-1][1] == a:
            intervals[-1][1] = b
        else:
            intervals.append([a, b])
    return action, [x for iv in intervals for x in iv]


def _sampled_action(profile: BarrierProfile, energy: float):
    # Exact integral of sqrt(V - E) over the linear interpolant, panel by panel.
    xs, vs = map(np.array, zip(*profile.samples))
    f = vs - energy
    k_unit = math.sqrt(2.0 * profile.mass) / CONSTANTS.hbar
    f0, f1, dx = f[:-1], f[1:], np.diff(xs)
    pos0, pos1 = f0 > 0, f1 > 0

    action = 0.0
    both = pos0 & pos1
    if np.any(both):
        a, b = np.sqrt(f0[both]), np.sqrt(f1[both])
        action += np.sum((2.0 / 3.0) * dx[both] * (a * a + a * b + b * b) / (a + b))
    cross = pos0 ^ pos1
    crossings = []
    if np.any(cross):
        idx = np.nonzero(cross)[0]
        frac = f0[idx] / (f0[idx] - f1[idx])
        xt = xs[idx] + frac * dx[idx]
        crossings = list(zip(idx, xt))
        # forbidden length and the positive end value of each crossing panel
        width = np.where(pos0[idx], xt - xs[idx], xs[idx + 1] - xt)
        top = np.where(pos0[idx], f0[idx], f1[idx])
        action += np.sum((2.0 / 3.0) * width * np.sqrt(top))

    turning = [float(x) for _, x in crossings]
    if f[0] > 0:
        turning.insert(0, float(xs[0]))
    if f[-1] > 0:
        turning.append(float(xs[-1]))
    return k_unit * float(action), sorted(turning)


def wkb_action(profile: BarrierProfile, energy: float) -> WkbResult:
    """Return the dimensionless WKB action ``int sqrt(2m(V - E)) / hbar dx``.

    The integral runs over ``{x : V(x) > E}``. Piecewise-constant profiles are
    integrated in closed form; sampled profiles are integrated exactly on
    their linear interpolant with interpolated turning points. The returned
    turning points are the boundaries of the forbidden intervals. If the
    energy clears the whole profile the action is zero.
    """
    if not math.isfinite(energy):
        raise ValueError("energy must be finite")
    if profile.segments is not None:
        action, turning = _segment_action(profile, energy)
    else:
        action, turning = _sampled_action(profile, energy)
    return WkbResult(action=action, log_amplitude=-action, turning_points=turning)


def wkb_log_transmission(profile: BarrierProfile, energy: float) -> float:
    """Log of the WKB transmission probability, ``-2 * action``."""
    return -2.0 * wkb_action(profile, energy).action


def read_profile(path: str | PathLike, mass: float) -> BarrierProfile:
    """Read a two-column text profile (x in m, V in eV, ``#`` comments)."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns, found {data.shape[1]}")
    return BarrierProfile.from_arrays(data[:, 0], data[:, 1] * CONSTANTS.electron_volt, mass)


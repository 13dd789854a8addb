"""Least-squares exponential fits in the log domain."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = ["FitResult", "fit_exponential", "NO_DECAY"]

NO_DECAY = "no decay detected"


@dataclass(frozen=True)
class FitResult:
    """Straight-line fit of ``ln A`` against separation.

    ``decay_length`` is ``-1 / slope``; it is ``inf`` with ``status`` set to
    :data:`NO_DECAY` when the fitted slope is not negative.
    """

    decay_length: float
    intercept: float
    r_squared: float
    n_points: int
    residual_max: float
    slope: float
    status: str = "ok"

    @property
    def decays(self) -> bool:
        return self.status == "ok"

    def as_dict(self) -> dict:
        return {
            "decay_length": self.decay_length,
            "intercept": self.intercept,
            "slope": self.slope,
            "r_squared": self.r_squared,
            "n_points": self.n_points,
            "residual_max": self.residual_max,
            "status": self.status,
        }


def fit_exponential(samples: Iterable[tuple[float, float]]) -> FitResult:
    """Ordinary least squares on ``(d, ln A)`` pairs.

    At least four samples with distinct separations are required. The data
    are centred before solving so that separations of order ``1e-12`` m and
    log amplitudes of order ``1e5`` keep full precision.
    """
    pts = np.asarray(list(samples), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("samples must be (separation, log_amplitude) pairs")
    n = len(pts)
    if n < 4:
        raise ValueError(f"need at least 4 samples for a fit, got {n}")
    d, y = pts[:, 0], pts[:, 1]
    if len(np.unique(d)) != n:
        raise ValueError("separations must be distinct")
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(y))):
        raise ValueError("samples must be finite")

    d_mean, y_mean = d.mean(), y.mean()
    dc, yc = d - d_mean, y - y_mean
    slope = float(np.dot(dc, yc) / np.dot(dc, dc))
    intercept = float(y_mean - slope * d_mean)
    resid = yc - slope * dc
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(yc, yc))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    res_max = float(np.max(np.abs(resid)))

    if slope < 0:
        return FitResult(-1.0 / slope, intercept, r2, n, res_max, slope)
    return FitResult(math.inf, intercept, r2, n, res_max, slope, NO_DECAY)

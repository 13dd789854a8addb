"""Static matter correlator with a binding-shifted propagator pole.

Binding raises the propagator mass to ``m' = m + E_b / c**2`` while the
external states keep the bare mass, so the long-range exponentials no longer
cancel and the correlator decays at ``mu = sqrt(m'**2 - m**2) c / hbar``.
The static (Euclidean) form ``1 / (k**2 + mu**2)`` is used throughout.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from evanescent.scales import (
    CONSTANTS,
    ScaleParams,
    relative_decay_excess,
    relativistic_decay_rate,
)

__all__ = [
    "PropagatorParams",
    "CorrelatorSample",
    "NonrelConsistency",
    "QuadratureError",
    "pole_location",
    "decay_rate",
    "static_correlator_log",
    "correlator_quadrature",
    "nonrel_consistency",
    "analytic_fourier_log",
]

# E_b / (m c^2) above which the non-relativistic replacement is flagged
NONREL_LIMIT = 1e-2
MAX_QUADRATURE_DECAY = 30.0
_EPSREL_LADDER = (1e-8, 1e-10, 1e-12, 1e-14)


class QuadratureError(RuntimeError):
    def __init__(self, message, iterates=()):
        super().__init__(f"{message}; last iterates {list(iterates)}")
        self.iterates = tuple(iterates)


@dataclass(frozen=True)
class PropagatorParams:
    mass: float
    binding_energy: float
    spatial_dimension: int = 1

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if not self.binding_energy >= 0:
            raise ValueError("binding_energy must be non-negative")
        if self.spatial_dimension not in (1, 3):
            raise ValueError("spatial_dimension must be 1 or 3")

    @classmethod
    def from_ev(cls, mass, binding_energy_ev, spatial_dimension=1):
        return cls(mass, binding_energy_ev * CONSTANTS.electron_volt, spatial_dimension)

    def scale_params(self, separation: float = 0.0) -> ScaleParams:
        return ScaleParams(self.mass, self.binding_energy, separation)


@dataclass(frozen=True)
class CorrelatorSample:
    separation: float
    log_value: float
    method: str
    error_estimate: float = 0.0
    metadata: dict = field(default_factory=dict)


def pole_location(params: PropagatorParams) -> float:
    """Propagator pole ``k0 = m' c / hbar`` in 1/m."""
    shifted = params.mass + params.binding_energy / CONSTANTS.c**2
    return shifted * CONSTANTS.c / CONSTANTS.hbar


def decay_rate(params: PropagatorParams) -> float:
    return relativistic_decay_rate(params.scale_params())


def static_correlator_log(params: PropagatorParams, separation: float) -> CorrelatorSample:
    """Closed-form log of the static correlator at distance ``separation``.

    1D: ``-mu d``. 3D: ``-mu d - ln(d / d0)`` with ``d0 = 1 m`` (the Yukawa
    ``1/d`` prefactor), recorded in the sample metadata.
    """
    if params.spatial_dimension == 3 and separation == 0:
        raise ValueError("the 3D correlator is singular at zero separation")
    if not separation > 0:
        raise ValueError("separation must be positive")
    log_value = -separation * decay_rate(params)
    meta = {"spatial_dimension": params.spatial_dimension}
    if params.spatial_dimension == 3:
        log_value -= math.log(separation / 1.0)
        meta["reference_scale_m"] = 1.0
    return CorrelatorSample(separation, log_value, "analytic", 0.0, meta)


def _fourier_integral(decay: float, truncation: float, epsrel: float):
    """Real and imaginary parts of ``int exp(i u D) / (u**2 + 1) du`` over the real line.

    The symmetric window ``[-U, U]`` uses QUADPACK's oscillatory rule; the two
    tails beyond ``U`` use its Fourier-integral routine.
    """
    f = lambda u: 1.0 / (u * u + 1.0)  # noqa: E731
    core, core_err = integrate.quad(f, 0.0, truncation, weight="cos", wvar=decay,
                                    limit=500, epsabs=1e-3 * epsrel, epsrel=epsrel)
    tail, tail_err = integrate.quad(f, truncation, np.inf, weight="cos", wvar=decay,
                                    limlst=200, epsabs=1e-3 * epsrel)
    imag, _ = integrate.quad(f, -truncation, truncation, weight="sin", wvar=decay,
                             limit=500, epsabs=1e-3 * epsrel, epsrel=epsrel)
    return 2.0 * (core + tail), imag, 2.0 * (core_err + tail_err)


def correlator_quadrature(params: PropagatorParams, separation: float,
                          tolerance: float = 1e-8) -> CorrelatorSample:
    """Numerical ``int dk exp(ikd) / (k**2 + mu**2)`` (1D), returned as a log.

    Works in the scaled variable ``u = k / mu`` with truncation
    ``K = max(50 mu, 20 / d)``. The quadrature tolerance is tightened until
    two successive estimates agree to ``tolerance`` in relative terms (the
    same figure as an absolute tolerance on the log).
    """
    mu = decay_rate(params)
    if mu == 0.0:
        raise ValueError("mu = 0: the integrand 1/k^2 is not integrable (unbound limit)")
    if not separation > 0:
        raise ValueError("separation must be positive")
    d_scaled = mu * separation
    if d_scaled > MAX_QUADRATURE_DECAY:
        raise ValueError(f"mu*d = {d_scaled:.3g} exceeds {MAX_QUADRATURE_DECAY}")
    truncation = max(50.0, 20.0 / d_scaled)

    iterates = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for epsrel in _EPSREL_LADDER:
            real, imag, err = _fourier_integral(d_scaled, truncation, epsrel)
            iterates.append(real)
            if len(iterates) >= 2 and real > 0:
                change = abs(iterates[-1] - iterates[-2])
                if change <= tolerance * real:
                    break
        else:
            raise QuadratureError("correlator quadrature did not stabilise", iterates[-2:])

    log_value = math.log(real) - math.log(mu)
    meta = {
        "truncation_K": truncation * mu,
        "imag_part": imag / mu,
        "quad_error": err / mu,
        "mu_d": d_scaled,
    }
    return CorrelatorSample(separation, log_value, "quadrature", change / real, meta)


def analytic_fourier_log(params: PropagatorParams, separation: float) -> float:
    """Residue-theorem value ``ln(pi / mu) - mu d`` of the same integral."""
    mu = decay_rate(params)
    return math.log(math.pi / mu) - mu * separation


@dataclass(frozen=True)
class NonrelConsistency:
    relative_error: float
    first_order: float
    approximation_valid: bool
    flags: tuple[str, ...] = ()


def nonrel_consistency(params: PropagatorParams) -> NonrelConsistency:
    """Compare ``mu`` with the non-relativistic ``kappa``.

    ``(mu - kappa) / kappa`` is evaluated from its closed form so the
    ``~1e-10`` excess is not lost to cancellation.
    """
    if not params.binding_energy > 0:
        raise ValueError("binding_energy must be positive")
    sp = params.scale_params()
    ratio = params.binding_energy / (params.mass * CONSTANTS.c**2)
    valid = ratio <= NONREL_LIMIT
    flags = () if valid else ("non-relativistic approximation invalid",)
    return NonrelConsistency(relative_decay_excess(sp), 0.25 * ratio, valid, flags)

"""Physical constants and closed-form suppression scales.

Everything here is a pure function of a :class:`ScaleParams`. Amplitudes are
returned as natural logarithms: at micron separations ``d / ell`` is of order
``1e5`` and the linear amplitude is not representable in any float format.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "ScaleParams",
    "SuppressionEstimate",
    "evanescent_wavevector",
    "suppression_length",
    "log_suppression",
    "suppression_estimate",
    "shifted_mass",
    "relativistic_decay_rate",
    "relative_decay_excess",
    "linear_amplitude",
    "LINEAR_LOG_LIMIT",
]

# Linear amplitudes are only materialised below this |ln A|.
LINEAR_LOG_LIMIT = 700.0


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-2018 values in SI units."""

    hbar: float = 1.054571817e-34
    c: float = 2.99792458e8
    electron_volt: float = 1.602176634e-19


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class ScaleParams:
    """Constituent mass (kg), binding energy (J) and body separation (m)."""

    mass: float
    binding_energy: float
    separation: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise ValueError(f"mass must be positive and finite, got {self.mass!r}")
        if not (math.isfinite(self.binding_energy) and self.binding_energy >= 0):
            raise ValueError(
                f"binding_energy must be non-negative and finite, got {self.binding_energy!r}"
            )
        if not (math.isfinite(self.separation) and self.separation >= 0):
            raise ValueError(
                f"separation must be non-negative and finite, got {self.separation!r}"
            )

    @classmethod
    def from_ev(cls, mass: float, binding_energy_ev: float, separation: float = 0.0):
        """Build parameters with the binding energy quoted in eV."""
        return cls(mass, binding_energy_ev * CONSTANTS.electron_volt, separation)

    def with_separation(self, separation: float) -> "ScaleParams":
        return ScaleParams(self.mass, self.binding_energy, separation)


@dataclass(frozen=True)
class SuppressionEstimate:
    kappa: float
    ell: float
    log_amplitude: float


def evanescent_wavevector(params: ScaleParams) -> float:
    """Return ``sqrt(2 m E_b) / hbar`` in 1/m (zero for an unbound constituent)."""
    return math.sqrt(2.0 * params.mass * params.binding_energy) / CONSTANTS.hbar


def suppression_length(params: ScaleParams) -> float:
    """Return the e-folding length ``hbar / sqrt(2 m E_b)``.

    ``E_b = 0`` gives ``math.inf``: a free constituent is not suppressed.
    """
    kappa = evanescent_wavevector(params)
    if kappa == 0.0:
        return math.inf
    return 1.0 / kappa


def log_suppression(params: ScaleParams) -> float:
    """Return ``ln A = -d / ell`` for the separation stored in ``params``."""
    if params.binding_energy == 0.0 or params.separation == 0.0:
        return 0.0
    return -params.separation * evanescent_wavevector(params)


def suppression_estimate(params: ScaleParams) -> SuppressionEstimate:
    return SuppressionEstimate(
        kappa=evanescent_wavevector(params),
        ell=suppression_length(params),
        log_amplitude=log_suppression(params),
    )


def linear_amplitude(log_amplitude: float) -> float:
    """Exponentiate a log amplitude, refusing values that would under/overflow."""
    if abs(log_amplitude) >= LINEAR_LOG_LIMIT:
        raise OverflowError(
            f"|ln A| = {abs(log_amplitude):.6g} exceeds {LINEAR_LOG_LIMIT}; keep it in log form"
        )
    return math.exp(log_amplitude)


def shifted_mass(params: ScaleParams) -> float:
    """Effective propagator mass ``m + E_b / c**2``."""
    return params.mass + params.binding_energy / CONSTANTS.c**2


def relativistic_decay_rate(params: ScaleParams) -> float:
    """Decay rate ``sqrt(m'**2 - m**2) c / hbar`` of the shifted-pole correlator.

    The difference of squares is factored as ``(m' - m)(m' + m)`` with
    ``m' - m = E_b / c**2`` taken exactly, so there is no cancellation when
    ``E_b << m c**2``.
    """
    dm = params.binding_energy / CONSTANTS.c**2
    return math.sqrt(dm * (2.0 * params.mass + dm)) * CONSTANTS.c / CONSTANTS.hbar


def relative_decay_excess(params: ScaleParams) -> float:
    """``(mu - kappa) / kappa = sqrt(1 + E_b / (2 m c**2)) - 1`` without cancellation."""
    x = params.binding_energy / (2.0 * params.mass * CONSTANTS.c**2)
    return math.expm1(0.5 * math.log1p(x))

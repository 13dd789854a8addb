"""Exponential suppression of matter-mediated tunneling channels between bound bodies.

The package is organised as a set of small numerical modules:

- :mod:`evanescent.scales` -- constants and closed-form suppression quantities.
- :mod:`evanescent.wkb` -- WKB action over arbitrary 1D barrier profiles.
- :mod:`evanescent.schrodinger` -- finite-difference spectra, double-well
  splittings and transfer-matrix scattering.
- :mod:`evanescent.correlator` -- static propagator with a binding-shifted pole.
- :mod:`evanescent.entanglement` -- hopping-only entanglement generation.
- :mod:`evanescent.fitting` / :mod:`evanescent.harness` -- sweeps, exponential
  fits and report files (CLI in :mod:`evanescent.cli`).
"""

from evanescent.scales import (
    CONSTANTS,
    PhysicalConstants,
    ScaleParams,
    SuppressionEstimate,
    evanescent_wavevector,
    log_suppression,
    relativistic_decay_rate,
    shifted_mass,
    suppression_estimate,
    suppression_length,
)

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "PhysicalConstants",
    "ScaleParams",
    "SuppressionEstimate",
    "evanescent_wavevector",
    "log_suppression",
    "relativistic_decay_rate",
    "shifted_mass",
    "suppression_estimate",
    "suppression_length",
    "__version__",
]

"""
A heavier propagator leaves an exponential behind
=================================================

Binding raises the internal mass to m' = m + E_b / c^2 while the external
states keep m. The static correlator then decays at
mu = sqrt(m'^2 - m^2) c / hbar, which matches kappa up to E_b / (4 m c^2).
"""

from evanescent.correlator import (
    PropagatorParams,
    analytic_fourier_log,
    correlator_quadrature,
    decay_rate,
    nonrel_consistency,
)
from evanescent.scales import evanescent_wavevector

params = PropagatorParams.from_ev(1e-27, 1.0)
mu = decay_rate(params)
print(f"mu    = {mu:.12e} 1/m")
print(f"kappa = {evanescent_wavevector(params.scale_params()):.12e} 1/m")

nr = nonrel_consistency(params)
print(f"(mu - kappa)/kappa = {nr.relative_error:.6e}, E_b/(4 m c^2) = {nr.first_order:.6e}")

# Brute-force Fourier integral against the residue result
for md in (0.5, 1, 2, 5, 10):
    d = md / mu
    q = correlator_quadrature(params, d)
    exact = analytic_fourier_log(params, d)
    print(f"mu d = {md:4}   quadrature {q.log_value:.12f}   residue {exact:.12f}")

# The unbound limit has no pole shift and no decay
print("E_b = 0 decay rate:", decay_rate(PropagatorParams.from_ev(1e-27, 0.0)))

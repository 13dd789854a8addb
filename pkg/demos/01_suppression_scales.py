"""
How far does a bound particle reach?
====================================

A constituent bound by E_b must borrow that energy to leave its body, so its
amplitude outside decays as exp(-d / ell) with ell = hbar / sqrt(2 m E_b).
"""

import math

from evanescent.scales import (
    ScaleParams,
    linear_amplitude,
    log_suppression,
    suppression_estimate,
)

# An atom-scale mass bound by one electronvolt
params = ScaleParams.from_ev(mass=1e-27, binding_energy_ev=1.0)
est = suppression_estimate(params)
print(f"kappa = {est.kappa:.6e} 1/m")
print(f"ell   = {est.ell:.6e} m")

# Across a few picometres the amplitude is still appreciable
for d in (1e-12, 5e-12, 2e-11):
    la = log_suppression(params.with_separation(d))
    print(f"d = {d:.0e} m   ln A = {la:10.4f}   A = {linear_amplitude(la):.3e}")

# A micron gap needs the log domain: exp(-1.7e5) underflows any float
la = log_suppression(params.with_separation(1e-6))
print(f"d = 1e-06 m   ln A = {la:.6e}   log10 A = {la / math.log(10):.6e}")

# Without binding there is nothing to suppress
free = ScaleParams.from_ev(1e-27, 0.0, 1e-6)
print("E_b = 0:      ln A =", log_suppression(free))

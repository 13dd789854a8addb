"""
WKB action against exact transfer matrices
==========================================

For an opaque rectangular barrier ln T approaches -2 kappa a. The gap that
remains is the O(1) prefactor, which fades in relative terms as the barrier
widens.
"""

import math

import numpy as np

from evanescent.scales import CONSTANTS
from evanescent.schrodinger import transmission_numeric, transmission_rectangular
from evanescent.wkb import BarrierProfile, wkb_action

eV = CONSTANTS.electron_volt
m = 1e-27
V0, E = 1.0 * eV, 0.1 * eV
kappa = math.sqrt(2 * m * (V0 - E)) / CONSTANTS.hbar

print(" kappa*a    ln T exact     -2 kappa a    rel gap")
for ka in np.linspace(5, 30, 6):
    barrier = BarrierProfile.flat(V0, ka / kappa, m)
    exact = transmission_numeric(barrier, E).log_transmission
    wkb = -2 * wkb_action(barrier, E).action
    print(f"{ka:8.1f} {exact:13.5f} {wkb:13.5f} {abs(exact - wkb) / -wkb:10.4f}")

# The transfer-matrix product reproduces the closed form
a = 10 / kappa
print("closed form T :", transmission_rectangular(E, V0, a, m).transmission)
print("transfer T    :", transmission_numeric(BarrierProfile.flat(V0, a, m), E).transmission)

# A smooth barrier given as samples
x = np.linspace(-3e-11, 3e-11, 61)
bump = BarrierProfile.from_arrays(x, V0 * np.exp(-(x / 1e-11) ** 2), m)
res = wkb_action(bump, E)
print("gaussian bump action:", res.action, "turning points:", res.turning_points)

"""
Entanglement from hopping alone
===============================

The Hamiltonian only moves a particle between two bodies. There is no
interaction term, yet the bodies end up entangled, and the rate at which
this happens inherits the tunneling suppression twice over.
"""

import math

import numpy as np

from evanescent.entanglement import (
    mode_entanglement_demo,
    rate_vs_separation,
    spectator_transfer_demo,
)
from evanescent.scales import CONSTANTS, ScaleParams, suppression_length

eV, hbar = CONSTANTS.electron_volt, CONSTANTS.hbar
J = 0.01 * eV

# One particle starting in body A
print(" Jt/hbar   P(B)    entropy  negativity")
for phase in np.linspace(0, math.pi / 2, 5):
    rep = mode_entanglement_demo(J, phase * hbar / J)
    print(f"{phase:8.4f} {rep.transfer_probability:7.4f} {rep.entropy:8.4f} "
          f"{rep.negativity:10.4f}")

# A particle that is entangled with a spectator in A carries that
# entanglement over to B as it hops
full = spectator_transfer_demo(J, 0.5 * math.pi * hbar / J)
print("spectator negativity after full transfer:", full.negativity)

# Short-time transfer probability scales as J(d)^2, so as exp(-2 d / ell)
base = ScaleParams.from_ev(1e-27, 1.0)
ell = suppression_length(base)
sweep = rate_vs_separation(base, J, np.linspace(1, 20, 20) * ell)
print(f"fitted decay length / ell = {sweep.fit.decay_length / ell:.9f}")
print(f"ln p at d = 20 ell: {sweep.points[-1].log_probability:.3f}")

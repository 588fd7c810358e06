"""
Fidelity and entanglement fidelity
==================================

Ordinary fidelity asks how close the output is to the input. Entanglement
fidelity asks how well a purification of the input survives when only its
second half goes through the channel. It never exceeds the ordinary fidelity
and does not depend on which purification is used.
"""

import numpy as np

from qudit_teleport import (
    apply_channel,
    ent_fidelity_lambda,
    entanglement_fidelity,
    haar_unitary,
    hs_mixed,
    make_rng,
    purify,
    teleport_channel,
    uhlmann_fidelity,
)

rng = make_rng(7)
d = 2
ch = teleport_channel(hs_mixed(d * d, rng))
print("singlet fraction of the resource:", round(ch.singlet_fraction, 4))

print(f"\n{'F(rho, eps(rho))':>18} {'F_e':>8} {'F_e (lambda)':>13}")
for _ in range(6):
    rho = hs_mixed(d, rng)
    f = uhlmann_fidelity(rho, apply_channel(ch, rho))
    fe = entanglement_fidelity(rho, ch)
    fe_fast = ent_fidelity_lambda(purify(rho), ch)
    print(f"{f:18.6f} {fe:8.6f} {fe_fast:13.6f}")

###############################################################################
# Rotating the reference half of the purification leaves F_e unchanged.
rho = hs_mixed(d, rng)
phi = purify(rho)
rotated = np.kron(haar_unitary(d, rng), np.eye(d)) @ phi
print("\nF_e with canonical purification:", entanglement_fidelity(rho, ch))
print("F_e with rotated purification:  ", entanglement_fidelity(rho, ch, purification=rotated))

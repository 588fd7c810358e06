"""
Haar averages against the closed forms
======================================

Average fidelity over Haar-random pure inputs and average entanglement
fidelity over Haar-random bipartite pure states both depend on the resource
only through its singlet fraction f:

    avg F   = (d f + 1) / (d + 1)
    avg F_e = (d^2 f + 1) / (d^2 + 1)

Here both are estimated by Monte Carlo across the isotropic family.
"""

import numpy as np

from qudit_teleport import (
    avg_ent_fidelity_closed,
    avg_fidelity_closed,
    haar_pure,
    isotropic,
    mc_estimate,
    random_density,
    teleport_channel,
)
from qudit_teleport.fidelity import channel_fidelity_batch, ent_fidelity_batch

N = 100_000
SEED = 42

for d in (2, 3):
    print(f"\nd = {d}")
    print(f"{'resource':>16} {'f':>7} {'avg F (MC)':>20} {'closed':>7} {'avg F_e (MC)':>20} {'closed':>7}")
    resources = [(f"isotropic({p})", isotropic(d, p)) for p in (0.0, 0.25, 0.5, 0.75)]
    resources.append(("random", random_density(d * d, 3)))
    for name, chi in resources:
        ch = teleport_channel(chi)
        f = ch.singlet_fraction
        fid = mc_estimate(lambda g, k: haar_pure(d, g, size=k),
                          lambda b: channel_fidelity_batch(b, ch), N, SEED)
        ent = mc_estimate(lambda g, k: haar_pure(d * d, g, size=k),
                          lambda b: ent_fidelity_batch(b, ch), N, SEED)
        print(f"{name:>16} {f:7.4f} {fid.mean:10.5f} +- {fid.stderr:.1e} "
              f"{avg_fidelity_closed(f, d):7.4f} {ent.mean:10.5f} +- {ent.stderr:.1e} "
              f"{avg_ent_fidelity_closed(f, d):7.4f}")

###############################################################################
# On isotropic resources every pure input sees the same fidelity, which is
# why those rows show a zero standard error for avg F.

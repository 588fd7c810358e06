"""
The twirling argument, numerically
==================================

lambda_nm(phi) = |<phi| I (x) U^{n,-m} |phi>|^2 is an expectation of
mu_nm = I (x) U^{n,-m} (x) I (x) U^{n,-m}^dagger on two copies of phi. Its
Haar average splits into identity and swap parts whose weights come from
Tr(mu) and Tr(mu F). Every (n, m) other than (0, 0) averages to 1/(d^2 + 1).
"""

import numpy as np

from qudit_teleport import alpha_beta, alpha_beta_explicit, mu_nm, twirl_integral_mc
from qudit_teleport import swap_operator, verify_trace_identities
from qudit_teleport.weyl import weyl_indices

for d in (2, 3):
    report = verify_trace_identities(d)
    print(f"d={d}: trace identities max deviation {report.max_deviation:.1e}")

d = 2
swap = swap_operator(d * d)
print(f"\n d={d}  (n,m)  Tr(mu)   Tr(mu F)   alpha     beta    explicit?   MC estimate")
for idx, (n, m) in enumerate(weyl_indices(d)):
    mu = mu_nm(d, n, m)
    c = alpha_beta(d, n, m)
    same = np.isclose(c.alpha, alpha_beta_explicit(d, n, m).alpha)
    est = twirl_integral_mc(d, n, m, 100_000, seed=1, stream=idx)
    print(f"      ({n},{m})  {np.trace(mu).real:6.1f}  {np.trace(mu @ swap).real:8.1f}"
          f"  {c.alpha:8.4f} {c.beta:8.4f}    {str(same):>5}    {est.mean:.4f} +- {est.stderr:.4f}")
print("expected off-diagonal value 1/(d^2+1) =", 1 / (d * d + 1))

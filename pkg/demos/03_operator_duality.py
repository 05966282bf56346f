"""The duality on the level of operators.

The qKZ operators of the pair (M_m1 x L_m2) at weight level l2 are carried by
phi to the dynamical difference operators of (M_l1 x L_l2) at level m2, up to
the scalar G. Likewise, the dynamical differential operators go to the KZ
operators. Each family also commutes with its partner family.
"""

import numpy as np

from qhdual.glrep import check_commutation, check_intertwining, duality_pair, random_point

rng = np.random.default_rng(0)
m1, kappa = -0.6 + 0.2j, 1.37
for m2, l2 in [(1, 1), (2, 1), (2, 2)]:
    src, tgt = duality_pair(m1, m2, l2)
    z, lam = random_point(rng)
    print(f"(m2, l2) = ({m2}, {l2}): dim {src.dim}, basis {src.basis} -> {tgt.basis}")
    for pairing in ("Z_vs_Z", "Q_vs_Q", "nabla_vs_Q", "Z_vs_D"):
        print(f"  [{pairing}] residual {check_commutation(pairing, z, lam, src, kappa):.1e}")
    for which in ("qKZ_vs_Q", "D_vs_KZ"):
        print(f"  phi intertwines {which}: residual {check_intertwining(which, m1, m2, l2, z, lam, kappa):.1e}")

"""The connection matrix between the I and J bases is diagonal.

Solving X J = I G^T for G recovers a diagonal matrix. It does not change under
z -> z - kappa, and its mu-dependence is that of 1/Y.
"""

import cmath

import numpy as np

from qhdual import QuadConfig, connection_matrix, make_params
from qhdual.duality import log_Y

cfg = QuadConfig(rel_tol=1e-8)
p = make_params(-0.6 + 0.2j, 2, 2, 1.37, -30 + 0.4j, 1.3j)
c = connection_matrix(p, cfg)
np.set_printoptions(precision=4, linewidth=120)
print("G =\n", c["G"])
print("expected diagonal", c["expected_diagonal"])
print(f"off-diagonal / |G| = {c['offdiag_rel']:.1e}, condition number {c['condition_number']:.1e}")
c2 = connection_matrix(p.with_(z=p.z - p.kappa), cfg)
print(f"z -> z - kappa changes G by {np.max(np.abs(c['G'] - c2['G'])) / np.max(np.abs(c['G'])):.1e}")
c3 = connection_matrix(p.with_(mu=2.1j), cfg)
print("G(mu1)/G(mu2) diagonal:", np.diag(c["G"]) / np.diag(c3["G"]))
print("Y(mu2)/Y(mu1):         ", cmath.exp(log_Y(2.1j, p) - log_Y(1.3j, p)))

"""A one-dimensional Barnes integral collapses to a Gauss hypergeometric function.

With m2 = l2 = 1 the I side is a single Mellin-Barnes integral. Its value is a
gamma-function prefactor times 2F1(alpha, beta; gamma; e^mu). We evaluate the
integral by quadrature and compare it with the power series.
"""

from qhdual import I_matrix, QuadConfig, gauss_reduction, make_params

for m1, kappa, z, mu in [(-0.6, 1.0, -1.1 + 0.3j, -1 + 1.5j), (-0.4 + 0.1j, 1.37, -0.8 - 0.2j, -0.7 + 2.0j)]:
    p = make_params(m1, 1, 1, kappa, z, mu)
    g = gauss_reduction(p)
    val = I_matrix(p, QuadConfig(rel_tol=1e-10), [0], [0]).value[0, 0]
    print(f"kappa={kappa}  alpha={g['alpha']:.3f} beta={g['beta']:.3f} gamma={g['gamma']:.3f}")
    print(f"  quadrature   {val:.12e}")
    print(f"  2F1 series   {g['I00']:.12e}")
    print(f"  rel. diff    {abs(val - g['I00']) / abs(g['I00']):.1e}")

"""Leading asymptotics of I and J as Re z goes to -infinity.

The deviation from the leading term falls like 1/|z|. Its next correction
decides whether doubling |z| cuts it by a little more or a little less than
half. At this parameter point the ratios sit slightly above 1/2 and approach
1/2 as |z| grows.
"""

import warnings

from qhdual import I_asymptotic, I_matrix, QuadConfig, make_params

warnings.simplefilter("ignore", RuntimeWarning)
cfg = QuadConfig(rel_tol=1e-9)
for m2, l2 in [(1, 1), (2, 2)]:
    prev = None
    for x in (-40, -80, -160):
        p = make_params(-0.6 + 0.2j, m2, l2, 1.37, complex(x, 0.4), -0.8 + 1.3j)
        I = I_matrix(p, cfg).value
        dev = max(abs(I[b, b] / I_asymptotic(p, b, b) - 1) for b in range(min(m2, l2) + 1))
        note = f"  ratio to previous {dev / prev:.3f}" if prev else ""
        print(f"(m2,l2)=({m2},{l2}) Re z={x:5d}: max deviation {dev:.3e}  (5/|z| = {5 / abs(x):.3e}){note}")
        prev = dev

"""Monte-Carlo oracle for the polar-to-Cartesian moment formulas.

Draws r ~ N(r_mean, sigma_r^2), th ~ N(th_mean, sigma_th^2) independently
and measures mean/variance of x = r cos(th) with 2e7 samples, printing
frozen reference values (with standard errors) for three tuples used in
tests/test_uncertainty.py.  Uses numpy only; the analytic formulas under
test are NOT imported.
"""

import numpy as np

TUPLES = [
    (20.0, 0.5, 0.3, 0.05),
    (10.0, 1.0, 0.8, 0.02),
    (5.0, 0.1, 1.2, 0.10),
]

N = 20_000_000
for i, (rm, sr, tm, st) in enumerate(TUPLES):
    rng = np.random.default_rng(1000 + i)
    r = rng.normal(rm, sr, N)
    t = rng.normal(tm, st, N)
    x = r * np.cos(t)
    mean = float(x.mean())
    var = float(x.var())
    se_mean = float(x.std() / np.sqrt(N))
    # SE of the sample variance via the fourth central moment
    m4 = float(((x - mean) ** 4).mean())
    se_var = float(np.sqrt((m4 - var ** 2) / N))
    print(f"(r={rm}, sr={sr}, th={tm}, st={st}):")
    print(f"  mean = {mean:.10f}  (se {se_mean:.2e})")
    print(f"  var  = {var:.10f}  (se {se_var:.2e})")

"""High-precision oracle for the three estimation floors.

Evaluates the closed forms at a reference point (n_s = 256, gamma = 100,
theta = 0.3, 8 array rows, half-wavelength spacing, zero tilt) with mpmath
at 50 digits:

    sigma_r     = c / (4 pi delta_f) * sqrt(6 / ((n_s^2 - 1) gamma))
    sigma_v     = c / (4 pi f_c T0)  * sqrt(6 / ((M^2  - 1) gamma))
    sigma_fx    = sqrt(6 / ((R^2 - 1) 4 pi^2 gamma))
    ell         = (d / lambda) sin(theta)          (tilt = 0)
    sigma_theta = asin((lambda / d) (ell + sigma_fx)) - theta

Prints frozen values for tests/test_sensing.py.
"""

from mpmath import mp, mpf, pi, sqrt, asin, sin

mp.dps = 50

c = mpf("299792458.0")
f_c = mpf("28e9")
delta_f = mpf("120e3")
T0 = mpf("8.92e-6")
M = 128
R = 8
n_s = 256
gamma = mpf(100)
theta = mpf("0.3")
lam = c / f_c
d = lam / 2

sigma_r = c / (4 * pi * delta_f) * sqrt(6 / ((mpf(n_s) ** 2 - 1) * gamma))
sigma_v = c / (4 * pi * f_c * T0) * sqrt(6 / ((mpf(M) ** 2 - 1) * gamma))
sigma_fx = sqrt(6 / ((mpf(R) ** 2 - 1) * 4 * pi ** 2 * gamma))
ell = d / lam * sin(theta)
sigma_theta = asin(lam / d * (ell + sigma_fx)) - theta
print("sigma_r     =", mp.nstr(sigma_r, 17))
print("sigma_v     =", mp.nstr(sigma_v, 17))
print("sigma_fx    =", mp.nstr(sigma_fx, 17))
print("sigma_theta =", mp.nstr(sigma_theta, 17))

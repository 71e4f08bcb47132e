"""Bin-mapping oracle for the periodogram peak location.

For a pure target at range r and radial velocity v, the zero-padded
periodogram peaks at the integer bins nearest

    n = 2 r delta_f N_per / c          (delay axis,  N_per = 6400)
    m = 2 v f_c T0 M_per / c           (Doppler axis, M_per = 5120)

so the recovered values are quantized to bin widths
c / (2 delta_f N_per) = 0.195 m and c / (2 f_c T0 M_per) = 0.117 m/s.
Prints the expected peak bins and quantized readbacks for the test grid.
Pure integer/float arithmetic, no package import.
"""

c = 299792458.0
f_c = 28e9
delta_f = 120e3
T0 = 8.92e-6
N_per = 6400
M_per = 5120

print(f"range bin width    = {c / (2 * delta_f * N_per):.10f} m")
print(f"velocity bin width = {c / (2 * f_c * T0 * M_per):.10f} m/s")
print()
for r in (5.0, 10.0, 20.0, 30.0):
    n_exact = 2 * r * delta_f * N_per / c
    n_bin = round(n_exact)
    r_back = n_bin * c / (2 * delta_f * N_per)
    print(f"r={r:5.1f}  n_exact={n_exact:10.4f}  n_bin={n_bin:4d}  readback={r_back:.6f}")
print()
for v in (0.0, 2.0, 5.0, -3.0):
    m_exact = 2 * v * f_c * T0 * M_per / c
    m_bin = round(m_exact)
    v_back = m_bin * c / (2 * f_c * T0 * M_per)
    print(f"v={v:5.1f}  m_exact={m_exact:10.4f}  m_bin={m_bin:4d}  readback={v_back:.6f}")

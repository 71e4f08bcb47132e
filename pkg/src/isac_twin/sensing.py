"""Mono-static OFDM radar: link budget, frame synthesis, periodogram, CRBs.

A frame is the n_s x M grid of received symbols {F(n, m)} for one sensing
burst (n indexes subcarriers, m indexes OFDM symbols).  The point-scatter
two-way amplitude is

    b^2 = c^2 * rcs / ((4 pi)^3 * r^4 * f_c^2)

so the received power is P_rx = P_tx * G_tx * G_rx * b^2 and the sensing SNR

    gamma_s = P_rx * M / (N0 * F * delta_f)

is independent of n_s (total transmit power is split across the scheduled
subcarriers, and the noise bandwidth scales with them; the two cancel).
Each frame element carries amplitude sqrt(P_tx*G_tx*G_rx/n_s)*b, phase
ramps exp(+j 2 pi m T0 f_D) * exp(-j 2 pi n tau delta_f) with tau = 2r/c and
f_D = 2 v f_c / c, a common random phase, and i.i.d. complex Gaussian noise
of per-element power N0*F*delta_f.  With this normalization the
single-tone estimation bounds evaluate exactly to

    sigma_r     = c / (4 pi delta_f)    * sqrt(6 / ((n_s^2 - 1) gamma_s))
    sigma_v     = c / (4 pi f_c T0)     * sqrt(6 / ((M^2   - 1) gamma_s))
    sigma_theta = asin((lam/d_col) cos(tilt) (l + sigma_fx)) - theta,
                  l = d_col sin(theta) / (lam cos(tilt)),
                  sigma_fx^2 = 6 / ((R^2 - 1) * 4 pi^2 * gamma_s)

and the frame-level processing gain of the periodogram equals gamma_s.

The range/Doppler periodogram zero-pads to an (n_per, m_per) grid:

    Per(n, m) = | sum_k ( sum_l F(k, l) e^{-j2pi l m / m_per} ) e^{+j2pi k n / n_per} |^2 / (n_s M)

and the peak bin maps back through

    range_est    = n_hat * c / (2 delta_f n_per)
    velocity_est = m_hat * c / (2 f_c T0 m_per)

with Doppler indices above m_per/2 read as negative (receding target).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.fft

from .units import SPEED_OF_LIGHT, db_to_linear, dbm_to_watt


class DegenerateCrbError(ValueError):
    """Raised when n_s < 2 makes the range bound undefined."""


class AngleSaturatedError(ValueError):
    """Raised when the angle bound's asin argument exceeds 1."""


@dataclass(frozen=True)
class OfdmConfig:
    """Waveform, link-budget and array constants for the joint link.

    Defaults follow the 28 GHz / 120 kHz / 512-subcarrier numerology.
    ``rcs`` (m^2) and ``noise_density`` (W/Hz) are free constants; scenario
    calibration may override ``rcs``.
    """

    f_c: float = 28e9                # carrier (Hz)
    delta_f: float = 120e3           # subcarrier spacing (Hz)
    n_subcarriers: int = 512         # total subcarriers N
    n_symbols: int = 128             # symbols per frame M
    symbol_duration: float = 8.92e-6  # T0 incl. cyclic prefix (s)
    tx_power: float = dbm_to_watt(25.0)    # W
    tx_gain: float = db_to_linear(33.0)
    rx_gain: float = db_to_linear(3.0)
    noise_figure: float = db_to_linear(8.0)
    noise_density: float = dbm_to_watt(-174.0)  # N0 (W/Hz)
    rcs: float = 1.0                 # radar cross section (m^2)
    n_per: int = 6400                # periodogram delay bins
    m_per: int = 5120                # periodogram Doppler bins
    array_rows: int = 8              # R (rows enter the angle bound)
    array_cols: int = 8
    row_spacing: Optional[float] = None  # default half wavelength
    col_spacing: Optional[float] = None

    def __post_init__(self):
        if self.f_c <= 0 or self.delta_f <= 0:
            raise ValueError("carrier and subcarrier spacing must be positive")
        if self.n_subcarriers < 2 or self.n_symbols < 2:
            raise ValueError("need at least 2 subcarriers and 2 symbols")
        if self.symbol_duration * self.delta_f < 1.0:
            raise ValueError("symbol duration must cover 1/delta_f (cyclic prefix)")
        if min(self.tx_power, self.tx_gain, self.rx_gain, self.noise_figure,
               self.noise_density, self.rcs) <= 0:
            raise ValueError("powers, gains, noise constants and rcs must be positive")
        if self.n_per < self.n_subcarriers or self.m_per < self.n_symbols:
            raise ValueError("periodogram grid must not truncate the frame")
        if self.array_rows < 2 or self.array_cols < 2:
            raise ValueError("array needs at least 2 rows and 2 columns")
        half_lam = 0.5 * SPEED_OF_LIGHT / self.f_c
        if self.row_spacing is None:
            object.__setattr__(self, "row_spacing", half_lam)
        if self.col_spacing is None:
            object.__setattr__(self, "col_spacing", half_lam)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c

    def with_rcs(self, rcs: float) -> "OfdmConfig":
        return replace(self, rcs=rcs)


@dataclass(frozen=True)
class CrbBundle:
    sigma_r: float       # range std (m)
    sigma_v: float       # radial-velocity std (m/s)
    sigma_theta: float   # elevation std (rad)


@dataclass
class PeriodogramResult:
    power: np.ndarray    # (n_per, m_per), scaled by 1/(n_s*M)
    n_hat: int
    m_hat: int           # raw peak bin, in [0, m_per)
    range_est: float
    velocity_est: float  # signed, Doppler wrap resolved
    peak_power: float


def two_way_amplitude_sq(cfg: OfdmConfig, range_m: float) -> float:
    """b^2 for a point scatterer at the given one-way range."""
    if range_m <= 0:
        raise ValueError("range must be positive")
    return (SPEED_OF_LIGHT ** 2 * cfg.rcs
            / ((4.0 * math.pi) ** 3 * range_m ** 4 * cfg.f_c ** 2))


def received_power(cfg: OfdmConfig, range_m: float) -> float:
    """Total reflected power at the radar receiver (W)."""
    return cfg.tx_power * cfg.tx_gain * cfg.rx_gain * two_way_amplitude_sq(cfg, range_m)


def sensing_snr(cfg: OfdmConfig, range_m: float) -> float:
    """Frame-level sensing SNR gamma_s (linear). Independent of n_s."""
    return received_power(cfg, range_m) * cfg.n_symbols / (
        cfg.noise_density * cfg.noise_figure * cfg.delta_f)


def synthesize_frame(cfg: OfdmConfig, n_s: int, range_m: float, velocity_mps: float,
                     rng, noise: bool = True) -> np.ndarray:
    """Received frame for one scatterer: complex128 array of shape (n_s, M).

    ``rng`` is a numpy Generator or an int seed.  Draw order is fixed
    (common phase first, then the noise block), so a given seed reproduces
    the matrix bit for bit.
    """
    if n_s < 1:
        raise ValueError("n_s must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    amp = math.sqrt(cfg.tx_power * cfg.tx_gain * cfg.rx_gain / n_s
                    * two_way_amplitude_sq(cfg, range_m))
    tau = 2.0 * range_m / SPEED_OF_LIGHT
    f_d = 2.0 * velocity_mps * cfg.f_c / SPEED_OF_LIGHT
    psi = rng.uniform(0.0, 2.0 * math.pi)
    n = np.arange(n_s)[:, None]
    m = np.arange(cfg.n_symbols)[None, :]
    phase = (2.0 * math.pi * (m * cfg.symbol_duration * f_d - n * tau * cfg.delta_f)
             + psi)
    frame = amp * np.exp(1j * phase)
    if noise:
        sigma = math.sqrt(cfg.noise_density * cfg.noise_figure * cfg.delta_f / 2.0)
        z = rng.standard_normal((n_s, cfg.n_symbols)) \
            + 1j * rng.standard_normal((n_s, cfg.n_symbols))
        frame = frame + sigma * z
    return frame


def periodogram(frame: np.ndarray, cfg: OfdmConfig) -> PeriodogramResult:
    """Zero-padded range/Doppler periodogram and its peak estimates.

    Computed in single precision (the peak search only needs ~7 digits and
    the full grid is 3e7 bins); the long delay transform runs along the
    contiguous axis for speed.
    """
    n_s, n_sym = frame.shape
    if n_s > cfg.n_per or n_sym > cfg.m_per:
        raise ValueError("frame larger than the periodogram grid")
    f32 = np.ascontiguousarray(frame, dtype=np.complex64)
    doppler = scipy.fft.fft(f32, n=cfg.m_per, axis=1)          # e^{-j2pi l m / m_per}
    doppler_t = np.ascontiguousarray(doppler.T)                # (m_per, n_s)
    delay = scipy.fft.ifft(doppler_t, n=cfg.n_per, axis=1)     # e^{+j2pi k n / n_per}, 1/n_per
    power_t = delay.real ** 2 + delay.imag ** 2                # (m_per, n_per)
    power_t *= cfg.n_per ** 2 / (n_s * n_sym)                  # undo ifft norm, apply 1/(n_s M)
    flat = int(np.argmax(power_t))
    m_hat, n_hat = divmod(flat, cfg.n_per)
    m_signed = m_hat - cfg.m_per if m_hat > cfg.m_per // 2 else m_hat
    range_est = n_hat * SPEED_OF_LIGHT / (2.0 * cfg.delta_f * cfg.n_per)
    velocity_est = m_signed * SPEED_OF_LIGHT / (2.0 * cfg.f_c * cfg.symbol_duration * cfg.m_per)
    return PeriodogramResult(power=power_t.T, n_hat=n_hat, m_hat=m_hat,
                             range_est=range_est, velocity_est=velocity_est,
                             peak_power=float(power_t[m_hat, n_hat]))


def range_bin_width(cfg: OfdmConfig) -> float:
    return SPEED_OF_LIGHT / (2.0 * cfg.delta_f * cfg.n_per)


def velocity_bin_width(cfg: OfdmConfig) -> float:
    return SPEED_OF_LIGHT / (2.0 * cfg.f_c * cfg.symbol_duration * cfg.m_per)


def crb_bundle(cfg: OfdmConfig, n_s: int, gamma_s: float, theta_mean: float,
               tilt: float = 0.0) -> CrbBundle:
    """Estimation-error floors for range, radial velocity and elevation.

    theta_mean is the operating elevation the angle bound is linearized at.
    Raises DegenerateCrbError for n_s < 2 and AngleSaturatedError when the
    perturbed angle leaves the field of view (asin argument above 1).
    """
    if n_s < 2:
        raise DegenerateCrbError("range bound undefined for n_s < 2")
    if gamma_s <= 0:
        raise ValueError("gamma_s must be positive")
    sigma_r = (SPEED_OF_LIGHT / (4.0 * math.pi * cfg.delta_f)
               * math.sqrt(6.0 / ((n_s ** 2 - 1) * gamma_s)))
    m = cfg.n_symbols
    sigma_v = (SPEED_OF_LIGHT / (4.0 * math.pi * cfg.f_c * cfg.symbol_duration)
               * math.sqrt(6.0 / ((m ** 2 - 1) * gamma_s)))
    r_rows = cfg.array_rows
    sigma_fx = math.sqrt(6.0 / ((r_rows ** 2 - 1) * 4.0 * math.pi ** 2 * gamma_s))
    lam = cfg.wavelength
    ell = cfg.col_spacing * math.sin(theta_mean) / (lam * math.cos(tilt))
    arg = (lam / cfg.col_spacing) * math.cos(tilt) * (ell + sigma_fx)
    if abs(arg) > 1.0:
        raise AngleSaturatedError("angle uncertainty saturates the field of view")
    sigma_theta = math.asin(arg) - theta_mean
    return CrbBundle(sigma_r=sigma_r, sigma_v=sigma_v, sigma_theta=sigma_theta)

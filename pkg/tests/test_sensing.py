import math

import numpy as np
import pytest

from isac_twin.sensing import (AngleSaturatedError, DegenerateCrbError,
                               OfdmConfig, crb_bundle, periodogram,
                               range_bin_width, received_power, sensing_snr,
                               synthesize_frame, two_way_amplitude_sq,
                               velocity_bin_width)

CFG = OfdmConfig()  # rcs = 1

# frozen from tests/oracles/gen_sensing_snr.py (mpmath, 50 digits)
GAMMA_S_20M_RCS1 = 19302096.923196003
B_SQ_20M_RCS1 = 3.6105699928809136e-13

# frozen from tests/oracles/gen_crb.py (n_s=256, gamma=100, theta=0.3)
SIGMA_R_REF = 0.19022542635640977
SIGMA_V_REF = 0.18279607349790418
SIGMA_THETA_REF = 0.010299097111689676

# frozen from tests/oracles/gen_bins.py
RANGE_BIN = 0.1951773815
VELOCITY_BIN = 0.1172189591


def test_two_way_amplitude_against_oracle():
    assert two_way_amplitude_sq(CFG, 20.0) == pytest.approx(B_SQ_20M_RCS1, rel=1e-12)


def test_snr_against_oracle():
    assert sensing_snr(CFG, 20.0) == pytest.approx(GAMMA_S_20M_RCS1, rel=1e-12)


def test_snr_fourth_power_range_law():
    assert sensing_snr(CFG, 10.0) / sensing_snr(CFG, 20.0) == pytest.approx(16.0, rel=1e-12)
    assert sensing_snr(CFG, 40.0) / sensing_snr(CFG, 20.0) == pytest.approx(1 / 16.0, rel=1e-12)


def test_snr_identity_with_received_power():
    # gamma_s * N0 * F * df == P_rx * M by construction
    lhs = sensing_snr(CFG, 13.0) * CFG.noise_density * CFG.noise_figure * CFG.delta_f
    assert lhs == pytest.approx(received_power(CFG, 13.0) * CFG.n_symbols, rel=1e-12)


def test_snr_linear_in_rcs():
    big = CFG.with_rcs(2.5)
    assert sensing_snr(big, 20.0) / sensing_snr(CFG, 20.0) == pytest.approx(2.5, rel=1e-12)


def test_crb_against_oracle():
    crb = crb_bundle(CFG, 256, 100.0, 0.3)
    assert crb.sigma_r == pytest.approx(SIGMA_R_REF, rel=1e-12)
    assert crb.sigma_v == pytest.approx(SIGMA_V_REF, rel=1e-12)
    assert crb.sigma_theta == pytest.approx(SIGMA_THETA_REF, rel=1e-12)


def test_crb_scalings():
    base = crb_bundle(CFG, 64, 50.0, 0.4)
    # range bound scales as 1/sqrt(n_s^2 - 1), velocity bound not at all
    double = crb_bundle(CFG, 128, 50.0, 0.4)
    assert double.sigma_r / base.sigma_r == pytest.approx(
        math.sqrt((64 ** 2 - 1) / (128 ** 2 - 1)), rel=1e-12)
    assert double.sigma_v == base.sigma_v
    # everything scales as 1/sqrt(gamma) except the angle bound (nonlinear map)
    quad = crb_bundle(CFG, 64, 200.0, 0.4)
    assert quad.sigma_r / base.sigma_r == pytest.approx(0.5, rel=1e-12)
    assert quad.sigma_v / base.sigma_v == pytest.approx(0.5, rel=1e-12)
    assert quad.sigma_theta < base.sigma_theta


def test_crb_raises_degenerate():
    with pytest.raises(DegenerateCrbError):
        crb_bundle(CFG, 1, 100.0, 0.3)
    with pytest.raises(ValueError):
        crb_bundle(CFG, 64, 0.0, 0.3)


def test_crb_raises_angle_saturation():
    # near-grazing geometry with almost no SNR pushes asin out of range
    with pytest.raises(AngleSaturatedError):
        crb_bundle(CFG, 64, 1e-9, 1.5)


def test_frame_shape_and_determinism():
    f1 = synthesize_frame(CFG, 32, 15.0, 2.0, rng=7)
    f2 = synthesize_frame(CFG, 32, 15.0, 2.0, rng=np.random.default_rng(7))
    assert f1.shape == (32, CFG.n_symbols)
    assert f1.dtype == np.complex128
    assert np.array_equal(f1, f2)
    f3 = synthesize_frame(CFG, 32, 15.0, 2.0, rng=8)
    assert not np.array_equal(f1, f3)


def test_frame_noiseless_amplitude():
    n_s = 64
    frame = synthesize_frame(CFG, n_s, 20.0, 3.0, rng=0, noise=False)
    expected = math.sqrt(CFG.tx_power * CFG.tx_gain * CFG.rx_gain / n_s
                         * two_way_amplitude_sq(CFG, 20.0))
    assert np.allclose(np.abs(frame), expected, rtol=1e-12)


def test_frame_total_signal_power_independent_of_n_s():
    # transmit power is split across subcarriers: sum |F|^2 is n_s-invariant
    p_a = np.sum(np.abs(synthesize_frame(CFG, 16, 20.0, 0.0, 0, noise=False)) ** 2)
    p_b = np.sum(np.abs(synthesize_frame(CFG, 512, 20.0, 0.0, 0, noise=False)) ** 2)
    assert p_a == pytest.approx(p_b, rel=1e-12)


def test_bin_widths_against_oracle():
    assert range_bin_width(CFG) == pytest.approx(RANGE_BIN, abs=1e-9)
    assert velocity_bin_width(CFG) == pytest.approx(VELOCITY_BIN, abs=1e-9)


def test_periodogram_noiseless_peak_bins():
    # bins frozen from tests/oracles/gen_bins.py
    frame = synthesize_frame(CFG, 256, 20.0, 5.0, rng=0, noise=False)
    peak = periodogram(frame, CFG)
    assert peak.n_hat == 102
    assert peak.m_hat == 43
    assert peak.range_est == pytest.approx(102 * RANGE_BIN, rel=1e-6)
    assert peak.velocity_est == pytest.approx(43 * VELOCITY_BIN, rel=1e-6)


def test_periodogram_negative_velocity_wraps():
    frame = synthesize_frame(CFG, 256, 10.0, -3.0, rng=0, noise=False)
    peak = periodogram(frame, CFG)
    assert peak.m_hat == CFG.m_per - 26
    assert peak.velocity_est == pytest.approx(-26 * VELOCITY_BIN, rel=1e-6)


def test_periodogram_fine_range_grid():
    # quantization alone: targets swept across one bin land on the two
    # adjacent bins, never further
    for i, r in enumerate(np.linspace(19.5, 20.5, 21)):
        frame = synthesize_frame(CFG, 64, float(r), 0.0, rng=i, noise=False)
        peak = periodogram(frame, CFG)
        assert abs(peak.range_est - r) <= 0.5 * RANGE_BIN * 1.001


def test_periodogram_peak_snr_matches_budget():
    # peak-to-noise-floor ratio of the processed frame is gamma_s; measure
    # the floor away from the peak's delay/Doppler cross (sinc sidelobes)
    n_s, r = 128, 400.0
    gamma = sensing_snr(CFG, r)  # ~121, so sidelobes sit well under the floor
    rng = np.random.default_rng(3)
    ratios = []
    for _ in range(3):
        peak = periodogram(synthesize_frame(CFG, n_s, r, 2.0, rng), CFG)
        power = peak.power
        mask = np.ones_like(power, dtype=bool)
        mask[max(peak.n_hat - 400, 0):peak.n_hat + 400, :] = False
        mask[:, max(peak.m_hat - 400, 0):peak.m_hat + 400] = False
        ratios.append(peak.peak_power / float(power[mask].mean()))
    assert np.mean(ratios) == pytest.approx(gamma, rel=0.25)


def test_periodogram_rejects_oversized_frame():
    small = OfdmConfig(n_per=512, m_per=128)
    frame = np.zeros((600, 128), dtype=np.complex128)
    with pytest.raises(ValueError):
        periodogram(frame, small)


def test_config_validation():
    with pytest.raises(ValueError):
        OfdmConfig(symbol_duration=1e-6)  # shorter than 1/delta_f
    with pytest.raises(ValueError):
        OfdmConfig(rcs=0.0)
    with pytest.raises(ValueError):
        OfdmConfig(n_per=100)  # would truncate the frame
    cfg = OfdmConfig()
    assert cfg.row_spacing == pytest.approx(cfg.wavelength / 2, rel=1e-12)

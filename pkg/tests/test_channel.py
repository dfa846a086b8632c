"""Channel synthesis and time-domain application tests."""

import numpy as np
import pytest
from scipy import stats

from afdm.channel import (ChannelRealization, NoiseSpec, add_cpp, apply_channel,
                          sample_jakes_doppler, time_domain_matrix)
from afdm.daft import AfdmConfig, idaft


def eval_received_directly(s_cpp, ch, n):
    """Tap-by-tap evaluation of the received samples (no vectorization)."""
    m = len(s_cpp) - n
    r = np.zeros(n, dtype=complex)
    for t in range(n):
        for h, l, nu in zip(ch.gains, ch.delays, ch.dopplers):
            r[t] += h * np.exp(-2j * np.pi * (nu / n) * t) * s_cpp[m + t - l]
    return r


class TestJakesSampling:
    def test_zero_doppler(self):
        ch = sample_jakes_doppler(0.0, 3, (0, 1, 2), np.random.default_rng(0))
        np.testing.assert_array_equal(ch.dopplers, np.zeros(3))

    def test_arcsine_distribution(self):
        rng = np.random.default_rng(1)
        draws = np.concatenate([
            sample_jakes_doppler(1.0, 5, (0,) * 5, rng).dopplers
            for _ in range(20000)])
        # nu = nu_max cos(theta) with uniform theta has the arcsine law
        result = stats.kstest(draws, stats.arcsine(loc=-1.0, scale=2.0).cdf)
        assert result.pvalue > 0.01, f"KS p-value {result.pvalue:.4f}"

    def test_seed_reproducibility(self):
        a = sample_jakes_doppler(1.0, 3, (0, 1, 2), np.random.default_rng(7))
        b = sample_jakes_doppler(1.0, 3, (0, 1, 2), np.random.default_rng(7))
        np.testing.assert_array_equal(a.gains, b.gains)
        np.testing.assert_array_equal(a.dopplers, b.dopplers)

    def test_integer_rounding(self):
        ch = sample_jakes_doppler(1.0, 8, (0,) * 8, np.random.default_rng(2),
                                  integer_doppler=True)
        assert ch.is_integer_doppler()
        assert np.all(np.abs(ch.dopplers) <= 1)

    def test_unit_average_energy(self):
        rng = np.random.default_rng(3)
        acc = 0.0
        reps = 10000
        for _ in range(reps):
            ch = sample_jakes_doppler(1.0, 3, (0, 1, 2), rng)
            acc += float(np.sum(np.abs(ch.gains) ** 2))
        assert acc / reps == pytest.approx(1.0, rel=0.02)

    def test_empty_delays(self):
        with pytest.raises(ValueError):
            sample_jakes_doppler(1.0, 0, (), np.random.default_rng(0))
        with pytest.raises(ValueError):
            sample_jakes_doppler(1.0, 2, (0,), np.random.default_rng(0))

    def test_serialization_round_trip(self):
        ch = sample_jakes_doppler(1.0, 3, (0, 4, 8), np.random.default_rng(5))
        back = ChannelRealization.from_json(ch.to_json())
        np.testing.assert_array_equal(back.gains, ch.gains)
        np.testing.assert_array_equal(back.delays, ch.delays)
        np.testing.assert_array_equal(back.dopplers, ch.dopplers)


class TestCpp:
    def test_plain_cyclic_prefix_when_c1_zero(self):
        cfg = AfdmConfig(n=8, c1=0.0, c2=0.0)
        s = np.arange(8, dtype=complex)
        out = add_cpp(s, 3, cfg)
        np.testing.assert_array_equal(out[:3], s[5:])
        np.testing.assert_array_equal(out[3:], s)

    def test_zero_length(self):
        cfg = AfdmConfig.tuned(8, nu_max=1.0)
        s = np.ones(8, dtype=complex)
        np.testing.assert_array_equal(add_cpp(s, 0, cfg), s)

    def test_phase_formula(self):
        cfg = AfdmConfig.tuned(8, nu_max=1.0)  # 2*N*c1 = 3, so phases matter
        rng = np.random.default_rng(4)
        s = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        out = add_cpp(s, 2, cfg)
        for off in (-2, -1):
            expected = s[8 + off] * np.exp(-2j * np.pi * cfg.c1 * (64 + 16 * off))
            assert out[2 + off] == pytest.approx(expected)

    def test_negative_length(self):
        cfg = AfdmConfig.tuned(8, nu_max=1.0)
        with pytest.raises(ValueError):
            add_cpp(np.ones(8), -1, cfg)


class TestApplyChannel:
    def test_identity_path(self):
        cfg = AfdmConfig.tuned(16, nu_max=0.0)
        ch = ChannelRealization(gains=[1.0], delays=[0], dopplers=[0.0])
        s = np.arange(16, dtype=complex)
        r = apply_channel(s, ch, NoiseSpec.off(), cfg)
        np.testing.assert_allclose(r, s, atol=1e-14)

    def test_static_multipath_is_circular_convolution(self):
        cfg = AfdmConfig(n=32, c1=0.0, c2=0.0)
        rng = np.random.default_rng(5)
        taps = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        ch = ChannelRealization(gains=taps, delays=[0, 1, 2], dopplers=[0.0] * 3)
        s = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        r = apply_channel(add_cpp(s, 2, cfg), ch, NoiseSpec.off(), cfg)
        kernel = np.zeros(32, dtype=complex)
        kernel[:3] = taps
        expected = np.fft.ifft(np.fft.fft(s) * np.fft.fft(kernel))
        np.testing.assert_allclose(r, expected, atol=1e-12)

    def test_matches_matrix_with_same_noise(self):
        cfg = AfdmConfig.tuned(64, nu_max=2.0)
        rng = np.random.default_rng(6)
        ch = sample_jakes_doppler(2.0, 3, (0, 2, 5), rng)
        s = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        spec = NoiseSpec.from_snr_db(10.0)
        r = apply_channel(add_cpp(s, 5, cfg), ch, spec, cfg,
                          rng=np.random.default_rng(99))
        gen = np.random.default_rng(99)
        raw = gen.standard_normal(128)
        w = np.sqrt(spec.n0 / 2) * (raw[:64] + 1j * raw[64:])
        np.testing.assert_allclose(r, time_domain_matrix(ch, cfg) @ s + w,
                                   atol=1e-12)

    def test_delay_exceeds_prefix(self):
        cfg = AfdmConfig.tuned(16, nu_max=0.0)
        ch = ChannelRealization(gains=[1.0], delays=[3], dopplers=[0.0])
        with pytest.raises(ValueError, match="exceeds prefix"):
            apply_channel(add_cpp(np.ones(16, dtype=complex), 2, cfg), ch,
                          NoiseSpec.off(), cfg)

    def test_noise_variance_calibration(self):
        cfg = AfdmConfig.tuned(64, nu_max=0.0)
        ch = ChannelRealization(gains=[0.0], delays=[0], dopplers=[0.0])
        spec = NoiseSpec(n0=0.5, snr_db=10 * np.log10(2))
        rng = np.random.default_rng(8)
        s = np.zeros(64, dtype=complex)
        acc = 0.0
        reps = 16000  # about 1e6 complex samples
        for _ in range(reps):
            acc += float(np.sum(np.abs(apply_channel(s, ch, spec, cfg, rng=rng)) ** 2))
        measured = acc / (reps * 64)
        assert measured == pytest.approx(0.5, rel=0.01)


class TestTimeDomainMatrix:
    def test_identity(self):
        cfg = AfdmConfig.tuned(8, nu_max=0.0)
        ch = ChannelRealization(gains=[1.0], delays=[0], dopplers=[0.0])
        np.testing.assert_allclose(time_domain_matrix(ch, cfg), np.eye(8))

    def test_single_tap_cyclic_shift(self):
        cfg = AfdmConfig(n=8, c1=0.0, c2=0.0)
        ch = ChannelRealization(gains=[1.0], delays=[1], dopplers=[0.0])
        h = time_domain_matrix(ch, cfg)
        shift = np.roll(np.eye(8), 1, axis=0)
        np.testing.assert_allclose(h, shift, atol=1e-14)

    def test_matrix_matches_sample_evaluation(self):
        cfg = AfdmConfig.tuned(32, nu_max=1.0)
        rng = np.random.default_rng(9)
        ch = sample_jakes_doppler(1.0, 3, (0, 1, 4), rng)
        s = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        s_cpp = add_cpp(s, 4, cfg)
        np.testing.assert_allclose(time_domain_matrix(ch, cfg) @ s,
                                   eval_received_directly(s_cpp, ch, 32),
                                   atol=1e-12)

    def test_vector_and_matrix_agree_on_frames(self):
        cfg = AfdmConfig.tuned(64, nu_max=1.0)
        rng = np.random.default_rng(10)
        for _ in range(10):
            ch = sample_jakes_doppler(1.0, 3, (0, 3, 6), rng,
                                      integer_doppler=rng.random() < 0.5)
            x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
            s = idaft(x, cfg)
            r_vec = apply_channel(add_cpp(s, 6, cfg), ch, NoiseSpec.off(), cfg)
            np.testing.assert_allclose(r_vec, time_domain_matrix(ch, cfg) @ s,
                                       atol=1e-12)


class TestNoiseSpec:
    def test_snr_conversion(self):
        spec = NoiseSpec.from_snr_db(20.0)
        assert spec.n0 == pytest.approx(0.01)

    def test_negative_variance(self):
        with pytest.raises(ValueError):
            NoiseSpec(n0=-0.1)

    def test_channel_validation(self):
        with pytest.raises(ValueError):
            ChannelRealization(gains=[], delays=[], dopplers=[])
        with pytest.raises(ValueError):
            ChannelRealization(gains=[1.0], delays=[-1], dopplers=[0.0])
        with pytest.raises(ValueError):
            ChannelRealization(gains=[1.0, 1.0], delays=[0], dopplers=[0.0])

import numpy as np
import pytest

from eraserbench import analysis as an
from eraserbench.waveoptics import Pattern


def cosine_pattern(vis=1.0, phase=0.0, period=2.8e-3, n=400, amp=1.0):
    x = np.linspace(-5e-3, 5e-3, n)
    rates = amp * (1.0 + vis * np.cos(2 * np.pi * x / period + phase))
    return Pattern(x, rates)


class TestVisibility:
    def test_constant_pattern(self):
        p = Pattern(np.linspace(-1e-3, 1e-3, 100), np.full(100, 3.0))
        assert an.visibility(p) == 0.0

    def test_full_modulation(self):
        x = np.linspace(-5e-3, 5e-3, 1000)
        p = Pattern(x, np.cos(2 * np.pi * x / 2.8e-3) ** 2)
        assert an.visibility(p) > 1.0 - 1e-6

    def test_fringe_plus_antifringe_cancels(self):
        a = cosine_pattern(vis=0.8, phase=0.0)
        b = cosine_pattern(vis=0.8, phase=np.pi)
        total = an.scale(an.add(a, b), 0.5)
        assert an.visibility(total) < 1e-9

    def test_scale_invariance(self):
        p = cosine_pattern(vis=0.4)
        for c in (1e-6, 2.0, 750.0):
            # exact up to float rounding of the rescaled rates
            assert abs(an.visibility(an.scale(p, c)) - an.visibility(p)) < 1e-12

    def test_empty_window_rejected(self):
        p = cosine_pattern()
        with pytest.raises(ValueError):
            an.visibility(p, window=(1.0, 2.0))


class TestFitFringe:
    def test_pure_fringe(self):
        p = cosine_pattern(vis=1.0, phase=0.0)
        fit = an.fit_fringe(p, 2.8e-3)
        assert abs(fit.visibility - 1.0) < 1e-6
        assert abs(fit.phase) < 1e-6
        assert fit.kind == "fringe"

    def test_pure_antifringe(self):
        p = cosine_pattern(vis=1.0, phase=np.pi)
        fit = an.fit_fringe(p, 2.8e-3)
        assert abs(fit.phase - np.pi) < 1e-6
        assert fit.kind == "anti-fringe"

    def test_period_refinement(self):
        p = cosine_pattern(vis=0.7, period=3.1e-3)
        fit = an.fit_fringe(p, 2.8e-3)  # seeded 10% off
        assert abs(fit.period - 3.1e-3) < 1e-6

    def test_weak_modulation_classified_none(self):
        p = cosine_pattern(vis=0.01)
        assert an.fit_fringe(p, 2.8e-3).kind == "none"

    def test_noise_robustness(self):
        # 1% additive uniform noise: V within 0.02, phase within 0.05 rad
        rng = np.random.default_rng(123)
        for _ in range(50):
            vis = rng.uniform(0.3, 1.0)
            phase = rng.uniform(-np.pi / 2, np.pi / 2)
            p = cosine_pattern(vis=vis, phase=phase)
            noisy = Pattern(p.positions,
                            p.rates + 0.01 * p.rates.max() * rng.uniform(size=p.rates.size))
            fit = an.fit_fringe(noisy, 2.8e-3)
            assert abs(fit.visibility - vis) < 0.02
            assert abs(fit.phase - phase) < 0.05

    def test_rejects_bad_period(self):
        with pytest.raises(ValueError):
            an.fit_fringe(cosine_pattern(), -1.0)


class TestFringeAmplitude:
    def test_flat_scores_zero(self):
        p = Pattern(np.linspace(-5e-3, 5e-3, 400), np.ones(400))
        assert an.fringe_amplitude(p, 2.8e-3) < 1e-12

    def test_full_fringe_scores_near_one(self):
        p = cosine_pattern(vis=1.0)
        assert abs(an.fringe_amplitude(p, 2.8e-3) - 1.0) < 0.02

    def test_smooth_envelope_scores_low(self):
        x = np.linspace(-5e-3, 5e-3, 400)
        env = np.sinc(80e-6 * x / (700e-9 * 1.0)) ** 2
        assert an.fringe_amplitude(Pattern(x, env), 2.8e-3) < 0.01


class TestPatternOps:
    def test_add_scale_inverse(self):
        p = cosine_pattern(vis=0.5)
        zero = an.add(p, an.scale(p, -1.0))
        np.testing.assert_array_equal(zero.rates, np.zeros_like(p.rates))

    def test_normalize_idempotent(self):
        p = cosine_pattern(vis=0.5, amp=17.0)
        once = an.normalize(p)
        twice = an.normalize(once)
        np.testing.assert_allclose(once.rates, twice.rates, rtol=1e-15)
        assert abs(once.rates.sum() - 1.0) < 1e-12

    def test_normalize_zero_pattern_flagged(self):
        p = Pattern(np.linspace(0, 1, 10), np.zeros(10))
        out = an.normalize(p)
        np.testing.assert_array_equal(out.rates, p.rates)
        assert out.meta.get("degenerate") is True

    def test_distance_to_self_is_zero(self):
        p = cosine_pattern()
        assert an.linf_relative_distance(p, p) == 0.0

    def test_grid_mismatch_rejected(self):
        p = cosine_pattern(n=400)
        q = cosine_pattern(n=401)
        with pytest.raises(ValueError):
            an.add(p, q)


class TestFringeContrast:
    def test_envelope_divided_out(self):
        x = np.linspace(-4e-3, 4e-3, 400)
        env = np.sinc(80e-6 * x / (700e-9 * 1.0)) ** 2
        fringed = Pattern(x, env * (1 + np.cos(2 * np.pi * x / 2.8e-3)))
        ref = Pattern(x, env)
        assert an.fringe_contrast(fringed, ref) > 0.999
        assert an.fringe_contrast(ref, ref) == 0.0

    def test_requires_positive_reference(self):
        x = np.linspace(-1e-3, 1e-3, 50)
        with pytest.raises(ValueError):
            an.fringe_contrast(Pattern(x, np.ones(50)), Pattern(x, np.zeros(50)))

import warnings

import numpy as np
import pytest

from eraserbench import waveoptics as wo

WL = 700e-9
SLIT_WIDTH = 80e-6
SLIT_SEP = 250e-6


def make_double_slit():
    return wo.Aperture("double", width=SLIT_WIDTH, separation=SLIT_SEP)


def plane_field(grid, wavelength=WL):
    return wo.ScalarField(np.ones(grid.n, dtype=complex), grid.x0, grid.dx, wavelength)


class TestHermiteGauss:
    def test_order0_peak_at_center(self):
        grid = wo.Grid.centered(2e-3, 1001)
        f = wo.hermite_gauss(0, 200e-6, grid, WL)
        assert abs(f.x[np.argmax(f.intensity)]) < grid.dx

    def test_order1_node_and_maxima(self):
        w = 200e-6
        grid = wo.Grid.centered(2e-3, 2001)  # odd n puts a sample at x = 0
        f = wo.hermite_gauss(1, w, grid, WL)
        assert f.intensity[grid.n // 2] == 0.0
        upper = f.intensity[f.x > 0]
        x_up = f.x[f.x > 0]
        assert abs(x_up[np.argmax(upper)] - w / np.sqrt(2.0)) < 2 * grid.dx

    def test_order1_is_odd(self):
        grid = wo.Grid.centered(2e-3, 1024)
        f = wo.hermite_gauss(1, 200e-6, grid, WL)
        np.testing.assert_allclose(f.samples, -f.samples[::-1], atol=1e-15)

    def test_unit_power(self):
        grid = wo.Grid.centered(2e-3, 1024)
        for order in (0, 1):
            f = wo.hermite_gauss(order, 200e-6, grid, WL)
            assert abs(f.power - 1.0) < 1e-12

    def test_unsupported_order(self):
        grid = wo.Grid.centered(2e-3, 64)
        with pytest.raises(ValueError):
            wo.hermite_gauss(2, 200e-6, grid, WL)


class TestAperture:
    def test_open_slits_make_top_hat_pair(self):
        grid = wo.Grid.centered(2e-3, 2000)
        out = wo.apply_aperture(plane_field(grid), make_double_slit())
        upper = (grid.positions > (SLIT_SEP - SLIT_WIDTH) / 2) & (
            grid.positions < (SLIT_SEP + SLIT_WIDTH) / 2
        )
        between = np.abs(grid.positions) < (SLIT_SEP - SLIT_WIDTH) / 2 - grid.dx
        assert np.all(np.abs(out.samples[between]) == 0.0)
        assert np.all(np.abs(out.samples[upper]) > 0.9)

    def test_closed_upper_slit_blocks(self):
        grid = wo.Grid.centered(2e-3, 2000)
        ap = wo.Aperture("double", SLIT_WIDTH, SLIT_SEP, open_upper=False)
        out = wo.apply_aperture(plane_field(grid), ap)
        assert np.all(out.samples[grid.positions > 0] == 0.0)

    def test_transmission_bounded(self):
        grid = wo.Grid.centered(2e-3, 777)
        f = wo.hermite_gauss(0, 300e-6, grid, WL)
        out = wo.apply_aperture(f, make_double_slit())
        assert out.power <= f.power + 1e-15

    def test_aperture_outside_grid(self):
        grid = wo.Grid.centered(100e-6, 64)
        with pytest.raises(ValueError):
            wo.apply_aperture(plane_field(grid), make_double_slit())

    def test_overlapping_slits_rejected(self):
        with pytest.raises(ValueError):
            wo.Aperture("double", width=100e-6, separation=50e-6)


class TestFresnel:
    def test_gaussian_beam_width_oracle(self):
        # analytic divergence: w(L) = w sqrt(1 + (lambda L / pi w^2)^2)
        w0 = 200e-6
        L = 1.0
        grid = wo.Grid.centered(3e-3, 2048)
        f = wo.hermite_gauss(0, w0, grid, WL)
        out_grid = wo.Grid.centered(12e-3, 2048)
        out = wo.fresnel_propagate(f, L, out_grid)
        w_exp = w0 * np.sqrt(1.0 + (WL * L / (np.pi * w0 ** 2)) ** 2)
        I = out.intensity
        var = np.sum(I * out.x ** 2) / np.sum(I)
        w_meas = 2.0 * np.sqrt(var)  # intensity exp(-2x^2/w^2) has <x^2> = w^2/4
        assert abs(w_meas - w_exp) / w_exp < 0.005

    def test_power_conserved(self):
        grid = wo.Grid.centered(3e-3, 2048)
        f = wo.hermite_gauss(0, 200e-6, grid, WL)
        out = wo.fresnel_propagate(f, 1.0, wo.Grid.centered(16e-3, 3000))
        assert abs(out.power - f.power) < 0.01

    def test_rejects_nonpositive_distance(self):
        grid = wo.Grid.centered(1e-3, 64)
        with pytest.raises(ValueError):
            wo.fresnel_propagate(plane_field(grid), 0.0, grid)

    def test_linearity(self):
        rng = np.random.default_rng(3)
        grid = wo.Grid.centered(1e-3, 256)
        out_grid = wo.Grid.centered(5e-3, 200)
        fa = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
        fb = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
        alpha, beta = 0.7 - 0.2j, -1.3 + 0.4j

        def prop(arr):
            f = wo.ScalarField(arr, grid.x0, grid.dx, WL)
            return wo.fresnel_propagate(f, 0.5, out_grid).samples

        combined = prop(alpha * fa + beta * fb)
        separate = alpha * prop(fa) + beta * prop(fb)
        np.testing.assert_allclose(combined, separate, rtol=1e-10, atol=1e-12)

    def test_parity_preserved(self):
        grid = wo.Grid.centered(2e-3, 1024)
        out_grid = wo.Grid.centered(10e-3, 1024)
        even = wo.hermite_gauss(0, 200e-6, grid, WL)
        odd = wo.hermite_gauss(1, 200e-6, grid, WL)
        for f, sign in ((even, 1.0), (odd, -1.0)):
            out = wo.fresnel_propagate(f, 1.0, out_grid).samples
            np.testing.assert_allclose(out, sign * out[::-1], rtol=0,
                                       atol=1e-10 * np.abs(out).max())


class TestFraunhofer:
    def test_single_slit_zeros(self):
        grid = wo.Grid.centered(1e-3, 4096)
        ap = wo.Aperture("single", SLIT_WIDTH)
        f = wo.apply_aperture(plane_field(grid), ap)
        L = 1.0
        x_zero = WL * L / SLIT_WIDTH
        out_grid = wo.Grid.scan(0.5 * x_zero, 1.5 * x_zero, 2001)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = wo.fraunhofer_pattern(f, L, out_grid)
        x_min = out.x[np.argmin(out.intensity)]
        assert abs(x_min - x_zero) < 2 * out.dx

    def test_double_slit_first_cos_zero(self):
        # lambda = 700 nm, d = 0.2 mm, L = 1 m -> first zero at 1.75 mm
        grid = wo.Grid.centered(1.5e-3, 4096)
        ap = wo.Aperture("double", width=60e-6, separation=0.2e-3)
        f = wo.apply_aperture(plane_field(grid), ap)
        x_zero = 700e-9 * 1.0 / (2 * 0.2e-3)
        assert abs(x_zero - 1.75e-3) < 1e-12
        out_grid = wo.Grid.scan(0.6 * x_zero, 1.4 * x_zero, 2001)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = wo.fraunhofer_pattern(f, 1.0, out_grid)
        x_min = out.x[np.argmin(out.intensity)]
        assert abs(x_min - x_zero) < 2 * out.dx

    def test_odd_input_stays_odd(self):
        grid = wo.Grid.centered(2e-3, 2048)
        f = wo.hermite_gauss(1, 200e-6, grid, WL)
        masked = wo.apply_aperture(f, make_double_slit())
        out = wo.fraunhofer_pattern(masked, 30.0, wo.Grid.centered(0.1, 512)).samples
        np.testing.assert_allclose(out, -out[::-1], rtol=0,
                                   atol=1e-10 * np.abs(out).max())

    def test_matches_closed_form(self):
        grid = wo.Grid.centered(2.64e-3, 2048)
        f = wo.apply_aperture(plane_field(grid), make_double_slit())
        L = 30.0
        out_grid = wo.Grid.centered(2 * WL * L / SLIT_WIDTH, 1500)
        out = wo.fraunhofer_pattern(f, L, out_grid)
        got = out.intensity / out.intensity.max()
        want = wo.double_slit_closed_form(SLIT_WIDTH, SLIT_SEP, WL, L, out.x)
        assert np.max(np.abs(got - want)) < 1e-3

    def test_warns_in_near_field(self):
        grid = wo.Grid.centered(2.64e-3, 1024)
        f = wo.apply_aperture(plane_field(grid), make_double_slit())
        with pytest.warns(UserWarning):
            wo.fraunhofer_pattern(f, 0.05, wo.Grid.centered(5e-3, 128))

    def test_fresnel_agrees_beyond_fraunhofer_distance(self):
        grid = wo.Grid.centered(2.64e-3, 2048)
        f = wo.apply_aperture(plane_field(grid), make_double_slit())
        span = SLIT_SEP + SLIT_WIDTH
        L = 20.0
        assert L > wo.fraunhofer_distance(span, WL)
        out_grid = wo.Grid.centered(1.5 * WL * L / SLIT_WIDTH, 1200)
        a = wo.fresnel_propagate(f, L, out_grid).samples
        b = wo.fraunhofer_pattern(f, L, out_grid).samples
        err = np.linalg.norm(a - b) / np.linalg.norm(a)
        assert err < 0.01


class TestClosedForm:
    def test_global_max_at_center(self):
        x = np.linspace(-5e-3, 5e-3, 4001)
        I = wo.double_slit_closed_form(SLIT_WIDTH, SLIT_SEP, WL, 1.0, x)
        assert np.argmax(I) == x.size // 2

    def test_cos_zero(self):
        x = np.array([WL * 1.0 / (2 * SLIT_SEP)])
        I = wo.double_slit_closed_form(SLIT_WIDTH, SLIT_SEP, WL, 1.0, x)
        assert I[0] < 1e-25

    def test_envelope_zero(self):
        x = np.array([WL * 1.0 / SLIT_WIDTH])
        I = wo.double_slit_closed_form(SLIT_WIDTH, SLIT_SEP, WL, 1.0, x)
        assert I[0] < 1e-25

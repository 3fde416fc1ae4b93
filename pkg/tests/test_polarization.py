import numpy as np
import pytest

from eraserbench import polarization as pol


def assert_close(a, b, tol=1e-12):
    np.testing.assert_allclose(a, b, atol=tol, rtol=0)


def phase_free_close(a, b, tol=1e-12):
    """Equality of kets up to a global phase."""
    a, b = np.asarray(a), np.asarray(b)
    inner = np.vdot(b, a)
    assert abs(abs(inner) - np.linalg.norm(a) * np.linalg.norm(b)) < tol


class TestRotation:
    def test_identity(self):
        assert_close(pol.rotation(0.0), np.eye(2))

    def test_quarter_turn(self):
        assert_close(pol.rotation(np.pi / 2) @ pol.H, pol.V)

    def test_eighth_turn(self):
        # explicit 2x2 product: R(pi/4) (1,0) = (cos, sin)
        assert_close(pol.rotation(np.pi / 4) @ pol.H,
                     np.array([1.0, 1.0]) / np.sqrt(2.0))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            pol.rotation(np.nan)


class TestQuarterWavePlate:
    def test_fast_axis_eigenvector(self):
        assert_close(pol.quarter_wave_plate(0.0) @ pol.H, pol.H)

    def test_plus45_makes_circular(self):
        expected = np.exp(1j * np.pi / 4) * np.array([1.0, -1.0j]) / np.sqrt(2.0)
        assert_close(pol.quarter_wave_plate(np.pi / 4) @ pol.H, expected)

    def test_minus45_makes_opposite_circular(self):
        expected = np.exp(1j * np.pi / 4) * np.array([1.0, 1.0j]) / np.sqrt(2.0)
        assert_close(pol.quarter_wave_plate(-np.pi / 4) @ pol.H, expected)

    def test_opposite_circulars_are_orthogonal(self):
        a = pol.quarter_wave_plate(np.pi / 4) @ pol.H
        b = pol.quarter_wave_plate(-np.pi / 4) @ pol.H
        assert abs(np.vdot(a, b)) < 1e-12

    @pytest.mark.parametrize("angle", np.linspace(-np.pi, np.pi, 17))
    def test_unitary(self, angle):
        m = pol.quarter_wave_plate(angle)
        assert_close(m.conj().T @ m, np.eye(2))


class TestLinearPolarizer:
    def test_aligned_passes(self):
        assert_close(pol.linear_polarizer(0.0) @ pol.H, pol.H)

    def test_crossed_blocks(self):
        assert_close(pol.linear_polarizer(np.pi / 2) @ pol.H, np.zeros(2))

    def test_malus_at_45(self):
        out = pol.linear_polarizer(np.pi / 4) @ pol.H
        assert_close(out, np.array([0.5, 0.5]))
        assert abs(pol.norm2(out) - 0.5) < 1e-12

    @pytest.mark.parametrize("angle", np.linspace(0, np.pi, 9))
    def test_projector(self, angle):
        m = pol.linear_polarizer(angle)
        assert_close(m @ m, m)
        assert_close(m.conj().T, m)

    def test_malus_law_grid(self):
        thetas = np.linspace(0, np.pi, 10)
        phis = np.linspace(-np.pi / 2, np.pi / 2, 10)
        for theta in thetas:
            for phi in phis:
                out = pol.linear_polarizer(theta) @ pol.linear(phi)
                assert abs(pol.norm2(out) - np.cos(theta - phi) ** 2) < 1e-12


class TestTwoPhoton:
    def test_apply_identity(self):
        c = pol.bell_pair()
        assert_close(pol.apply_signal(np.eye(2), c), c)

    def test_idler_polarizer_on_bell_pair(self):
        c = pol.apply_idler(pol.linear_polarizer(0.0), pol.bell_pair())
        expected = np.zeros((2, 2), dtype=complex)
        expected[1, 0] = 1.0 / np.sqrt(2.0)  # only c[V][H] survives
        assert_close(c, expected)

    def test_unitary_preserves_norm(self):
        c = pol.apply_signal(pol.quarter_wave_plate(np.pi / 4), pol.bell_pair())
        assert abs(pol.pair_norm2(c) - 1.0) < 1e-12

    def test_local_operations_commute(self):
        # both orders realize c -> A c B^T; equal to machine rounding
        rng = np.random.default_rng(7)
        c = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        a = pol.quarter_wave_plate(0.3)
        b = pol.linear_polarizer(1.1)
        lhs = pol.apply_signal(a, pol.apply_idler(b, c))
        rhs = pol.apply_idler(b, pol.apply_signal(a, c))
        np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-15)


class TestProjectIdler:
    def test_bell_pair_analyzer_h(self):
        ket, weight = pol.project_idler(pol.bell_pair(), 0.0)
        assert_close(ket, np.array([0.0, 1.0 / np.sqrt(2.0)]))
        assert abs(weight - 0.5) < 1e-12

    def test_bell_pair_analyzer_45(self):
        ket, weight = pol.project_idler(pol.bell_pair(), np.pi / 4)
        assert_close(ket, np.array([0.5, 0.5]))
        assert abs(weight - 0.5) < 1e-12
        # anti-correlated pair maps analyzer theta to signal pi/2 - theta
        phase_free_close(ket / np.sqrt(weight), pol.linear(np.pi / 4))

    def test_product_state(self):
        c = np.zeros((2, 2), dtype=complex)
        c[0, 1] = 1.0  # signal H, idler V
        ket, weight = pol.project_idler(c, np.pi / 2)
        assert_close(ket, pol.H)
        assert abs(weight - 1.0) < 1e-12

    @pytest.mark.parametrize("theta", np.linspace(0, np.pi, 13))
    def test_completeness(self, theta):
        c = pol.bell_pair()
        _, w1 = pol.project_idler(c, theta)
        _, w2 = pol.project_idler(c, theta + np.pi / 2)
        assert abs(w1 + w2 - 1.0) < 1e-12

    def test_completeness_random_states(self):
        rng = np.random.default_rng(42)
        for _ in range(25):
            c = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            c /= np.sqrt(pol.pair_norm2(c))
            theta = rng.uniform(0, np.pi)
            _, w1 = pol.project_idler(c, theta)
            _, w2 = pol.project_idler(c, theta + np.pi / 2)
            assert abs(w1 + w2 - 1.0) < 1e-12

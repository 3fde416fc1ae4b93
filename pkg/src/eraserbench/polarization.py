"""Jones calculus for single-photon and entangled two-photon polarization.

Conventions: angles in radians, measured from the horizontal (H) axis.
A wave plate's fast axis gets zero retardance and the slow axis +pi/2,
i.e. the plate matrix in its own frame is diag(1, i).  Jones vectors are
complex length-2 arrays (H, V); the two-photon state is a 2x2 complex
coefficient matrix c[a, b] over signal basis a and idler basis b.
"""

from __future__ import annotations

import numpy as np

H = np.array([1.0, 0.0], dtype=complex)
V = np.array([0.0, 1.0], dtype=complex)


def _check_angle(theta: float) -> float:
    theta = float(theta)
    if not np.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta}")
    return theta


def linear(theta: float) -> np.ndarray:
    """Unit Jones vector polarized along angle theta."""
    theta = _check_angle(theta)
    return np.array([np.cos(theta), np.sin(theta)], dtype=complex)


def norm2(ket: np.ndarray) -> float:
    """Squared norm |h|^2 + |v|^2 of a Jones vector."""
    return float(np.sum(np.abs(ket) ** 2))


def rotation(theta: float) -> np.ndarray:
    """2-D rotation matrix [[cos, -sin], [sin, cos]]."""
    theta = _check_angle(theta)
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def quarter_wave_plate(fast_axis: float) -> np.ndarray:
    """Quarter-wave plate with its fast axis at the given angle.

    R(theta) . diag(1, i) . R(-theta); unitary.
    """
    fast_axis = _check_angle(fast_axis)
    r = rotation(fast_axis)
    return r @ np.diag([1.0, 1.0j]) @ r.conj().T


def half_wave_plate(fast_axis: float) -> np.ndarray:
    """Half-wave plate (two quarter waves on the same axis)."""
    q = quarter_wave_plate(fast_axis)
    return q @ q


def linear_polarizer(angle: float) -> np.ndarray:
    """Projector onto the linear polarization at the given angle."""
    ket = linear(angle)
    return np.outer(ket, ket.conj())


def bell_pair() -> np.ndarray:
    """Anti-correlated pair: c[H,V] = c[V,H] = 1/sqrt(2)."""
    c = np.zeros((2, 2), dtype=complex)
    c[0, 1] = c[1, 0] = 1.0 / np.sqrt(2.0)
    return c


def apply_signal(m: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Apply a Jones matrix to the signal photon: c -> M c."""
    return np.asarray(m, dtype=complex) @ c


def apply_idler(m: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Apply a Jones matrix to the idler photon: c -> c M^T."""
    return c @ np.asarray(m, dtype=complex).T


def pair_norm2(c: np.ndarray) -> float:
    """Total probability sum |c[a,b]|^2."""
    return float(np.sum(np.abs(c) ** 2))


def project_idler(c: np.ndarray, analyzer: float) -> tuple[np.ndarray, float]:
    """Condition the signal on an idler analyzer at the given angle.

    Returns the *unnormalized* signal ket signal[a] = sum_b c[a,b] e_b*
    (e = analyzer direction) and its squared norm, which is the
    probability of the idler passing the analyzer.  Keeping the raw
    amplitude lets coincidence rates compose multiplicatively.
    """
    e = linear(analyzer)
    ket = c @ e.conj()
    return ket, norm2(ket)

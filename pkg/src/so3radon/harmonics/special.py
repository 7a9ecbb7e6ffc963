"""Legendre functions, spherical harmonics on S^2 and Wigner matrices on SO(3).

Conventions
-----------
* Complex spherical harmonics ``Y_k^m`` are orthonormal for the Lebesgue
  measure on S^2 (total area 4 pi) and carry the Condon-Shortley phase.
* The order index ``i`` of the text is ``i = m + k + 1``; arrays use the
  zero-based position ``m + k``.  Flattened arrays over all degrees up to
  ``K`` store degree ``k`` in the slice ``[k**2, (k + 1)**2)``.
* Wigner matrices ``T^k(g)`` are defined by the expansion
  ``Y_k^i(g^{-1} x) = sum_j T^k_{ij}(g) Y_k^j(x)``.  With this ordering
  ``T^k(g h) = T^k(h) T^k(g)``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .. import rotations as rot

FOUR_PI = 4.0 * np.pi


def degree_slice(k: int) -> slice:
    return slice(k * k, (k + 1) * (k + 1))


def order_index(k: int, m: int) -> int:
    """One-based order index ``i = m + k + 1`` for ``-k <= m <= k``."""
    if not -k <= m <= k:
        raise ValueError(f"order m={m} outside [-{k}, {k}]")
    return m + k + 1


def order_from_index(k: int, i: int) -> int:
    if not 1 <= i <= 2 * k + 1:
        raise ValueError(f"index i={i} outside [1, {2 * k + 1}]")
    return i - k - 1


def assoc_legendre(k: int, m: int, t):
    """Associated Legendre function ``P_k^m(t)`` with Condon-Shortley phase.

    Evaluated by the upward three-term recurrence in the degree, starting
    from the closed form of ``P_m^m``.
    """
    if m < 0 or m > k:
        raise ValueError(f"need 0 <= m <= k, got k={k}, m={m}")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0):
        raise ValueError("assoc_legendre requires |t| <= 1")
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    p_mm = np.ones_like(t)
    for j in range(1, m + 1):
        p_mm = -(2 * j - 1) * s * p_mm
    if k == m:
        return p_mm
    p_prev, p = p_mm, (2 * m + 1) * t * p_mm
    for ell in range(m + 2, k + 1):
        p_prev, p = p, ((2 * ell - 1) * t * p - (ell + m - 1) * p_prev) / (ell - m)
    return p


def legendre(k: int, t):
    return assoc_legendre(k, 0, t)


def _normalized_legendre_table(K: int, t):
    """Normalised ``p[k, m] = N_km P_k^m(t)`` for ``0 <= m <= k <= K``.

    ``N_km = sqrt((2k+1)/(4 pi) (k-m)!/(k+m)!)`` so that
    ``Y_k^m = p[k, m] e^{i m phi}``.  Shape ``(K+1, K+1) + t.shape``.
    """
    t = np.asarray(t, dtype=float)
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    p = np.zeros((K + 1, K + 1) + t.shape)
    p[0, 0] = 1.0 / np.sqrt(FOUR_PI)
    for m in range(1, K + 1):
        p[m, m] = -np.sqrt((2 * m + 1) / (2.0 * m)) * s * p[m - 1, m - 1]
    for m in range(0, K):
        p[m + 1, m] = np.sqrt(2 * m + 3.0) * t * p[m, m]
        for k in range(m + 2, K + 1):
            a = np.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
            b = np.sqrt(((k - 1.0) ** 2 - m * m) / (4.0 * (k - 1.0) ** 2 - 1.0))
            p[k, m] = a * (t * p[k - 1, m] - b * p[k - 2, m])
    return p


def to_spherical(points):
    """Colatitude and longitude of unit vectors, shape ``(..., 3)``."""
    points = np.asarray(points, dtype=float)
    x, y, z = np.moveaxis(points, -1, 0)
    theta = np.arctan2(np.hypot(x, y), z)
    phi = np.mod(np.arctan2(y, x), 2.0 * np.pi)
    return theta, phi


def from_spherical(theta, phi):
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def sph_harm(k: int, m: int, theta, phi):
    """Complex orthonormal spherical harmonic ``Y_k^m(theta, phi)``."""
    if abs(m) > k:
        raise ValueError(f"|m| must not exceed k (k={k}, m={m})")
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0.0) | (theta > np.pi)):
        raise ValueError("colatitude must lie in [0, pi]")
    table = _normalized_legendre_table(k, np.cos(theta))
    val = table[k, abs(m)] * np.exp(1j * abs(m) * np.asarray(phi, dtype=float))
    if m < 0:
        val = (-1) ** m * np.conj(val)
    return val


def sph_harm_all(K: int, points):
    """All ``Y_k^m`` with ``k <= K`` at unit vectors ``points`` of shape ``(N, 3)``.

    Returns an ``(N, (K+1)**2)`` complex array in the flattened layout.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    theta, phi = to_spherical(points)
    table = _normalized_legendre_table(K, np.cos(theta))
    out = np.empty((len(points), (K + 1) ** 2), dtype=complex)
    m_range = np.arange(K + 1)
    phase = np.exp(1j * np.outer(phi, m_range))
    for k in range(K + 1):
        base = k * k + k
        pos = table[k, : k + 1].T * phase[:, : k + 1]
        out[:, base : base + k + 1] = pos
        if k:
            neg = np.conj(pos[:, 1:]) * (-1.0) ** m_range[1 : k + 1]
            out[:, base - k : base][:, ::-1] = neg
    return out


def sph_harm_degree(k: int, points):
    """Degree-``k`` harmonics at ``points``, shape ``(N, 2k+1)``."""
    return sph_harm_all(k, points)[:, degree_slice(k)]


# ---------------------------------------------------------------------------
# Wigner matrices
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _jy_eigensystem(k: int):
    """Eigen-decomposition of the angular momentum generator ``J_y``.

    Basis ordered by ``m = -k..k``; ``d^k(b) = V diag(exp(-i b lam)) V^H``.
    """
    m = np.arange(-k, k)
    raising = np.zeros((2 * k + 1, 2 * k + 1))
    raising[np.arange(1, 2 * k + 1), np.arange(2 * k)] = np.sqrt(k * (k + 1) - m * (m + 1))
    jy = (raising - raising.T) / 2j
    lam, vec = np.linalg.eigh(jy)
    return lam, vec


def wigner_small_d(k: int, beta):
    """Wigner ``d^k_{m'm}(beta)`` for an array of angles, shape ``(N, 2k+1, 2k+1)``.

    Row index ``m' + k``, column index ``m + k`` (standard ``e^{-i beta J_y}``).
    """
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    lam, vec = _jy_eigensystem(k)
    phases = np.exp(-1j * np.multiply.outer(beta, lam))
    d = np.einsum("ab,nb,cb->nac", vec, phases, vec.conj())
    return d.real


def wigner_matrices(K: int, g):
    """Wigner matrices ``T^k(g)`` for ``k = 0..K`` and a batch of rotations.

    Parameters
    ----------
    K : int
        Highest degree.
    g : rotation-like
        Anything accepted by :func:`so3radon.rotations.as_quaternions`.

    Returns
    -------
    list of ndarray
        Entry ``k`` has shape ``(N, 2k+1, 2k+1)``.
    """
    q = rot.as_quaternions(g)
    a, b, c = rot.quat_to_zyz(q)
    out = []
    for k in range(K + 1):
        m = np.arange(-k, k + 1)
        d = wigner_small_d(k, b)  # d[n, m', m]
        # T_{m, m'} = exp(-i (m' a + m c)) d_{m' m}(b)
        phase_row = np.exp(-1j * np.multiply.outer(c, m))  # index m
        phase_col = np.exp(-1j * np.multiply.outer(a, m))  # index m'
        out.append(phase_row[:, :, None] * np.transpose(d, (0, 2, 1)) * phase_col[:, None, :])
    return out


def wigner_matrix(k: int, g) -> np.ndarray:
    """Single ``(2k+1) x (2k+1)`` Wigner matrix ``T^k(g)``."""
    mats = wigner_matrices(k, g)[k]
    if len(mats) != 1:
        raise ValueError("wigner_matrix expects a single rotation; use wigner_matrices")
    return mats[0]

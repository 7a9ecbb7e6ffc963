"""Product quadrature rules on S^2 and on SO(3)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import rotations as rot
from .special import from_spherical

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and strictly positive weights.

    ``space`` is ``"S2"`` (nodes are unit vectors, weights sum to 4 pi) or
    ``"SO3"`` (nodes are unit quaternions, weights sum to 1 for the
    normalised Haar measure).  Every basis function of degree at most
    ``exact_degree`` is integrated exactly.
    """

    space: str
    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.space not in ("S2", "SO3"):
            raise ValueError(f"unknown space {self.space!r}")
        if np.any(self.weights <= 0.0):
            raise ValueError("quadrature weights must be strictly positive")

    def __len__(self):
        return len(self.weights)

    def integrate(self, values) -> complex:
        values = np.asarray(values)
        return np.tensordot(self.weights, values, axes=(0, 0))


def gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def sphere_quadrature(K: int) -> QuadratureRule:
    """Gauss-Legendre (in cos theta) x uniform longitude rule exact for degree <= K."""
    if K < 0:
        raise ValueError("bandwidth must be nonnegative")
    n_theta = K // 2 + 1
    n_phi = K + 1
    t, w = gauss_legendre(n_theta)
    theta = np.arccos(t)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    nodes = from_spherical(th, ph).reshape(-1, 3)
    weights = np.repeat(w * (2.0 * np.pi / n_phi), n_phi)
    return QuadratureRule("S2", nodes, weights, K, {"n_theta": n_theta, "n_phi": n_phi})


def haar_quadrature(K: int) -> QuadratureRule:
    """Rule for the normalised Haar measure ``(1/8 pi^2) sin b da db dg``.

    Uniform grids of ``2K+1`` points in alpha and gamma and ``K+1``
    Gauss-Legendre points in ``cos beta``.  Exact for all products
    ``T^k_{ij} conj(T^l_{mn})`` with ``k, l <= K`` (exact degree ``2K``).
    """
    if K < 0:
        raise ValueError("bandwidth must be nonnegative")
    n_ang = 2 * K + 1
    t, w = gauss_legendre(K + 1)
    beta = np.arccos(t)
    ang = 2.0 * np.pi * np.arange(n_ang) / n_ang
    a, b, g = np.meshgrid(ang, beta, ang, indexing="ij")
    nodes = rot.canonical_sign(rot.zxz_to_quat(a, b, g).reshape(-1, 4))
    wb = w / (8.0 * np.pi**2) * (2.0 * np.pi / n_ang) ** 2
    weights = np.broadcast_to(wb[None, :, None], a.shape).reshape(-1).copy()
    euler = np.stack([a.reshape(-1), b.reshape(-1), g.reshape(-1)], axis=1)
    return QuadratureRule("SO3", nodes, weights, 2 * K, {"bandwidth": K, "euler": euler})

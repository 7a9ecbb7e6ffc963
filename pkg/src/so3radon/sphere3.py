"""Geodesic Radon transform on S^3 and the Helgason and Matthies inversions.

A function ``f`` on SO(3) lifts to the even function ``F(q) = f(tau(q))`` on
the unit quaternions.  Its great-circle transform ``F^`` averages ``F`` over
a great circle of S^3; for the circle lifting ``{g : g x = y}`` this is
exactly ``Rf(x, y)``.

Inversion runs through the dual transform ``Phi(rho)(q)``, the mean of
``F^`` over all great circles at distance ``rho`` from ``q``, and

    F(q) = Phi(pi/2)(q) + 2 int_0^pi d/dcos(theta) [Phi(theta/2)(q)] cos(theta/2) dtheta.

``Phi(theta/2)`` is a polynomial in ``cos(theta)`` for bandlimited ``F``, so
the derivative is taken from a Chebyshev fit in ``cos(theta)``.  This module
is a verification tier: tolerances are around ``1e-2`` by design, although
for bandlimited input the results are usually far more accurate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C

from . import rotations as rot
from .harmonics.quadrature import gauss_legendre, sphere_quadrature
from .harmonics.spectra import SO3Spectrum, synth_so3


@dataclass(frozen=True)
class LiftedFunction:
    """``F(q) = f(tau(q))`` for a spectrum ``f``; even by construction."""

    f: SO3Spectrum

    @property
    def bandwidth(self) -> int:
        return self.f.bandwidth

    def __call__(self, q):
        # as_quaternions canonicalises the sign, so F(q) == F(-q) bit for bit
        return synth_so3(self.f, np.atleast_2d(q))


@dataclass(frozen=True)
class CircleFamilySample:
    """Quadrature over great circles at distance ``rho`` from ``q``.

    Circle ``n`` is spanned by ``u[n]`` (its point nearest to ``q``) and
    ``v[n]``; ``weights`` sum to one.
    """

    q: np.ndarray
    rho: float
    u: np.ndarray
    v: np.ndarray
    weights: np.ndarray

    def distances(self) -> np.ndarray:
        """Spherical distance from ``q`` to each sampled circle."""
        a = self.u @ self.q
        b = self.v @ self.q
        return np.arccos(np.clip(np.hypot(a, b), -1.0, 1.0))


def _default_nodes(K: int) -> int:
    return 2 * K + 2


def circle_mean(F, q1, q2, n: int | None = None):
    """Mean of ``F`` over the great circles ``q1 cos t + q2 sin t`` (vectorised)."""
    q1 = np.atleast_2d(q1)
    q2 = np.atleast_2d(q2)
    if n is None:
        n = _default_nodes(F.bandwidth)
    t = 2.0 * np.pi * np.arange(n) / n
    q = np.cos(t)[None, :, None] * q1[:, None, :] + np.sin(t)[None, :, None] * q2[:, None, :]
    return F(q.reshape(-1, 4)).reshape(len(q1), n).mean(axis=1)


def geodesic_radon(F: LiftedFunction, c: rot.GreatCirclePair, n: int | None = None):
    """``F^(xi) = (1/2 pi) int_xi F`` for the circle ``xi`` of ``c``."""
    return circle_mean(F, c.q1.as_array(), c.q2.as_array(), n)[0]


def fhat_pair(F: LiftedFunction, x, y, n: int | None = None):
    """``F^`` on the circle lifting ``{g : g x = y}``; antipodal pairs allowed."""
    q1, q2 = rot.circle_basis(x, y)
    return circle_mean(F, q1, q2, n)


def _orthonormal_complement(vectors):
    """Orthonormal basis of the complement of the rows of ``vectors`` in R^4."""
    _, _, vt = np.linalg.svd(np.atleast_2d(vectors))
    r = np.atleast_2d(vectors).shape[0]
    return vt[r:]


def circle_family(q, rho: float, m: int = 8) -> CircleFamilySample:
    """Product rule over great circles at distance ``rho`` from ``q``.

    The nearest point ``u = cos(rho) q + sin(rho) w`` runs over a
    Gauss-by-uniform rule of degree ``m`` on the 2-sphere ``w`` of unit
    vectors orthogonal to ``q``; the second spanning vector ``v`` runs over
    ``2m + 2`` uniform angles on the unit circle orthogonal to ``q`` and ``w``.
    """
    q = np.asarray(q, float).reshape(4)
    q = q / np.linalg.norm(q)
    if not 0.0 <= rho <= np.pi / 2 + 1e-12:
        raise ValueError("rho must lie in [0, pi/2]")
    E = _orthonormal_complement(q)  # (3, 4)
    srule = sphere_quadrature(m)
    w = srule.nodes @ E  # (Nw, 4)
    n_v = 2 * m + 2
    s = 2.0 * np.pi * np.arange(n_v) / n_v
    us, vs, ws = [], [], []
    for wn, wt in zip(w, srule.weights):
        a, b = _orthonormal_complement(np.stack([q, wn]))
        vs.append(np.cos(s)[:, None] * a + np.sin(s)[:, None] * b)
        us.append(np.broadcast_to(np.cos(rho) * q + np.sin(rho) * wn, (n_v, 4)))
        ws.append(np.full(n_v, wt / (4.0 * np.pi * n_v)))
    return CircleFamilySample(q, float(rho), np.concatenate(us), np.concatenate(vs), np.concatenate(ws))


def dual_transform(phi, q, rho: float, m: int = 8) -> float:
    """Mean of the circle function ``phi(u, v)`` over circles at distance ``rho`` from ``q``.

    ``phi`` receives two ``(N, 4)`` arrays spanning the circles and returns
    ``N`` values (for instance ``lambda u, v: circle_mean(F, u, v)``).
    """
    fam = circle_family(q, rho, m)
    return np.sum(fam.weights * phi(fam.u, fam.v))


def _small_circle(y, rho, n):
    """``n`` uniform points on the circle of angular radius ``rho`` about each ``y``."""
    y = np.atleast_2d(y)
    helper = np.where(np.abs(y[:, :1]) < 0.9, [[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]])
    a = np.cross(y, helper)
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b = np.cross(y, a)
    s = 2.0 * np.pi * np.arange(n) / n
    ring = np.cos(s)[None, :, None] * a[:, None, :] + np.sin(s)[None, :, None] * b[:, None, :]
    return np.cos(rho) * y[:, None, :] + np.sin(rho) * ring


def angle_density(F: LiftedFunction, x, y, rho: float, n: int | None = None):
    """``(AF)(x, y; rho)``: mean of ``F^(x, .)`` over the circle of radius ``rho`` about ``y``.

    Pairs with ``y' = -x`` on the small circle use the exact limiting great
    circle of half-turns, so no perturbation of ``y'`` is needed.
    """
    scalar = np.ndim(x) == 1 and np.ndim(y) == 1
    x = np.atleast_2d(np.asarray(x, float))
    y = np.atleast_2d(np.asarray(y, float))
    x, y = np.broadcast_arrays(x, y)
    if n is None:
        n = _default_nodes(F.bandwidth)
    yp = _small_circle(y, rho, n)  # (N, n, 3)
    xs = np.repeat(x, n, axis=0)
    vals = fhat_pair(F, xs, yp.reshape(-1, 3)).reshape(len(x), n).mean(axis=1)
    return vals[0] if scalar else vals


# ---------------------------------------------------------------------------
# identities and inversion formulas
# ---------------------------------------------------------------------------

def _dual_of_lift(F: LiftedFunction, q, rho: float, m: int | None = None) -> float:
    if m is None:
        m = 2 * F.bandwidth + 2
    return dual_transform(lambda u, v: circle_mean(F, u, v), q, rho, m)


def _sphere_rule_for(F):
    return sphere_quadrature(2 * F.bandwidth + 2)


def identity_r0(F: LiftedFunction, q):
    """Both sides of ``int_{S^2} F^(x, -g x) dx = 4 pi Phi(pi/2)(q)`` with ``g = tau(q)``."""
    rule = _sphere_rule_for(F)
    x = rule.nodes
    gx = rot.rotate(np.asarray(q, float).reshape(1, 4), x)
    lhs = np.sum(rule.weights * fhat_pair(F, x, -gx))
    rhs = 4.0 * np.pi * _dual_of_lift(F, q, np.pi / 2)
    return lhs, rhs


def angle_integral(F: LiftedFunction, q, theta):
    """``A(theta) = int_{S^2} (AF)(x, g x; theta) dx`` with ``g = tau(q)``."""
    rule = _sphere_rule_for(F)
    x = rule.nodes
    gx = rot.rotate(np.asarray(q, float).reshape(1, 4), x)
    theta = np.atleast_1d(theta)
    return np.array([np.sum(rule.weights * angle_density(F, x, gx, th)) for th in theta])


def identity_r1(F: LiftedFunction, q, theta: float):
    """Both sides of ``int_{S^2} (AF)(x, g x; theta) dx = 4 pi Phi(theta/2)(q)``."""
    lhs = angle_integral(F, q, theta)[0]
    rhs = 4.0 * np.pi * _dual_of_lift(F, q, theta / 2)
    return lhs, rhs


def _derivative_integral(values_at, degree: int, n_theta: int):
    """``int_0^pi p'(cos theta) cos(theta/2) dtheta`` for the Chebyshev fit ``p``.

    ``values_at(t)`` returns samples at ``theta = arccos(t)``.
    """
    t = np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))
    coef = C.chebfit(t, values_at(t), degree)
    dcoef = C.chebder(coef)
    z, w = gauss_legendre(n_theta)
    theta = 0.5 * np.pi * (z + 1.0)
    return 0.5 * np.pi * np.sum(w * C.chebval(np.cos(theta), dcoef) * np.cos(theta / 2))


@dataclass(frozen=True)
class InversionResult:
    value: complex
    error_estimate: float


def _invert(values_at, base, degree, n_theta):
    main = _derivative_integral(values_at, degree, n_theta)
    alt = _derivative_integral(values_at, degree + 2, n_theta + 8)
    return InversionResult(base + 2.0 * main, float(2.0 * abs(alt - main)))


def helgason_invert(F: LiftedFunction, q, degree: int | None = None, n_theta: int = 32) -> InversionResult:
    """Recover ``F(q)`` from great-circle means through the dual transform.

    Parameters
    ----------
    F : LiftedFunction
        Used only through its circle means ``F^``.
    q : array_like, shape (4,)
    degree : int, optional
        Degree of the Chebyshev fit in ``cos(theta)``; defaults to ``K + 2``.
    n_theta : int
        Gauss-Legendre nodes for the outer ``theta`` integral.
    """
    degree = F.bandwidth + 2 if degree is None else degree

    def values_at(t):
        return np.array([_dual_of_lift(F, q, np.arccos(tj) / 2) for tj in t])

    return _invert(values_at, _dual_of_lift(F, q, np.pi / 2), degree, n_theta)


def matthies_invert(F: LiftedFunction, g, degree: int | None = None, n_theta: int = 32) -> InversionResult:
    """Recover ``f(g)`` from ``F^`` and the angle density ``AF``.

    ``f(g) = (1/4 pi) int F^(x, -g x) dx
    + (1/2 pi) int_0^pi int d/dcos(theta) (AF)(x, g x; theta) dx cos(theta/2) dtheta``.
    """
    q = rot.as_quaternions(g)[0]
    degree = F.bandwidth + 2 if degree is None else degree
    rule = _sphere_rule_for(F)
    gx = rot.rotate(q[None, :], rule.nodes)
    first = np.sum(rule.weights * fhat_pair(F, rule.nodes, -gx)) / (4.0 * np.pi)

    def values_at(t):
        return angle_integral(F, q, np.arccos(t)) / (4.0 * np.pi)

    return _invert(values_at, first, degree, n_theta)

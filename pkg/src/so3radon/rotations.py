"""Rotation representations and the quaternion double cover of SO(3).

Rotations are stored as unit quaternions ``[a0, a1, a2, a3]`` (scalar first).
The vectorised helpers operate on arrays of shape ``(..., 4)``; the small value
classes wrap single rotations for the public API and for serialization.

Euler angles follow the ZXZ convention ``g = Z(gamma) X(beta) Z(alpha)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

_UNIT_TOL = 1e-12
_ANTIPODAL_TOL = 1e-9


class AntipodalPairError(ValueError):
    """Raised when a great circle is requested for an antipodal pair x = -y."""


# ---------------------------------------------------------------------------
# vectorised quaternion algebra
# ---------------------------------------------------------------------------

def quat_mul(p, q):
    """Hamilton product of quaternion arrays (broadcasting over leading axes)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    p0, p1, p2, p3 = np.moveaxis(p, -1, 0)
    q0, q1, q2, q3 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
            p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
            p0 * q2 - p1 * q3 + p2 * q0 + p3 * q1,
            p0 * q3 + p1 * q2 - p2 * q1 + p3 * q0,
        ],
        axis=-1,
    )


def quat_conj(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def pure(v):
    """Embed vectors of R^3 as pure quaternions."""
    v = np.asarray(v, dtype=float)
    return np.concatenate([np.zeros(v.shape[:-1] + (1,)), v], axis=-1)


def canonical_sign(q):
    """Choose the representative of ``{q, -q}`` with ``a0 > 0``.

    Ties (``a0 == 0``) are broken by making the first nonzero component
    positive, so that the result is a function of the rotation alone.
    """
    q = np.array(q, dtype=float, copy=True)
    flat = q.reshape(-1, 4)
    nonzero = flat != 0.0
    first = np.argmax(nonzero, axis=1)
    lead = flat[np.arange(len(flat)), first]
    flat[lead < 0] *= -1.0
    return flat.reshape(q.shape)


def normalize(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def rotate(q, v):
    """Apply ``tau(q)`` to vectors: ``v -> q v conj(q)``."""
    return quat_mul(quat_mul(q, pure(v)), quat_conj(q))[..., 1:]


def quat_to_matrix(q):
    """Rotation matrices ``tau(q)`` for an array of unit quaternions."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = np.moveaxis(q, -1, 0)
    m = np.empty(q.shape[:-1] + (3, 3))
    m[..., 0, 0] = w * w + x * x - y * y - z * z
    m[..., 0, 1] = 2 * (x * y - w * z)
    m[..., 0, 2] = 2 * (x * z + w * y)
    m[..., 1, 0] = 2 * (x * y + w * z)
    m[..., 1, 1] = w * w - x * x + y * y - z * z
    m[..., 1, 2] = 2 * (y * z - w * x)
    m[..., 2, 0] = 2 * (x * z - w * y)
    m[..., 2, 1] = 2 * (y * z + w * x)
    m[..., 2, 2] = w * w - x * x - y * y + z * z
    return m


def matrix_to_quat(m):
    """Unit quaternions (canonical sign) for an array of rotation matrices.

    Uses the largest-diagonal branch (Shepperd) for conditioning.
    """
    m = np.asarray(m, dtype=float)
    flat = m.reshape(-1, 3, 3)
    out = np.empty((len(flat), 4))
    tr = np.trace(flat, axis1=1, axis2=2)
    diag = np.stack([tr, flat[:, 0, 0], flat[:, 1, 1], flat[:, 2, 2]], axis=1)
    branch = np.argmax(diag, axis=1)
    for n, (r, b) in enumerate(zip(flat, branch)):
        if b == 0:
            s = 2.0 * np.sqrt(1.0 + tr[n])
            out[n] = [0.25 * s, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s]
        elif b == 1:
            s = 2.0 * np.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2])
            out[n] = [(r[2, 1] - r[1, 2]) / s, 0.25 * s, (r[0, 1] + r[1, 0]) / s, (r[0, 2] + r[2, 0]) / s]
        elif b == 2:
            s = 2.0 * np.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2])
            out[n] = [(r[0, 2] - r[2, 0]) / s, (r[0, 1] + r[1, 0]) / s, 0.25 * s, (r[1, 2] + r[2, 1]) / s]
        else:
            s = 2.0 * np.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1])
            out[n] = [(r[1, 0] - r[0, 1]) / s, (r[0, 2] + r[2, 0]) / s, (r[1, 2] + r[2, 1]) / s, 0.25 * s]
    return canonical_sign(normalize(out)).reshape(m.shape[:-2] + (4,))


def axis_angle_quat(axis, angle):
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis, axis=-1, keepdims=True)
    half = 0.5 * np.asarray(angle, dtype=float)
    return np.concatenate([np.cos(half)[..., None], np.sin(half)[..., None] * axis], axis=-1)


def zxz_to_quat(alpha, beta, gamma):
    """Quaternions of ``Z(gamma) X(beta) Z(alpha)`` (vectorised)."""
    alpha, beta, gamma = np.broadcast_arrays(
        np.asarray(alpha, float), np.asarray(beta, float), np.asarray(gamma, float)
    )
    s, d = 0.5 * (gamma + alpha), 0.5 * (gamma - alpha)
    cb, sb = np.cos(0.5 * beta), np.sin(0.5 * beta)
    return np.stack([cb * np.cos(s), sb * np.cos(d), sb * np.sin(d), cb * np.sin(s)], axis=-1)


def quat_to_zxz(q):
    """ZXZ Euler angles ``(alpha, beta, gamma)`` of quaternion arrays.

    At the gimbal points ``beta in {0, pi}`` the split is fixed by ``gamma = 0``.
    """
    q = np.asarray(q, dtype=float)
    w, x, y, z = np.moveaxis(q, -1, 0)
    beta = 2.0 * np.arctan2(np.hypot(x, y), np.hypot(w, z))
    s = 2.0 * np.arctan2(z, w)
    d = 2.0 * np.arctan2(y, x)
    gamma = 0.5 * (s + d)
    alpha = 0.5 * (s - d)
    top = np.hypot(x, y) < 1e-15
    bottom = np.hypot(w, z) < 1e-15
    alpha = np.where(top, s, alpha)
    gamma = np.where(top | bottom, 0.0, gamma)
    alpha = np.where(bottom, -d, alpha)
    return np.mod(alpha, TWO_PI), beta, np.mod(gamma, TWO_PI)


def quat_to_zyz(q):
    """ZYZ angles ``(a, b, c)`` with ``tau(q) = Rz(a) Ry(b) Rz(c)``.

    Only used internally for Wigner d-matrices; ``a`` and ``c`` are returned
    unreduced, which is harmless because they enter through integer phases.
    """
    q = np.asarray(q, dtype=float)
    w, x, y, z = np.moveaxis(q, -1, 0)
    half_sum = np.arctan2(z, w)
    half_diff = np.arctan2(x, y)
    b = 2.0 * np.arctan2(np.hypot(x, y), np.hypot(w, z))
    return half_sum - half_diff, b, half_sum + half_diff


def random_quaternions(rng, n):
    """Haar-uniform unit quaternions with canonical sign."""
    q = rng.standard_normal((n, 4))
    return canonical_sign(normalize(q))


def random_unit_vectors(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def z_matrix(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def x_matrix(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitQuaternion:
    a0: float
    a1: float
    a2: float
    a3: float

    @classmethod
    def from_array(cls, q, strict: bool = False) -> "UnitQuaternion":
        q = np.asarray(q, dtype=float).reshape(4)
        norm = np.linalg.norm(q)
        if abs(norm - 1.0) > _UNIT_TOL:
            if strict or norm == 0.0:
                raise ValueError(f"not a unit quaternion (norm {norm!r})")
            q = q / norm
        return cls(*map(float, q))

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2, self.a3])

    def conj(self) -> "UnitQuaternion":
        return UnitQuaternion(self.a0, -self.a1, -self.a2, -self.a3)

    def __mul__(self, other: "UnitQuaternion") -> "UnitQuaternion":
        return UnitQuaternion.from_array(quat_mul(self.as_array(), other.as_array()))

    def __neg__(self) -> "UnitQuaternion":
        return UnitQuaternion(-self.a0, -self.a1, -self.a2, -self.a3)

    def canonical(self) -> "UnitQuaternion":
        return UnitQuaternion(*map(float, canonical_sign(self.as_array())))

    def as_matrix(self) -> np.ndarray:
        return tau(self)

    def to_json(self) -> list:
        return [float(v) for v in self.as_array()]


@dataclass(frozen=True)
class EulerAngles:
    """ZXZ Euler angles, ``g = Z(gamma) X(beta) Z(alpha)``."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.beta <= np.pi:
            raise ValueError(f"beta={self.beta} outside [0, pi]")
        if not (0.0 <= self.alpha < TWO_PI and 0.0 <= self.gamma < TWO_PI):
            raise ValueError("alpha and gamma must lie in [0, 2pi)")

    def as_matrix(self) -> np.ndarray:
        return z_matrix(self.gamma) @ x_matrix(self.beta) @ z_matrix(self.alpha)

    def as_quaternion(self) -> UnitQuaternion:
        return quat_from_euler(self)


def tau(q, strict: bool = False) -> np.ndarray:
    """The covering map ``q -> (h -> q h conj(q))`` as a 3x3 rotation matrix.

    Non-unit input is renormalised unless ``strict`` is set.
    """
    if not isinstance(q, UnitQuaternion):
        q = UnitQuaternion.from_array(q, strict=strict)
    return quat_to_matrix(q.as_array())


def quat_from_euler(e: EulerAngles) -> UnitQuaternion:
    q = zxz_to_quat(e.alpha, e.beta, e.gamma)
    return UnitQuaternion(*map(float, canonical_sign(q)))


def euler_from_quat(q: UnitQuaternion) -> EulerAngles:
    alpha, beta, gamma = quat_to_zxz(q.as_array())
    beta = float(np.clip(beta, 0.0, np.pi))
    return EulerAngles(_wrap(alpha), beta, _wrap(gamma))


def _wrap(angle) -> float:
    # float modulo can round up to exactly 2 pi for tiny negative input
    a = float(angle) % TWO_PI
    return 0.0 if a >= TWO_PI else a


def as_quaternions(g) -> np.ndarray:
    """Coerce rotation-like input to a canonical ``(N, 4)`` quaternion array.

    Accepts :class:`UnitQuaternion`, :class:`EulerAngles`, a 3x3 matrix, an
    ``(N, 3, 3)`` stack, an ``(N, 4)`` quaternion array, or a sequence of the
    value types.
    """
    if isinstance(g, UnitQuaternion):
        return canonical_sign(g.as_array()[None])
    if isinstance(g, EulerAngles):
        return canonical_sign(zxz_to_quat(g.alpha, g.beta, g.gamma)[None])
    if isinstance(g, (list, tuple)) and g and isinstance(g[0], (UnitQuaternion, EulerAngles)):
        return np.vstack([as_quaternions(h) for h in g])
    arr = np.asarray(g, dtype=float)
    if arr.shape[-2:] == (3, 3):
        return matrix_to_quat(arr).reshape(-1, 4)
    if arr.shape[-1] == 4:
        return canonical_sign(normalize(arr.reshape(-1, 4)))
    raise ValueError(f"cannot interpret array of shape {arr.shape} as rotations")


# ---------------------------------------------------------------------------
# great circles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GreatCirclePair:
    """A circle ``C_{x,y}`` of rotations mapping ``y`` to ``x``, with its lift.

    ``q(t) = q1 cos t + q2 sin t`` runs through the lifted circle in S^3 and
    ``tau(q(t)) y = x`` for every ``t``.
    """

    x: np.ndarray
    y: np.ndarray
    q1: UnitQuaternion
    q2: UnitQuaternion
    eta: float

    def point(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.cos(t)[..., None] * self.q1.as_array() + np.sin(t)[..., None] * self.q2.as_array()


def _unit(v):
    v = np.asarray(v, dtype=float).reshape(3)
    n = np.linalg.norm(v)
    if abs(n - 1.0) > 1e-10:
        raise ValueError(f"expected a unit vector, got norm {n}")
    return v / n


def circle_from_pair(x, y) -> GreatCirclePair:
    """Lift of the circle of rotations with ``g y = x`` to unit quaternions.

    ``q1 = cos(eta/2) + sin(eta/2) (y x x)/|y x x|`` and ``q2 = (y + x)/|y + x|``
    with ``eta`` the angle between ``x`` and ``y``.  For ``x = y`` the
    stabiliser circle ``q1 = 1, q2 = x`` is returned.
    """
    x, y = _unit(x), _unit(y)
    if float(np.dot(x, y)) < -1.0 + _ANTIPODAL_TOL:
        raise AntipodalPairError("circle C_{x,y} requires x != -y")
    cross = np.cross(y, x)
    sin_eta = np.linalg.norm(cross)
    eta = float(np.arctan2(sin_eta, np.dot(x, y)))
    if sin_eta < 1e-15:
        axis = np.zeros(3)
        eta = 0.0
    else:
        axis = cross / sin_eta
    q1 = np.concatenate([[np.cos(eta / 2)], np.sin(eta / 2) * axis])
    s = x + y
    q2 = np.concatenate([[0.0], s / np.linalg.norm(s)])
    return GreatCirclePair(x, y, UnitQuaternion.from_array(q1), UnitQuaternion.from_array(q2), eta)


def circle_point(c: GreatCirclePair, t: float) -> UnitQuaternion:
    return UnitQuaternion.from_array(c.point(t))


def circle_basis(x, y):
    """Orthonormal quaternion pairs spanning ``{q : tau(q) x = y}`` (vectorised).

    Unlike :func:`circle_from_pair` this is well conditioned for every pair,
    antipodal ones included: a base rotation ``q0`` with ``tau(q0) x = y`` is
    composed with the stabiliser of ``x``, giving the basis ``(q0, q0 x)``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    x, y = np.broadcast_arrays(x, y)
    dot = np.einsum("ij,ij->i", x, y)
    near = dot < -0.5
    # from-to quaternion (1 + x.y, x cross y), valid away from antipodes
    src = np.where(near[:, None], -x, x)
    q0 = np.concatenate([(1.0 + np.einsum("ij,ij->i", src, y))[:, None], np.cross(src, y)], axis=1)
    q0 = normalize(q0)
    if np.any(near):
        # first flip x -> -x with a half-turn about an axis orthogonal to x
        xs = x[near]
        helper = np.where(np.abs(xs[:, :1]) < 0.9, [[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]])
        w = np.cross(xs, helper)
        w /= np.linalg.norm(w, axis=1, keepdims=True)
        q0[near] = quat_mul(q0[near], pure(w))
    q1 = q0
    q2 = quat_mul(q0, pure(x))
    return q1, q2

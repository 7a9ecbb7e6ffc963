"""Metric lattices and positive cubature on S^2 and S^2 x S^2, discrete inversion.

A rho-lattice has pairwise distances at least ``rho/2`` and covering radius
at most ``rho/2``.  On ``S^2 x S^2`` the metric is
``sqrt(d(x, x')^2 + d(y, y')^2)``, so a product of two sphere lattices with
separation ``s`` and covering radius ``c`` has separation ``s`` and covering
radius ``sqrt(2) c``.  Product lattices therefore need factors with
``c / s <= 1/sqrt(2)``, which the plain greedy construction does not
reach; they are built from spring-relaxed icosahedral (Goldberg-Coxeter)
grids instead.

Cubature weights reproduce every tensor moment
``int Y_p^a(x) conj(Y_q^b(y))`` with ``p, q <= D``, which integrates the
products ``Rf * Y_k^i conj(Y_k^j)`` exactly once ``D >= 2K``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.optimize import nnls
from scipy.spatial import ConvexHull, SphericalVoronoi, cKDTree

from .harmonics.special import degree_slice, from_spherical, sph_harm_all, to_spherical
from .harmonics.spectra import PairSpectrum, SO3Spectrum
from .radon import radon_invert

SPHERE_AREA = 4.0 * np.pi
PRODUCT_AREA = SPHERE_AREA**2
RESIDUAL_TOL = 1e-9
DEFAULT_C = 0.7


class LatticeError(RuntimeError):
    """A lattice could not be built or certified; carries the achieved radii."""

    def __init__(self, message, separation=None, covering=None):
        super().__init__(message)
        self.separation = separation
        self.covering = covering


class CubatureInfeasible(RuntimeError):
    """The moment system has no positive solution on this lattice."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class DegreeDeficiency(ValueError):
    pass


# ---------------------------------------------------------------------------
# geometry helpers
# ---------------------------------------------------------------------------

def chord_to_angle(d):
    return 2.0 * np.arcsin(np.clip(np.asarray(d) / 2.0, 0.0, 1.0))


def angle_to_chord(a):
    return 2.0 * np.sin(np.minimum(np.asarray(a, float), np.pi) / 2.0)


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    phi = np.pi * (1.0 + 5**0.5) * i
    r = np.sqrt(1.0 - z * z)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def probe_grid(mesh: float) -> np.ndarray:
    """Near-uniform probe points with spacing about ``mesh``."""
    n = max(64, int(math.ceil(SPHERE_AREA / mesh**2)))
    return fibonacci_sphere(n)


def separation(points) -> float:
    if len(points) < 2:
        return np.pi
    d, _ = cKDTree(points).query(points, k=2)
    return float(chord_to_angle(d[:, 1].min()))


def _voronoi_vertices(points):
    if len(points) < 4:
        return np.empty((0, 3))
    try:
        return SphericalVoronoi(points, threshold=1e-8).vertices
    except ValueError:
        return np.empty((0, 3))


def covering_radius(points, probes=None) -> float:
    """Largest distance from the sphere to the point set.

    Exact through the Voronoi vertices (the local maxima of the distance
    function), combined with an optional probe set.
    """
    points = np.atleast_2d(points)
    cand = _voronoi_vertices(points)
    if probes is not None:
        cand = np.vstack([cand, probes])
    if len(points) < 4:
        cand = np.vstack([cand, probe_grid(0.02)])
    d, _ = cKDTree(points).query(cand)
    return float(chord_to_angle(d.max()))


def multiplicity(points, radius, probes) -> int:
    """Largest number of points within ``radius`` of any probe or lattice point."""
    tree = cKDTree(points)
    cand = np.vstack([points, probes, _voronoi_vertices(points)])
    counts = tree.query_ball_point(cand, angle_to_chord(radius), return_length=True)
    return int(np.max(counts))


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricLattice:
    """Certified rho-lattice on ``"S2"`` or ``"S2xS2"``.

    Sphere lattices store ``points`` of shape ``(N, 3)``.  Product lattices
    store their two factors; :meth:`pairs` expands them in x-major order.
    """

    space: str
    rho: float
    certification: dict
    points: np.ndarray | None = None
    factors: tuple = ()

    def __len__(self):
        if self.space == "S2":
            return len(self.points)
        return len(self.factors[0]) * len(self.factors[1])

    def pairs(self):
        if self.space != "S2xS2":
            raise ValueError("pairs() is defined for product lattices")
        if self.points is not None:
            return self.points[:, 0], self.points[:, 1]
        X, Y = self.factors[0].points, self.factors[1].points
        return np.repeat(X, len(Y), axis=0), np.tile(Y, (len(X), 1))

    @property
    def is_product(self) -> bool:
        return self.space == "S2xS2" and self.points is None

    def to_json_dict(self) -> dict:
        out = {"space": self.space, "rho": self.rho, "certification": self.certification}
        if self.is_product:
            out["factors"] = [fac.to_json_dict() for fac in self.factors]
        else:
            out["points"] = np.asarray(self.points).tolist()
        return out

    @classmethod
    def from_json_dict(cls, d: dict) -> "MetricLattice":
        if "factors" in d:
            facs = tuple(cls.from_json_dict(x) for x in d["factors"])
            return cls(d["space"], float(d["rho"]), d["certification"], None, facs)
        return cls(d["space"], float(d["rho"]), d["certification"], np.asarray(d["points"], float))


def certify_s2(points, rho: float, probe_mesh: float | None = None) -> dict:
    """Certification record for a point set on S^2 (does not raise)."""
    points = np.atleast_2d(np.asarray(points, float))
    probes = probe_grid(probe_mesh or rho / 8)
    sep = separation(points)
    cov = covering_radius(points, probes)
    return {
        "min_pairwise_distance": sep,
        "covering_radius": cov,
        "max_multiplicity": multiplicity(points, rho, probes),
        "n_points": len(points),
        "valid": bool(sep >= rho / 2 - 1e-12 and cov <= rho / 2 + 1e-12),
    }


def lattice_from_points(points, rho: float) -> MetricLattice:
    """Certify ``points`` as a rho-lattice on S^2 or raise :class:`LatticeError`."""
    cert = certify_s2(points, rho)
    if not cert["valid"]:
        raise LatticeError(
            f"not a {rho}-lattice: separation {cert['min_pairwise_distance']:.4g} (need >= {rho / 2:.4g}), "
            f"covering {cert['covering_radius']:.4g} (need <= {rho / 2:.4g})",
            cert["min_pairwise_distance"],
            cert["covering_radius"],
        )
    return MetricLattice("S2", float(rho), cert, np.atleast_2d(np.asarray(points, float)))


def _greedy_thin(points, min_dist):
    tree = cKDTree(points)
    nbrs = tree.query_ball_point(points, angle_to_chord(min_dist) * (1 - 1e-12))
    alive = np.ones(len(points), bool)
    keep = []
    for i in range(len(points)):
        if alive[i]:
            keep.append(i)
            alive[nbrs[i]] = False
    return points[keep]


def build_lattice_s2(rho: float, max_rounds: int = 200) -> MetricLattice:
    """Greedy rho-lattice on S^2.

    A Fibonacci seed of ``ceil(16 / rho^2)`` points is thinned to
    separation ``rho/2``; farthest points (probe grid of mesh ``rho/8`` and
    Voronoi vertices) are then inserted while they lie farther than
    ``rho/2`` from the set.
    """
    if not 0.0 < rho < np.pi / 2:
        raise ValueError("rho must lie in (0, pi/2)")
    half = rho / 2
    pts = _greedy_thin(fibonacci_sphere(int(math.ceil(16.0 / rho**2))), half)
    probes = probe_grid(rho / 8)
    for _ in range(max_rounds):
        cand = np.vstack([_voronoi_vertices(pts), probes])
        d, _ = cKDTree(pts).query(cand)
        far = chord_to_angle(d) > half
        if not far.any():
            return lattice_from_points(pts, rho)
        order = np.argsort(-d[far])
        new = _greedy_thin(cand[far][order], half)
        pts = np.vstack([pts, new])
    cert = certify_s2(pts, rho)
    raise LatticeError(
        "iteration budget exhausted", cert["min_pairwise_distance"], cert["covering_radius"]
    )


# --- icosahedral factors for product lattices ------------------------------

def _icosahedron():
    p = (1 + 5**0.5) / 2
    v = np.array(
        [[-1, p, 0], [1, p, 0], [-1, -p, 0], [1, -p, 0], [0, -1, p], [0, 1, p],
         [0, -1, -p], [0, 1, -p], [p, 0, -1], [p, 0, 1], [-p, 0, -1], [-p, 0, 1]],
        float,
    )
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    faces = ConvexHull(v).simplices.copy()
    for f in faces:
        A, B, Cc = v[f]
        if np.dot(np.cross(B - A, Cc - A), A) < 0:
            f[[1, 2]] = f[[2, 1]]
    return v, faces


def goldberg_points(a: int, b: int) -> np.ndarray:
    """Geodesic icosahedral grid with ``10 (a^2 + ab + b^2) + 2`` points."""
    v, faces = _icosahedron()
    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.5, np.sqrt(3) / 2])
    P1 = a * e1 + b * e2
    c, s = 0.5, np.sqrt(3) / 2
    P2 = np.array([c * P1[0] - s * P1[1], s * P1[0] + c * P1[1]])
    Minv = np.linalg.inv(np.column_stack([P1, P2]))
    R = a + b + 1
    I, J = np.meshgrid(np.arange(-R, 2 * R), np.arange(-R, 2 * R))
    L = np.column_stack([I.ravel(), J.ravel()]) @ np.stack([e1, e2])
    w12 = L @ Minv.T
    W = np.column_stack([1.0 - w12.sum(axis=1), w12])
    W = W[(W > -1e-9).all(axis=1)]
    P = np.vstack([W @ v[f] for f in faces])
    P /= np.linalg.norm(P, axis=1, keepdims=True)
    keep = np.ones(len(P), bool)
    for i, j in sorted(cKDTree(P).query_pairs(1e-9)):
        if keep[i] and keep[j]:
            keep[j] = False
    return P[keep]


def spring_relax(X, beta: float, iters: int = 300, step: float = 0.2):
    """Relax a triangulated point set with edge springs of rest length ``beta * h``."""
    simp = ConvexHull(X).simplices
    E = np.unique(np.sort(np.vstack([simp[:, [0, 1]], simp[:, [1, 2]], simp[:, [2, 0]]]), axis=1), axis=0)
    L0 = beta * np.sqrt(8 * np.pi / (len(X) * np.sqrt(3)))
    for _ in range(iters):
        d = X[E[:, 1]] - X[E[:, 0]]
        ln = np.linalg.norm(d, axis=1)
        f = ((ln - L0) / ln)[:, None] * d
        F = np.zeros_like(X)
        np.add.at(F, E[:, 0], f)
        np.add.at(F, E[:, 1], -f)
        F -= np.sum(F * X, axis=1, keepdims=True) * X
        X = X + step * F
        X /= np.linalg.norm(X, axis=1, keepdims=True)
    return X


def _goldberg_shapes(t_min, t_max):
    out = []
    for a in range(1, int(np.sqrt(t_max)) + 2):
        for b in range(0, a + 1):
            T = a * a + a * b + b * b
            if t_min <= T <= t_max:
                out.append((T, a, b))
    return sorted(out)


@lru_cache(maxsize=32)
def _product_factor(rho: float):
    target_cov = rho / (2 * np.sqrt(2))
    half = rho / 2
    # empirically c * sqrt(N) ~ 2.25 and s * sqrt(N) ~ 3.45 for relaxed grids
    t_lo = max(1, int((2.0 / target_cov) ** 2 / 10) - 2)
    t_hi = int((3.7 / half) ** 2 / 10) + 2
    tried = []
    for _, a, b in _goldberg_shapes(t_lo, t_hi):
        base = goldberg_points(a, b)
        for beta in (1.2, 1.25, 1.1, 1.3, 1.0):
            X = spring_relax(base.copy(), beta)
            s, c = separation(X), covering_radius(X)
            tried.append(((a, b), beta, s, c))
            if s >= half and c <= target_cov:
                return X, (a, b, beta)
    best = min(tried, key=lambda r: max(half - r[2], r[3] - target_cov)) if tried else None
    raise LatticeError(
        f"no icosahedral factor certifies rho={rho}; best {best}",
        best[2] if best else None,
        best[3] if best else None,
    )


def product_factor_lattice(rho: float) -> MetricLattice:
    """Sphere lattice with separation ``>= rho/2`` and covering ``<= rho / (2 sqrt 2)``."""
    X, (a, b, beta) = _product_factor(float(rho))
    cert = certify_s2(X, rho)
    cert["construction"] = {"goldberg": [a, b], "spring_beta": beta}
    return MetricLattice("S2", float(rho), cert, X)


def product_lattice(rho: float, factors: tuple | None = None) -> MetricLattice:
    """rho-lattice on S^2 x S^2 as a product of two sphere point sets.

    Parameters
    ----------
    rho : float
    factors : pair of MetricLattice, optional
        Explicit factors.  By default both are :func:`product_factor_lattice`.
    """
    if factors is None:
        f = product_factor_lattice(rho)
        factors = (f, f)
    fx, fy = factors
    cx, cy = fx.certification, fy.certification
    sep = min(cx["min_pairwise_distance"], cy["min_pairwise_distance"])
    cov = float(np.hypot(cx["covering_radius"], cy["covering_radius"]))
    cert = {
        "min_pairwise_distance": sep,
        "covering_radius": cov,
        "max_multiplicity": int(cx["max_multiplicity"] * cy["max_multiplicity"]),
        "n_points": len(fx) * len(fy),
        "valid": bool(sep >= rho / 2 - 1e-12 and cov <= rho / 2 + 1e-12),
    }
    return MetricLattice("S2xS2", float(rho), cert, None, (fx, fy))


def pair_lattice(x, y, rho: float) -> MetricLattice:
    """Non-product node set on S^2 x S^2 (certification entries left as measured)."""
    pts = np.stack([np.atleast_2d(x), np.atleast_2d(y)], axis=1)
    cert = {"n_points": len(pts), "valid": False}
    if len(pts) > 1:
        # geodesic product distance, brute force for small sets
        dx = np.arccos(np.clip(pts[:, 0] @ pts[:, 0].T, -1, 1))
        dy = np.arccos(np.clip(pts[:, 1] @ pts[:, 1].T, -1, 1))
        d = np.hypot(dx, dy) + np.diag(np.full(len(pts), np.inf))
        cert["min_pairwise_distance"] = float(d.min())
    return MetricLattice("S2xS2", float(rho), cert, pts)


def recertify(lat: MetricLattice, seed: int = 12345, n_probe: int = 200000) -> dict:
    """Independent check of separation and covering with random probes.

    The random covering value is a lower bound on the true covering radius,
    so it must not exceed the stored (exact) one.
    """
    rng = np.random.default_rng(seed)

    def rand_sphere(n):
        v = rng.standard_normal((n, 3))
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    if lat.space == "S2":
        d, _ = cKDTree(lat.points).query(rand_sphere(n_probe))
        return {"min_pairwise_distance": separation(lat.points), "covering_lower_bound": float(chord_to_angle(d.max()))}
    fx, fy = lat.factors
    dx, _ = cKDTree(fx.points).query(rand_sphere(n_probe))
    dy, _ = cKDTree(fy.points).query(rand_sphere(n_probe))
    cov = np.hypot(chord_to_angle(dx), chord_to_angle(dy))
    return {
        "min_pairwise_distance": min(separation(fx.points), separation(fy.points)),
        "covering_lower_bound": float(cov.max()),
    }


def lattice_rho(K: int, C: float = DEFAULT_C) -> float:
    """``rho = C (omega + 1)^{-1/2}`` with ``omega = K (K + 1)``."""
    return C / np.sqrt(K * (K + 1) + 1.0)


# ---------------------------------------------------------------------------
# cubature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CubatureLattice:
    """Lattice with positive weights exact for tensor degree ``degree`` per sphere."""

    lattice: MetricLattice
    degree: int
    residual: float
    factor_weights: tuple = ()
    dense_weights: np.ndarray | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def weights(self) -> np.ndarray:
        if self.dense_weights is not None:
            return self.dense_weights
        wx, wy = self.factor_weights
        return np.outer(wx, wy).ravel()

    def weight_bounds(self) -> dict:
        """Min, median and max weight, also divided by ``rho^4``."""
        w = self.weights
        r4 = self.lattice.rho**4
        med = float(np.median(w))
        return {
            "min": float(w.min()),
            "median": med,
            "max": float(w.max()),
            "c1": float(w.min()) / r4,
            "c2": float(w.max()) / r4,
            "spread": float(max(w.max() / med, med / w.min())),
        }

    def to_json_dict(self) -> dict:
        out = {
            "lattice": self.lattice.to_json_dict(),
            "degree": self.degree,
            "solver_residual": self.residual,
        }
        if self.dense_weights is not None:
            out["weights"] = self.dense_weights.tolist()
        else:
            out["factor_weights"] = [w.tolist() for w in self.factor_weights]
        return out

    @classmethod
    def from_json_dict(cls, d: dict) -> "CubatureLattice":
        lat = MetricLattice.from_json_dict(d["lattice"])
        if "weights" in d:
            return cls(lat, int(d["degree"]), float(d["solver_residual"]), (), np.asarray(d["weights"], float))
        fw = tuple(np.asarray(w, float) for w in d["factor_weights"])
        return cls(lat, int(d["degree"]), float(d["solver_residual"]), fw)


def save_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj.to_json_dict()) + "\n")


def load_lattice(path):
    d = json.loads(Path(path).read_text())
    if "lattice" in d:
        return CubatureLattice.from_json_dict(d)
    return MetricLattice.from_json_dict(d)


def _real_rows(A):
    return np.vstack([A.real, A.imag])


def _positive_solve(A, b, w0, floor_frac=0.1):
    """Positive ``w`` with ``A w = b``: min-norm correction of ``w0``, else NNLS with a floor."""
    Ar, br = _real_rows(A), np.concatenate([b.real, b.imag])
    dw, *_ = np.linalg.lstsq(Ar, br - Ar @ w0, rcond=None)
    w = w0 + dw
    eps = floor_frac * w0.mean()
    method = "voronoi+lstsq"
    if w.min() < eps:
        z, _ = nnls(Ar, br - Ar @ np.full(len(w0), eps), maxiter=50 * len(w0))
        w = eps + z
        method = "nnls-floor"
    res = float(np.max(np.abs(A @ w - b)))
    return w, res, method


def sphere_moments(D: int, points):
    """Rows ``Y_p^a(x_n)`` for ``p <= D`` and their exact integrals."""
    A = sph_harm_all(D, points).T
    b = np.zeros(len(A), complex)
    b[0] = np.sqrt(SPHERE_AREA)
    return A, b


def sphere_cubature(points, D: int):
    """Positive weights on S^2 exact for degree ``D``, starting from Voronoi areas."""
    points = np.atleast_2d(points)
    if len(points) >= 4:
        w0 = SphericalVoronoi(points, threshold=1e-8).calculate_areas()
    else:
        w0 = np.full(len(points), SPHERE_AREA / len(points))
    A, b = sphere_moments(D, points)
    return _positive_solve(A, b, w0)


def _product_residual(wx, Xx, wy, Xy, D):
    mx = sph_harm_all(D, Xx).T @ wx
    my = sph_harm_all(D, Xy).T.conj() @ wy
    M = np.outer(mx, my)
    M[0, 0] -= SPHERE_AREA  # int Y_0^0 conj(Y_0^0) over S^2 x S^2
    return float(np.max(np.abs(M)))


def cubature_weights(lat: MetricLattice, D: int, tol: float = RESIDUAL_TOL) -> CubatureLattice:
    """Positive weights on ``S^2 x S^2`` reproducing all moments with ``p, q <= D``.

    Raises
    ------
    CubatureInfeasible
        If the residual of the moment system stays above ``tol``.
    """
    if lat.space != "S2xS2":
        raise ValueError("cubature_weights expects a lattice on S^2 x S^2")
    if lat.is_product:
        fx, fy = lat.factors
        wx, rx, mx = sphere_cubature(fx.points, D)
        if fy is fx:
            wy, ry, my = wx, rx, mx
        else:
            wy, ry, my = sphere_cubature(fy.points, D)
        res = _product_residual(wx, fx.points, wy, fy.points, D)
        if res > tol or wx.min() <= 0 or wy.min() <= 0:
            raise CubatureInfeasible(f"moment residual {res:.3g} exceeds {tol:g}", res)
        return CubatureLattice(lat, D, res, (wx, wy), None, {"method": [mx, my]})
    X, Y = lat.pairs()
    Ax = sph_harm_all(D, X)
    Ay = sph_harm_all(D, Y).conj()
    A = np.einsum("na,nb->abn", Ax, Ay).reshape(-1, len(X))
    b = np.zeros(len(A), complex)
    b[0] = SPHERE_AREA
    w0 = np.full(len(X), PRODUCT_AREA / len(X))
    w, res, method = _positive_solve(A, b, w0)
    if res > tol or w.min() <= 0:
        raise CubatureInfeasible(f"moment residual {res:.3g} exceeds {tol:g}", res)
    return CubatureLattice(lat, D, res, (), w, {"method": method})


def required_product_degree(K: int) -> int:
    """Per-sphere degree needed to integrate ``Rf * Y_k^i conj(Y_k^j)`` for bandwidth ``K``."""
    if K < 0:
        raise ValueError("bandwidth must be nonnegative")
    return 2 * K


def laplacian_dimension(omega_cut: float) -> int:
    """``dim`` of the span of ``Y_p (x) Y_q`` with ``p(p+1) + q(q+1) <= omega_cut``."""
    total = 0
    p = 0
    while p * (p + 1) <= omega_cut:
        q = 0
        while p * (p + 1) + q * (q + 1) <= omega_cut:
            total += (2 * p + 1) * (2 * q + 1)
            q += 1
        p += 1
    return total


def cardinality_report(cub: CubatureLattice, K: int) -> dict:
    D = required_product_degree(K)
    omega = K * (K + 1)
    return {
        "n_nodes": len(cub.lattice),
        "dim_per_sphere_degree": ((D + 1) ** 2) ** 2,
        "dim_laplacian_24omega": laplacian_dimension(24 * omega),
    }


# ---------------------------------------------------------------------------
# samples and discrete inversion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleSet:
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray

    def to_csv(self, path) -> None:
        tx, px = to_spherical(self.x)
        ty, py = to_spherical(self.y)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x_theta", "x_phi", "y_theta", "y_phi", "value"])
            for row in zip(tx, px, ty, py, np.real(self.values)):
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path) -> "SampleSet":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(from_spherical(data[:, 0], data[:, 1]), from_spherical(data[:, 2], data[:, 3]), data[:, 4])


def discrete_coefficients(samples, cub: CubatureLattice, K: int, chunk: int = 200000) -> PairSpectrum:
    """Coefficients ``G(k)_{ij} = sum_n mu_n Rf(x_n, y_n) conj(Y_k^i(x_n)) Y_k^j(y_n)``.

    ``samples`` is either a :class:`SampleSet` taken at the lattice nodes, a
    flat value vector in lattice order, or, for product lattices, an
    ``(Nx, Ny)`` grid of values.
    """
    if cub.degree < required_product_degree(K):
        raise DegreeDeficiency(f"cubature degree {cub.degree} < 2K = {2 * K}")
    lat = cub.lattice
    if isinstance(samples, SampleSet):
        x, y, v = samples.x, samples.y, np.asarray(samples.values)
        X, Y = lat.pairs()
        if len(x) != len(X) or not (np.allclose(x, X, atol=1e-9) and np.allclose(y, Y, atol=1e-9)):
            raise ValueError("samples must be taken at the lattice nodes, in lattice order")
        samples = v
    v = np.asarray(samples)
    if lat.is_product:
        fx, fy = lat.factors
        V = v.reshape(len(fx), len(fy))
        wx, wy = cub.factor_weights
        Yx = sph_harm_all(K, fx.points)
        Yy = sph_harm_all(K, fy.points)
        WV = wx[:, None] * V * wy[None, :]
        blocks = []
        for k in range(K + 1):
            s = degree_slice(k)
            blocks.append(Yx[:, s].conj().T @ WV @ Yy[:, s])
        return PairSpectrum(tuple(blocks))
    X, Y = lat.pairs()
    w = cub.weights
    blocks = [np.zeros((2 * k + 1, 2 * k + 1), complex) for k in range(K + 1)]
    for a in range(0, len(X), chunk):
        Yx = sph_harm_all(K, X[a : a + chunk]).conj()
        Yy = sph_harm_all(K, Y[a : a + chunk])
        wv = w[a : a + chunk] * v.ravel()[a : a + chunk]
        for k in range(K + 1):
            s = degree_slice(k)
            blocks[k] += np.einsum("n,ni,nj->ij", wv, Yx[:, s], Yy[:, s])
    return PairSpectrum(tuple(blocks))


def discrete_invert(samples, cub: CubatureLattice, K: int) -> SO3Spectrum:
    """Reconstruct ``f`` of bandwidth ``K`` from Radon samples on the lattice."""
    return radon_invert(discrete_coefficients(samples, cub, K))


def noise_bound(cub: CubatureLattice, K: int, delta: float) -> dict:
    """Worst-case coefficient changes for sample perturbations of size ``delta``.

    Uses ``|Y_k^i|^2 <= (2k+1)/(4 pi)``.
    """
    total = float(np.sum(cub.weights))
    pair = [delta * total * (2 * k + 1) / SPHERE_AREA for k in range(K + 1)]
    odf = [p * (2 * k + 1) / SPHERE_AREA for k, p in enumerate(pair)]
    return {"pair": pair, "so3": odf}

"""Invariant suites shared by ``so3radon verify`` and the pipeline report.

Each suite returns a list of :class:`Check` records with the measured
value and the tolerance it was compared against.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import radon, rotations as rot, sampling, sphere3
from .harmonics import (
    FOUR_PI,
    SO3Spectrum,
    eval_pair_grid,
    fourier_matrices,
    haar_quadrature,
    legendre,
    random_so3_spectrum,
    real_part,
    sph_harm_all,
    sph_harm_degree,
    synth_so3,
    wigner_matrices,
)


@dataclass
class Check:
    suite: str
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tol)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def harmonics_suite(rng) -> list:
    n = 1000
    x = rot.random_unit_vectors(rng, n)
    y = rot.random_unit_vectors(rng, n)
    K = 8
    Yx, Yy = sph_harm_all(K, x), sph_harm_all(K, y)
    t = np.einsum("ij,ij->i", x, y)
    add = 0.0
    for k in range(K + 1):
        s = slice(k * k, (k + 1) ** 2)
        lhs = np.sum(Yx[:, s] * Yy[:, s].conj(), axis=1)
        add = max(add, np.max(np.abs(lhs - (2 * k + 1) / FOUR_PI * legendre(k, t))))
    par = 0.0
    Ym = sph_harm_all(K, -x)
    for k in range(K + 1):
        s = slice(k * k, (k + 1) ** 2)
        par = max(par, np.max(np.abs(Ym[:, s] - (-1) ** k * Yx[:, s])))
    g = rot.random_quaternions(rng, n)
    ginv_x = rot.rotate(rot.quat_conj(g), x)
    exp_err = 0.0
    mats = wigner_matrices(6, g)
    for k in range(7):
        lhs = sph_harm_degree(k, ginv_x)
        rhs = np.einsum("nij,nj->ni", mats[k], sph_harm_degree(k, x))
        exp_err = max(exp_err, np.max(np.abs(lhs - rhs)))
    f = random_so3_spectrum(4, rng)
    rule = haar_quadrature(8)
    vals = synth_so3(f, rule.nodes)
    lhs = float(np.sum(rule.weights * np.abs(vals) ** 2))
    rhs = sum((2 * k + 1) * np.sum(np.abs(F) ** 2) for k, F in enumerate(fourier_matrices(f)))
    return [
        Check("harmonics", "addition_theorem", float(add), 1e-10),
        Check("harmonics", "parity", float(par), 1e-10),
        Check("harmonics", "wigner_expansion", float(exp_err), 1e-10),
        Check("harmonics", "parseval", abs(lhs - rhs) / rhs, 1e-10),
    ]


def rotations_suite(rng) -> list:
    q = rot.random_quaternions(rng, 100)
    p = rot.random_quaternions(rng, 100)
    hom = np.max(np.abs(rot.quat_to_matrix(rot.quat_mul(q, p)) - rot.quat_to_matrix(q) @ rot.quat_to_matrix(p)))
    cover = np.max(np.abs(rot.quat_to_matrix(q) - rot.quat_to_matrix(-q)))
    x = rot.random_unit_vectors(rng, 20)
    y = rot.random_unit_vectors(rng, 20)
    circ = 0.0
    for xi, yi in zip(x, y):
        c = rot.circle_from_pair(xi, yi)
        for t in (0.0, np.pi / 3, 1.7):
            circ = max(circ, np.max(np.abs(rot.rotate(c.point(t)[None], yi[None])[0] - xi)))
    return [
        Check("rotations", "homomorphism", float(hom), 1e-10),
        Check("rotations", "double_cover", float(cover), 1e-12),
        Check("rotations", "circle_maps_y_to_x", float(circ), 1e-10),
    ]


def radon_suite(rng) -> list:
    f = random_so3_spectrum(6, rng)
    G = radon.radon_forward_spectral(f)
    iso = abs(radon.isometric_norm(G) - radon.sobolev_norm_so3(f)) / radon.sobolev_norm_so3(f)
    rt = radon.radon_invert(G).max_abs_diff(f)
    adj = radon.radon_adjoint(G).scaled(lambda k: 1.0 / (4.0 * np.pi)).max_abs_diff(f)
    x = rot.random_unit_vectors(rng, 50)
    y = rot.random_unit_vectors(rng, 50)
    num = np.max(np.abs(radon.radon_forward_numeric(f, x, y) - radon.radon_eval(G, x, y)))
    odd = random_so3_spectrum(7, rng).map_blocks(lambda k, b: b * (k % 2))
    kern = max(float(np.max(np.abs(b))) for b in radon.xray_forward(odd).blocks)
    return [
        Check("radon", "isometry", float(iso), 1e-10),
        Check("radon", "round_trip", rt, 1e-12),
        Check("radon", "adjoint_identity", adj, 1e-10),
        Check("radon", "numeric_vs_spectral", float(num), 1e-9),
        Check("radon", "xray_odd_kernel", kern, 0.0),
    ]


def sphere3_suite(rng, n_rot: int = 3) -> list:
    f = real_part(random_so3_spectrum(2, rng))
    F = sphere3.LiftedFunction(f)
    one = sphere3.LiftedFunction(SO3Spectrum((np.ones((1, 1)),)))
    q = rot.random_quaternions(rng, n_rot)
    truth = F(q).real
    scale = np.max(np.abs(truth))
    hel = max(abs(sphere3.helgason_invert(F, qi).value - ti) for qi, ti in zip(q, truth)) / scale
    mat = max(abs(sphere3.matthies_invert(F, qi).value - ti) for qi, ti in zip(q, truth)) / scale
    l0, r0 = sphere3.identity_r0(F, q[0])
    l1, r1 = sphere3.identity_r1(F, q[0], np.pi / 3)
    const = abs(sphere3.matthies_invert(one, q[0]).value - 1.0)
    return [
        Check("sphere3", "helgason_relative", float(hel), 1e-2),
        Check("sphere3", "matthies_relative", float(mat), 1e-2),
        Check("sphere3", "identity_r0", float(abs(l0 - r0)), 1e-4),
        Check("sphere3", "identity_r1", float(abs(l1 - r1)), 1e-4),
        Check("sphere3", "constant_one", float(const), 1e-10),
    ]


def sampling_suite(rng, K: int = 2) -> list:
    rho = sampling.lattice_rho(K)
    lat = sampling.product_lattice(rho)
    cub = sampling.cubature_weights(lat, sampling.required_product_degree(K))
    f = random_so3_spectrum(K, rng)
    G = radon.radon_forward_spectral(f)
    fx, fy = lat.factors
    vals = eval_pair_grid(G, fx.points, fy.points)
    err = sampling.discrete_invert(vals, cub, K).max_abs_diff(f)
    cert = lat.certification
    return [
        Check("sampling", "separation_margin", rho / 2 - cert["min_pairwise_distance"], 0.0),
        Check("sampling", "covering_margin", cert["covering_radius"] - rho / 2, 0.0),
        Check("sampling", "cubature_residual", cub.residual, 1e-9),
        Check("sampling", "discrete_inversion", err, 1e-8),
    ]


SUITES = {
    "harmonics": harmonics_suite,
    "rotations": rotations_suite,
    "radon": radon_suite,
    "sphere3": sphere3_suite,
    "sampling": sampling_suite,
}


def run_suites(names=None, seed: int = 0) -> list:
    names = list(SUITES) if not names or names == ["all"] else names
    out = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
        out.extend(SUITES[name](np.random.default_rng(seed)))
    return out

"""Acceptance criteria 1-8, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import time

import numpy as np

from so3radon import radon, sampling, sphere3
from so3radon import rotations as rot
from so3radon.harmonics import (
    FOUR_PI,
    SO3Spectrum,
    basis_function,
    eval_pair_grid,
    legendre,
    random_so3_spectrum,
    real_part,
    sph_harm_all,
    sph_harm_degree,
    sphere_quadrature,
    synth_so3,
    wigner_matrices,
)


def test_criterion_1_spectral_round_trip(rng, acceptance):
    start = time.perf_counter()
    err = max(
        radon.radon_invert(radon.radon_forward_spectral(f)).max_abs_diff(f)
        for f in (random_so3_spectrum(8, rng) for _ in range(50))
    )
    elapsed = time.perf_counter() - start
    ok = err < 1e-12 and elapsed < 5.0
    acceptance(1, "spectral round trip", ok, f"max error {err:.2e}, {elapsed:.3f} s")
    assert ok


def test_criterion_2_basis_image(rng, acceptance):
    x, y = rot.random_unit_vectors(rng, 20), rot.random_unit_vectors(rng, 20)
    err = 0.0
    for k in range(7):
        Yx, Yy = sph_harm_degree(k, x), sph_harm_degree(k, y)
        for i in range(1, 2 * k + 2):
            for j in range(1, 2 * k + 2):
                num = radon.radon_forward_numeric(basis_function(k, i, j), x, y)
                exact = FOUR_PI / (2 * k + 1) * Yx[:, i - 1] * Yy[:, j - 1].conj()
                err = max(err, float(np.max(np.abs(num - exact))))
    ok = err < 1e-9 and radon.CIRCLE_LAMBDA == 1.0
    acceptance(2, "basis image law", ok, f"max error {err:.2e}, lambda = {radon.CIRCLE_LAMBDA}")
    assert ok


def test_criterion_3_isometry(rng, acceptance):
    err = 0.0
    for _ in range(50):
        f = random_so3_spectrum(6, rng)
        lhs = radon.sobolev_norm_so3(f)
        err = max(err, abs(radon.isometric_norm(radon.radon_forward_spectral(f)) - lhs) / lhs)
    ok = err < 1e-10
    acceptance(3, "isometry", ok, f"max relative error {err:.2e}")
    assert ok


def test_criterion_4_adjoint(rng, acceptance):
    f = random_so3_spectrum(6, rng)
    G = radon.radon_forward_spectral(f)
    spectral = radon.radon_adjoint(G).scaled(lambda k: 1.0 / FOUR_PI).max_abs_diff(f)
    g = rot.random_quaternions(rng, 10)
    integral = radon.adjoint_numeric(G, g, sphere_quadrature(12)) / FOUR_PI
    numeric = float(np.max(np.abs(integral - synth_so3(f, g))))
    ok = max(spectral, numeric) < 1e-10
    acceptance(4, "adjoint identity", ok, f"spectral {spectral:.2e}, integral form {numeric:.2e}")
    assert ok


def test_criterion_5_xray_kernel(rng, acceptance):
    kernel_nonzero = 0
    for k in range(1, 8, 2):
        for i in range(1, 2 * k + 2):
            for j in range(1, 2 * k + 2):
                P = radon.xray_forward(basis_function(k, i, j))
                kernel_nonzero += sum(int(np.count_nonzero(b)) for b in P.blocks)
    err = max(
        radon.radon_invert(radon.xray_forward(f)).max_abs_diff(radon.even_part(f))
        for f in (random_so3_spectrum(7, rng) for _ in range(20))
    )
    ok = kernel_nonzero == 0 and err < 1e-12
    acceptance(5, "x-ray kernel", ok, f"{kernel_nonzero} nonzero odd images, even-part error {err:.2e}")
    assert ok


def test_criterion_6_discrete_inversion(rng, acceptance):
    K = 3
    rho = sampling.lattice_rho(K)
    start = time.perf_counter()
    lat = sampling.product_lattice(rho)
    cub = sampling.cubature_weights(lat, sampling.required_product_degree(K))
    f = random_so3_spectrum(K, rng)
    fx, fy = lat.factors
    samples = eval_pair_grid(radon.radon_forward_spectral(f), fx.points, fy.points)
    err = sampling.discrete_invert(samples, cub, K).max_abs_diff(f)
    elapsed = time.perf_counter() - start
    w = cub.weights
    med = np.median(w)
    within4 = bool(w.max() <= 4 * med and w.min() >= med / 4)
    scaled = []
    for r in (0.5, 0.35, 0.25):
        c = sampling.cubature_weights(sampling.product_lattice(r), sampling.required_product_degree(K))
        scaled.append(np.median(c.weights) / r**4)
    scaling = max(scaled) / min(scaled)
    ok = (
        lat.certification["valid"]
        and cub.residual < 1e-9
        and w.min() > 0
        and err < 1e-8
        and within4
        and scaling < 2
        and elapsed < 60
    )
    detail = (
        f"rho {rho:.4f}, {len(lat)} nodes, residual {cub.residual:.1e}, error {err:.2e}, "
        f"weights in [{w.min() / med:.2f}, {w.max() / med:.2f}] x median, "
        f"median/rho^4 spread {scaling:.2f}, {elapsed:.1f} s"
    )
    acceptance(6, "discrete inversion", ok, detail)
    assert ok


def test_criterion_7_sphere3_inversion(rng, acceptance):
    F = sphere3.LiftedFunction(real_part(random_so3_spectrum(2, rng)))
    q = rot.random_quaternions(rng, 10)
    truth = F(q).real
    scale = np.max(np.abs(truth))
    hel = max(abs(sphere3.helgason_invert(F, qi).value - t) for qi, t in zip(q, truth)) / scale
    mat = max(abs(sphere3.matthies_invert(F, qi).value - t) for qi, t in zip(q, truth)) / scale
    ident = 0.0
    for qi in q[:3]:
        ident = max(ident, abs(np.subtract(*sphere3.identity_r0(F, qi))))
        for theta in (0.4, np.pi / 2, 2.5):
            ident = max(ident, abs(np.subtract(*sphere3.identity_r1(F, qi, theta))))
    one = sphere3.LiftedFunction(SO3Spectrum((np.ones((1, 1)),)))
    const = max(
        max(abs(sphere3.matthies_invert(one, qi).value - 1), abs(sphere3.helgason_invert(one, qi).value - 1))
        for qi in q[:3]
    )
    ok = hel < 1e-2 and mat < 1e-2 and ident < 1e-4 and const < 1e-10
    detail = f"helgason {hel:.1e}, matthies {mat:.1e}, identities {ident:.1e}, constant {const:.1e}"
    acceptance(7, "inversion on S^3", ok, detail)
    assert ok


def test_criterion_8_special_functions(rng, acceptance):
    n, K = 1000, 8
    x, y = rot.random_unit_vectors(rng, n), rot.random_unit_vectors(rng, n)
    Yx, Yy, Ym = sph_harm_all(K, x), sph_harm_all(K, y), sph_harm_all(K, -x)
    t = np.einsum("ij,ij->i", x, y)
    add = par = 0.0
    for k in range(K + 1):
        s = slice(k * k, (k + 1) ** 2)
        lhs = np.sum(Yx[:, s] * Yy[:, s].conj(), axis=1)
        add = max(add, np.max(np.abs(lhs - (2 * k + 1) / FOUR_PI * legendre(k, t))))
        par = max(par, np.max(np.abs(Ym[:, s] - (-1) ** k * Yx[:, s])))
    # Funk-Hecke with h(t) = t^3 + t^2 against every degree up to K
    rule = sphere_quadrature(K + 3)
    h = lambda s: s**3 + s**2  # noqa: E731
    tg, wg = np.polynomial.legendre.leggauss(K + 4)
    H = rule.weights[None, :] * h(y @ rule.nodes.T)
    lhs = H @ sph_harm_all(K, rule.nodes)
    fh = 0.0
    for k in range(K + 1):
        lam = 2 * np.pi * np.sum(wg * h(tg) * legendre(k, tg))
        s = slice(k * k, (k + 1) ** 2)
        fh = max(fh, np.max(np.abs(lhs[:, s] - lam * Yy[:, s])))
    g = rot.random_quaternions(rng, n)
    ginv_x = rot.rotate(rot.quat_conj(g), x)
    mats = wigner_matrices(K, g)
    wig = max(
        np.max(np.abs(sph_harm_degree(k, ginv_x) - np.einsum("nij,nj->ni", mats[k], Yx[:, k * k : (k + 1) ** 2])))
        for k in range(K + 1)
    )
    errs = {"addition": add, "parity": par, "funk_hecke": fh, "wigner": wig}
    ok = max(errs.values()) < 1e-10
    acceptance(8, "special functions", ok, ", ".join(f"{k} {v:.1e}" for k, v in errs.items()))
    assert ok

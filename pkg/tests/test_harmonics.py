import json

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from so3radon import rotations as rot
from so3radon.harmonics import (
    FOUR_PI,
    BandwidthError,
    PairSpectrum,
    SO3Spectrum,
    analyze_pair,
    analyze_so3,
    assoc_legendre,
    basis_function,
    convolve,
    degree_slice,
    eval_pair_grid,
    fourier_matrices,
    from_fourier_matrices,
    haar_quadrature,
    l2_norm_so3,
    laplacian,
    legendre,
    load_spectrum,
    order_from_index,
    order_index,
    random_pair_spectrum,
    random_so3_spectrum,
    real_part,
    save_spectrum,
    sph_harm,
    sph_harm_all,
    sph_harm_degree,
    sphere_quadrature,
    synth_so3,
    to_spherical,
    wigner_matrices,
    wigner_matrix,
    wigner_small_d,
)

# P_5^3(0.7) from the Rodrigues formula, evaluated symbolically with sympy
P53_AT_07 = -65.203205445414069766


def test_assoc_legendre_trivial():
    assert assoc_legendre(0, 0, 0.3) == 1.0
    assert np.isclose(assoc_legendre(1, 0, 0.42), 0.42)


def test_assoc_legendre_rodrigues_frozen():
    assert np.isclose(assoc_legendre(5, 3, 0.7), P53_AT_07, rtol=1e-13)


def test_assoc_legendre_rodrigues_symbolic():
    sp = pytest.importorskip("sympy")
    t = sp.symbols("t")
    for k, m in [(5, 3), (6, 1), (4, 4), (7, 0)]:
        pk = sp.diff((t**2 - 1) ** k, t, k) / (2**k * sp.factorial(k))
        pkm = (-1) ** m * (1 - t**2) ** sp.Rational(m, 2) * sp.diff(pk, t, m)
        for x in (-0.9, 0.1, 0.7):
            assert np.isclose(assoc_legendre(k, m, x), float(pkm.subs(t, x)), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("k,m,t", [(2, 3, 0.1), (3, 1, 1.2), (3, -1, 0.0)])
def test_assoc_legendre_domain(k, m, t):
    with pytest.raises(ValueError):
        assoc_legendre(k, m, t)


def test_index_map():
    assert order_index(3, -3) == 1 and order_index(3, 3) == 7
    assert order_from_index(2, 1) == -2
    with pytest.raises(ValueError):
        order_index(1, 2)
    assert degree_slice(2) == slice(4, 9)


def test_sph_harm_basics():
    assert np.isclose(sph_harm(0, 0, 0.4, 1.0), 1 / np.sqrt(FOUR_PI))
    for k in range(6):
        assert np.isclose(sph_harm(k, 0, 0.0, 0.3), np.sqrt((2 * k + 1) / FOUR_PI))
        for m in range(1, k + 1):
            assert abs(sph_harm(k, m, 0.0, 0.3)) < 1e-15
    with pytest.raises(ValueError):
        sph_harm(2, 1, -0.1, 0.0)
    with pytest.raises(ValueError):
        sph_harm(2, 3, 0.1, 0.0)


def test_sph_harm_matches_scipy(rng):
    ref = getattr(scipy.special, "sph_harm_y", None)
    if ref is None:
        pytest.skip("scipy without sph_harm_y")
    th, ph = rng.uniform(0, np.pi, 20), rng.uniform(0, 2 * np.pi, 20)
    for k in range(7):
        for m in range(-k, k + 1):
            assert np.allclose(sph_harm(k, m, th, ph), ref(k, m, th, ph), atol=1e-13)


def test_sph_harm_all_layout(rng):
    x = rot.random_unit_vectors(rng, 5)
    th, ph = to_spherical(x)
    Y = sph_harm_all(4, x)
    for k in range(5):
        for m in range(-k, k + 1):
            assert np.allclose(Y[:, k * k + m + k], sph_harm(k, m, th, ph))


def test_addition_theorem(rng):
    x, y = rot.random_unit_vectors(rng, 1000), rot.random_unit_vectors(rng, 1000)
    t = np.einsum("ij,ij->i", x, y)
    for k in range(9):
        lhs = np.sum(sph_harm_degree(k, x) * sph_harm_degree(k, y).conj(), axis=1)
        assert np.max(np.abs(lhs - (2 * k + 1) / FOUR_PI * legendre(k, t))) < 1e-11


def test_parity(rng):
    x = rot.random_unit_vectors(rng, 1000)
    for k in range(7):
        assert np.max(np.abs(sph_harm_degree(k, -x) - (-1) ** k * sph_harm_degree(k, x))) < 1e-11


@pytest.mark.parametrize("k", range(5))
def test_funk_hecke(rng, k):
    rule = sphere_quadrature(8)
    y = rot.random_unit_vectors(rng, 3)
    t, w = np.polynomial.legendre.leggauss(10)
    # |S^1| int_{-1}^{1} f(t) P_k(t) dt with f(t) = t^2
    lam = 2 * np.pi * np.sum(w * t**2 * legendre(k, t))
    Yx = sph_harm_degree(k, rule.nodes)
    for yi, Yy in zip(y, sph_harm_degree(k, y)):
        lhs = rule.integrate((rule.nodes @ yi)[:, None] ** 2 * Yx)
        assert np.max(np.abs(lhs - lam * Yy)) < 1e-9


def test_sphere_quadrature():
    rule = sphere_quadrature(6)
    assert np.isclose(rule.weights.sum(), FOUR_PI)
    Y = sph_harm_all(6, rule.nodes)
    I = rule.integrate(Y)
    assert np.isclose(I[0], np.sqrt(FOUR_PI))
    assert np.max(np.abs(I[1:])) < 1e-13
    Y32 = Y[:, 9 + 2 + 3]
    assert np.isclose(rule.integrate(np.abs(Y32) ** 2), 1.0)


def test_quadrature_rejects_nonpositive():
    from so3radon.harmonics import QuadratureRule

    with pytest.raises(ValueError):
        QuadratureRule("S2", np.zeros((2, 3)), np.array([1.0, 0.0]), 0)


def test_wigner_small_d_degree_one():
    b = np.array([0.3, 1.9])
    d = wigner_small_d(1, b)
    assert np.allclose(d[:, 1, 1], np.cos(b))
    assert np.allclose(d[:, 2, 2], (1 + np.cos(b)) / 2)
    assert np.allclose(d[:, 2, 1], -np.sin(b) / np.sqrt(2))


def test_wigner_identity_rotation():
    for k in range(5):
        assert np.allclose(wigner_matrix(k, rot.UnitQuaternion(1.0, 0.0, 0.0, 0.0)), np.eye(2 * k + 1))


def test_wigner_expansion_identity(rng):
    g = rot.random_quaternions(rng, 200)
    x = rot.random_unit_vectors(rng, 200)
    ginv_x = rot.rotate(rot.quat_conj(g), x)
    mats = wigner_matrices(6, g)
    for k in range(7):
        rhs = np.einsum("nij,nj->ni", mats[k], sph_harm_degree(k, x))
        assert np.max(np.abs(sph_harm_degree(k, ginv_x) - rhs)) < 1e-10


def test_wigner_accepts_euler_angles():
    e = rot.EulerAngles(0.4, 1.1, 2.3)
    x = np.array([[0.0, 0.6, 0.8]])
    ginv_x = x @ e.as_matrix()  # g^{-1} x as a row vector
    T = wigner_matrix(2, e)
    assert np.allclose(sph_harm_degree(2, ginv_x)[0], T @ sph_harm_degree(2, x)[0])


def test_wigner_unitary_and_order(rng):
    g, h = rot.random_quaternions(rng, 2)
    for k in range(5):
        Tg, Th = wigner_matrix(k, g), wigner_matrix(k, h)
        assert np.allclose(Tg @ Tg.conj().T, np.eye(2 * k + 1))
        # the expansion convention reverses products
        assert np.allclose(wigner_matrix(k, rot.quat_mul(g, h)), Th @ Tg)


def test_haar_quadrature_orthogonality():
    K = 3
    rule = haar_quadrature(K)
    assert np.isclose(rule.weights.sum(), 1.0)
    T = np.concatenate([m.reshape(len(rule), -1) for m in wigner_matrices(K, rule.nodes)], axis=1)
    gram = (T * rule.weights[:, None]).T @ T.conj()
    expected = np.concatenate([np.full((2 * k + 1) ** 2, 1.0 / (2 * k + 1)) for k in range(K + 1)])
    assert np.max(np.abs(gram - np.diag(expected))) < 1e-12
    assert np.max(np.abs(rule.integrate(T[:, 1:]))) < 1e-13


def test_t3_24_norm():
    # 1/(2k+1) at k = 3, same value from a finer rule
    for K in (3, 6):
        rule = haar_quadrature(K)
        v = wigner_matrices(3, rule.nodes)[3][:, 1, 3]
        assert np.isclose(rule.integrate(np.abs(v) ** 2), 1.0 / 7.0, atol=1e-12)


def test_analyze_constant():
    rule = haar_quadrature(3)
    f = analyze_so3(np.ones(len(rule)), rule, 3)
    assert np.isclose(f.blocks[0][0, 0], 1.0)
    assert all(np.max(np.abs(b)) < 1e-13 for b in f.blocks[1:])


def test_analyze_single_wigner_function():
    rule = haar_quadrature(2)
    vals = wigner_matrices(2, rule.nodes)[2][:, 0, 2]
    f = analyze_so3(vals, rule, 2)
    assert np.isclose(f.blocks[2][0, 2], 1.0)
    assert f.max_abs_diff(basis_function(2, 1, 3)) < 1e-13
    # group Fourier matrix carries 1/(2k+1) in the transposed slot
    assert np.isclose(fourier_matrices(f)[2][2, 0], 0.2)


def test_round_trip(rng):
    f = random_so3_spectrum(5, rng)
    rule = haar_quadrature(5)
    assert analyze_so3(synth_so3(f, rule.nodes), rule, 5).max_abs_diff(f) < 1e-10


def test_bandwidth_mismatch():
    rule = haar_quadrature(2)
    with pytest.raises(BandwidthError):
        analyze_so3(np.ones(len(rule)), rule, 3)


@pytest.mark.parametrize("K", [0, 3, 6])
def test_parseval(rng, K):
    f = random_so3_spectrum(K, rng)
    rule = haar_quadrature(2 * K)
    direct = rule.integrate(np.abs(synth_so3(f, rule.nodes)) ** 2)
    F = fourier_matrices(f)
    assert np.isclose(sum((2 * k + 1) * np.sum(np.abs(Fk) ** 2) for k, Fk in enumerate(F)), direct, rtol=1e-10)
    assert np.isclose(l2_norm_so3(f) ** 2, direct, rtol=1e-10)
    assert from_fourier_matrices(F).max_abs_diff(f) < 1e-14


def test_convolution_theorem(rng):
    K = 2
    f, r = random_so3_spectrum(K, rng), random_so3_spectrum(K, rng)
    rule = haar_quadrature(2 * K)
    fh = synth_so3(f, rule.nodes)
    g = rot.random_quaternions(rng, 4)
    conv = synth_so3(convolve(f, r), g)
    for gi, ci in zip(g, conv):
        direct = rule.integrate(fh * synth_so3(r, rot.quat_mul(rot.quat_conj(rule.nodes), gi[None])))
        assert abs(direct - ci) < 1e-8
    Ff, Fr, Fc = fourier_matrices(f), fourier_matrices(r), fourier_matrices(convolve(f, r))
    for k in range(K + 1):
        assert np.allclose(Fc[k], Ff[k] @ Fr[k], atol=1e-12)


def test_laplacian_sphere_finite_difference():
    th, ph, h = 0.9, 0.4, 1e-4
    for k in range(1, 5):
        for m in range(-k, k + 1):
            Y = lambda a, b: sph_harm(k, m, a, b)  # noqa: E731
            d_th = (np.sin(th + h / 2) * (Y(th + h, ph) - Y(th, ph)) - np.sin(th - h / 2) * (Y(th, ph) - Y(th - h, ph))) / h**2
            lap = d_th / np.sin(th) + (Y(th, ph + h) - 2 * Y(th, ph) + Y(th, ph - h)) / (h**2 * np.sin(th) ** 2)
            assert abs(lap + k * (k + 1) * Y(th, ph)) < 1e-5


def test_laplacian_so3_finite_difference(rng):
    g = rot.random_quaternions(rng, 1)
    h = 1e-4
    K = 3
    f = random_so3_spectrum(K, rng)
    lap = 0.0
    for axis in np.eye(3):
        step = lambda t: rot.quat_mul(g, rot.axis_angle_quat(axis, t)[None])  # noqa: E731
        lap += (synth_so3(f, step(h)) - 2 * synth_so3(f, g) + synth_so3(f, step(-h))) / h**2
    assert abs(lap[0] - synth_so3(laplacian(f), g)[0]) < 1e-4 * max(1.0, abs(lap[0]))


def test_real_part(rng):
    f = real_part(random_so3_spectrum(3, rng))
    v = synth_so3(f, rot.random_quaternions(rng, 50))
    assert np.max(np.abs(v.imag)) < 1e-12


def test_pair_analysis_round_trip(rng):
    G = random_pair_spectrum(3, rng)
    rule = sphere_quadrature(6)
    vals = eval_pair_grid(G, rule.nodes, rule.nodes)
    assert analyze_pair(vals, rule, 3).max_abs_diff(G) < 1e-12


def test_json_round_trip(tmp_path, rng):
    for spec in (random_so3_spectrum(3, rng), random_pair_spectrum(2, rng)):
        path = tmp_path / f"{spec.space}.json"
        save_spectrum(spec, path)
        back = load_spectrum(path)
        assert type(back) is type(spec) and back.max_abs_diff(spec) == 0.0
    data = json.loads(path.read_text())
    assert data["space"] == "S2xS2" and data["bandwidth"] == 2
    assert len(data["blocks"][2]["re"]) == 5


def test_block_shape_validated():
    with pytest.raises(ValueError):
        SO3Spectrum((np.ones((1, 1)), np.ones((2, 2))))
    assert PairSpectrum.zeros(2).bandwidth == 2


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 4), st.integers(0, 2**31 - 1))
def test_spectrum_arithmetic(K, seed):
    rng = np.random.default_rng(seed)
    a, b = random_so3_spectrum(K, rng), random_so3_spectrum(K + 1, rng)
    assert ((a + b) - b).max_abs_diff(a.truncated(K + 1)) < 1e-12
    assert (2 * a).max_abs_diff(a + a) == 0.0

"""Radon and X-ray transforms on SO(3).

``Rf(x, y)`` is the mean of ``f`` over the circle of rotations ``g`` with
``g x = y``.  On the Wigner basis

    R T^k_{ij}(x, y) = 4 pi / (2k+1) * Y_k^i(x) conj(Y_k^j(y)),

so in coefficient form the transform is the blockwise scaling
``G(k) = 4 pi / (2k+1) c(k)``.  Every spectral formula below is exact on
bandlimited functions; the integral forms (:func:`radon_forward_numeric`,
:func:`adjoint_numeric`) are provided as independent cross-checks.
"""

from __future__ import annotations

import csv
import warnings

import numpy as np

from . import rotations as rot
from .harmonics.quadrature import QuadratureRule
from .harmonics.special import to_spherical
from .harmonics.spectra import PairSpectrum, SO3Spectrum, eval_pair, eval_pair_grid, synth_so3

# Looked up at call time so that tests can perturb it.
FOUR_PI = 4.0 * np.pi

# Normalisation of the numeric circle average, fixed by calibration against
# the analytic image of the degree-one Wigner functions.
CIRCLE_LAMBDA = 1.0


def radon_forward_spectral(f: SO3Spectrum) -> PairSpectrum:
    """Spectrum of ``Rf``: block ``k`` is ``4 pi / (2k+1) c(k)``."""
    return PairSpectrum(tuple(FOUR_PI / (2 * k + 1) * b for k, b in enumerate(f.blocks)))


def radon_invert(G: PairSpectrum) -> SO3Spectrum:
    """Inverse of :func:`radon_forward_spectral`: ``c(k) = (2k+1)/(4 pi) G(k)``."""
    return SO3Spectrum(tuple((2 * k + 1) / FOUR_PI * b for k, b in enumerate(G.blocks)))


def radon_adjoint(G: PairSpectrum) -> SO3Spectrum:
    """Spectral form of ``R* u(g) = int_{S^2} [(I - 2 Delta)^{1/2} u](x, g x) dx``.

    The multiplier ``(1 + 4 k (k+1))^{1/2}`` equals ``2k+1`` on degree ``k``
    and the sphere integral contributes nothing further, so block ``k`` of
    the result is ``(2k+1) G(k)`` and ``R* R = 4 pi I``.
    """
    return SO3Spectrum(tuple((2 * k + 1) * b for k, b in enumerate(G.blocks)))


def radon_eval(G: PairSpectrum, x, y):
    """Pointwise values ``G(x_n, y_n)``; thin alias used by the CLI."""
    return eval_pair(G, x, y)


def _circle_nodes(x, y, n):
    if np.any(np.einsum("ij,ij->i", x, y) < -1.0 + rot._ANTIPODAL_TOL):
        raise rot.AntipodalPairError("radon_forward_numeric requires x != -y")
    q1, q2 = rot.circle_basis(x, y)
    t = 2.0 * np.pi * np.arange(n) / n
    return np.cos(t)[None, :, None] * q1[:, None, :] + np.sin(t)[None, :, None] * q2[:, None, :]


def radon_forward_numeric(f: SO3Spectrum, x, y, n: int | None = None):
    """Circle average of ``f`` over ``{g : g x = y}`` by the trapezoid rule.

    Parameters
    ----------
    f : SO3Spectrum
    x, y : array_like, shape (3,) or (N, 3)
        Unit vectors; ``x = -y`` is rejected.
    n : int, optional
        Number of nodes on the lifted circle.  Defaults to ``2K + 2``, for
        which the rule is exact.

    Returns
    -------
    complex or ndarray of complex
    """
    scalar = np.ndim(x) == 1 and np.ndim(y) == 1
    x = np.atleast_2d(np.asarray(x, float))
    y = np.atleast_2d(np.asarray(y, float))
    x, y = np.broadcast_arrays(x, y)
    K = f.bandwidth
    if n is None:
        n = 2 * K + 2
    elif n < 2 * K + 2:
        warnings.warn(f"{n} circle nodes cannot integrate bandwidth {K} exactly", stacklevel=2)
    q = _circle_nodes(x, y, n)
    vals = synth_so3(f, q.reshape(-1, 4)).reshape(len(x), n)
    out = CIRCLE_LAMBDA * vals.mean(axis=1)
    return out[0] if scalar else out


def adjoint_numeric(G: PairSpectrum, g, rule: QuadratureRule):
    """Evaluate ``R* G`` at rotations ``g`` from its integral form.

    ``rule`` must be a sphere rule exact to degree ``2K``.
    """
    q = rot.as_quaternions(g)
    K = G.bandwidth
    if rule.exact_degree < 2 * K:
        raise ValueError("sphere rule too coarse for the adjoint integral")
    smooth = PairSpectrum(tuple((2 * k + 1) * b for k, b in enumerate(G.blocks)))
    x = rule.nodes
    out = np.empty(len(q), dtype=complex)
    for n, qn in enumerate(q):
        gx = rot.rotate(qn[None, :], x)
        out[n] = np.sum(rule.weights * eval_pair(smooth, x, gx))
    return out


# ---------------------------------------------------------------------------
# Sobolev scale
# ---------------------------------------------------------------------------

def _multiplier(k, t):
    # 1 + 4k(k+1) = (2k+1)^2 on both spaces
    return (2.0 * k + 1.0) ** (2.0 * t)


def sobolev_norm_so3(f: SO3Spectrum, t: float = 0.0) -> float:
    """``||(I - 4 Delta)^{t/2} f||`` on SO(3) with the normalised Haar measure."""
    s = sum(_multiplier(k, t) * np.sum(np.abs(b) ** 2) / (2 * k + 1) for k, b in enumerate(f.blocks))
    return float(np.sqrt(s))


def sobolev_norm_pair(G: PairSpectrum, t: float = 0.0) -> float:
    """``||(I - 2 Delta)^{t/2} G||`` on S^2 x S^2 with Lebesgue measure."""
    s = sum(_multiplier(k, t) * np.sum(np.abs(b) ** 2) for k, b in enumerate(G.blocks))
    return float(np.sqrt(s))


def isometric_norm(G: PairSpectrum) -> float:
    """``||(4 pi)^{-1} (I - 2 Delta)^{1/4} G||``, equal to ``||f||`` when ``G = Rf``."""
    return sobolev_norm_pair(G, 0.5) / (4.0 * np.pi)


# ---------------------------------------------------------------------------
# X-ray transform
# ---------------------------------------------------------------------------

def _zero_odd(spec):
    return spec.map_blocks(lambda k, b: b if k % 2 == 0 else np.zeros_like(b))


def even_part(f: SO3Spectrum) -> SO3Spectrum:
    """Even-degree component of ``f``; the odd-degree blocks are set to zero."""
    return _zero_odd(f)


def xray_from_radon(G: PairSpectrum) -> PairSpectrum:
    """``(G(x, y) + G(-x, y)) / 2``; since ``Y_k(-x) = (-1)^k Y_k(x)`` this zeroes odd ``k``."""
    return _zero_odd(G)


def xray_forward(f: SO3Spectrum) -> PairSpectrum:
    return xray_from_radon(radon_forward_spectral(f))


def xray_numeric(f: SO3Spectrum, x, y, n: int | None = None):
    """Pointwise ``(Rf(x, y) + Rf(-x, y)) / 2`` via numeric circle averages."""
    x = np.asarray(x, float)
    return 0.5 * (radon_forward_numeric(f, x, y, n) + radon_forward_numeric(f, -x, y, n))


# ---------------------------------------------------------------------------
# pole figure export
# ---------------------------------------------------------------------------

def pole_figure_rows(G: PairSpectrum, x, y):
    """Rows ``(theta_x, phi_x, theta_y, phi_y, value)`` on the grid ``x x y``."""
    x = np.atleast_2d(x)
    y = np.atleast_2d(y)
    vals = eval_pair_grid(G, x, y)
    tx, px = to_spherical(x)
    ty, py = to_spherical(y)
    A, B = np.meshgrid(np.arange(len(x)), np.arange(len(y)), indexing="ij")
    A, B = A.ravel(), B.ravel()
    return np.column_stack([tx[A], px[A], ty[B], py[B], vals.ravel().real])


def write_pole_figure_csv(G: PairSpectrum, x, y, path) -> None:
    rows = pole_figure_rows(G, x, y)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta_x", "phi_x", "theta_y", "phi_y", "value"])
        for r in rows:
            w.writerow([repr(float(v)) for v in r])


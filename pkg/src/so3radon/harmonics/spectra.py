"""Block spectra on SO(3) and on S^2 x S^2, analysis/synthesis and file I/O.

An :class:`SO3Spectrum` stores, for each degree ``k``, the coefficient matrix
``c(k)`` of the expansion

    f(g) = sum_k sum_{i,j} c(k)_{ij} T^k_{ij}(g).

A :class:`PairSpectrum` stores ``G(k)`` with

    G(x, y) = sum_k sum_{i,j} G(k)_{ij} Y_k^i(x) conj(Y_k^j(y)).

The group Fourier matrices ``int f(g) T^k(g)^* dg`` are available through
:func:`fourier_matrices`; they equal ``c(k)^T / (2k + 1)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .quadrature import QuadratureRule
from .special import degree_slice, sph_harm_all, wigner_matrices


class BandwidthError(ValueError):
    """The quadrature rule cannot resolve the requested bandwidth."""


@dataclass(frozen=True)
class _BlockSpectrum:
    blocks: tuple

    space = ""

    def __post_init__(self):
        blocks = tuple(np.array(b, dtype=complex) for b in self.blocks)
        for k, b in enumerate(blocks):
            if b.shape != (2 * k + 1, 2 * k + 1):
                raise ValueError(f"block {k} has shape {b.shape}, expected {(2 * k + 1,) * 2}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def bandwidth(self) -> int:
        return len(self.blocks) - 1

    @classmethod
    def zeros(cls, K: int):
        return cls(tuple(np.zeros((2 * k + 1, 2 * k + 1), complex) for k in range(K + 1)))

    def map_blocks(self, fn, cls=None):
        cls = cls or type(self)
        return cls(tuple(fn(k, b) for k, b in enumerate(self.blocks)))

    def scaled(self, factors):
        """Multiply block ``k`` by ``factors[k]`` (or by ``factors(k)``)."""
        if callable(factors):
            return self.map_blocks(lambda k, b: factors(k) * b)
        return self.map_blocks(lambda k, b: factors[k] * b)

    def truncated(self, K: int):
        blocks = list(self.blocks[: K + 1])
        blocks += [np.zeros((2 * k + 1, 2 * k + 1), complex) for k in range(len(blocks), K + 1)]
        return type(self)(tuple(blocks))

    def __add__(self, other):
        K = max(self.bandwidth, other.bandwidth)
        a, b = self.truncated(K), other.truncated(K)
        return type(self)(tuple(x + y for x, y in zip(a.blocks, b.blocks)))

    def __sub__(self, other):
        return self + other.scaled(lambda k: -1.0)

    def __mul__(self, scalar):
        return self.scaled(lambda k: scalar)

    __rmul__ = __mul__

    def max_abs_diff(self, other) -> float:
        K = max(self.bandwidth, other.bandwidth)
        a, b = self.truncated(K), other.truncated(K)
        return max(float(np.max(np.abs(x - y))) for x, y in zip(a.blocks, b.blocks))

    def flat(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])

    def to_json_dict(self) -> dict:
        return {
            "space": self.space,
            "bandwidth": self.bandwidth,
            "blocks": [
                {"k": k, "re": b.real.tolist(), "im": b.imag.tolist()} for k, b in enumerate(self.blocks)
            ],
        }


class SO3Spectrum(_BlockSpectrum):
    space = "SO3"


class PairSpectrum(_BlockSpectrum):
    space = "S2xS2"


def spectrum_from_json_dict(data: dict):
    space = data.get("space")
    cls = {"SO3": SO3Spectrum, "S2xS2": PairSpectrum}.get(space)
    if cls is None:
        raise ValueError(f"unknown spectrum space {space!r}")
    K = int(data["bandwidth"])
    blocks = [np.zeros((2 * k + 1, 2 * k + 1), complex) for k in range(K + 1)]
    for entry in data["blocks"]:
        k = int(entry["k"])
        blocks[k] = np.asarray(entry["re"], float) + 1j * np.asarray(entry["im"], float)
    return cls(tuple(blocks))


def save_spectrum(spec: _BlockSpectrum, path) -> None:
    Path(path).write_text(json.dumps(spec.to_json_dict(), indent=1, sort_keys=True) + "\n")


def load_spectrum(path):
    return spectrum_from_json_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# construction helpers
# ---------------------------------------------------------------------------

def conjugate_symmetric(block: np.ndarray) -> np.ndarray:
    """Coefficients of ``conj(f)`` for the degree block ``block`` of ``f``.

    Uses ``conj(T_{m,m'}) = (-1)^{m - m'} T_{-m,-m'}``.
    """
    n = block.shape[0]
    k = (n - 1) // 2
    m = np.arange(-k, k + 1)
    sign = (-1.0) ** np.subtract.outer(m, m)
    return sign * np.conj(block[::-1, ::-1])


def real_part(spec: SO3Spectrum) -> SO3Spectrum:
    """Spectrum of ``Re f``."""
    return spec.map_blocks(lambda k, b: 0.5 * (b + conjugate_symmetric(b)))


def random_so3_spectrum(K: int, rng, real: bool = False, decay: float = 0.0) -> SO3Spectrum:
    """Random coefficients; block ``k`` is scaled by ``(k + 1)**(-decay)``."""
    blocks = []
    for k in range(K + 1):
        n = 2 * k + 1
        b = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * (k + 1.0) ** (-decay)
        blocks.append(b)
    spec = SO3Spectrum(tuple(blocks))
    return real_part(spec) if real else spec


def random_pair_spectrum(K: int, rng) -> PairSpectrum:
    return PairSpectrum(
        tuple(
            rng.standard_normal((2 * k + 1, 2 * k + 1)) + 1j * rng.standard_normal((2 * k + 1, 2 * k + 1))
            for k in range(K + 1)
        )
    )


def basis_function(k: int, i: int, j: int, K: int | None = None) -> SO3Spectrum:
    """Spectrum of the single Wigner function ``T^k_{ij}`` (one-based i, j)."""
    K = k if K is None else K
    spec = SO3Spectrum.zeros(K)
    spec.blocks[k][i - 1, j - 1] = 1.0
    return spec


# ---------------------------------------------------------------------------
# SO(3) analysis and synthesis
# ---------------------------------------------------------------------------

def synth_so3(spec: SO3Spectrum, g, chunk: int = 20000):
    """Evaluate ``f(g) = sum c(k)_{ij} T^k_{ij}(g)`` at a batch of rotations."""
    from ..rotations import as_quaternions

    q = as_quaternions(g)
    out = np.zeros(len(q), dtype=complex)
    for start in range(0, len(q), chunk):
        mats = wigner_matrices(spec.bandwidth, q[start : start + chunk])
        acc = np.zeros(len(mats[0]), dtype=complex)
        for c, T in zip(spec.blocks, mats):
            acc += np.einsum("ij,nij->n", c, T)
        out[start : start + chunk] = acc
    return out


def analyze_so3(values, rule: QuadratureRule, K: int) -> SO3Spectrum:
    """Coefficients ``c(k) = (2k+1) sum_n w_n f(g_n) conj(T^k(g_n))``.

    The rule must integrate degree ``2K`` exactly, otherwise
    :class:`BandwidthError` is raised.
    """
    if rule.space != "SO3":
        raise ValueError("analyze_so3 needs a rule on SO(3)")
    if rule.exact_degree < 2 * K:
        raise BandwidthError(f"rule exact to degree {rule.exact_degree} cannot analyse bandwidth {K}")
    values = np.asarray(values)
    if values.shape != (len(rule),):
        raise ValueError("one sample per quadrature node expected")
    mats = wigner_matrices(K, rule.nodes)
    wf = rule.weights * values
    return SO3Spectrum(tuple((2 * k + 1) * np.einsum("n,nij->ij", wf, T.conj()) for k, T in enumerate(mats)))


def fourier_matrices(spec: SO3Spectrum) -> list:
    """Group Fourier matrices ``int f(g) T^k(g)^* dg = c(k)^T / (2k+1)``.

    In this normalisation ``||f||^2 = sum_k (2k+1) ||F(k)||_HS^2`` and the
    transform of ``f * r`` is the blockwise product ``F_f(k) F_r(k)``.
    """
    return [b.T / (2 * k + 1) for k, b in enumerate(spec.blocks)]


def from_fourier_matrices(mats) -> SO3Spectrum:
    return SO3Spectrum(tuple((2 * k + 1) * np.asarray(m).T for k, m in enumerate(mats)))


def l2_norm_so3(spec: SO3Spectrum) -> float:
    """``||f||_{L^2(SO(3))}`` for the normalised Haar measure."""
    return float(np.sqrt(sum(np.sum(np.abs(b) ** 2) / (2 * k + 1) for k, b in enumerate(spec.blocks))))


def laplacian(spec):
    """Spectral Laplace-Beltrami operator: block ``k`` times ``-k(k+1)``."""
    return spec.scaled(lambda k: -k * (k + 1.0))


def convolve(f: SO3Spectrum, r: SO3Spectrum) -> SO3Spectrum:
    """Spectrum of ``(f * r)(g) = int f(h) r(h^{-1} g) dh``."""
    K = min(f.bandwidth, r.bandwidth)
    return SO3Spectrum(tuple(r.blocks[k] @ f.blocks[k] / (2 * k + 1) for k in range(K + 1)))


def left_translate(spec: SO3Spectrum, h) -> SO3Spectrum:
    """Spectrum of ``g -> f(h^{-1} g)``."""
    from ..rotations import as_quaternions, quat_conj

    hinv = quat_conj(as_quaternions(h))
    mats = wigner_matrices(spec.bandwidth, hinv)
    return SO3Spectrum(tuple(c @ T[0].T for c, T in zip(spec.blocks, mats)))


# ---------------------------------------------------------------------------
# S^2 x S^2
# ---------------------------------------------------------------------------

def eval_pair(G: PairSpectrum, x, y):
    """Pointwise values ``G(x_n, y_n)`` for paired arrays of unit vectors."""
    Yx = sph_harm_all(G.bandwidth, x)
    Yy = sph_harm_all(G.bandwidth, y)
    out = np.zeros(len(Yx), dtype=complex)
    for k, b in enumerate(G.blocks):
        s = degree_slice(k)
        out += np.einsum("ni,ij,nj->n", Yx[:, s], b, Yy[:, s].conj())
    return out


def eval_pair_grid(G: PairSpectrum, x, y):
    """Values on the grid ``x x y``, shape ``(len(x), len(y))``."""
    Yx = sph_harm_all(G.bandwidth, x)
    Yy = sph_harm_all(G.bandwidth, y)
    out = np.zeros((len(Yx), len(Yy)), dtype=complex)
    for k, b in enumerate(G.blocks):
        s = degree_slice(k)
        out += Yx[:, s] @ b @ Yy[:, s].conj().T
    return out


def analyze_pair(values, rule: QuadratureRule, K: int) -> PairSpectrum:
    """Degree-diagonal coefficients of grid values on ``rule x rule``.

    ``values[a, b]`` is the sample at ``(rule.nodes[a], rule.nodes[b])``.
    """
    if rule.space != "S2":
        raise ValueError("analyze_pair needs a rule on S^2")
    if rule.exact_degree < 2 * K:
        raise BandwidthError(f"rule exact to degree {rule.exact_degree} cannot analyse bandwidth {K}")
    Y = sph_harm_all(K, rule.nodes)
    wv = rule.weights[:, None] * np.asarray(values) * rule.weights[None, :]
    blocks = []
    for k in range(K + 1):
        s = degree_slice(k)
        blocks.append(Y[:, s].conj().T @ wv @ Y[:, s])
    return PairSpectrum(tuple(blocks))


def pair_partial_laplacians(G: PairSpectrum):
    """``(Delta_1 G, Delta_2 G)`` for the degree-diagonal representation."""
    return laplacian(G), laplacian(G)

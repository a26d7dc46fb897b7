"""Hankel and regular-multiplication operators on l2(N, H).

Quaternionic vectors form a right module; matrices act on the left,
``(A v)(j) = sum_k A(j, k) v(k)``. The operator norm is computed through the
complex representation ``c + d J  ->  [[c, d], [-conj d, conj c]]`` (``c, d`` in
the slice ``L_I``), which is an isometric *-homomorphism, so the norm equals the
largest singular value of the ``2N x 2M`` complex matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import fftconvolve
from scipy.sparse.linalg import LinearOperator, svds

from .hardy import h2_inner, h2_norm
from .quat import UNIT_I, DomainError, ImaginaryUnit, Quaternion, orthogonal_unit, qconj, qmul
from .series import TruncatedSeries, star_mul

DEFAULT_LADDER = (32, 64, 128, 256, 512)
# largest dimension for which op_norm runs a dense SVD of a structured operator
DENSE_LIMIT = 512


class QuatMatrix:
    """Dense quaternion matrix stored as an ``(n, m, 4)`` float array."""

    __slots__ = ("entries",)

    def __init__(self, entries: np.ndarray):
        e = np.asarray(entries, dtype=float)
        if e.ndim != 3 or e.shape[2] != 4 or min(e.shape[:2]) < 1:
            raise DomainError(f"bad quaternion matrix shape {e.shape}")
        self.entries = e

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape[:2]

    def __getitem__(self, jk) -> Quaternion:
        return Quaternion.from_array(self.entries[jk])

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return qmul(self.entries, np.asarray(v, dtype=float)[None, :, :]).sum(axis=1)

    def to_complex(self, unit: ImaginaryUnit = UNIT_I) -> np.ndarray:
        return complex_embedding(self.entries, unit)

    def to_csv_rows(self) -> list[list]:
        n, m = self.shape
        return [[j, k, *self.entries[j, k].tolist()] for j in range(n) for k in range(m)]


def complex_embedding(entries: np.ndarray, unit: ImaginaryUnit = UNIT_I) -> np.ndarray:
    """``2n x 2m`` complex matrix representing left multiplication by ``entries``."""
    I = unit.to_array()
    J = orthogonal_unit(unit).to_array()
    K = qmul(I, J)
    c = entries[..., 0] + 1j * (entries @ I)
    d = (entries @ J) + 1j * (entries @ K)
    n, m = entries.shape[:2]
    out = np.empty((2 * n, 2 * m), dtype=complex)
    out[0::2, 0::2] = c
    out[0::2, 1::2] = d
    out[1::2, 0::2] = -np.conj(d)
    out[1::2, 1::2] = np.conj(c)
    return out


# -- structured operators --------------------------------------------------------

class _Structured:
    """Matrix-free operator on ``C^{2N}`` through the complex representation."""

    n: int

    def _complex_parts(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def _apply(self, seq: np.ndarray, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _apply_adj(self, seq: np.ndarray, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def linear_operator(self) -> LinearOperator:
        z, w = self._complex_parts()
        n = self.n

        def mv(v):
            v = np.asarray(v).reshape(-1)
            x, y = v[0::2], v[1::2]
            out = np.empty(2 * n, dtype=complex)
            out[0::2] = self._apply(z, x) + self._apply(w, y)
            out[1::2] = -self._apply(np.conj(w), x) + self._apply(np.conj(z), y)
            return out

        def rmv(v):
            v = np.asarray(v).reshape(-1)
            x, y = v[0::2], v[1::2]
            out = np.empty(2 * n, dtype=complex)
            out[0::2] = self._apply_adj(np.conj(z), x) - self._apply_adj(w, y)
            out[1::2] = self._apply_adj(np.conj(w), x) + self._apply_adj(z, y)
            return out

        return LinearOperator((2 * n, 2 * n), matvec=mv, rmatvec=rmv, dtype=complex)


class HankelOperator(_Structured):
    """N x N section of ``Gamma_alpha``, entries ``alpha(j + k)``."""

    def __init__(self, alpha: np.ndarray, N: int):
        alpha = np.asarray(alpha, dtype=float)
        if len(alpha) < 2 * N - 1:
            raise DomainError(f"Hankel section of size {N} needs {2 * N - 1} symbol values, got {len(alpha)}")
        self.alpha = alpha[: 2 * N - 1]
        self.n = N

    def _complex_parts(self):
        a = self.alpha
        return a[:, 0] + 1j * a[:, 1], a[:, 2] + 1j * a[:, 3]

    def _apply(self, seq, x):
        # sum_k seq(j + k) x_k
        n = self.n
        return fftconvolve(seq, x[::-1])[n - 1 : 2 * n - 1]

    def _apply_adj(self, seq, x):
        # Hankel sections are symmetric in (j, k)
        return self._apply(seq, x)

    def to_dense(self) -> QuatMatrix:
        n = self.n
        idx = np.arange(n)[:, None] + np.arange(n)[None, :]
        return QuatMatrix(self.alpha[idx])


class ToeplitzOperator(_Structured):
    """N x N lower-triangular Toeplitz section, entries ``phi(n - k)``."""

    def __init__(self, phi: np.ndarray, N: int):
        phi = np.asarray(phi, dtype=float)
        seq = np.zeros((N, 4))
        m = min(N, len(phi))
        seq[:m] = phi[:m]
        self.phi = seq
        self.n = N

    def _complex_parts(self):
        a = self.phi
        return a[:, 0] + 1j * a[:, 1], a[:, 2] + 1j * a[:, 3]

    def _apply(self, seq, x):
        return fftconvolve(seq, x)[: self.n]

    def _apply_adj(self, seq, x):
        # transpose of a lower-triangular Toeplitz: sum_{n>=k} seq(n - k) x_n
        return fftconvolve(seq[::-1], x)[self.n - 1 : 2 * self.n - 1]

    def to_dense(self) -> QuatMatrix:
        n = self.n
        d = np.arange(n)[:, None] - np.arange(n)[None, :]
        e = np.where((d >= 0)[..., None], self.phi[np.clip(d, 0, None)], 0.0)
        return QuatMatrix(e)


# -- constructors ---------------------------------------------------------------

def hankel_matrix(alpha: Sequence, N: int) -> QuatMatrix:
    """Dense N x N section with constant anti-diagonals ``alpha(j + k)``."""
    return HankelOperator(_as_quat_seq(alpha), N).to_dense()


def mult_matrix(phi: TruncatedSeries, N: int) -> QuatMatrix:
    """Matrix of ``v -> phi * v`` (regular product) on the first N coefficients."""
    return ToeplitzOperator(phi.coeffs, N).to_dense()


def _as_quat_seq(alpha) -> np.ndarray:
    if isinstance(alpha, TruncatedSeries):
        return alpha.coeffs
    items = [a.to_array() if isinstance(a, Quaternion) else a for a in alpha]
    arr = np.asarray(items, dtype=float)
    if arr.ndim == 1:
        arr = np.column_stack([arr, np.zeros((len(arr), 3))])
    return arr


@dataclass(frozen=True)
class HankelSymbolPair:
    """Symbol sequence ``alpha`` and regular function ``b`` with ``alpha(n) = conj(b_n)``."""

    alpha: np.ndarray
    b: TruncatedSeries

    @classmethod
    def from_symbol(cls, b: TruncatedSeries) -> "HankelSymbolPair":
        return cls(qconj(b.coeffs), b)

    @classmethod
    def from_alpha(cls, alpha) -> "HankelSymbolPair":
        a = _as_quat_seq(alpha)
        return cls(a, TruncatedSeries(qconj(a)))

    def padded_alpha(self, N: int) -> np.ndarray:
        out = np.zeros((max(2 * N - 1, len(self.alpha)), 4))
        out[: len(self.alpha)] = self.alpha
        return out


# -- norms -----------------------------------------------------------------------

def op_norm(A) -> float:
    """Operator norm on ``l2(N, H)`` of a :class:`QuatMatrix` or structured section."""
    if isinstance(A, _Structured):
        if A.n <= DENSE_LIMIT:
            return op_norm(A.to_dense())
        return _structured_norm(A)
    if not isinstance(A, QuatMatrix):
        A = QuatMatrix(A)
    if not np.all(np.isfinite(A.entries)):
        raise DomainError("non-finite matrix entry")
    M = A.to_complex()
    return float(np.linalg.svd(M, compute_uv=False)[0])


def _structured_norm(A: _Structured) -> float:
    z, w = A._complex_parts()
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(w))):
        raise DomainError("non-finite matrix entry")
    if not (np.any(z) or np.any(w)):
        return 0.0
    op = A.linear_operator()
    v0 = np.ones(op.shape[1], dtype=complex)
    s = svds(op, k=1, tol=1e-14, v0=v0, return_singular_vectors=False, maxiter=20_000)
    return float(s[0])


def hankel_norm_estimate(b: TruncatedSeries, N_list: Sequence[int] = DEFAULT_LADDER) -> list[float]:
    """``op_norm`` of the N x N sections of ``Gamma_alpha`` along a truncation ladder."""
    pair = HankelSymbolPair.from_symbol(b)
    out = []
    for N in N_list:
        out.append(op_norm(HankelOperator(pair.padded_alpha(N), N)))
    return out


def hankel_bilinear(b: TruncatedSeries, f: TruncatedSeries, g: TruncatedSeries) -> Quaternion:
    """``T_b(f, g) = <f * g, b>``."""
    # coefficients of f * g beyond deg b do not meet b
    return h2_inner(star_mul(f, g, bound=len(b) - 1), b)


def _sections(alpha: np.ndarray) -> np.ndarray:
    D = len(alpha)
    idx = np.arange(D)[:, None] + np.arange(D)[None, :]
    full = np.zeros((2 * D - 1, 4))
    full[:D] = alpha
    return full[idx]


def bilinear_sup(
    b: TruncatedSeries, n_random: int = 64, n_iter: int = 300, seed: int = 0
) -> float:
    """Lower bound for ``sup |T_b(f, g)| / (||f|| ||g||)``.

    Random search over Gaussian polynomials, then alternating maximisation of
    the real form ``Re T_b(f, g)``: for fixed ``f`` the best ``g`` is
    ``conj(c)/|c|`` with ``c_m = sum_j alpha(j+m) a_j``; for fixed ``g`` the best
    ``f`` is ``conj(d)/|d|`` with ``d_j = sum_m g_m alpha(j+m)``. The final ratio is
    recomputed through :func:`hankel_bilinear`.
    """
    D = len(b)
    if not np.any(b.coeffs):
        return 0.0
    rng = np.random.default_rng(seed)
    best, best_fg = -1.0, None
    for _ in range(max(1, n_random)):
        f = TruncatedSeries(rng.standard_normal((D, 4)))
        g = TruncatedSeries(rng.standard_normal((D, 4)))
        val = abs(hankel_bilinear(b, f, g)) / (h2_norm(f) * h2_norm(g))
        if val > best:
            best, best_fg = val, (f, g)
    alpha = qconj(b.coeffs)
    A = _sections(alpha)  # A[j, m] = alpha(j + m)
    a = best_fg[0].coeffs / h2_norm(best_fg[0])
    prev = 0.0
    g = best_fg[1].coeffs
    for _ in range(n_iter):
        c = qmul(A, a[:, None, :]).sum(axis=0)  # c_m = sum_j alpha(j+m) a_j
        cn = np.sqrt(np.sum(c ** 2))
        if cn == 0.0:
            break
        g = qconj(c) / cn
        d = qmul(g[None, :, :], A).sum(axis=1)  # d_j = sum_m g_m alpha(j+m)
        dn = np.sqrt(np.sum(d ** 2))
        a = qconj(d) / dn
        if abs(dn - prev) <= 1e-15 * dn:
            break
        prev = dn
    f, g = TruncatedSeries(a), TruncatedSeries(g)
    refined = abs(hankel_bilinear(b, f, g)) / (h2_norm(f) * h2_norm(g))
    return max(best, refined)

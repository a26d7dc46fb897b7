"""Truncated regular power series ``f(q) = sum_n q^n a_n`` (coefficients on the right).

Coefficients are stored as a read-only ``(N + 1, 4)`` float array. Products
truncate at a global degree bound (:func:`get_degree_bound`, default 256).
"""
from __future__ import annotations

import contextlib
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .quat import (
    TOL,
    DomainError,
    ImaginaryUnit,
    Quaternion,
    as_array,
    from_pair,
    hamilton_mul,
    inv_q,
    polar_arrays,
    qabs,
    qconj,
    qmul,
    to_pair,
)

DEFAULT_DEGREE_BOUND = 256
_degree_bound = DEFAULT_DEGREE_BOUND


def get_degree_bound() -> int:
    return _degree_bound


def set_degree_bound(n: int) -> None:
    global _degree_bound
    if n < 0:
        raise DomainError("degree bound must be nonnegative")
    _degree_bound = int(n)


@contextlib.contextmanager
def degree_bound(n: int):
    old = get_degree_bound()
    set_degree_bound(n)
    try:
        yield
    finally:
        set_degree_bound(old)


class NotStarInvertibleError(DomainError):
    """Raised when the constant coefficient of a series vanishes."""


class StarInverseWarning(RuntimeWarning):
    pass


class TruncatedSeries:
    """Finite coefficient list of a regular function on the unit ball."""

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        if isinstance(coeffs, TruncatedSeries):
            c = coeffs._c
        else:
            if not isinstance(coeffs, np.ndarray):
                coeffs = [as_array(a) if isinstance(a, Quaternion) else a for a in coeffs]
            c = np.array(coeffs, dtype=float)
            if c.ndim == 1:
                # real coefficients
                c = np.column_stack([c, np.zeros((c.size, 3))])
            if c.ndim != 2 or c.shape[1] != 4:
                raise DomainError(f"coefficients must have shape (n, 4), got {c.shape}")
            if c.shape[0] == 0:
                c = np.zeros((1, 4))
            if not np.all(np.isfinite(c)):
                raise DomainError("non-finite coefficient")
        c.setflags(write=False)
        self._c = c

    # construction helpers
    @classmethod
    def zero(cls) -> "TruncatedSeries":
        return cls(np.zeros((1, 4)))

    @classmethod
    def constant(cls, c) -> "TruncatedSeries":
        return cls(np.atleast_2d(as_array(c) if not np.isscalar(c) else [float(c), 0, 0, 0]))

    @classmethod
    def monomial(cls, m: int, u=1.0) -> "TruncatedSeries":
        c = np.zeros((m + 1, 4))
        c[m] = as_array(u) if not np.isscalar(u) else [float(u), 0, 0, 0]
        return cls(c)

    @classmethod
    def from_pairs(cls, z: np.ndarray, w: np.ndarray) -> "TruncatedSeries":
        return cls(from_pair(np.asarray(z), np.asarray(w)))

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    def __len__(self) -> int:
        return self._c.shape[0]

    def __getitem__(self, n: int) -> Quaternion:
        if n < 0:
            raise IndexError(n)
        if n >= len(self):
            return Quaternion()
        return Quaternion.from_array(self._c[n])

    @property
    def degree(self) -> float:
        nz = np.flatnonzero(np.any(self._c != 0.0, axis=1))
        return float(nz[-1]) if nz.size else -math.inf

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        return to_pair(self._c)

    def padded(self, n: int) -> np.ndarray:
        """Coefficient array of length exactly ``n`` (zero-padded or cut)."""
        out = np.zeros((n, 4))
        m = min(n, len(self))
        out[:m] = self._c[:m]
        return out

    def trim(self) -> "TruncatedSeries":
        d = self.degree
        return TruncatedSeries(self._c[: int(d) + 1] if d >= 0 else np.zeros((1, 4)))

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = max(len(self), len(other))
        return TruncatedSeries(self.padded(n) + other.padded(n))

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = max(len(self), len(other))
        return TruncatedSeries(self.padded(n) - other.padded(n))

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(-self._c)

    def scale(self, s: float) -> "TruncatedSeries":
        return TruncatedSeries(self._c * float(s))

    def rmul(self, c) -> "TruncatedSeries":
        """Multiply every coefficient on the right by the quaternion ``c``."""
        return TruncatedSeries(qmul(self._c, as_array(c)))

    def __call__(self, q) -> Quaternion:
        return evaluate(self, q)

    def allclose(self, other: "TruncatedSeries", tol: float = TOL) -> bool:
        n = max(len(self), len(other))
        return bool(np.max(np.abs(self.padded(n) - other.padded(n))) <= tol)

    def to_json(self) -> list[list[float]]:
        return self._c.tolist()

    @classmethod
    def from_json(cls, data: Sequence[Sequence[float]]) -> "TruncatedSeries":
        return cls(np.asarray(data, dtype=float))

    def to_csv_rows(self) -> list[list]:
        return [[n, *row] for n, row in enumerate(self._c.tolist())]

    def __repr__(self) -> str:
        return f"TruncatedSeries(len={len(self)}, degree={self.degree})"


def _truncate_len(n: int, bound: int | None) -> int:
    b = get_degree_bound() if bound is None else bound
    return min(n, b + 1)


# -- algebra -------------------------------------------------------------

def star_mul(f: TruncatedSeries, g: TruncatedSeries, bound: int | None = None) -> TruncatedSeries:
    """Regular product: coefficient ``n`` is ``sum_k a_k b_{n-k}``."""
    z1, w1 = f.pairs()
    z2, w2 = g.pairs()
    # (z1 + w1 j)(z2 + w2 j) = (z1 z2 - w1 conj w2) + (z1 w2 + w1 conj z2) j
    z = np.convolve(z1, z2) - np.convolve(w1, np.conj(w2))
    w = np.convolve(z1, w2) + np.convolve(w1, np.conj(z2))
    m = _truncate_len(len(z), bound)
    return TruncatedSeries(from_pair(z[:m], w[:m]))


def regular_conj(f: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(qconj(f.coeffs))


def symmetrize(f: TruncatedSeries, bound: int | None = None) -> TruncatedSeries:
    """``f * f^c``; its coefficients are real up to rounding."""
    return star_mul(f, regular_conj(f), bound)


def star_inv_condition(f: TruncatedSeries, N: int) -> float:
    """Growth estimate ``prod_{n=1..N} max(1, sum_{k<=n} |a_k| / |a_0|)`` (capped at inf)."""
    a = qabs(f.padded(N + 1))
    if a[0] == 0.0:
        raise NotStarInvertibleError("a_0 = 0")
    partial = np.cumsum(a[1:]) / a[0]
    with np.errstate(over="ignore"):
        return float(np.exp(np.sum(np.log(np.maximum(1.0, partial))))) if N > 0 else 1.0


def star_inv(f: TruncatedSeries, N: int | None = None) -> TruncatedSeries:
    """Formal inverse for the regular product, truncated at degree ``N``.

    Solves ``b_0 = a_0^{-1}``, ``b_n = -a_0^{-1} sum_{k=1}^n a_k b_{n-k}``.
    Warns with :class:`StarInverseWarning` if the residual of ``f * b`` exceeds 1e-8.
    """
    N = get_degree_bound() if N is None else int(N)
    a = f.padded(N + 1)
    if not np.any(a[0] != 0.0):
        raise NotStarInvertibleError("constant coefficient vanishes")
    a0inv = inv_q(Quaternion.from_array(a[0])).to_array()
    b = np.zeros((N + 1, 4))
    b[0] = a0inv
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, N + 1):
            # sum_{k=1}^n a_k b_{n-k}
            s = qmul(a[1 : n + 1], b[n - 1 :: -1][:n]).sum(axis=0)
            b[n] = -qmul(a0inv, s)
            if not np.all(np.isfinite(b[n])):
                raise NotStarInvertibleError(f"formal inverse overflows at degree {n}")
    inv = TruncatedSeries(b)
    res = star_mul(f, inv, bound=N).padded(N + 1)
    res[0] -= [1.0, 0.0, 0.0, 0.0]
    resid = float(np.max(qabs(res))) if N >= 0 else 0.0
    if resid > 1e-8:
        warnings.warn(
            f"star_inv residual {resid:.3g} (condition estimate {star_inv_condition(f, N):.3g})",
            StarInverseWarning,
            stacklevel=2,
        )
    return inv


def star_inv_formula(f: TruncatedSeries, N: int | None = None) -> TruncatedSeries:
    """``(f * f^c)^{-1} f^c``, computed through the real series ``f * f^c``.

    Kept as an independent cross-check of :func:`star_inv`.
    """
    N = get_degree_bound() if N is None else int(N)
    s = symmetrize(f, bound=N).padded(N + 1)[:, 0]
    if s[0] == 0.0:
        raise NotStarInvertibleError("constant coefficient vanishes")
    # reciprocal of a real power series
    r = np.zeros(N + 1)
    r[0] = 1.0 / s[0]
    for n in range(1, N + 1):
        r[n] = -np.dot(s[1 : n + 1], r[n - 1 :: -1][:n]) / s[0]
    # real coefficients commute with everything
    return star_mul(TruncatedSeries(np.column_stack([r, np.zeros((N + 1, 3))])), regular_conj(f), bound=N)


def cullen_derive(f: TruncatedSeries) -> TruncatedSeries:
    c = f.coeffs
    if len(c) <= 1:
        return TruncatedSeries.zero()
    n = np.arange(1, len(c), dtype=float)[:, None]
    return TruncatedSeries(n * c[1:])


# -- evaluation ----------------------------------------------------------

def evaluate(f: TruncatedSeries, q) -> Quaternion:
    """``sum_n q^n a_n`` by Horner's rule with ``q`` acting on the left."""
    q = q if isinstance(q, Quaternion) else Quaternion.from_array(q)
    c = f.coeffs
    acc = Quaternion.from_array(c[-1])
    for n in range(len(c) - 2, -1, -1):
        acc = hamilton_mul(q, acc) + Quaternion.from_array(c[n])
    return acc


def evaluate_slice(f: TruncatedSeries, z: np.ndarray, I) -> np.ndarray:
    """Evaluate at the points ``Re z + Im z * I`` for complex ``z`` and unit(s) ``I``.

    ``I`` is an :class:`ImaginaryUnit` or an array of 3-vectors broadcastable to ``z``.
    Returns an array of shape ``z.shape + (4,)``.
    """
    z = np.asarray(z, dtype=complex)
    c = f.coeffs
    # S = sum z^n a_n componentwise; then f = Re S + I * Im S since q^n = Re z^n + I Im z^n
    S = np.zeros(z.shape + (4,), dtype=complex)
    for n in range(len(c) - 1, -1, -1):
        S = S * z[..., None] + c[n]
    P, Q = S.real, S.imag
    if isinstance(I, Quaternion):
        u = np.array([0.0, I.x1, I.x2, I.x3])
    else:
        I = np.asarray(I, dtype=float)
        u = np.concatenate([np.zeros(I.shape[:-1] + (1,)), I], axis=-1)
    return P + qmul(u, Q)


def evaluate_many(f: TruncatedSeries, points: np.ndarray) -> np.ndarray:
    """Vectorised evaluation at quaternion points ``(..., 4)``."""
    r, theta, units = polar_arrays(points)
    return evaluate_slice(f, r * np.exp(1j * theta), units)


def eval_via_transform(f: TruncatedSeries, g: TruncatedSeries, q) -> Quaternion:
    """``f(q) g(f(q)^{-1} q f(q))``, or 0 where ``f(q)`` vanishes."""
    q = q if isinstance(q, Quaternion) else Quaternion.from_array(q)
    fq = evaluate(f, q)
    if abs(fq) < TOL:
        return Quaternion()
    moved = hamilton_mul(hamilton_mul(inv_q(fq), q), fq)
    return hamilton_mul(fq, evaluate(g, moved))


def rep_formula(v_plus: Quaternion, v_minus: Quaternion, I: Quaternion, J: Quaternion) -> Quaternion:
    """Value at ``x + yJ`` from the values at ``x + yI`` and ``x - yI``."""
    half_sum = (v_plus + v_minus) * 0.5
    return half_sum + hamilton_mul(J, hamilton_mul(I, v_minus - v_plus)) * 0.5


@dataclass(frozen=True)
class ComplexSlicePair:
    """Coefficients of ``F, G`` with ``f = F + G J`` on the slice ``L_I``.

    Complex numbers ``u + v i`` stand for ``u + v I``.
    """

    F_coeffs: np.ndarray
    G_coeffs: np.ndarray
    I: ImaginaryUnit
    J: ImaginaryUnit

    def recombine(self) -> TruncatedSeries:
        I, J = self.I.to_array(), self.J.to_array()
        K = qmul(I, J)
        F, G = self.F_coeffs, self.G_coeffs
        c = (
            np.outer(F.real, [1.0, 0, 0, 0])
            + np.outer(F.imag, I)
            + np.outer(G.real, J)
            + np.outer(G.imag, K)
        )
        return TruncatedSeries(c)

    def eval_F(self, z: np.ndarray) -> np.ndarray:
        return np.polynomial.polynomial.polyval(z, self.F_coeffs)

    def eval_G(self, z: np.ndarray) -> np.ndarray:
        return np.polynomial.polynomial.polyval(z, self.G_coeffs)


def split_coeffs(f: TruncatedSeries, I: ImaginaryUnit, J: ImaginaryUnit) -> ComplexSlicePair:
    """Splitting on ``L_I`` with respect to an orthogonal unit ``J``."""
    if abs(I.x1 * J.x1 + I.x2 * J.x2 + I.x3 * J.x3) > TOL:
        raise DomainError("J must be orthogonal to I")
    Ia, Ja = I.to_array(), J.to_array()
    Ka = qmul(Ia, Ja)
    c = f.coeffs
    # orthonormal basis {1, I, J, IJ}: a = c0 + c1 I + (d0 + d1 I) J
    F = c[:, 0] + 1j * (c @ Ia)
    G = (c @ Ja) + 1j * (c @ Ka)
    return ComplexSlicePair(F, G, I, J)


def tail_mass_kernel(w_abs: float, N: int) -> float:
    """``sum_{n>N} |w|^{2n}``, the H2 mass a kernel loses when cut at degree N."""
    r2 = w_abs * w_abs
    return r2 ** (N + 1) / (1.0 - r2)


def random_series(rng: np.random.Generator, deg: int, scale: float = 1.0) -> TruncatedSeries:
    """Gaussian quaternion coefficients, degree ``deg``."""
    return TruncatedSeries(scale * rng.standard_normal((deg + 1, 4)))


def series_from_quaternions(coeffs: Iterable[Quaternion]) -> TruncatedSeries:
    return TruncatedSeries([as_array(c) for c in coeffs])

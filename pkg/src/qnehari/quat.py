"""Quaternion arithmetic, slice coordinates and sphere sampling.

Two representations live side by side:

* :class:`Quaternion`, an immutable scalar used at API boundaries;
* plain ``float64`` arrays with a trailing axis of length 4 (``x0, x1, x2, x3``)
  used by the vectorised helpers :func:`qmul`, :func:`qconj`, :func:`qabs`.

Every quaternion ``x0 + x1 i + x2 j + x3 k`` can also be written as ``z + w j``
with ``z = x0 + x1 i`` and ``w = x2 + x3 i`` complex. In that form

    (z1 + w1 j)(z2 + w2 j) = (z1 z2 - w1 conj(w2)) + (z1 w2 + w1 conj(z2)) j

which is what the series and operator layers use for speed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TOL = 1e-12


class DomainError(ValueError):
    """Input outside the domain of an operation."""


@dataclass(frozen=True, slots=True)
class Quaternion:
    x0: float = 0.0
    x1: float = 0.0
    x2: float = 0.0
    x3: float = 0.0

    @classmethod
    def from_array(cls, a: Sequence[float]) -> "Quaternion":
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @classmethod
    def real(cls, x: float) -> "Quaternion":
        return cls(float(x))

    def to_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])

    def to_list(self) -> list[float]:
        return [self.x0, self.x1, self.x2, self.x3]

    @property
    def re(self) -> float:
        return self.x0

    @property
    def im(self) -> "Quaternion":
        return Quaternion(0.0, self.x1, self.x2, self.x3)

    def conj(self) -> "Quaternion":
        return Quaternion(self.x0, -self.x1, -self.x2, -self.x3)

    def norm2(self) -> float:
        return self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3

    def __abs__(self) -> float:
        return math.sqrt(self.norm2())

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return Quaternion(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return Quaternion(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.x0, -self.x1, -self.x2, -self.x3)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return hamilton_mul(self, other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            s = float(other)
            return Quaternion(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)
        return NotImplemented

    def __rmul__(self, other):
        # reals are central, so left and right scaling agree
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * (1.0 / float(other))
        return NotImplemented

    def isclose(self, other: "Quaternion", tol: float = TOL) -> bool:
        return abs(self - other) <= tol

    def __repr__(self) -> str:
        return f"Quaternion({self.x0:.6g}, {self.x1:.6g}, {self.x2:.6g}, {self.x3:.6g})"


def _coerce(v) -> Quaternion | None:
    if isinstance(v, Quaternion):
        return v
    if isinstance(v, (int, float, np.floating, np.integer)):
        return Quaternion(float(v))
    return None


ONE = Quaternion(1.0)
ZERO = Quaternion()
QI = Quaternion(0.0, 1.0, 0.0, 0.0)
QJ = Quaternion(0.0, 0.0, 1.0, 0.0)
QK = Quaternion(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True, slots=True)
class ImaginaryUnit(Quaternion):
    """A point of the sphere of imaginary units, ``u**2 == -1``."""

    def __post_init__(self):
        if abs(self.x0) > TOL or abs(self.norm2() - 1.0) > 1e-10:
            raise DomainError(f"not an imaginary unit: {self!r}")

    @classmethod
    def from_vector(cls, v: Iterable[float]) -> "ImaginaryUnit":
        """Normalise a nonzero 3-vector (or the imaginary part of a 4-vector)."""
        v = np.asarray(list(v), dtype=float)
        if v.shape == (4,):
            v = v[1:]
        n = float(np.linalg.norm(v))
        if n == 0.0:
            raise DomainError("zero vector has no direction")
        v = v / n
        return cls(0.0, float(v[0]), float(v[1]), float(v[2]))

    def vector(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    def __neg__(self) -> "ImaginaryUnit":
        return ImaginaryUnit(0.0, -self.x1, -self.x2, -self.x3)


UNIT_I = ImaginaryUnit(0.0, 1.0, 0.0, 0.0)
UNIT_J = ImaginaryUnit(0.0, 0.0, 1.0, 0.0)
UNIT_K = ImaginaryUnit(0.0, 0.0, 0.0, 1.0)


def hamilton_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    a0, a1, a2, a3 = a.x0, a.x1, a.x2, a.x3
    b0, b1, b2, b3 = b.x0, b.x1, b.x2, b.x3
    return Quaternion(
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


def conj_q(a: Quaternion) -> Quaternion:
    return a.conj()


def inv_q(a: Quaternion) -> Quaternion:
    n2 = a.norm2()
    if n2 == 0.0:
        raise DomainError("zero quaternion is not invertible")
    return a.conj() / n2


# -- vectorised helpers on (..., 4) arrays ----------------------------------

def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Broadcasting Hamilton product of arrays with trailing axis 4."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def qconj(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def qabs(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.asarray(a, dtype=float) ** 2, axis=-1))


def to_pair(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``(..., 4)`` quaternions into complex ``z, w`` with q = z + w j."""
    a = np.asarray(a, dtype=float)
    return a[..., 0] + 1j * a[..., 1], a[..., 2] + 1j * a[..., 3]


def from_pair(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.stack([z.real, z.imag, w.real, w.imag], axis=-1)


def as_array(q) -> np.ndarray:
    if isinstance(q, Quaternion):
        return q.to_array()
    arr = np.asarray(q, dtype=float)
    if arr.shape[-1:] != (4,):
        raise DomainError(f"expected trailing axis of length 4, got shape {arr.shape}")
    return arr


# -- polar and slice coordinates --------------------------------------------

def from_polar(r: float, theta: float, I: Quaternion) -> Quaternion:
    """``r (cos theta + I sin theta)``."""
    c, s = r * math.cos(theta), r * math.sin(theta)
    return Quaternion(c, s * I.x1, s * I.x2, s * I.x3)


def to_polar(q: Quaternion) -> tuple[float, float, ImaginaryUnit]:
    """Return ``(r, theta, I)`` with ``theta`` in ``[0, pi]``.

    Points on the real axis get ``I = i`` and ``theta`` 0 or pi.
    """
    y = math.sqrt(q.x1 * q.x1 + q.x2 * q.x2 + q.x3 * q.x3)
    r = abs(q)
    if y <= TOL * max(1.0, r):
        return r, (0.0 if q.x0 >= 0 else math.pi), UNIT_I
    I = ImaginaryUnit(0.0, q.x1 / y, q.x2 / y, q.x3 / y)
    return r, math.atan2(y, q.x0), I


def polar_arrays(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised :func:`to_polar`: radii, angles in ``[0, pi]``, unit vectors (n, 3)."""
    p = np.asarray(points, dtype=float)
    y = np.sqrt(np.sum(p[..., 1:] ** 2, axis=-1))
    r = np.sqrt(p[..., 0] ** 2 + y ** 2)
    theta = np.arctan2(y, p[..., 0])
    safe = np.where(y > 0, y, 1.0)[..., None]
    units = np.where(y[..., None] > 0, p[..., 1:] / safe, np.array([1.0, 0.0, 0.0]))
    return r, theta, units


@dataclass(frozen=True, slots=True)
class SlicePoint:
    """``x + y I`` with ``y >= 0``."""

    x: float
    y: float
    I: ImaginaryUnit

    @classmethod
    def make(cls, x: float, y: float, I: ImaginaryUnit) -> "SlicePoint":
        # L_I = L_{-I}: store the representative with y >= 0
        if y < 0:
            return cls(float(x), -float(y), -I)
        return cls(float(x), float(y), I)

    @classmethod
    def from_quaternion(cls, q: Quaternion) -> "SlicePoint":
        r, theta, I = to_polar(q)
        return cls(r * math.cos(theta), r * math.sin(theta), I)

    def to_quaternion(self) -> Quaternion:
        return Quaternion(self.x, self.y * self.I.x1, self.y * self.I.x2, self.y * self.I.x3)

    def to_complex(self) -> complex:
        return complex(self.x, self.y)


# -- sphere sampling ---------------------------------------------------------

def sphere_points(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` area-uniform points of the unit 2-sphere as an ``(n, 3)`` array."""
    v = rng.standard_normal((n, 3))
    nrm = np.linalg.norm(v, axis=1)
    # a zero Gaussian draw has probability zero; redraw defensively
    bad = nrm < 1e-300
    while np.any(bad):
        v[bad] = rng.standard_normal((int(bad.sum()), 3))
        nrm = np.linalg.norm(v, axis=1)
        bad = nrm < 1e-300
    return v / nrm[:, None]


def sample_units(n: int, seed: int) -> list[ImaginaryUnit]:
    """I.i.d. uniform imaginary units; reproducible for a given seed."""
    if n <= 0:
        return []
    v = sphere_points(n, np.random.default_rng(seed))
    return [ImaginaryUnit(0.0, float(a), float(b), float(c)) for a, b, c in v]


def orthogonal_unit(I: ImaginaryUnit) -> ImaginaryUnit:
    """A fixed imaginary unit orthogonal to ``I``."""
    v = I.vector()
    e = np.eye(3)[int(np.argmin(np.abs(v)))]
    w = e - np.dot(e, v) * v
    return ImaginaryUnit.from_vector(w)

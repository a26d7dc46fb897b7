"""Carleson-measure geometry on the quaternionic unit ball.

Measures are weighted point clouds (:class:`MeasureSample`). The volume form is
the one of :mod:`qnehari.hardy`: ``dVol = dA(I) dx dy / 4`` over the half-discs
``{x + yI : y >= 0}``, total mass ``pi**2 / 2``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .hardy import VOL_B, h2_norm, kernel
from .quat import (
    UNIT_I,
    DomainError,
    ImaginaryUnit,
    Quaternion,
    SlicePoint,
    as_array,
    polar_arrays,
    qmul,
    sphere_points,
    to_polar,
)
from .series import TruncatedSeries, cullen_derive, evaluate_slice

BOX_RADII = (0.0, 0.5, 0.75, 0.9, 0.95, 0.99)
BOX_ANGLES = 16


@dataclass
class MeasureSample:
    """Weighted points in the ball, plus optional atoms on the real diameter.

    ``atoms`` is an ``(m, 2)`` array of ``(x, weight)``.
    """

    points: np.ndarray
    weights: np.ndarray
    meta: dict = field(default_factory=dict)
    atoms: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 4)
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        self.atoms = np.asarray(self.atoms, dtype=float).reshape(-1, 2)
        if len(self.points) != len(self.weights):
            raise DomainError("points and weights differ in length")
        for w in (self.weights, self.atoms[:, 1]):
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise DomainError("weights must be finite and nonnegative")
        if len(self.points) and np.max(np.sum(self.points ** 2, axis=1)) >= 1.0:
            raise DomainError("points must lie in the open unit ball")
        if len(self.atoms) and np.max(np.abs(self.atoms[:, 0])) >= 1.0:
            raise DomainError("atoms must lie in (-1, 1)")

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum() + self.atoms[:, 1].sum())

    def all_points(self) -> tuple[np.ndarray, np.ndarray]:
        pts = np.vstack([self.points, np.column_stack([self.atoms[:, 0], np.zeros((len(self.atoms), 3))])])
        return pts, np.concatenate([self.weights, self.atoms[:, 1]])

    def integrate(self, phi: Callable[[np.ndarray], np.ndarray]) -> float:
        """``int phi dmu`` for a vectorised ``phi`` on ``(n, 4)`` points."""
        pts, w = self.all_points()
        return float(np.dot(w, phi(pts)))

    def save(self, path: str | Path) -> None:
        path = Path(path)
        pts, w = self.all_points()
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["x0", "x1", "x2", "x3", "weight"])
            for p, wt in zip(pts.tolist(), w.tolist()):
                out.writerow([repr(v) for v in (*p, wt)])
        with open(path.with_suffix(".json"), "w") as fh:
            json.dump(self.meta, fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path: str | Path) -> "MeasureSample":
        path = Path(path)
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        meta_path = path.with_suffix(".json")
        meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
        return cls(data[:, :4], data[:, 4], meta)


def zero_measure() -> MeasureSample:
    return MeasureSample(np.zeros((0, 4)), np.zeros(0), {"generator": "zero"})


def point_mass(p, weight: float) -> MeasureSample:
    return MeasureSample(as_array(p)[None, :], np.array([weight]), {"generator": "point_mass"})


def _ball_points(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Uniform ``I`` on the sphere and ``(x, y)`` uniform on the upper half-disc."""
    units = sphere_points(n, rng)
    rho = np.sqrt(rng.random(n))
    phi = math.pi * rng.random(n)
    z = rho * np.exp(1j * phi)
    pts = np.column_stack([z.real, z.imag[:, None] * units])
    return pts, z, units


def mu_b_sample(b: TruncatedSeries, n: int, seed: int) -> MeasureSample:
    """Monte Carlo sample of ``|b'(q)|^2 (1 - |q|^2) dVol(q)``."""
    rng = np.random.default_rng(seed)
    pts, z, units = _ball_points(n, rng)
    db = cullen_derive(b)
    vals = evaluate_slice(db, z, units)
    dens = np.sum(vals ** 2, axis=1) * (1.0 - np.abs(z) ** 2)
    meta = {"generator": "mu_b", "n": int(n), "seed": int(seed), "symbol_degree": float(b.degree)}
    return MeasureSample(pts, dens * VOL_B / n, meta)


def slicewise_sample(
    density: Callable[[np.ndarray], np.ndarray],
    n: int,
    seed: int,
    units: Callable[[int, np.random.Generator], np.ndarray] = sphere_points,
) -> MeasureSample:
    """Measure ``density(x + iy) dVol`` with the sphere part drawn from ``units``.

    With the default uniform ``units`` this samples ``density dVol``; any other
    sampler gives the slice decomposition ``dmu = dmu_I dnu(I)`` with ``nu`` the
    law of ``units``.
    """
    rng = np.random.default_rng(seed)
    u = units(n, rng)
    rho = np.sqrt(rng.random(n))
    phi = math.pi * rng.random(n)
    z = rho * np.exp(1j * phi)
    pts = np.column_stack([z.real, z.imag[:, None] * u])
    return MeasureSample(pts, density(z) * VOL_B / n, {"generator": "slicewise", "n": int(n), "seed": int(seed)})


def project_to_slice(mu: MeasureSample, J0: ImaginaryUnit = UNIT_I) -> MeasureSample:
    """Push ``mu`` forward along ``x + yI -> x + yJ0`` (``y >= 0``)."""
    r, theta, _ = polar_arrays(mu.points)
    x, y = r * np.cos(theta), r * np.sin(theta)
    pts = np.column_stack([x, y[:, None] * J0.vector()[None, :]])
    return MeasureSample(pts, mu.weights.copy(), {**mu.meta, "projected_to": J0.to_list()}, mu.atoms.copy())


# -- boxes -------------------------------------------------------------------------

@dataclass(frozen=True)
class BoxSpec:
    """Symmetric box ``S(q)`` of ``q = r e^{J theta}``; membership ignores ``J``."""

    r: float
    theta: float
    J: ImaginaryUnit = UNIT_I

    def __post_init__(self):
        if not 0.0 <= self.r < 1.0:
            raise DomainError("box center must satisfy 0 <= r < 1")

    @classmethod
    def from_center(cls, q: Quaternion) -> "BoxSpec":
        r, theta, J = to_polar(q)
        return cls(r, theta, J)

    @property
    def center(self) -> Quaternion:
        c, s = self.r * math.cos(self.theta), self.r * math.sin(self.theta)
        return Quaternion(c, s * self.J.x1, s * self.J.x2, s * self.J.x3)

    @property
    def canonical_theta(self) -> float:
        # e^{J theta} = e^{(-J)(-theta)}: fold the angle into [0, pi]
        t = math.fmod(self.theta, 2 * math.pi)
        t = t + 2 * math.pi if t < 0 else t
        return 2 * math.pi - t if t > math.pi else t

    @property
    def arc_length(self) -> float:
        return 2.0 * (1.0 - self.r)


def _box_mask(box: BoxSpec, rho: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    h = 1.0 - box.r
    radial = (1.0 - rho > 0) & (1.0 - rho <= 2.0 * h)
    # the origin carries every angle
    angular = (np.abs(alpha - box.canonical_theta) <= h) | (rho == 0.0)
    return radial & angular


def box_contains(box: BoxSpec, p) -> bool:
    rho, alpha, _ = to_polar(p if isinstance(p, Quaternion) else Quaternion.from_array(p))
    return bool(_box_mask(box, np.array([rho]), np.array([alpha]))[0])


def default_box_centers(radii: Sequence[float] = BOX_RADII, n_angles: int = BOX_ANGLES) -> list[BoxSpec]:
    thetas = math.pi * np.arange(n_angles) / (n_angles - 1) if n_angles > 1 else [0.0]
    return [BoxSpec(float(r), float(t)) for r in radii for t in thetas]


def box_masses(mu: MeasureSample, centers: Sequence[BoxSpec]) -> np.ndarray:
    pts, w = mu.all_points()
    rho, alpha, _ = polar_arrays(pts)
    return np.array([float(w[_box_mask(c, rho, alpha)].sum()) for c in centers])


def box_constant(mu: MeasureSample, centers: Sequence[BoxSpec] | None = None) -> float:
    """``max mu(S(q)) / (1 - |q|)`` over the probe centers (a lower bound)."""
    centers = default_box_centers() if centers is None else list(centers)
    if not centers:
        raise DomainError("no probe centers")
    masses = box_masses(mu, centers)
    return float(np.max(masses / np.array([1.0 - c.r for c in centers])))


# -- embedding constant -------------------------------------------------------------

def _power_table(z: np.ndarray, length: int) -> tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of ``z**k`` for ``k < length``, shape ``(len(z), length)``."""
    Vr = np.empty((length, len(z)))
    Vi = np.empty((length, len(z)))
    a, b = z.real, z.imag
    Vr[0], Vi[0] = 1.0, 0.0
    for k in range(1, length):
        Vr[k] = Vr[k - 1] * a - Vi[k - 1] * b
        Vi[k] = Vr[k - 1] * b + Vi[k - 1] * a
    return Vr.T, Vi.T


def weighted_sq_integral(mu: MeasureSample, test_set: Sequence[TruncatedSeries]) -> np.ndarray:
    """``int |f|^2 dmu`` for each ``f``; functions of equal length are batched."""
    pts, w = mu.all_points()
    out = np.zeros(len(test_set))
    if len(pts) == 0:
        return out
    r, theta, units = polar_arrays(pts)
    z = r * np.exp(1j * theta)
    u4 = np.column_stack([np.zeros(len(units)), units])
    groups: dict[int, list[int]] = {}
    for i, f in enumerate(test_set):
        groups.setdefault(len(f), []).append(i)
    chunk = 8192
    for length, idx in groups.items():
        C = np.stack([test_set[i].coeffs for i in idx], axis=1).reshape(length, -1)  # (length, nf*4)
        acc = np.zeros(len(idx))
        for s in range(0, len(z), chunk):
            Vr, Vi = _power_table(z[s : s + chunk], length)
            P = (Vr @ C).reshape(-1, len(idx), 4)
            Q = (Vi @ C).reshape(-1, len(idx), 4)
            # f = P + I Q, |f|^2 = |P|^2 + |Q|^2 + 2 <P, I Q>
            IQ = qmul(u4[s : s + chunk, None, :], Q)
            mod2 = np.sum(P ** 2 + Q ** 2 + 2 * P * IQ, axis=-1)
            acc += w[s : s + chunk] @ mod2
        out[idx] = acc
    return out


def embedding_constant(mu: MeasureSample, test_set: Sequence[TruncatedSeries]) -> float:
    """``max int |f|^2 dmu / ||f||^2`` over the test set (a lower bound)."""
    if not test_set:
        raise DomainError("empty test set")
    norms = np.array([h2_norm(f) for f in test_set])
    if np.any(norms == 0):
        raise DomainError("test function with zero norm")
    return float(np.max(weighted_sq_integral(mu, test_set) / norms ** 2))


def default_test_set(
    seed: int, n_random: int = 50, degree: int = 16, N: int = 256,
    kernel_radii: Sequence[float] = (0.5, 0.9, 0.99),
) -> list[TruncatedSeries]:
    """Kernels at a few radii and directions plus Gaussian random polynomials."""
    rng = np.random.default_rng(seed)
    out = []
    for rad in kernel_radii:
        u = sphere_points(1, rng)[0]
        ang = rng.uniform(0, math.pi)
        w = Quaternion(rad * math.cos(ang), *(rad * math.sin(ang) * u))
        out.append(kernel(w, N))
    for _ in range(n_random):
        out.append(TruncatedSeries(rng.standard_normal((degree + 1, 4))))
    return out


def kernel_test_set(seed: int, n: int = 24, N: int = 256, radii: Sequence[float] = (0.0, 0.5, 0.75, 0.9, 0.95, 0.99)):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        rad = radii[k % len(radii)]
        u = sphere_points(1, rng)[0]
        ang = rng.uniform(0, math.pi)
        out.append(kernel(Quaternion(rad * math.cos(ang), *(rad * math.sin(ang) * u)), N))
    return out


# -- test function and Moebius lemma --------------------------------------------------

def carleson_test_fn(w, N: int) -> TruncatedSeries:
    """``(k_w + k_{conj w}) / 2``: the sphere average of kernels; real coefficients.

    The coefficients ``(conj(w)^n + w^n) / 2 = Re(w^n)`` are computed as ``Re(z^n)``
    for the complex number ``z`` on the slice of ``w``.
    """
    w = as_array(w)
    if np.sum(w ** 2) >= 1.0:
        raise DomainError("test function needs |w| < 1")
    z = complex(w[0], float(np.linalg.norm(w[1:])))
    return TruncatedSeries((z ** np.arange(N + 1)).real)


def _slice_complex(p, ref: ImaginaryUnit | None) -> complex:
    if isinstance(p, (complex, float, int)):
        return complex(p)
    if isinstance(p, SlicePoint):
        if ref is None or p.y == 0.0:
            return complex(p.x, p.y)
        s = float(np.dot(p.I.vector(), ref.vector()))
        if abs(abs(s) - 1.0) > 1e-9:
            raise DomainError("points are not on the same slice")
        return complex(p.x, p.y if s > 0 else -p.y)
    raise TypeError(f"cannot read {p!r} as a slice point")


def moebius_ratio(w, z) -> float:
    """``|(1 - z Re w) / (1 - z w)|`` in the slice's complex arithmetic."""
    ref = w.I if isinstance(w, SlicePoint) and w.y > 0 else (z.I if isinstance(z, SlicePoint) else None)
    wc, zc = _slice_complex(w, ref), _slice_complex(z, ref)
    if abs(wc) >= 1 or abs(zc) >= 1:
        raise DomainError("points must lie in the unit disc")
    den = 1 - zc * wc
    if den == 0:
        raise DomainError("pole: 1 - z w = 0")
    return abs((1 - zc * wc.real) / den)


def s_region_grid(w: complex, n: int = 200) -> np.ndarray:
    """``n x n`` polar grid of ``s(w) = {1-|z| <= 2(1-|w|), |arg z - arg w| <= 1-|w|}``."""
    h = 1.0 - abs(w)
    rho = np.linspace(max(0.0, 1.0 - 2.0 * h), 1.0, n, endpoint=False)
    ang = np.angle(w) + np.linspace(-h, h, n)
    return (rho[:, None] * np.exp(1j * ang[None, :])).ravel()


@dataclass
class MoebiusSweep:
    c: float
    min_ratio: float
    max_ratio: float
    argmin: complex
    argmax: complex
    n_w: int
    n_z: int


def moebius_sweep(
    radii: Sequence[float] | None = None, args: Sequence[float] | None = None, n_grid: int = 200
) -> MoebiusSweep:
    """Extremes of the Moebius ratio over ``z in s(w)`` for ``w`` on a grid."""
    if radii is None:
        radii = np.concatenate([np.linspace(0.0, 0.9, 19), 1.0 - np.geomspace(0.1, 1e-3, 21)[1:]])
    if args is None:
        args = np.linspace(0.0, math.pi / 2, 17)
    lo, hi = math.inf, -math.inf
    amin = amax = 0j
    count = 0
    for rad in radii:
        for a in args:
            w = rad * np.exp(1j * a)
            z = s_region_grid(w, n_grid)
            ratio = np.abs((1 - z * w.real) / (1 - z * w))
            count += 1
            i, j = int(np.argmin(ratio)), int(np.argmax(ratio))
            if ratio[i] < lo:
                lo, amin = float(ratio[i]), complex(w)
            if ratio[j] > hi:
                hi, amax = float(ratio[j]), complex(w)
    return MoebiusSweep(max(hi, 1.0 / lo), lo, hi, amin, amax, count, n_grid * n_grid)


def test_fn_lower_bound(w: complex, n_grid: int = 100) -> float:
    """``min (1 - |w|^2) |K(z)|`` over ``z in s(w)``, ``K`` in closed form on the slice."""
    z = s_region_grid(w, n_grid)
    K = 0.5 * (1.0 / (1 - z * np.conj(w)) + 1.0 / (1 - z * w))
    return float(np.min(np.abs(K)) * (1 - abs(w) ** 2))

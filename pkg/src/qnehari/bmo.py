"""Mean oscillation of boundary values on slices.

On the slice ``L_I`` write ``f = F + G J`` with complex-valued ``F, G`` (see
:func:`split_coeffs`). Because ``|F + G J|^2 = |F|^2 + |G|^2`` the oscillation of ``f``
over an arc is the sum of the oscillations of ``F`` and ``G``, and ``F, G`` are linear
in the four real component series ``S_k(z) = sum_n c[n, k] z^n``. The component series
are evaluated once per function and reused for every slice.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .quat import DomainError, ImaginaryUnit, Quaternion, UNIT_I, orthogonal_unit, qmul, sample_units
from .series import TruncatedSeries, evaluate_slice

TWO_PI = 2 * math.pi
# slack for arcs whose length rounds slightly above a full turn
_LEN_EPS = 1e-12


def _check_arc(arc: tuple[float, float]) -> float:
    a, b = float(arc[0]), float(arc[1])
    length = b - a
    if not np.isfinite(length) or length <= 0:
        raise DomainError(f"degenerate arc {arc}")
    if length > TWO_PI + _LEN_EPS:
        raise DomainError(f"arc {arc} longer than a full turn")
    return min(length, TWO_PI)


def dyadic_arcs(levels: int = 8) -> list[tuple[float, float]]:
    """Arcs of length ``2 pi 2^-k`` (``k = 0..levels``) at ``2^(k+2)`` rotated positions."""
    arcs = []
    for k in range(levels + 1):
        length = TWO_PI / 2 ** k
        m = 2 ** (k + 2)
        for j in range(m):
            a = TWO_PI * j / m
            arcs.append((a, a + length))
    return arcs


@dataclass(frozen=True)
class ArcFamily:
    """Arcs ``(alpha, beta)`` on the circle, taken modulo ``2 pi``."""

    arcs: tuple = field(default_factory=lambda: tuple(dyadic_arcs()))
    n_theta: int = 64

    def __post_init__(self):
        if self.n_theta < 8:
            raise DomainError("n_theta must be at least 8")
        object.__setattr__(self, "arcs", tuple((float(a), float(b)) for a, b in self.arcs))
        for arc in self.arcs:
            _check_arc(arc)

    @classmethod
    def dyadic(cls, levels: int = 8, n_theta: int = 64) -> "ArcFamily":
        return cls(tuple(dyadic_arcs(levels)), n_theta)

    def __len__(self) -> int:
        return len(self.arcs)

    def nodes_for(self, length: float, deg: float) -> int:
        """Samples on an arc: grows with ``length * deg``, floor ``n_theta``."""
        deg = max(deg, 0)
        if length >= TWO_PI:
            # uniform grid, exact for the trigonometric polynomials involved
            return max(self.n_theta, int(2 * deg + 2))
        return max(self.n_theta, int(math.ceil(length * deg / 2)) + 16)

    def quadrature(self, deg: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Concatenated nodes, per-arc normalised weights and arc index for every node.

        Full circles use the uniform grid; proper arcs use Gauss-Legendre nodes.
        """
        thetas, weights, index = [], [], []
        rules: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        for i, arc in enumerate(self.arcs):
            a = arc[0]
            length = _check_arc(arc)
            n = self.nodes_for(length, deg)
            if length >= TWO_PI:
                t = a + TWO_PI * np.arange(n) / n
                w = np.full(n, 1.0 / n)
            else:
                if n not in rules:
                    x, wx = np.polynomial.legendre.leggauss(n)
                    rules[n] = ((x + 1) / 2, wx / 2)
                x, wx = rules[n]
                t = a + length * x
                w = wx
            thetas.append(t)
            weights.append(w)
            index.append(np.full(n, i))
        if not thetas:
            return np.zeros(0), np.zeros(0), np.zeros(0, dtype=int)
        return np.concatenate(thetas), np.concatenate(weights), np.concatenate(index)


def arc_mean(f: TruncatedSeries, I: ImaginaryUnit, arc: tuple[float, float], n_theta: int = 64) -> Quaternion:
    """``(1/|a|) int_a f(e^{theta I}) dtheta``.

    The node count is doubled until two successive estimates agree to 1e-13.
    """
    length = _check_arc(arc)
    fam = ArcFamily((tuple(arc),), max(8, n_theta))
    n = fam.nodes_for(length, f.degree)
    prev = None
    for _ in range(8):
        if length >= TWO_PI:
            t = arc[0] + TWO_PI * np.arange(n) / n
            w = np.full(n, 1.0 / n)
        else:
            x, wx = np.polynomial.legendre.leggauss(n)
            t = arc[0] + length * (x + 1) / 2
            w = wx / 2
        val = w @ evaluate_slice(f, np.exp(1j * t), I)
        if prev is not None and np.max(np.abs(val - prev)) < 1e-13:
            break
        prev = val
        n *= 2
    return Quaternion.from_array(val)


def _component_values(f: TruncatedSeries, theta: np.ndarray) -> np.ndarray:
    """``S_k(e^{i theta})`` for the four component series, shape ``(len(theta), 4)``.

    The constant term is dropped: it never changes an oscillation.
    """
    c = f.coeffs.copy()
    c[0] = 0.0
    z = np.exp(1j * theta)
    S = np.zeros((len(theta), 4), dtype=complex)
    for n in range(len(c) - 1, -1, -1):
        S = S * z[:, None] + c[n]
    return S


def _oscillations(S: np.ndarray, w: np.ndarray, index: np.ndarray, n_arcs: int, I: ImaginaryUnit) -> np.ndarray:
    """Mean square oscillation per arc on the slice ``L_I``."""
    Ia = I.to_array()
    J = orthogonal_unit(I).to_array()
    K = qmul(Ia, J)
    # F = S_0 + i (S . I), G = (S . J) + i (S . IJ), with i standing for I
    F = S[:, 0] + 1j * (S @ Ia)
    G = S @ J + 1j * (S @ K)
    out = np.zeros(n_arcs)
    for X in (F, G):
        mean = np.bincount(index, weights=w * X.real, minlength=n_arcs) + 1j * np.bincount(
            index, weights=w * X.imag, minlength=n_arcs
        )
        dev = X - mean[index]
        out += np.bincount(index, weights=w * np.abs(dev) ** 2, minlength=n_arcs)
    return out


def bmo_slice_norms(f: TruncatedSeries, units: Sequence[ImaginaryUnit], fam: ArcFamily | None = None) -> np.ndarray:
    """:func:`bmo_slice_norm` for several slices, sharing the boundary evaluation."""
    fam = ArcFamily() if fam is None else fam
    if len(fam) == 0:
        raise DomainError("empty arc family")
    theta, w, index = fam.quadrature(f.degree)
    S = _component_values(f, theta)
    out = np.empty(len(units))
    for k, I in enumerate(units):
        out[k] = math.sqrt(max(float(np.max(_oscillations(S, w, index, len(fam), I))), 0.0))
    return out


def bmo_slice_norm(f: TruncatedSeries, I: ImaginaryUnit = UNIT_I, fam: ArcFamily | None = None) -> float:
    """Largest root mean square oscillation of ``f(e^{theta I})`` over the arcs of ``fam``."""
    return float(bmo_slice_norms(f, [I], fam)[0])


def bmo_norm(
    f: TruncatedSeries, n_slices: int = 32, fam: ArcFamily | None = None, seed: int = 0
) -> float:
    """Max of :func:`bmo_slice_norm` over the i-slice and ``n_slices`` random slices."""
    units = [UNIT_I] + sample_units(n_slices, seed)
    return float(np.max(bmo_slice_norms(f, units, fam)))


def write_slice_csv(path: str | Path, units: Sequence[ImaginaryUnit], norms: Sequence[float]) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["slice_x1", "slice_x2", "slice_x3", "bmo"])
        for u, v in zip(units, norms):
            wr.writerow([repr(u.x1), repr(u.x2), repr(u.x3), repr(float(v))])

"""Norms and inner products on the quaternionic Hardy space H2 of the unit ball.

Volume convention: ``dVol(x + yI) = dA(I) dx dy / 4`` with the slice disc
integrated over both half-planes and halved, i.e.

    int_B phi dVol = (1/8) int_S dA(I) int_{disc} phi(x + yI) dx dy.

The total mass is therefore ``(1/8) * 4 pi * pi = pi**2 / 2`` (:data:`VOL_B`), and
with this normalisation ``h2_norm_volume(q) == 1`` exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quat import (
    DomainError,
    ImaginaryUnit,
    Quaternion,
    UNIT_I,
    as_array,
    qabs,
    qconj,
    qmul,
    sphere_points,
)
from .series import TruncatedSeries, cullen_derive, evaluate, evaluate_slice

VOL_B = math.pi ** 2 / 2


@dataclass(frozen=True)
class QuadratureSpec:
    n_radial: int = 32
    n_angular: int = 128
    n_sphere: int = 8
    seed: int = 0
    r_max: float = 1.0 - 1e-12

    def __post_init__(self):
        if min(self.n_radial, self.n_angular, self.n_sphere) < 1:
            raise DomainError("quadrature counts must be positive")
        if not 0.0 < self.r_max < 1.0:
            raise DomainError("r_max must lie in (0, 1)")

    def angular_for(self, deg: float) -> int:
        # uniform grids are exact for trigonometric polynomials of degree < n
        need = int(2 * max(deg, 0) + 2)
        return max(self.n_angular, need)


def h2_norm(f: TruncatedSeries) -> float:
    return float(np.sqrt(np.sum(f.coeffs ** 2)))


def h2_inner(f: TruncatedSeries, g: TruncatedSeries) -> Quaternion:
    """``<f, g> = sum_n conj(b_n) a_n``."""
    n = min(len(f), len(g))
    s = qmul(qconj(g.coeffs[:n]), f.coeffs[:n]).sum(axis=0)
    return Quaternion.from_array(s)


def kernel(w, N: int) -> TruncatedSeries:
    """Reproducing kernel ``k_w(q) = sum q^n conj(w)^n`` cut at degree ``N``."""
    w = as_array(w)
    if np.sum(w ** 2) >= 1.0:
        raise DomainError("kernel needs |w| < 1")
    wb = qconj(w)
    c = np.zeros((N + 1, 4))
    c[0, 0] = 1.0
    for n in range(1, N + 1):
        c[n] = qmul(c[n - 1], wb)
    return TruncatedSeries(c)


# -- sup norm ----------------------------------------------------------------

def _boundary_parts(f: TruncatedSeries, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``P, Q`` with ``f(e^{theta I}) = P + I Q`` for every unit ``I``."""
    z = np.exp(1j * np.asarray(theta))
    c = f.coeffs
    S = np.zeros(z.shape + (4,), dtype=complex)
    for n in range(len(c) - 1, -1, -1):
        S = S * z[..., None] + c[n]
    return S.real, S.imag


def _best_unit(P: np.ndarray, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Maximise ``|P + I Q|`` over the unit sphere in closed form.

    ``|P + IQ|^2 = |P|^2 + |Q|^2 + 2 Re(conj(P) I Q)`` is affine in ``I``.
    Returns the maximal modulus and the maximising unit vectors.
    """
    Pb = qconj(P)
    g = np.stack(
        [qmul(Pb, qmul(e, Q))[..., 0] for e in np.eye(4)[1:]],
        axis=-1,
    )
    gn = np.linalg.norm(g, axis=-1)
    val = np.sum(P ** 2, axis=-1) + np.sum(Q ** 2, axis=-1) + 2 * gn
    units = np.where(gn[..., None] > 0, g / np.where(gn > 0, gn, 1.0)[..., None], [1.0, 0.0, 0.0])
    return np.sqrt(np.maximum(val, 0.0)), units


def hinf_estimate(f: TruncatedSeries, n_samples: int = 100_000, seed: int = 0) -> float:
    """Lower bound for ``sup_B |f|`` from boundary samples ``e^{theta I}``.

    Samples ``n_samples`` points on a (theta, I) product grid (the i-slice is always
    included), then refines around the best angle with an exact maximisation
    over ``I`` and a dense theta grid. Every reported value is attained at an
    actual boundary point.
    """
    n_samples = max(int(n_samples), 1)
    deg = max(f.degree, 0)
    n_theta = int(min(max(64, 8 * (deg + 1)), max(n_samples // 4, 64)))
    n_slices = max(1, n_samples // n_theta)
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    units = np.vstack([[1.0, 0.0, 0.0], sphere_points(n_slices - 1, np.random.default_rng(seed))])
    P, Q = _boundary_parts(f, theta)
    # values on the grid: |P + I Q| for all (theta, I)
    Pb = qconj(P)
    lin = np.stack([qmul(Pb, qmul(e, Q))[..., 0] for e in np.eye(4)[1:]], axis=-1)
    base = np.sum(P ** 2, axis=-1) + np.sum(Q ** 2, axis=-1)
    grid = base[:, None] + 2 * lin @ units.T
    k = int(np.argmax(grid.max(axis=1)))
    best = float(np.sqrt(max(grid.max(), 0.0)))
    # refinement: dense theta window around the best angle, exact in I
    h = 2 * np.pi / n_theta
    fine = theta[k] + np.linspace(-h, h, 401)
    Pf, Qf = _boundary_parts(f, fine)
    vals, u = _best_unit(Pf, Qf)
    j = int(np.argmax(vals))
    # report the modulus re-evaluated at the chosen point
    q = Quaternion(math.cos(fine[j]), *(math.sin(fine[j]) * u[j]))
    return max(best, abs(evaluate(f, q)))


# -- volume integrals ----------------------------------------------------------

def _radial_rule(n: int, r_max: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes for ``int_0^{r_max} h(r) r dr`` under ``r = e^{-t/2}``.

    ``t`` runs over ``[t0, inf)`` mapped to ``x in [0, 1)`` by ``t = t0 + x/(1-x)``;
    the log weight becomes ``t`` itself. Returns ``r``, ``t`` and weights for
    ``sum w h(r)`` (the factor ``r dr = e^{-t} dt / 2`` is folded into ``w``).
    """
    x, w = np.polynomial.legendre.leggauss(n)
    x = (x + 1) / 2
    w = w / 2
    t0 = -2.0 * math.log(r_max)
    t = t0 + x / (1 - x)
    dt = w / (1 - x) ** 2
    return np.exp(-t / 2), t, 0.5 * np.exp(-t) * dt


def _sphere_units(n: int, seed: int) -> np.ndarray:
    # antipodal pairs make the sphere average exact for integrands affine in I
    u = sphere_points(max(1, (n + 1) // 2), np.random.default_rng(seed))
    return np.vstack([u, -u])


def _slice_grid(quad: QuadratureSpec, deg: float):
    r, t, wr = _radial_rule(quad.n_radial, quad.r_max)
    na = quad.angular_for(deg)
    ang = -np.pi + 2 * np.pi * np.arange(na) / na
    z = r[:, None] * np.exp(1j * ang[None, :])
    return r, t, wr, z, 2 * np.pi / na


def h2_norm_volume(f: TruncatedSeries, quad: QuadratureSpec | None = None) -> float:
    """H2 norm from ``|f(0)|^2 + (1/Vol) int |f'|^2 log|q|^{-2} dVol``."""
    quad = QuadratureSpec() if quad is None else quad
    df = cullen_derive(f)
    f0 = f.coeffs[0]
    if not np.any(df.coeffs):
        return float(np.sqrt(np.sum(f0 ** 2)))
    r, t, wr, z, dang = _slice_grid(quad, 2 * df.degree)
    acc = 0.0
    units = _sphere_units(quad.n_sphere, quad.seed)
    for u in units:
        vals = evaluate_slice(df, z, ImaginaryUnit(0.0, *u))
        mod2 = np.sum(vals ** 2, axis=-1)
        acc += float(np.sum((mod2 * t[:, None]).sum(axis=1) * dang * wr))
    # (1/Vol) (1/8) int_S dA int_disc  ==  (1/pi) * mean over I of the disc integral
    integral = acc / len(units) / math.pi
    return float(np.sqrt(np.sum(f0 ** 2) + integral))


def h2_inner_derivative(
    f: TruncatedSeries, g: TruncatedSeries, quad: QuadratureSpec | None = None
) -> Quaternion:
    """Equivalent pairing ``conj(g(0)) f(0) + (1/Vol) int conj(g') f' (1 - |q|^2) dVol``.

    Not equal to :func:`h2_inner`; the two define equivalent norms.
    """
    quad = QuadratureSpec() if quad is None else quad
    df, dg = cullen_derive(f), cullen_derive(g)
    head = qmul(qconj(g.coeffs[0]), f.coeffs[0])
    r, t, wr, z, dang = _slice_grid(quad, df.degree + dg.degree)
    weight = (1.0 - r ** 2)[:, None]
    acc = np.zeros(4)
    units = _sphere_units(quad.n_sphere, quad.seed)
    for u in units:
        I = ImaginaryUnit(0.0, *u)
        prod = qmul(qconj(evaluate_slice(dg, z, I)), evaluate_slice(df, z, I))
        acc += np.einsum("ija,ij,i->a", prod, np.broadcast_to(weight, z.shape), wr) * dang
    return Quaternion.from_array(head + acc / len(units) / math.pi)


def h1_norm_slice(f: TruncatedSeries, I: ImaginaryUnit = UNIT_I, n_theta: int = 4096) -> float:
    """Boundary L1 norm of the restriction to ``L_I``: ``(1/2pi) int |f(e^{theta I})| dtheta``."""
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    vals = evaluate_slice(f, np.exp(1j * theta), I)
    return float(np.mean(qabs(vals)))


def reproducing_error(f: TruncatedSeries, w, N: int) -> float:
    """``|<f, k_w> - f(w)|``."""
    w = w if isinstance(w, Quaternion) else Quaternion.from_array(w)
    return abs(h2_inner(f, kernel(w, N)) - evaluate(f, w))

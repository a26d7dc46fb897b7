import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import coeff_arrays, units
from qnehari.quat import (
    ONE,
    QI,
    QJ,
    QK,
    DomainError,
    ImaginaryUnit,
    Quaternion,
    UNIT_I,
    UNIT_J,
    hamilton_mul,
    inv_q,
    orthogonal_unit,
    qmul,
    sample_units,
)
from qnehari.series import (
    NotStarInvertibleError,
    StarInverseWarning,
    TruncatedSeries,
    cullen_derive,
    degree_bound,
    eval_via_transform,
    evaluate,
    evaluate_many,
    evaluate_slice,
    random_series,
    regular_conj,
    rep_formula,
    split_coeffs,
    star_inv,
    star_inv_condition,
    star_inv_formula,
    star_mul,
    symmetrize,
)


def Q(a):
    return Quaternion.from_array(a)


def loop_convolution(f, g):
    """Oracle: double loop over quaternion products, order as written."""
    n = len(f) + len(g) - 1
    out = [Quaternion() for _ in range(n)]
    for a in range(len(f)):
        for b in range(len(g)):
            out[a + b] = out[a + b] + hamilton_mul(f[a], g[b])
    return np.array([q.to_array() for q in out])


def naive_eval(f, q):
    """Oracle: sum of explicit powers q^n a_n."""
    acc, p = Quaternion(), ONE
    for n in range(len(f)):
        acc = acc + hamilton_mul(p, f[n])
        p = hamilton_mul(p, q)
    return acc


def ball_point(rng, rad=0.9):
    v = rng.standard_normal(4)
    return Q(rad * rng.uniform(0, 1) * v / np.linalg.norm(v))


def test_star_mul_examples():
    f = TruncatedSeries.constant(QI)
    g = TruncatedSeries.monomial(1, QJ)
    h = star_mul(f, g)
    assert h[0] == Quaternion() and h[1] == QK
    one = TruncatedSeries.constant(1.0)
    r = random_series(np.random.default_rng(0), 5)
    assert star_mul(r, one).allclose(r) and star_mul(one, r).allclose(r)


def test_star_mul_matches_loop_oracle(rng):
    for _ in range(200):
        f = random_series(rng, int(rng.integers(0, 12)))
        g = random_series(rng, int(rng.integers(0, 12)))
        assert np.max(np.abs(star_mul(f, g).coeffs - loop_convolution(f, g))) < 1e-13


def test_star_mul_respects_degree_bound(rng):
    f, g = random_series(rng, 10), random_series(rng, 10)
    with degree_bound(6):
        h = star_mul(f, g)
    assert len(h) == 7
    assert np.allclose(h.coeffs, loop_convolution(f, g)[:7])


@given(coeff_arrays(), coeff_arrays(), coeff_arrays())
def test_star_associative_and_bilinear(a, b, c):
    f, g, h = TruncatedSeries(a), TruncatedSeries(b), TruncatedSeries(c)
    lhs = star_mul(star_mul(f, g), h)
    rhs = star_mul(f, star_mul(g, h))
    assert lhs.allclose(rhs, 1e-12)
    assert star_mul(f + g, h).allclose(star_mul(f, h) + star_mul(g, h), 1e-12)


@given(coeff_arrays(), coeff_arrays())
def test_conjugate_of_product(a, b):
    f, g = TruncatedSeries(a), TruncatedSeries(b)
    assert regular_conj(star_mul(f, g)).allclose(star_mul(regular_conj(g), regular_conj(f)), 1e-12)


def test_regular_conj_examples(rng):
    f = TruncatedSeries.monomial(1, QI)
    assert regular_conj(f)[1] == -QI
    r = random_series(rng, 7)
    assert regular_conj(regular_conj(r)).allclose(r, 0.0)


def test_symmetrize_examples():
    f = TruncatedSeries([[1, 0, 0, 0], [0, 1, 0, 0]])  # 1 + q i
    assert symmetrize(f).allclose(TruncatedSeries([1.0, 0.0, 1.0]))
    r = TruncatedSeries([1.0, -2.0, 0.5])
    assert symmetrize(r).allclose(star_mul(r, r))


@given(coeff_arrays(16))
def test_symmetrize_real_and_conjugation_invariant(a):
    f = TruncatedSeries(a)
    s = symmetrize(f)
    assert np.max(np.abs(s.coeffs[:, 1:])) < 1e-13 * max(1.0, np.sum(a ** 2))
    assert s.allclose(symmetrize(regular_conj(f)), 1e-12)


def test_star_inv_constant():
    c = Quaternion(1.0, 2.0, -1.0, 0.5)
    inv = star_inv(TruncatedSeries.constant(c), 4)
    assert Q(inv.coeffs[0]).isclose(inv_q(c))
    assert np.all(inv.coeffs[1:] == 0.0)


def test_star_inv_geometric_gives_kernel():
    w = Quaternion(0.3, 0.2, -0.1, 0.4)
    f = TruncatedSeries([[1, 0, 0, 0], (-w.conj()).to_array()])
    inv = star_inv(f, 20)
    p = ONE
    for n in range(21):
        assert Q(inv.coeffs[n]).isclose(p, 1e-14)
        p = hamilton_mul(p, w.conj())


def test_star_inv_random_residual(rng):
    for _ in range(50):
        c = rng.standard_normal((9, 4))
        c[0] /= np.linalg.norm(c[0])
        c[1:] *= 0.3 / np.linalg.norm(c[1:], axis=1)[:, None] * rng.uniform(0, 1, (8, 1))
        f = TruncatedSeries(c)
        inv = star_inv(f, 32)
        prod = star_mul(f, inv, bound=32)
        assert Q(prod.coeffs[0]).isclose(ONE)
        assert np.max(np.abs(prod.coeffs[1:])) < 1e-10
        assert inv.allclose(star_inv_formula(f, 32), 1e-8)


def test_star_inv_errors_and_warning():
    with pytest.raises(NotStarInvertibleError):
        star_inv(TruncatedSeries([0.0, 1.0]), 5)
    with pytest.raises(NotStarInvertibleError):
        star_inv(TruncatedSeries.zero(), 5)
    assert star_inv_condition(TruncatedSeries([1.0, 3.0]), 3) > 1.0
    # growing coefficients make the formal inverse ill conditioned
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        star_inv(TruncatedSeries([1e-3, 1.0, 1.0]), 6)
    assert any(issubclass(w.category, StarInverseWarning) for w in rec)
    with pytest.raises(NotStarInvertibleError):
        star_inv(TruncatedSeries([1e-8, 1.0, 1.0]), 60)


def test_cullen_derive_examples(rng):
    assert cullen_derive(TruncatedSeries.monomial(2)).allclose(TruncatedSeries([0.0, 2.0]))
    assert cullen_derive(TruncatedSeries.constant(QJ)).degree == -math.inf
    f, g = random_series(rng, 6), random_series(rng, 4)
    assert cullen_derive(f + g.scale(2.0)).allclose(cullen_derive(f) + cullen_derive(g).scale(2.0))
    for n in range(1, 6):
        assert cullen_derive(TruncatedSeries.monomial(n)).allclose(TruncatedSeries.monomial(n - 1).scale(n))


def test_cullen_derive_finite_difference(rng):
    f = random_series(rng, 10)
    df = cullen_derive(f)
    h = 1e-5
    for I in sample_units(5, 2):
        for _ in range(4):
            z = 0.7 * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            # complex derivative along the slice: difference quotient in the real direction
            num = (evaluate_slice(f, z + h, I) - evaluate_slice(f, z - h, I)) / (2 * h)
            assert np.max(np.abs(num - evaluate_slice(df, z, I))) < 1e-6


def test_evaluate_examples(rng):
    f = random_series(rng, 5)
    assert evaluate(f, Quaternion()).isclose(Q(f.coeffs[0]), 0.0)
    g = TruncatedSeries([[1, 0, 0, 0], [0, 1, 0, 0]])
    assert evaluate(g, QJ).isclose(ONE - QK)


def test_evaluate_matches_naive(rng):
    for _ in range(100):
        f = random_series(rng, int(rng.integers(0, 20)))
        q = ball_point(rng, 1.0)
        assert evaluate(f, q).isclose(naive_eval(f, q), 1e-13 * max(1.0, float(np.sum(np.abs(f.coeffs)))))


def test_vectorised_evaluation_matches_scalar(rng):
    f = random_series(rng, 12)
    pts = rng.standard_normal((30, 4)) * 0.3
    pts[0, 1:] = 0.0
    vals = evaluate_many(f, pts)
    for p, v in zip(pts, vals):
        assert np.allclose(v, evaluate(f, p).to_array(), atol=1e-13)


def test_eval_via_transform_examples(rng):
    f = TruncatedSeries.constant(QI)
    g = TruncatedSeries.monomial(1, QJ)
    q = Quaternion(0.2, -0.3, 0.1, 0.4)
    assert eval_via_transform(f, g, q).isclose(hamilton_mul(q, QK))
    assert eval_via_transform(f, g, q).isclose(evaluate(star_mul(f, g), q))
    h = random_series(rng, 4)
    c = TruncatedSeries.constant(QK)
    assert eval_via_transform(h, c, q).isclose(hamilton_mul(evaluate(h, q), QK))
    assert eval_via_transform(TruncatedSeries.zero(), h, q) == Quaternion()


def test_rep_formula_collapses():
    vp, vm = Quaternion(1, 2, 3, 4), Quaternion(-1, 0.5, 2, 0)
    I = UNIT_J
    assert rep_formula(vp, vm, I, I).isclose(vp, 1e-15)
    assert rep_formula(vp, vm, I, -I).isclose(vm, 1e-15)


@given(coeff_arrays(10), units(), units(), st.floats(-0.7, 0.7), st.floats(0.0, 0.7))
def test_rep_formula_reproduces_evaluation(a, I, J, x, y):
    f = TruncatedSeries(a)
    vp = evaluate(f, Quaternion(x) + y * I)
    vm = evaluate(f, Quaternion(x) - y * I)
    direct = evaluate(f, Quaternion(x) + y * J)
    assert rep_formula(vp, vm, I, J).isclose(direct, 1e-12 * max(1.0, float(np.sum(np.abs(a)))))


def test_split_coeffs_examples():
    f = TruncatedSeries([[1, 2, 0, 0], [0, -1, 0, 0]])
    pair = split_coeffs(f, UNIT_I, UNIT_J)
    assert np.all(pair.G_coeffs == 0)
    g = TruncatedSeries.constant(QJ)
    p = split_coeffs(g, UNIT_I, UNIT_J)
    assert p.F_coeffs[0] == 0 and p.G_coeffs[0] == 1
    with pytest.raises(DomainError):
        split_coeffs(f, UNIT_I, ImaginaryUnit.from_vector([1, 1, 0]))


@given(coeff_arrays(12), units())
def test_split_recombine_and_evaluate(a, I):
    f = TruncatedSeries(a)
    J = orthogonal_unit(I)
    pair = split_coeffs(f, I, J)
    assert np.max(np.abs(pair.recombine().coeffs - a)) < 1e-14 * max(1.0, np.max(np.abs(a)))
    rng = np.random.default_rng(int(abs(a[0, 0]) * 1e6) % 1000)
    z = 0.9 * np.sqrt(rng.uniform(0, 1, 50)) * np.exp(1j * rng.uniform(0, 2 * np.pi, 50))
    Fz, Gz = pair.eval_F(z), pair.eval_G(z)
    Ia, Ja = I.to_array(), J.to_array()
    as_quat = lambda c: np.outer(c.real, [1, 0, 0, 0]) + np.outer(c.imag, Ia)
    via_split = as_quat(Fz) + qmul(as_quat(Gz), Ja)
    assert np.max(np.abs(via_split - evaluate_slice(f, z, I))) < 1e-12 * max(1.0, np.sum(np.abs(a)))


def test_series_container_behaviour(rng):
    f = random_series(rng, 3)
    assert f.degree == 3 and f[10] == Quaternion()
    assert TruncatedSeries([1.0, 0.0, 0.0]).degree == 0
    assert TruncatedSeries.zero().degree == -math.inf
    with pytest.raises(DomainError):
        TruncatedSeries([[np.nan, 0, 0, 0]])
    back = TruncatedSeries.from_json(json.loads(json.dumps(f.to_json())))
    assert back.allclose(f, 0.0)
    rows = f.to_csv_rows()
    assert rows[2][0] == 2 and len(rows[2]) == 5
    with pytest.raises((ValueError, TypeError)):
        f.coeffs[0, 0] = 1.0

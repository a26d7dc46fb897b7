"""Experiments behind the CLI: each returns a :class:`LabReport`."""
from __future__ import annotations

import itertools
import math

import numpy as np

from ..bmo import ArcFamily, bmo_norm, bmo_slice_norm
from ..hardy import h2_inner_derivative, h2_norm, h2_norm_volume, hinf_estimate, reproducing_error
from ..measures import (
    box_constant,
    default_test_set,
    embedding_constant,
    kernel_test_set,
    moebius_sweep,
    mu_b_sample,
)
from ..operators import HankelSymbolPair, HankelOperator, ToeplitzOperator, hankel_norm_estimate, op_norm, bilinear_sup
from ..quat import Quaternion, UNIT_I
from ..series import TruncatedSeries, evaluate, evaluate_many, random_series, star_mul
from .config import LabConfig
from .report import LabReport
from .symbols import resolve

# quantities compared in the comparability study
CORE = ("hankel_norm", "bmo_norm", "box_const_sqrt", "embed_const_sqrt")
LOG_WINDOW_BOUND = math.log(50.0)


def _ratio_rows(rep: LabReport, names, meta: dict) -> None:
    for x, y in itertools.combinations(names, 2):
        vx, vy = rep.value(x), rep.value(y)
        if vx and vy:
            rep.add(f"ratio:{x}/{y}", vx / vy, **meta)


def theorem1_report(b: TruncatedSeries, cfg: LabConfig, generator: str = "") -> LabReport:
    """Hankel norm ladder, bilinear sup, BMO norm, box and embedding constants of ``mu_b``."""
    rep = LabReport("theorem1", cfg.to_dict())
    seed = cfg.seed
    meta = {"seed": seed, "generator": generator}
    pair = HankelSymbolPair.from_symbol(b)
    ladder = []
    for N in cfg.ladder:
        v = rep.compute(f"hankel_norm_N{N}", lambda N=N: op_norm(HankelOperator(pair.padded_alpha(N), N)), N=N, **meta)
        ladder.append((N, v))
    top_N, top = ladder[-1]
    if top is not None:
        rep.add("hankel_norm", top, N=top_N, **meta)
    else:
        rep.compute("hankel_norm", lambda: hankel_norm_estimate(b, [top_N])[0], N=top_N, **meta)
    rep.set_plot("hankel_ladder", ["N", "hankel_norm"], [(N, v) for N, v in ladder if v is not None])
    rep.compute(
        "bilinear_sup",
        lambda: bilinear_sup(b, cfg.bilinear_random, cfg.bilinear_iter, seed),
        N=len(b), samples=cfg.bilinear_random, **meta,
    )
    fam = cfg.arcs
    rep.compute("bmo_norm", lambda: bmo_norm(b, cfg.bmo_slices, fam, seed), N=len(fam), samples=cfg.bmo_slices, **meta)
    mu = None
    try:
        mu = mu_b_sample(b, cfg.mc_samples, seed)
    except Exception as exc:  # noqa: BLE001
        for q in ("box_const_sqrt", "embed_const_sqrt"):
            rep.add_error(q, exc, samples=cfg.mc_samples, **meta)
    if mu is not None:
        rep.compute("box_const_sqrt", lambda: math.sqrt(box_constant(mu)), samples=cfg.mc_samples, **meta)
        tests = default_test_set(seed, cfg.test_random, cfg.test_degree, cfg.kernel_N)
        rep.compute(
            "embed_const_sqrt", lambda: math.sqrt(embedding_constant(mu, tests)),
            N=cfg.kernel_N, samples=cfg.mc_samples, **meta,
        )
    # coefficient norm against the derivative pairing, which is only an equivalent norm
    rep.compute("h2_norm", lambda: h2_norm(b), N=len(b), **meta)
    rep.compute(
        "h2_derivative_norm",
        lambda: math.sqrt(max(h2_inner_derivative(b, b, cfg.quadrature).x0, 0.0)),
        N=cfg.n_radial, samples=cfg.n_sphere, **meta,
    )
    _ratio_rows(rep, CORE, meta)
    _ratio_rows(rep, ("h2_derivative_norm", "h2_norm"), meta)
    vb, vh = rep.value("bilinear_sup"), rep.value("hankel_norm")
    if vb and vh:
        rep.add("ratio:bilinear_sup/hankel_norm", vb / vh, **meta)
    return rep


def theorem1_suite(symbols, cfg: LabConfig) -> LabReport:
    """:func:`theorem1_report` per symbol plus log-ratio windows across the suite."""
    rep = LabReport("theorem1", cfg.to_dict())
    logs: dict[tuple[str, str], list[float]] = {p: [] for p in itertools.combinations(CORE, 2)}
    sweep = []
    violations = 0
    for k, (label, b) in enumerate(symbols):
        sub = theorem1_report(b, cfg, label)
        rep.extend(sub, prefix=f"s{k:02d}/")
        row = [k]
        for x, y in logs:
            r = sub.value(f"ratio:{x}/{y}")
            if r is not None:
                logs[(x, y)].append(math.log(r))
            row.append(math.log(r) if r is not None else "")
        sweep.append(row)
        vb, vh = sub.value("bilinear_sup"), sub.value("hankel_norm")
        if vb is not None and vh is not None and vb > vh + 1e-9:
            violations += 1
    meta = {"seed": cfg.seed, "samples": len(symbols), "generator": cfg.symbol}
    everything = []
    for (x, y), vals in logs.items():
        if vals:
            rep.add(f"window:{x}/{y}", max(vals) - min(vals), **meta)
            everything.extend(vals)
    if everything:
        rep.add("window:all", max(everything) - min(everything), **meta)
    rep.add("window_bound", LOG_WINDOW_BOUND, **meta)
    rep.add("provable_direction_violations", violations, **meta)
    rep.set_plot("suite_log_ratios", ["symbol"] + [f"{x}/{y}" for x, y in logs], sweep)
    return rep


def theoremA_report(phi: TruncatedSeries, cfg: LabConfig, generator: str = "") -> LabReport:
    """Norms of multiplier sections along the ladder against the boundary sup estimate."""
    rep = LabReport("theoremA", cfg.to_dict())
    meta = {"seed": cfg.seed, "generator": generator}
    hinf = rep.compute("hinf", lambda: hinf_estimate(phi, cfg.hinf_samples, cfg.seed), samples=cfg.hinf_samples, **meta)
    curve = []
    for N in cfg.ladder:
        v = rep.compute(f"mult_norm_N{N}", lambda N=N: op_norm(ToeplitzOperator(phi.coeffs, N)), N=N, **meta)
        if v is not None and hinf:
            rep.add(f"ratio_N{N}", v / hinf, N=N, samples=cfg.hinf_samples, **meta)
            curve.append((N, v, hinf, v / hinf))
    top = rep.value(f"ratio_N{cfg.ladder[-1]}")
    if top is not None:
        rep.add("ratio", top, N=cfg.ladder[-1], samples=cfg.hinf_samples, **meta)
    rep.set_plot("multiplier_ladder", ["N", "mult_norm", "hinf", "ratio"], curve)
    return rep


def rkt_probe(b: TruncatedSeries, cfg: LabConfig, generator: str = "") -> LabReport:
    """Embedding constant of ``mu_b`` tested on kernels alone and on kernels plus polynomials."""
    rep = LabReport("rkt", cfg.to_dict())
    meta = {"seed": cfg.seed, "generator": generator, "samples": cfg.mc_samples}
    try:
        mu = mu_b_sample(b, cfg.mc_samples, cfg.seed)
    except Exception as exc:  # noqa: BLE001
        rep.add_error("embed_kernels", exc, **meta)
        rep.add_error("embed_full", exc, **meta)
        return rep
    kernels = kernel_test_set(cfg.seed, N=cfg.kernel_N)
    full = kernels + default_test_set(cfg.seed, cfg.test_random, cfg.test_degree, cfg.kernel_N)
    vk = rep.compute("embed_kernels", lambda: embedding_constant(mu, kernels), N=cfg.kernel_N, **meta)
    vf = rep.compute("embed_full", lambda: embedding_constant(mu, full), N=cfg.kernel_N, **meta)
    if vk and vf:
        rep.add("ratio:embed_kernels/embed_full", vk / vf, **meta)
    return rep


def rkt_suite(symbols, cfg: LabConfig) -> LabReport:
    rep = LabReport("rkt", cfg.to_dict())
    ratios = []
    for k, (label, b) in enumerate(symbols):
        sub = rkt_probe(b, cfg, label)
        rep.extend(sub, prefix=f"s{k:02d}/")
        r = sub.value("ratio:embed_kernels/embed_full")
        if r is not None:
            ratios.append((k, r))
    meta = {"seed": cfg.seed, "samples": len(ratios), "generator": cfg.symbol}
    if ratios:
        vals = np.array([r for _, r in ratios])
        rep.add("ratio_min", float(vals.min()), **meta)
        rep.add("ratio_median", float(np.median(vals)), **meta)
        rep.add("ratio_max", float(vals.max()), **meta)
    rep.set_plot("rkt_ratios", ["symbol", "ratio"], ratios)
    return rep


def selftest(cfg: LabConfig) -> LabReport:
    """Quick consistency checks; each row is an error measure with its tolerance applied."""
    rep = LabReport("selftest", cfg.to_dict())
    rng = np.random.default_rng(cfg.seed)
    meta = {"seed": cfg.seed, "generator": "selftest"}

    def check(name, fn, tol, **extra):
        v = rep.compute(name, fn, **meta, **extra)
        if v is not None and not v <= tol:
            rep.rows[-1].status = "fail"
            rep.rows[-1].message = f"exceeds tolerance {tol}"

    def star_assoc():
        err = 0.0
        for _ in range(20):
            f, g, h = (random_series(rng, int(rng.integers(0, 9))) for _ in range(3))
            lhs = star_mul(star_mul(f, g), h)
            rhs = star_mul(f, star_mul(g, h))
            err = max(err, float(np.max(np.abs(lhs.coeffs - rhs.coeffs))))
        return err

    def kernel_reproduction():
        f = random_series(rng, 12)
        u = rng.standard_normal(4)
        w = Quaternion(*(0.6 * u / np.linalg.norm(u)))
        return reproducing_error(f, w, 64)

    def norm_formula():
        f = random_series(rng, 8)
        return abs(h2_norm_volume(f, cfg.quadrature) / h2_norm(f) - 1.0)

    def sup_of_shift():
        return abs(hinf_estimate(TruncatedSeries.monomial(1), 1000, cfg.seed) - 1.0)

    def mean_oscillation_full_circle():
        return abs(bmo_slice_norm(TruncatedSeries.monomial(1), UNIT_I, ArcFamily(((0.0, 2 * math.pi),))) - 1.0)

    def evaluation_identity():
        f = random_series(rng, 6)
        q = Quaternion(*(0.4 * rng.standard_normal(4)))
        direct = evaluate(f, q)
        # quaternion Horner against the complex-slice evaluation
        return float(np.max(np.abs(evaluate_many(f, q.to_array()[None, :])[0] - direct.to_array())))

    check("star_associativity_error", star_assoc, 1e-10)
    check("kernel_reproduction_error", kernel_reproduction, 1e-12)
    check("monomial_hankel_error", lambda: abs(hankel_norm_estimate(TruncatedSeries.monomial(3), [8])[0] - 1.0), 1e-12, N=8)
    check("norm_formula_rel_error", norm_formula, 5e-3)
    check("shift_sup_error", sup_of_shift, 1e-9, samples=1000)
    check("bmo_full_circle_error", mean_oscillation_full_circle, 1e-12)
    check("evaluation_consistency", evaluation_identity, 1e-12)
    check("moebius_constant", lambda: moebius_sweep(n_grid=40).c, 100.0)
    return rep


def run_experiment(name: str, cfg: LabConfig) -> LabReport:
    if name == "selftest":
        return selftest(cfg)
    symbols = resolve(cfg.symbol, cfg.seed, cfg.suite_size, cfg.suite_degree)
    if name == "theorem1":
        if len(symbols) > 1 or cfg.symbol.startswith("suite"):
            return theorem1_suite(symbols, cfg)
        return theorem1_report(symbols[0][1], cfg, symbols[0][0])
    if name == "rkt":
        if len(symbols) > 1 or cfg.symbol.startswith("suite"):
            return rkt_suite(symbols, cfg)
        return rkt_probe(symbols[0][1], cfg, symbols[0][0])
    if name == "theoremA":
        if len(symbols) == 1:
            return theoremA_report(symbols[0][1], cfg, symbols[0][0])
        rep = LabReport("theoremA", cfg.to_dict())
        for k, (label, phi) in enumerate(symbols):
            rep.extend(theoremA_report(phi, cfg, label), prefix=f"s{k:02d}/")
        return rep
    raise ValueError(f"unknown experiment {name!r}")

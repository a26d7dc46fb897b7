import csv
import json
import math

import numpy as np
import pytest

from qnehari.lab import cli, experiments
from qnehari.lab.config import ConfigError, LabConfig
from qnehari.lab.report import LabReport
from qnehari.lab.symbols import build_symbol, parse_symbol, resolve, symbol_suite

FAST = dict(
    ladder=[8, 16, 32],
    n_radial=12,
    n_angular=32,
    n_sphere=4,
    mc_samples=4000,
    hinf_samples=4000,
    bilinear_random=4,
    bilinear_iter=40,
    bmo_slices=4,
    arc_levels=4,
    test_random=4,
    test_degree=6,
    kernel_N=32,
    suite_size=3,
    suite_degree=6,
    figures=False,
)


@pytest.fixture
def fast_cfg():
    return LabConfig.from_dict(FAST)


@pytest.fixture
def cfg_file(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(FAST))
    return p


# config


def test_config_roundtrip(fast_cfg):
    again = LabConfig.from_dict(fast_cfg.to_dict())
    assert again == fast_cfg


@pytest.mark.parametrize(
    "bad",
    [
        {"ladder": [32, 16]},
        {"mc_samples": 0},
        {"seed": 1.5},
        {"symbol": "nonsense"},
        {"unknown_key": 1},
    ],
)
def test_config_rejects(bad):
    with pytest.raises(ConfigError):
        LabConfig.from_dict({**FAST, **bad})


def test_config_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        LabConfig.load(tmp_path / "missing.json")
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        LabConfig.load(p)


def test_override_ignores_none(fast_cfg):
    cfg = fast_cfg.override(seed=None, symbol="zero")
    assert cfg.seed == fast_cfg.seed and cfg.symbol == "zero"


# symbols


def test_parse_symbol():
    name, params = parse_symbol("monomial:m=3,u=0/1")
    assert name == "monomial"
    assert params == {"m": 3, "u": (0.0, 1.0, 0.0, 0.0)}


@pytest.mark.parametrize("spec", ["nope", "monomial:m", "monomial:q=2", "geometric:rho=abc", "suite:rho=1"])
def test_parse_symbol_rejects(spec):
    with pytest.raises(ConfigError):
        parse_symbol(spec)


def test_build_symbol_values():
    b = build_symbol("monomial:m=2,u=0/0/3")
    assert b.degree == 2
    np.testing.assert_array_equal(b.coeffs[2], [0, 0, 1, 0])
    g = build_symbol("geometric:rho=0.5,deg=4")
    np.testing.assert_allclose(g.coeffs[:, 0], 0.5 ** np.arange(5))
    lac = build_symbol("lacunary:base=3,deg=30")
    assert list(np.nonzero(lac.coeffs[:, 0])[0]) == [1, 3, 9, 27]


def test_random_poly_uses_config_seed():
    a = build_symbol("random_poly:deg=5", seed=3)
    b = build_symbol("random_poly:deg=5,seed=3")
    np.testing.assert_array_equal(a.coeffs, b.coeffs)


def test_suite_is_reproducible():
    s1 = symbol_suite(4, 6, seed=9)
    s2 = symbol_suite(4, 6, seed=9)
    assert [l for l, _ in s1] == [l for l, _ in s2]
    for (_, a), (_, b) in zip(s1, s2):
        np.testing.assert_array_equal(a.coeffs, b.coeffs)
    assert len(resolve("suite:size=2,deg=3", 0)) == 2


# experiments


def test_theorem1_zero_symbol(fast_cfg):
    rep = experiments.theorem1_report(build_symbol("zero"), fast_cfg, "zero")
    assert not rep.partial
    for q in ("hankel_norm", "bilinear_sup", "bmo_norm", "box_const_sqrt", "embed_const_sqrt"):
        assert rep.value(q) == 0.0
    assert not any(r.quantity.startswith("ratio:") for r in rep.rows)


def test_theorem1_monomial(fast_cfg):
    rep = experiments.theorem1_report(build_symbol("monomial:m=3"), fast_cfg, "monomial")
    assert rep.value("hankel_norm") == pytest.approx(1.0, abs=1e-12)
    assert rep.value("bilinear_sup") <= 1.0 + 1e-9
    assert rep.plotdata["hankel_ladder"][0] == ["N", "hankel_norm"]


def test_theorem1_suite_rows(fast_cfg):
    rep = experiments.run_experiment("theorem1", fast_cfg.override(symbol="suite"))
    assert rep.value("window_bound") == pytest.approx(math.log(50))
    assert rep.value("provable_direction_violations") == 0
    assert rep.value("window:all") is not None
    assert any(r.quantity.startswith("s02/") for r in rep.rows)


def test_theoremA_constant_and_identity(fast_cfg):
    rep = experiments.theoremA_report(build_symbol("constant:c=0/2"), fast_cfg)
    assert rep.value("hinf") == pytest.approx(2.0, abs=1e-12)
    assert rep.value("ratio") == pytest.approx(1.0, abs=1e-12)
    rep = experiments.theoremA_report(build_symbol("monomial:m=1"), fast_cfg)
    assert rep.value("ratio") == pytest.approx(1.0, abs=1e-9)


def test_rkt_zero_symbol(fast_cfg):
    rep = experiments.rkt_probe(build_symbol("zero"), fast_cfg)
    assert not rep.partial
    assert rep.value("embed_kernels") == 0.0 and rep.value("embed_full") == 0.0
    assert rep.value("ratio:embed_kernels/embed_full") is None


def test_rkt_identity(fast_cfg):
    rep = experiments.rkt_probe(build_symbol("monomial:m=1"), fast_cfg)
    r = rep.value("ratio:embed_kernels/embed_full")
    assert r is not None and 0 < r <= 1 + 1e-12


def test_selftest_passes(fast_cfg):
    rep = experiments.selftest(fast_cfg)
    assert rep.rows and not rep.partial


def test_report_rejects_bad_values():
    rep = LabReport("x", {})
    with pytest.raises(ValueError):
        rep.add("q", -1.0)
    with pytest.raises(ValueError):
        rep.add("q", float("inf"))
    assert rep.compute("q", lambda: 1 / 0) is None
    assert rep.partial and rep.rows[0].status == "error"


# CLI


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_cli_success_writes_outputs(cfg_file, tmp_path, capsys):
    out = tmp_path / "out"
    rc = cli.main(["theorem1", "--config", str(cfg_file), "--symbol", "monomial:m=2", "--out", str(out)])
    assert rc == 0
    rows = _read_csv(out / "report.csv")
    assert list(rows[0]) == ["quantity", "value", "N", "samples", "seed", "status"]
    hn = next(r for r in rows if r["quantity"] == "hankel_norm")
    assert float(hn["value"]) == pytest.approx(1.0, abs=1e-12)
    assert (out / "report.json").exists()
    assert (out / "plotdata" / "hankel_ladder.csv").exists()
    assert capsys.readouterr().out.startswith("quantity,value")


def test_cli_renders_figures(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({**FAST, "figures": True}))
    out = tmp_path / "out"
    assert cli.main(["theoremA", "--config", str(p), "--symbol", "geometric:deg=4", "--out", str(out)]) == 0
    assert (out / "figures" / "multiplier_ladder.png").stat().st_size > 0


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus", "--config", "x.json"],
        ["theorem1"],
        ["theorem1", "--config", "/nonexistent/cfg.json"],
    ],
)
def test_cli_config_errors(argv):
    with pytest.raises(SystemExit) as exc:
        rc = cli.main(argv)
        raise SystemExit(rc)
    assert exc.value.code == 1


def test_cli_bad_symbol(cfg_file, tmp_path):
    assert cli.main(["theorem1", "--config", str(cfg_file), "--symbol", "monomial:m=x", "--out", str(tmp_path)]) == 1


def test_cli_partial_report(cfg_file, tmp_path, monkeypatch):
    def broken(*a, **k):
        raise FloatingPointError("forced")

    monkeypatch.setattr(experiments, "bmo_norm", broken)
    out = tmp_path / "out"
    rc = cli.main(["theorem1", "--config", str(cfg_file), "--symbol", "monomial:m=1", "--out", str(out)])
    assert rc == 2
    rows = {r["quantity"]: r for r in _read_csv(out / "report.csv")}
    assert rows["bmo_norm"]["status"] == "error"
    assert rows["hankel_norm"]["status"] == "ok"


def test_cli_csv_is_deterministic(cfg_file, tmp_path):
    texts = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        argv = ["theorem1", "--config", str(cfg_file), "--symbol", "random_poly:deg=6", "--seed", "4", "--out", str(out)]
        assert cli.main(argv) == 0
        texts.append((out / "report.csv").read_bytes())
    assert texts[0] == texts[1]

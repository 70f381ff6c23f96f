"""Experiment configuration, the equivalence sweep, and the lemma suite."""

import json
import math

import pytest

from bhl.errors import ConfigError
from bhl.harness import (CSV_COLUMNS, EquivalenceReport, EquivalenceRow,
                         ExperimentConfig, growth_divergent, run_equivalence,
                         run_lemma_suite)


def small_config(**overrides):
    """One weight, one symbol, coarse rules: seconds instead of minutes."""
    base = dict(
        weights=["standard:eta=0"],
        symbols=["zbar"],
        p=[2.0],
        gram_size=24,
        quadrature={"radial": 64, "angular": 96,
                    "profile_radial": 16, "profile_angular": 16,
                    "inner_radial": 24, "inner_angular": 32,
                    "pairs_radial": 16, "pairs_angular": 32,
                    "lemma5_radial": 16, "lemma5_angular": 32},
        lemmas={"radii": 4, "angles": 2, "lemma5_count": 2,
                "weight1_c": [0.0]},
        figures=False,
    )
    base.update(overrides)
    return ExperimentConfig.from_dict(base)


# ---- configuration ----------------------------------------------------------


def test_config_from_dict_round_trip():
    cfg = ExperimentConfig.from_dict({
        "weights": ["standard:eta=1"],
        "symbols": ["absz2"],
        "p": [1, 2],
        "lattice": {"r": 0.25, "r_max": 0.9},
        "quadrature": {"radial": 32, "angular": 64},
        "workers": 3,
    })
    assert cfg.weights == ["standard:eta=1"]
    assert cfg.p_values == [1.0, 2.0]
    assert cfg.lattice_r == 0.25
    assert cfg.lattice_r_max == 0.9
    assert cfg.rule_radial == 32
    assert cfg.workers == 3
    # untouched fields keep their defaults
    assert cfg.etas == [4.0]
    flat = cfg.to_dict()
    assert flat["lattice_r"] == 0.25
    assert flat["symbols"] == ["absz2"]


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown config key bogus"):
        ExperimentConfig.from_dict({"bogus": 1})
    with pytest.raises(ConfigError, match=r"unknown config key lattice\.radius"):
        ExperimentConfig.from_dict({"lattice": {"radius": 0.5}})


def test_config_validate_bounds():
    with pytest.raises(ConfigError, match="gram_size"):
        ExperimentConfig.from_dict({"gram_size": 1000})
    with pytest.raises(ConfigError, match="flags_r_max"):
        ExperimentConfig.from_dict({"flags_r_max": [0.995, 0.98]})
    with pytest.raises(ConfigError, match=r"weights\[0\]"):
        ExperimentConfig.from_dict({"weights": ["standard:0"]})
    with pytest.raises(ConfigError, match=r"p\[0\]"):
        ExperimentConfig.from_dict({"p": [0.0, 2.0]})
    with pytest.raises(ConfigError, match="workers"):
        ExperimentConfig.from_dict({"workers": 0})


def test_config_from_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"symbols": ["rez"], "seed": 7}))
    cfg = ExperimentConfig.from_json(str(path))
    assert cfg.symbols == ["rez"]
    assert cfg.seed == 7
    with pytest.raises(ConfigError, match="cannot read config"):
        ExperimentConfig.from_json(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        ExperimentConfig.from_json(str(bad))


# ---- divergence verdicts ------------------------------------------------------


def test_growth_divergent_boundaries():
    # threshold is 25% relative growth between the two truncation radii
    assert not growth_divergent(1.0, 1.2)
    assert not growth_divergent(1.0, 1.25)
    assert growth_divergent(1.0, 1.3)
    # both below the floor: convergent; appearing from nothing: divergent
    assert not growth_divergent(0.0, 5e-13)
    assert growth_divergent(0.0, 1.0)
    assert not growth_divergent(5.0, 4.0)


# ---- csv cells ------------------------------------------------------------------


def test_report_csv_cells_and_bracket():
    row = EquivalenceRow(
        weight="standard:eta=0", symbol="zbar", p=1.0,
        schatten_sum=12.5, schatten_flag="divergent",
        mo_global=3.0, mo_global_flag="divergent",
        mo_local_sum=4.0, mo_local_flag="divergent",
        ratio_gl=None, ratio_gs=None, ratio_ls=None)
    other = EquivalenceRow(
        weight="standard:eta=0", symbol="zbar", p=2.0,
        schatten_sum=0.5, schatten_flag="convergent",
        mo_global=1.0, mo_global_flag="convergent",
        mo_local_sum=0.25, mo_local_flag="convergent",
        ratio_gl=4.0, ratio_gs=2.0, ratio_ls=0.5)
    report = EquivalenceReport(rows=[row, other], meta={}, errors=[],
                               partial=False, config={}, runtime=0.0)
    text = report.to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    # divergent cells carry no ratios: empty csv fields, not "None"
    assert lines[1].endswith("divergent,,,")
    assert "0.5" in lines[2]
    assert report.ratio_bracket() == (0.5, 4.0)
    assert report.verdicts_agree

    disagree = EquivalenceRow(
        weight="w", symbol="s", p=2.0,
        schatten_sum=1.0, schatten_flag="convergent",
        mo_global=1.0, mo_global_flag="divergent",
        mo_local_sum=1.0, mo_local_flag="convergent",
        ratio_gl=None, ratio_gs=None, ratio_ls=None)
    assert not disagree.verdicts_agree


# ---- experiment runs -------------------------------------------------------------


def test_equivalence_run_is_deterministic():
    cfg = small_config()
    first = run_equivalence(cfg)
    second = run_equivalence(small_config())
    assert not first.partial
    assert first.to_csv() == second.to_csv()

    threaded = run_equivalence(small_config(workers=2))
    assert threaded.to_csv() == first.to_csv()


def test_equivalence_small_run_contents():
    report = run_equivalence(small_config(p=[1.0, 2.0]))
    assert len(report.rows) == 2
    assert report.verdicts_agree
    by_p = {row.p: row for row in report.rows}
    # p=1: every route diverges, so no ratios are reported
    assert by_p[1.0].flags == ("divergent",) * 3
    assert by_p[1.0].ratio_gl is None
    # p=2: all routes converge and the ratios populate
    assert by_p[2.0].flags == ("convergent",) * 3
    assert by_p[2.0].ratio_gl is not None
    lo, hi = report.ratio_bracket()
    assert 0.0 < lo <= hi < 1e3
    meta = report.meta["weights"]["standard:eta=0"]
    assert meta["classification"]["regular"]["holds"]
    assert "zbar" in meta["cells"]


def test_lemma_suite_smoke():
    report = run_lemma_suite(small_config())
    # the projection bound: measured ratios never exceed 1 and the
    # designated sharp case attains it
    assert report.max_ratios()["lemma3"] <= 1.0 + 1e-4
    assert report.tightness["ratio"] == pytest.approx(1.0, abs=1e-6)
    for e in report.weight1:
        assert e["bounded"]
    for e in report.lemma5:
        assert e["bounded"]
    for e in report.aim1:
        assert e["lattice_flag"] == e["integral_flag"]
    zbar_p2 = [e for e in report.aim1 if e["p"] == 2.0][0]
    # the pinned lattice oversamples: the sum runs well above the integral
    # but within a stable factor
    assert zbar_p2["ratio"] == pytest.approx(31.4, rel=0.05)


def test_lemma_suite_export(tmp_path):
    report = run_lemma_suite(small_config())
    csv_text = report.to_csv(str(tmp_path / "lemmas.csv"))
    assert csv_text.splitlines()[0] == "section,weight,case,z_re,z_im,lhs,rhs,ratio"
    payload = report.to_json(str(tmp_path / "lemmas.json"))
    disk = json.loads((tmp_path / "lemmas.json").read_text())
    assert disk["tightness"]["ratio"] == pytest.approx(1.0, abs=1e-6)
    assert disk["max_ratios"] == payload["max_ratios"]

"""End-to-end command line behavior: JSON output, artifacts, exit codes."""

import json
import math

import pytest

from bhl.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def last_json(out: str) -> dict:
    """The trailing JSON object on stdout (some commands print CSV first)."""
    lines = out.splitlines()
    start = max(i for i, line in enumerate(lines) if line == "{")
    return json.loads("\n".join(lines[start:]))


SMALL_CONFIG = {
    "weights": ["standard:eta=0"],
    "symbols": ["zbar"],
    "p": [2.0],
    "gram_size": 24,
    "quadrature": {"radial": 64, "angular": 96,
                   "profile_radial": 16, "profile_angular": 16,
                   "inner_radial": 24, "inner_angular": 32,
                   "pairs_radial": 16, "pairs_angular": 32,
                   "lemma5_radial": 16, "lemma5_angular": 32},
    "lemmas": {"radii": 4, "angles": 2, "lemma5_count": 2,
               "weight1_c": [0.0]},
}


def test_classify_happy_path(capsys):
    code, out, _ = run_cli(capsys, "classify", "--weight", "standard:eta=1")
    assert code == 0
    payload = json.loads(out)
    assert payload["weight"] == "standard:eta=1"
    assert payload["regular"]["holds"] is True
    assert payload["dhat"]["holds"] is True


def test_kernel_values(capsys):
    code, out, _ = run_cli(capsys, "kernel", "--weight", "standard:eta=0",
                           "--z", "0.1", "--zeta", "0.2,0.1")
    assert code == 0
    payload = json.loads(out)
    assert payload["norm_sq"] == pytest.approx((1.0 - 0.01) ** -2, rel=1e-9)
    val = complex(*payload["value"])
    assert val == pytest.approx((1.0 - 0.1 * (0.2 + 0.1j)) ** -2, rel=1e-9)


def test_kernel_rejects_boundary_point(capsys):
    code, _, err = run_cli(capsys, "kernel", "--weight", "standard:eta=0",
                           "--z", "1.0")
    assert code == 2
    assert "error:" in err


def test_schatten_closed_form(capsys):
    code, out, _ = run_cli(capsys, "schatten", "--weight", "standard:eta=0",
                           "--symbol", "zbar", "--p", "2", "--N", "64")
    assert code == 0
    payload = json.loads(out)
    # sum of squared singular values telescopes to 1 - 1/(N+1)
    assert payload["power_sum"] == pytest.approx(1.0 - 1.0 / 65.0, rel=1e-10)
    assert payload["norm"] == pytest.approx(math.sqrt(1.0 - 1.0 / 65.0), rel=1e-10)
    assert payload["divergent"] is False


def test_mo_point_closed_form(capsys):
    r = repr(math.atanh(0.5))
    code, out, _ = run_cli(capsys, "mo", "--weight", "standard:eta=0",
                           "--symbol", "zbar", "--variant", "local",
                           "--r", r, "--z", "0.5")
    assert code == 0
    payload = json.loads(out)
    # D(0.5, arctanh 0.5) has euclidean radius 0.4
    assert payload["mo"] == pytest.approx(0.4 / math.sqrt(2.0), rel=1e-8)


def test_mo_profile_artifacts(tmp_path, capsys):
    outdir = tmp_path / "mo"
    code, out, _ = run_cli(capsys, "mo", "--weight", "standard:eta=0",
                           "--symbol", "zbar", "--variant", "local",
                           "--r-max", "0.5", "--p", "1,2",
                           "--output-dir", str(outdir), "--no-figures")
    assert code == 0
    payload = json.loads(out)
    assert payload["count"] > 0
    assert set(payload["p_norms"]) == {"1.0", "2.0"}
    assert (outdir / "profile.csv").exists()
    sidecar = json.loads((outdir / "profile.json").read_text())
    assert sidecar["symbol"] == "zbar"


def test_lattice_validation_output(tmp_path, capsys):
    outdir = tmp_path / "lat"
    code, out, _ = run_cli(capsys, "lattice", "--r", "0.5", "--r-max", "0.9",
                           "--probes", "1500",
                           "--output-dir", str(outdir), "--no-figures")
    assert code == 0
    payload = json.loads(out)
    assert payload["count"] == len((outdir / "lattice.csv").read_text()
                                   .strip().splitlines()) - 1
    assert payload["validation"]["separated"] is True
    assert payload["validation"]["covering"] is True


def test_equivalence_missing_config(capsys):
    code, _, err = run_cli(capsys, "equivalence", "--config", "no-such.json")
    assert code == 2
    assert "cannot read config" in err


def test_bad_weight_spec_exits_2(capsys):
    code, _, err = run_cli(capsys, "classify", "--weight", "mystery:x=1")
    assert code == 2
    assert "error:" in err


def test_bad_point_exits_2(capsys):
    code, _, err = run_cli(capsys, "kernel", "--weight", "standard:eta=0",
                           "--z", "nope")
    assert code == 2
    assert "must be RE or RE,IM" in err


def test_equivalence_small_run(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(SMALL_CONFIG))
    outdir = tmp_path / "eq"
    code, out, _ = run_cli(capsys, "equivalence", "--config", str(cfg),
                           "--output-dir", str(outdir), "--no-figures")
    assert code == 0
    payload = last_json(out)
    assert payload["partial"] is False
    assert payload["verdicts_agree"] is True
    assert payload["rows"] == 1
    report = json.loads((outdir / "report.json").read_text())
    assert len(report["rows"]) == 1
    assert (outdir / "report.csv").exists()


def test_lemmas_small_run(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(SMALL_CONFIG))
    code, out, _ = run_cli(capsys, "lemmas", "--config", str(cfg))
    assert code == 0
    payload = last_json(out)
    assert payload["tightness_ratio"] == pytest.approx(1.0, abs=1e-6)
    assert payload["max_ratios"]["lemma3"] <= 1.0 + 1e-4


def test_lattice_cap_exits_3(tmp_path, capsys):
    # a 0.05-separated lattice out to 0.995 needs more points than the cap
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(SMALL_CONFIG))
    code, out, _ = run_cli(capsys, "equivalence", "--config", str(cfg),
                           "--lattice-r", "0.05")
    assert code == 3
    payload = json.loads(out)
    assert payload["error"] == "ResourceLimitError"
    assert "cap" in payload["message"]

import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from weighted_hardy.cli import RunSpec, main
from weighted_hardy.partitions import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def cfg(name):
    return str(CONFIGS / f"{name}.json")


def write_cfg(tmp_path, doc, name="c"):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(doc) if isinstance(doc, dict) else doc)
    return str(path)


def test_bounds_geometric_b4(capsys):
    code, out, _ = run(capsys, "bounds", "--config", cfg("geometric_b4_sharp"), "--output", "json")
    assert code == 0
    consts = json.loads(out)["constants"]
    assert consts["sharp_constant"] == pytest.approx(math.sqrt(3), rel=1e-15)
    assert consts["sharp_constant_squared"] == pytest.approx(3.0, rel=1e-15)
    assert consts["rho_prime_bound"] == pytest.approx(3.0, rel=1e-15)
    assert consts["generalized_rho"]["converged"]
    assert set(consts["generalized_rho"]) == {"constant", "truncation_level", "tail_bound", "converged"}


def test_bounds_table(capsys):
    code, out, _ = run(capsys, "bounds", "--config", cfg("geometric_b4_derived"))
    assert code == 0
    assert "rho" in out and "generalized_rho" in out and "lacunary_bound" in out


def test_bounds_harmonic_diverges(capsys):
    code, _, err = run(capsys, "bounds", "--config", cfg("harmonic"))
    assert code == 3
    assert "constant diverges" in err


def test_bounds_p1_is_invalid(capsys, tmp_path):
    path = write_cfg(tmp_path, {"partition": {"kind": "singleton"}, "p": 1})
    code, _, err = run(capsys, "bounds", "--config", path)
    assert code == 2 and "p" in err


def test_malformed_json_names_problem(capsys, tmp_path):
    code, _, err = run(capsys, "bounds", "--config", write_cfg(tmp_path, "{oops"))
    assert code == 2 and "malformed" in err
    bad = {"partition": {"kind": "geometric", "base": 4, "bogus": 1}, "p": 2}
    code, _, err = run(capsys, "bounds", "--config", write_cfg(tmp_path, bad))
    assert code == 2 and "bogus" in err


def test_missing_config_file(capsys, tmp_path):
    code, _, _ = run(capsys, "bounds", "--config", str(tmp_path / "nope.json"))
    assert code == 2


def test_verify_geometric_b4(capsys):
    code, out, _ = run(capsys, "verify", "--config", cfg("geometric_b4_sharp"), "--blocks", "5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1000
    assert all(r["holds"] == "true" and r["config-id"] == "geometric_b4_sharp" for r in rows)


def test_verify_lacunary_bound(capsys):
    code, out, _ = run(
        capsys, "verify", "--config", cfg("lacunary_doubling"), "--constant", "lacunary", "--samples", "200"
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["constant"]) == pytest.approx(2 + math.sqrt(2), rel=1e-15)  # lacunary_bound(2, 2)


def test_verify_violation_exit_code(capsys, monkeypatch):
    # an undersized constant must surface as exit code 1
    monkeypatch.setattr("weighted_hardy.cli.geometric_sharp_constant", lambda b: 1e-3)
    code, out, err = run(capsys, "verify", "--config", cfg("geometric_b4_sharp"), "--constant", "sharp", "--samples", "5")
    assert code == 1
    assert "violate" in err
    assert "false" in out


def test_verify_samples_zero(capsys):
    code, _, err = run(capsys, "verify", "--config", cfg("geometric_b4_sharp"), "--samples", "0")
    assert code == 2 and "samples" in err


def test_verify_divergent(capsys):
    code, _, err = run(capsys, "verify", "--config", cfg("harmonic"))
    assert code == 3 and "diverges" in err


def test_verify_is_deterministic(capsys):
    argv = ("verify", "--config", cfg("explicit_weights_b3"), "--samples", "50", "--seed", "7")
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second and first[0] == 0
    third = run(capsys, "verify", "--config", cfg("explicit_weights_b3"), "--samples", "50", "--seed", "8")
    assert third[1] != first[1]


def test_verify_json_and_table(capsys):
    code, out, _ = run(capsys, "verify", "--config", cfg("geometric_b4_sharp"), "--samples", "10", "--output", "json")
    assert code == 0 and len(json.loads(out)["reports"]) == 10
    code, out, _ = run(capsys, "verify", "--config", cfg("geometric_b4_sharp"), "--samples", "10", "--output", "table")
    assert code == 0 and "violations" in out


def test_norm_b4(capsys):
    code, out, _ = run(capsys, "norm", "--config", cfg("geometric_b4_sharp"), "--blocks", "8", "--output", "csv")
    assert code == 0
    norms = [float(r["norm"]) for r in csv.DictReader(io.StringIO(out))]
    assert len(norms) == 8
    assert all(b > a for a, b in zip(norms, norms[1:]))
    assert max(norms) < math.sqrt(3)


def test_norm_rejects_p3(capsys):
    code, _, err = run(capsys, "norm", "--config", cfg("explicit_weights_b3"))
    assert code == 2 and "p = 2" in err


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "--base", "4", "--grid", "2.5,2.1,2.01,2.001")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    ratios = [float(r["ratio"]) for r in rows]
    assert all(b > a for a, b in zip(ratios, ratios[1:])) and max(ratios) < math.sqrt(3)


def test_sweep_skips_invalid_point(capsys):
    with pytest.warns(UserWarning):
        code, out, err = run(capsys, "sweep", "--base", "4", "--grid", "2.0", "--output", "json")
    assert code == 0
    assert json.loads(out)["rows"] == [] and "skipped" in err


def test_sweep_bad_grid(capsys):
    code, _, _ = run(capsys, "sweep", "--base", "4", "--grid", "2.5,x")
    assert code == 2
    code, _, _ = run(capsys, "sweep", "--base", "4", "--grid", "2.1,2.5")
    assert code == 2


def test_extremal(capsys):
    code, out, _ = run(capsys, "extremal", "--base", "4", "--r", "3", "--output", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["l2_norm_sq"] == pytest.approx(32 / 45, rel=1e-12)
    assert doc["lhs_sum"] == pytest.approx(doc["lhs_sum_direct"], rel=1e-9)
    code, _, _ = run(capsys, "extremal", "--base", "4", "--r", "2")
    assert code == 2


def test_unknown_subcommand(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 2 and "usage" in err


def test_runspec_validation():
    with pytest.raises(ConfigError):
        RunSpec("verify", samples=0)
    with pytest.raises(ConfigError):
        RunSpec("bounds", tolerance=0.0)
    with pytest.raises(ConfigError):
        RunSpec("norm", blocks=0)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "weighted_hardy", "sweep", "--base", "4", "--grid", "2.5"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("r,ratio,sharp_constant,gap")

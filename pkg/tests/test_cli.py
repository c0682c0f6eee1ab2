"""Command-line interface: exit codes, config precedence, determinism.

Every emitted file must begin with '#' header lines and contain
nothing run-dependent, so repeating a command must reproduce the
bytes exactly.
"""

import json
import subprocess
import sys

import pytest

from warpcmc.cli import main


def run(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_models_lists_families(capsys):
    code, out, _ = run(["models"], capsys)
    assert code == 0
    for family in ("euclidean", "schwarzschild", "reissner-nordstrom", "omega-table"):
        assert family in out


def test_check_passes_on_flat(tmp_path, capsys):
    code, out, _ = run(
        ["check", "--model", "euclidean", "--n", "3", "--out", str(tmp_path)], capsys
    )
    assert code == 0
    assert "umbilic-only" in out
    text = (tmp_path / "conditions_euclidean.csv").read_text()
    assert text.startswith("# warpcmc ")
    assert "# model: family=euclidean" in text
    assert (tmp_path / "margins_euclidean.csv").exists()
    assert (tmp_path / "extrema_euclidean.csv").exists()


def test_check_strict_gap_on_schwarzschild(tmp_path, capsys):
    code, out, _ = run(
        ["check", "--model", "schwarzschild", "--m", "1", "--out", str(tmp_path)],
        capsys,
    )
    assert code == 0
    assert "slice-rigidity" in out


def test_inadmissible_parameters_exit_2(tmp_path, capsys):
    code, _, err = run(
        ["check", "--model", "reissner-nordstrom", "--m", "1", "--q", "0.6",
         "--out", str(tmp_path)],
        capsys,
    )
    assert code == 2
    assert "m > 2q > 0" in err


def test_failed_condition_exits_3(tmp_path, capsys):
    code, _, _ = run(
        ["check", "--model", "sphere", "--curvature", "1.0", "--r-bar", "2.5",
         "--out", str(tmp_path)],
        capsys,
    )
    assert code == 3


def test_variant_mismatch_exits_2(tmp_path, capsys):
    code, _, err = run(
        ["check", "--model", "euclidean", "--variant", "boundary",
         "--out", str(tmp_path)],
        capsys,
    )
    assert code == 2
    assert "ball" in err


def test_verify_slice_identities(tmp_path, capsys):
    code, out, _ = run(
        ["verify", "--model", "schwarzschild", "--m", "1", "--s", "2",
         "--grid-size", "48", "--out", str(tmp_path)],
        capsys,
    )
    assert code == 0
    assert out.count("equality") == 3
    lines = (tmp_path / "identities_schwarzschild.csv").read_text().splitlines()
    data = [l for l in lines if not l.startswith("#")]
    assert len(data) == 3


def test_verify_hypothesis_violation_exits_2(tmp_path, capsys):
    code, _, err = run(
        ["verify", "--model", "euclidean", "--radius", "1.0",
         "--modes", "5,0,0.25", "--grid-size", "64", "--out", str(tmp_path)],
        capsys,
    )
    assert code == 2
    assert "mean curvature" in err


def test_flow_audit_and_determinism(tmp_path, capsys):
    args = [
        "flow", "--model", "schwarzschild", "--m", "1", "--s", "2",
        "--modes", "2,0,0.05", "--t-end", "0.3", "--grid-size", "32",
    ]
    code, out, _ = run(args + ["--out", str(tmp_path / "a")], capsys)
    assert code == 0
    assert "VIOLATED" not in out
    code, _, _ = run(args + ["--out", str(tmp_path / "b")], capsys)
    assert code == 0
    for stem in ("flow_trace_schwarzschild.csv", "flow_audit_schwarzschild.csv"):
        a = (tmp_path / "a" / stem).read_bytes()
        b = (tmp_path / "b" / stem).read_bytes()
        assert a == b
    audit = (tmp_path / "a" / "flow_audit_schwarzschild.csv").read_text()
    for check in ("q_decreasing", "swept_dominated", "riccati_bound",
                  "area_decreasing", "area_floor", "weighted_minkowski", "q_floor"):
        assert check in audit


def test_cmc_corpus(tmp_path, capsys):
    code, out, _ = run(
        ["cmc", "--model", "schwarzschild", "--m", "1", "--s", "2",
         "--grid-size", "48", "--corpus-count", "3", "--corpus-seed", "11",
         "--corpus-amplitude", "0.05", "--out", str(tmp_path)],
        capsys,
    )
    assert code == 0
    lines = (tmp_path / "cmc_results_schwarzschild.csv").read_text().splitlines()
    data = [l for l in lines if not l.startswith("#")]
    assert len(data) == 3
    assert all("slice-rigidity-confirmed" in l for l in data)
    assert "alarm" not in out


def test_cmc_corpus_amplitude_guard(tmp_path, capsys):
    code, _, err = run(
        ["cmc", "--model", "euclidean", "--radius", "1.0", "--corpus-count", "2",
         "--corpus-amplitude", "0.5", "--out", str(tmp_path)],
        capsys,
    )
    assert code == 2
    assert "amplitude" in err


def test_config_file_and_flag_precedence(tmp_path, capsys, monkeypatch):
    cfg = {
        "model": {"family": "sphere", "n": 3, "curvature": 1.0},
        "surface": {"radius": 0.7},
        "grid": {"size": 32},
        "output": {"dir": str(tmp_path / "from_config")},
    }
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(cfg))

    code, _, _ = run(["verify", "--config", str(cfg_path)], capsys)
    assert code == 0
    assert (tmp_path / "from_config" / "identities_sphere.csv").exists()

    monkeypatch.setenv("WARPCMC_OUTDIR", str(tmp_path / "from_env"))
    code, _, _ = run(["verify", "--config", str(cfg_path)], capsys)
    assert code == 0
    assert (tmp_path / "from_env" / "identities_sphere.csv").exists()

    code, _, _ = run(
        ["verify", "--config", str(cfg_path), "--model", "euclidean",
         "--out", str(tmp_path / "from_flag")],
        capsys,
    )
    assert code == 0
    assert (tmp_path / "from_flag" / "identities_euclidean.csv").exists()


def test_json_lines_format(tmp_path, capsys):
    code, _, _ = run(
        ["verify", "--model", "euclidean", "--radius", "0.8", "--grid-size", "32",
         "--format", "json-lines", "--out", str(tmp_path)],
        capsys,
    )
    assert code == 0
    lines = (tmp_path / "identities_euclidean.jsonl").read_text().splitlines()
    head = json.loads(lines[0])
    assert "warpcmc" in head and "model" in head
    rows = [json.loads(l) for l in lines[1:]]
    assert {r["identity"] for r in rows} == {"minkowski", "hk"}
    assert all(r["verdict"] == "equality" for r in rows)


def test_area_radius_spec_needs_horizon_family(tmp_path, capsys):
    code, _, err = run(
        ["verify", "--model", "euclidean", "--s", "2.0", "--out", str(tmp_path)],
        capsys,
    )
    assert code == 2
    assert "horizon" in err


def test_bad_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    code, _, _ = run(["check", "--config", str(bad)], capsys)
    assert code == 2


def test_module_entry_smoke(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "warpcmc.cli", "models"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "schwarzschild" in proc.stdout

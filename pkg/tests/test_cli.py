import hashlib
import json
import os

import numpy as np
import pytest

from nfthin.cli import build_parser, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_grating_prints_expected_angles(capsys):
    code, out, _ = run_cli(capsys, "grating", "--d-over-lambda", "2",
                           "--focus-deg", "0")
    assert code == 0
    assert out.strip() == "-30.000, 30.000"


def test_grating_none_for_dense_spacing(capsys):
    code, out, _ = run_cli(capsys, "grating", "--d-over-lambda", "0.5")
    assert code == 0
    assert out.strip() == "none"


def test_unknown_command_is_config_error(capsys):
    code, _, err = run_cli(capsys, "no-such-command")
    assert code == 1
    assert "config error" in err


def test_malformed_config_file_diagnostic(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"pso": {"n_particles": "soon"}}')
    code, _, err = run_cli(capsys, "fig2", "--config", str(bad),
                           "--outdir", str(tmp_path))
    assert code == 1
    assert "pso.n_particles" in err


def test_unknown_config_key_rejected(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"pso": {"particles": 3}}')
    code, _, err = run_cli(capsys, "fig2", "--config", str(bad),
                           "--outdir", str(tmp_path))
    assert code == 1
    assert "unknown key" in err


def test_override_flag_rejects_unknown_section(tmp_path, capsys):
    code, _, err = run_cli(capsys, "fig2", "--set", "nope.thing=1",
                           "--outdir", str(tmp_path))
    assert code == 1
    assert "unknown section" in err


def test_help_lists_tunables():
    parser = build_parser()
    text = parser.format_help()
    for key in ("pso.n_particles", "gta.tau_psll_db", "beam.exclusion_factor",
                "mula.min_spacing_wavelengths", "pta.ensemble_size",
                "benchmark.per_user_power"):
        assert key in text


def test_fig3_checksum_stable_across_runs(tmp_path, capsys):
    args = ["fig3", "--trials", "3", "--seed", "7",
            "--set", "pso.n_particles=6", "--set", "pso.n_iterations=6",
            "--set", "pta.ensemble_size=2",
            "--set", "benchmark.schemes=FULA,STA,SULA"]
    code1, _, _ = run_cli(capsys, *args, "--outdir", str(tmp_path / "a"))
    code2, _, _ = run_cli(capsys, *args, "--outdir", str(tmp_path / "b"))
    assert code1 == 0 and code2 == 0
    h = [hashlib.md5((tmp_path / d / "fig3_data.csv").read_bytes()).hexdigest()
         for d in ("a", "b")]
    assert h[0] == h[1]


def test_seed_env_fallback(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("NF_THIN_SEED", "123")
    args = ["fig2", "--trials", "2", "--set", "benchmark.k_users=2"]
    run_cli(capsys, *args, "--outdir", str(tmp_path / "env"))
    monkeypatch.delenv("NF_THIN_SEED")
    run_cli(capsys, *args, "--seed", "123", "--outdir", str(tmp_path / "flag"))
    assert ((tmp_path / "env" / "fig2_data.csv").read_bytes()
            == (tmp_path / "flag" / "fig2_data.csv").read_bytes())


def test_pattern_command_artifacts(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "pattern", "--domain", "angle", "--n", "64",
                           "--spacing-wl", "2", "--outdir", str(tmp_path),
                           "--set", "beam.angle_points=1025")
    assert code == 0
    assert (tmp_path / "pattern_data.csv").exists()
    assert (tmp_path / "pattern.svg").exists()
    meta = json.loads((tmp_path / "pattern_meta.json").read_text())
    assert meta["config"]["n"] == 64


def test_thin_sta_json_output(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "thin-sta", "--outdir", str(tmp_path),
                           "--set", "pso.n_particles=6",
                           "--set", "pso.n_iterations=6",
                           "--set", "benchmark.k_users=4")
    assert code == 0
    payload = json.loads((tmp_path / "sta_result.json").read_text())
    assert payload["mask"].count("1") == 32
    assert payload["mask"][0] == "1" and payload["mask"][-1] == "1"
    assert payload["kind"] == "sta"
    hist = payload["cost_history"]
    assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))


def test_mula_scenario_csv_input(tmp_path, capsys):
    from nfthin.channel import sample_scenario, scenario_to_csv
    sc = sample_scenario(3, (5.0, 50.0), (-0.5, 0.5), seed=4)
    path = tmp_path / "users.csv"
    scenario_to_csv(sc, path)
    code, out, _ = run_cli(capsys, "mula", "--scenario", str(path),
                           "--outdir", str(tmp_path),
                           "--set", "pso.n_particles=6",
                           "--set", "pso.n_iterations=6")
    assert code == 0
    payload = json.loads((tmp_path / "mula_result.json").read_text())
    assert len(payload["positions_m"]) == 32
    pos = np.array(payload["positions_m"])
    assert np.all(np.diff(pos) > 0)

import json

import numpy as np
import pytest

from parityqed import cli


def run_cli(args):
    return cli.main(args)


def test_algebra_check_default(tmp_path, capsys):
    code = run_cli(["algebra-check", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "ok" in out and "FAIL" not in out
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["schema_version"] == 1
    assert manifest["notes"]["all_passed"] is True


def test_algebra_check_rejects_invalid_deformation(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("lambdas = [-0.7]\n")
    code = run_cli(["algebra-check", "--config", str(cfg), "--out", str(tmp_path / "o")])
    err = capsys.readouterr().err
    assert code == 2
    assert "-1/2" in err


def test_algebra_check_impossible_tolerance(tmp_path, capsys):
    cfg = tmp_path / "tight.cfg"
    cfg.write_text("tol = 1e-20\n")
    code = run_cli(["algebra-check", "--config", str(cfg), "--out", str(tmp_path / "o")])
    out = capsys.readouterr().out
    assert code != 0
    assert "FAIL" in out


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("coupling = 2.0\n")
    code = run_cli(["ladder", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "unknown config key" in capsys.readouterr().err


def test_unknown_preset(tmp_path, capsys):
    code = run_cli(["ladder", "--preset", "fig9", "--out", str(tmp_path)])
    assert code == 2
    assert "unknown preset" in capsys.readouterr().err


def test_ladder_fig1_rows(tmp_path):
    code = run_cli(["ladder", "--preset", "fig1", "--out", str(tmp_path), "--format", "csv"])
    assert code == 0
    lines = (tmp_path / "doublets_vs_lambda.csv").read_text().splitlines()
    assert len(lines) == 1 + 301 * 19
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"]["rungs"] == 19
    assert manifest["outputs"] == ["doublets_vs_lambda.csv"]


def test_ladder_fig2_zero_gap_at_critical(tmp_path):
    cfg = tmp_path / "fig2.cfg"
    cfg.write_text(
        "scan = detuning\nrungs = 3\nlambdas = [-0.5]\ndelta_grid = [-1.0, 1.0, 5]\n"
    )
    code = run_cli(["ladder", "--config", str(cfg), "--out", str(tmp_path), "--format", "csv"])
    assert code == 0
    rows = (tmp_path / "doublets_vs_detuning_lam-0.5000.csv").read_text().splitlines()[1:]
    resonant_n1 = [r for r in rows if r.startswith("0.0,1,")]
    assert len(resonant_n1) == 1
    _, _, _, low, high = resonant_n1[0].split(",")
    assert float(low) == 0.0 and float(high) == 0.0


def test_ladder_empty_grid(tmp_path, capsys):
    cfg = tmp_path / "empty.cfg"
    cfg.write_text("lambda_grid = [0.0, 1.0, 0]\n")
    code = run_cli(["ladder", "--config", str(cfg), "--out", str(tmp_path)])
    assert code == 2
    assert "grid" in capsys.readouterr().err


def test_spectrum_preset_files(tmp_path):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("omega_grid = [-2.5, 2.5, 301]\nn_max = 8\n")
    out = tmp_path / "fig3a"
    code = run_cli(
        ["spectrum", "--preset", "fig3a", "--config", str(cfg), "--out", str(out)]
    )
    assert code == 0
    csvs = sorted(p.name for p in out.glob("*.csv"))
    assert csvs == [
        "spectrum_lam+0.0000_delta+0.0000.csv",
        "spectrum_lam+0.5000_delta+0.0000.csv",
        "spectrum_lam-0.4999_delta+0.0000.csv",
    ]
    assert len(list(out.glob("spectrum_*.json"))) == 3  # one payload per pair
    assert len(list(out.glob("spectrum_*.svg"))) == 3
    manifest = json.loads((out / "manifest.json").read_text())
    note = manifest["notes"]["spectrum_lam+0.0000_delta+0.0000"]
    assert note["method"] == "eigen"
    assert note["n_max"] >= 8


def test_spectrum_requires_pairs(tmp_path, capsys):
    code = run_cli(["spectrum", "--out", str(tmp_path)])
    assert code == 2
    assert "spectra" in capsys.readouterr().err


def test_g2_single_point_and_nan_row(tmp_path, capsys):
    cfg = tmp_path / "one.cfg"
    cfg.write_text("pump_grid = [0.05, 0.05, 1]\nlambdas = [0.0]\n")
    out = tmp_path / "single"
    code = run_cli(["g2", "--config", str(cfg), "--out", str(out), "--format", "csv,svg"])
    assert code == 0
    lines = (out / "g2_vs_pump.csv").read_text().splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("0.0,0.05,")
    assert (out / "g2_vs_pump.svg").exists()

    # pump = 0 cannot be placed on a log grid; pass it as an explicit row
    import warnings

    from parityqed import scans

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = scans.g2_vs_pump(np.array([0.0]), lambdas=(0.0,))
    assert np.isnan(result.rows[0][2])


def test_creates_missing_output_directory(tmp_path):
    nested = tmp_path / "a" / "b" / "c"
    code = run_cli(
        ["ladder", "--preset", "fig1", "--out", str(nested), "--format", "csv"]
    )
    assert code == 0
    assert (nested / "doublets_vs_lambda.csv").exists()


def test_rerun_is_byte_identical(tmp_path):
    cfg = tmp_path / "mini.cfg"
    cfg.write_text("lambda_grid = [-0.5, 1.0, 11]\nrungs = 5\n")
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for out in (out1, out2):
        assert run_cli(["ladder", "--config", str(cfg), "--out", str(out), "--format", "csv"]) == 0
    a = (out1 / "doublets_vs_lambda.csv").read_bytes()
    b = (out2 / "doublets_vs_lambda.csv").read_bytes()
    assert a == b


def test_replay_from_manifest(tmp_path):
    cfg = tmp_path / "mini.cfg"
    cfg.write_text("lambda_grid = [-0.5, 1.0, 7]\nrungs = 3\n")
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert run_cli(["ladder", "--config", str(cfg), "--out", str(out1), "--format", "csv"]) == 0
    manifest = out1 / "manifest.json"
    assert run_cli(["ladder", "--config", str(manifest), "--out", str(out2), "--format", "csv"]) == 0
    assert (out1 / "doublets_vs_lambda.csv").read_bytes() == (
        out2 / "doublets_vs_lambda.csv"
    ).read_bytes()


def test_bad_format_rejected(tmp_path, capsys):
    code = run_cli(["ladder", "--preset", "fig1", "--out", str(tmp_path), "--format", "png"])
    assert code == 2
    assert "format" in capsys.readouterr().err


def test_bad_scan_kind_rejected(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text('scan = "sideways"\n')
    code = run_cli(["ladder", "--config", str(cfg), "--out", str(tmp_path)])
    assert code == 2
    assert "scan" in capsys.readouterr().err


def test_ladder_svg_output(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("lambda_grid = [-0.5, 1.0, 9]\nrungs = 3\n")
    code = run_cli(["ladder", "--config", str(cfg), "--out", str(tmp_path), "--format", "csv,svg"])
    assert code == 0
    svg = (tmp_path / "doublets_vs_lambda.svg").read_text()
    assert svg.lstrip().startswith("<?xml")


def test_config_flag_overrides(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n_max = 10\n")
    out = tmp_path / "o"
    code = run_cli(
        ["algebra-check", "--config", str(cfg), "--cutoff", "12", "--out", str(out)]
    )
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["n_max"] == 12

"""End-to-end tests of the command-line interface."""

import csv
import io
import json
import math

import numpy as np
import pytest

from hnsense import SingularError, cli, model, optimize

HEADER = ",".join(cli.CSV_COLUMNS)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def test_report_default_json(capsys):
    code, out, _ = run_cli(capsys, "report")
    assert code == 0
    row = json.loads(out)
    np.testing.assert_allclose(row["signal"], 2.048e-23, rtol=1e-12)
    assert row["noise"] == 0.5
    np.testing.assert_allclose(row["n_tot"], 8.0e6, rtol=1e-12)
    np.testing.assert_allclose(row["snr_per_photon_dominant"], 1.024e-29, rtol=1e-12)
    assert row["regime"] == "linear"
    assert row["error"] == ""


def test_report_csv_header(capsys):
    code, out, _ = run_cli(capsys, "report", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 2


def test_report_resolves_last_site(capsys):
    code, out, _ = run_cli(capsys, "report", "--N", "5", "--m", "last")
    assert code == 0
    assert json.loads(out)["m"] == 5


def test_report_writes_file(capsys, tmp_path):
    target = tmp_path / "row.json"
    code, out, _ = run_cli(capsys, "report", "--out", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["noise"] == 0.5


def test_report_even_N_fails_validation(capsys):
    code, _, err = run_cli(capsys, "report", "--N", "4")
    assert code == 2
    assert "invalid configuration" in err
    assert "odd" in err


def test_report_overflow_guard(capsys):
    code, _, err = run_cli(capsys, "report", "--N", "203", "--delta", "0.99")
    assert code == 2
    assert "invalid configuration" in err


def test_report_rejects_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"N": 3, "detuning": 0.1}))
    code, _, err = run_cli(capsys, "report", "--config", str(cfg))
    assert code == 2
    assert "invalid configuration" in err


def test_report_flag_overrides_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"beta": 10.0, "phi": 0.0}))
    code, out, _ = run_cli(capsys, "report", "--config", str(cfg), "--beta", "20")
    assert code == 0
    row = json.loads(out)
    assert row["beta"] == 20.0
    assert row["phi"] == 0.0


def test_report_unwritable_out_path(capsys, tmp_path):
    target = tmp_path / "no-such-dir" / "row.json"
    code, _, err = run_cli(capsys, "report", "--out", str(target))
    assert code == 4
    assert "i/o failure" in err


def test_numerical_failures_map_to_exit_3(capsys, monkeypatch):
    def boom(cfg):
        raise SingularError("synthetic")

    monkeypatch.setattr(cli.optimize, "evaluate_config", boom)
    code, _, err = run_cli(capsys, "report")
    assert code == 3
    assert "numerical failure" in err


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def test_single_point_sweep_matches_report(capsys):
    code, rep_out, _ = run_cli(capsys, "report", "--format", "csv")
    assert code == 0
    code, sw_out, _ = run_cli(capsys, "sweep", "--axis", "epsilon=1e-8")
    assert code == 0
    assert sw_out == rep_out


def test_sweep_log_axis(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--axis", "epsilon=log:1e-9:1e-7:3")
    assert code == 0
    rows = read_csv(out)
    eps = [float(r["epsilon"]) for r in rows]
    np.testing.assert_allclose(eps, [1e-9, 1e-8, 1e-7], rtol=1e-12)


def test_sweep_gain_axis_rides_at_fixed_hopping(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--axis", "A=0.5,1.0")
    assert code == 0
    rows = read_csv(out)
    for row, A in zip(rows, (0.5, 1.0)):
        w, delta = float(row["w"]), float(row["delta"])
        np.testing.assert_allclose((w + delta) / (w - delta), math.exp(2 * A),
                                   rtol=1e-12)


def test_sweep_records_invalid_points(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--axis", "m=1,2,3")
    assert code == 0
    rows = read_csv(out)
    assert [r["error"] for r in rows] == ["", "DomainError", ""]
    assert rows[1]["signal"] == ""


def test_sweep_needs_axis_or_preset(capsys):
    code, _, err = run_cli(capsys, "sweep")
    assert code == 2
    assert "invalid configuration" in err


def test_sweep_unknown_axis(capsys):
    code, _, err = run_cli(capsys, "sweep", "--axis", "gamma=1,2")
    assert code == 2
    assert "gamma" in err


def test_sweep_unknown_preset(capsys):
    code, _, err = run_cli(capsys, "sweep", "--preset", "figure9")
    assert code == 2


@pytest.mark.parametrize("preset", ["fig2b", "figure4b"])
def test_sweep_presets_are_byte_deterministic(tmp_path, preset):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["sweep", "--preset", preset, "--out", str(out1)]) == 0
    assert cli.main(["sweep", "--preset", preset, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_sweep_figure4b_shape(tmp_path):
    out = tmp_path / "f4b.csv"
    assert cli.main(["sweep", "--preset", "figure4b", "--out", str(out)]) == 0
    rows = read_csv(out.read_text())
    assert len(rows) == 61
    assert all(r["error"] == "" for r in rows)
    eta = [(float(r["w"]) + float(r["delta"])) / (float(r["w"]) - float(r["delta"]))
           for r in rows]
    np.testing.assert_allclose(eta[0], 1.0, rtol=1e-12)
    np.testing.assert_allclose(eta[-1], 1.0e3, rtol=1e-9)


def test_csv_rows_round_trip_through_config(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--axis", "A=0.7",
                           "--pert", "localn", "--regime", "beyond",
                           "--epsilon", "1e-3", "--phi", "1.2")
    assert code == 0
    row = read_csv(out)[0]
    mapping = {k: row[k] for k in model.CONFIG_FIELDS + ("regime",)}
    for key, value in mapping.items():
        if key in ("pert", "regime"):
            continue
        mapping[key] = int(value) if key in ("N", "m") else float(value)
    rc = cli.RunConfig.from_mapping(mapping)
    rep = optimize.evaluate_config(rc.flat())
    for field in optimize.METRIC_FIELDS:
        np.testing.assert_allclose(getattr(rep, field), float(row[field]),
                                   rtol=1e-12)


def test_sweep_json_format(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--axis", "epsilon=1e-8,1e-7",
                           "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert isinstance(rows, list) and len(rows) == 2
    assert rows[0]["error"] == ""


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------

def test_scaling_case_fit(capsys):
    code, out, _ = run_cli(capsys, "scaling", "--case", "fig2b")
    assert code == 0
    summary = json.loads(out)
    assert summary["case"] == "fig2b"
    assert summary["target_slope"] == 3.0
    np.testing.assert_allclose(summary["slope"], 3.0, rtol=1e-2)
    assert abs(summary["relative_deviation"]) < 0.01
    assert summary["r_squared"] > 0.999


def test_scaling_flat_case(capsys):
    code, out, _ = run_cli(capsys, "scaling", "--case", "fig3b")
    assert code == 0
    summary = json.loads(out)
    assert summary["target_slope"] == 0.0
    assert abs(summary["relative_deviation"]) < 0.05


def test_scaling_unknown_case(capsys):
    code, _, err = run_cli(capsys, "scaling", "--case", "fig9z")
    assert code == 2


def test_scaling_rejects_bad_N_list(capsys):
    code, _, _ = run_cli(capsys, "scaling", "--case", "fig2b", "--N-list", "3,4,5")
    assert code == 2
    code, _, _ = run_cli(capsys, "scaling", "--case", "fig2b", "--N-list", "3,5")
    assert code == 2


def test_scaling_respects_gain_flag(capsys):
    code, out, _ = run_cli(capsys, "scaling", "--case", "fig3a", "--A", "1.0")
    assert code == 0
    summary = json.loads(out)
    assert summary["A"] == 1.0
    assert summary["target_slope"] == 2.0
    np.testing.assert_allclose(summary["slope"], 2.0, rtol=1e-2)

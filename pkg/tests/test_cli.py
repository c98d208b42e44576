"""Command-line interface unit tests (config handling, exit codes,
report determinism).  The full default-config battery runs once."""

import copy
import json

import pytest

from gdnlslab import cli


def _fast_config(tmp_path, **overrides):
    cfg = copy.deepcopy(cli.DEFAULT_CONFIG)
    cfg["output_dir"] = str(tmp_path / "out")
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return cfg, str(path)


def test_print_default_config_round_trips(capsys):
    assert cli.main(["print-default-config"]) == 0
    parsed = json.loads(capsys.readouterr().out)
    assert parsed == cli.DEFAULT_CONFIG


def test_validate_config_rejects_sigma_out_of_range():
    cfg = copy.deepcopy(cli.DEFAULT_CONFIG)
    cfg["sigma"] = 2.2
    with pytest.raises(cli.ConfigError, match=r"\(1, 2\)"):
        cli.validate_config(cfg)


def test_validate_config_rejects_bad_tolerance():
    cfg = copy.deepcopy(cli.DEFAULT_CONFIG)
    cfg["quadrature"]["rel_tol"] = 0.5
    with pytest.raises(cli.ConfigError, match="rel_tol"):
        cli.validate_config(cfg)


def test_validate_config_rejects_cutoff_too_large_for_box():
    cfg = copy.deepcopy(cli.DEFAULT_CONFIG)
    cfg["cutoff"]["R"] = 150.0  # needs half-width >= 600 > 400
    with pytest.raises(cli.ConfigError, match="cutoff"):
        cli.validate_config(cfg)


def test_load_config_rejects_unknown_fields(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"sigmo": 1.5}))
    with pytest.raises(cli.ConfigError, match="sigmo"):
        cli.load_config(str(path))


def test_main_exit_code_2_on_invalid_config(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"sigma": 2.5}))
    assert cli.main(["verify", "--config", str(path)]) == 2


def test_seed_flag_overrides_config(tmp_path):
    cfg, path = _fast_config(tmp_path)
    loaded = cli.load_config(path, overrides={"seed": 999})
    assert loaded["seed"] == 999


def test_verify_default_config_passes(tmp_path):
    # the full battery at the shipped defaults: every record passes,
    # the report is written, and reruns are byte-identical
    out_dir = tmp_path / "v1"
    code = cli.main(["verify", "--out", str(out_dir)])
    assert code == 0
    report = json.loads((out_dir / "report.json").read_text())
    assert report["checks"]
    assert all(rec["passed"] for rec in report["checks"])
    assert report["environment"]["seed"] == cli.DEFAULT_CONFIG["seed"]

    out_dir2 = tmp_path / "v2"
    assert cli.main(["verify", "--out", str(out_dir2)]) == 0
    assert (out_dir / "report.json").read_text() == (
        (out_dir2 / "report.json").read_text()
    )


def test_evolve_trace_files_and_determinism(tmp_path):
    cfg = copy.deepcopy(cli.DEFAULT_CONFIG)
    cfg["grid"] = {"L": 100.0, "N": 2048}
    cfg["cutoff"]["R"] = 10.0
    cfg["integrator"] = {"dt": 1e-3, "t_end": 0.2, "sample_every": 50}
    cfg["experiment"]["betas"] = [0.0, 0.01]
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))

    out1 = tmp_path / "e1"
    assert cli.main(["evolve", "--config", str(path), "--out", str(out1)]) == 0
    trace = (out1 / "trace_0.01.csv").read_text().splitlines()
    header = trace[0].split(",")
    assert header == ["t", "E_drift", "P_drift", "M_drift", "distance", "theta", "y", "A"]
    row0 = trace[1].split(",")
    assert float(row0[0]) == 0.0
    assert float(row0[1]) == 0.0 and float(row0[2]) == 0.0 and float(row0[3]) == 0.0

    out2 = tmp_path / "e2"
    assert cli.main(["evolve", "--config", str(path), "--out", str(out2)]) == 0
    for name in ("trace_0.csv", "trace_0.01.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_negdir_report_and_table(tmp_path):
    cfg = copy.deepcopy(cli.DEFAULT_CONFIG)
    cfg["cutoff"]["sweep"] = [25.0, 50.0, 100.0]
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "n"
    assert cli.main(["negdir", "--config", str(path), "--out", str(out)]) == 0
    table = (out / "negdir.csv").read_text().splitlines()
    assert table[0] == "R,mu,nu,quad_form,err_mass_rate,err_mom_rate"
    report = json.loads((out / "report.json").read_text())
    assert report["r_star"] is not None
    assert abs(report["slope_mass"] - report["predicted_slope"]) < 0.15


def test_sweep_isolates_invalid_point(tmp_path):
    cfg = copy.deepcopy(cli.DEFAULT_CONFIG)
    cfg["sweep_sigmas"] = [1.5]
    cfg["sweep_cs"] = [1.0]
    # the per-point worker marks an invalid sigma instead of raising,
    # so one bad point cannot take down a whole sweep
    result = cli._sweep_point((cfg, 1.0, 1.0))
    assert "invalid" in result

import json

import pytest

import cli
from artifacts import read_csv

MODEL = """
    schema_version = 1

    [model]
    d = 2
    rho_b = 1.0
    R = {R}
    m = 1.0
    M = {M}
    g = 1.0
    E = {E}
    n = {n}

    [run]
    seed = 3
    out_dir = "out"
    mode = "{mode}"

    [mcmc]
    burn_in = 200
    thinning = 10
    samples = 5

    [simulation]
    duration = 5.0
    observation_interval = 0.01
    bins = 32
    start = "{start}"
"""


def _config(write_config, *, R=0.3, M=0.05, E=3.0, n=10, mode="lambertian", start="lattice", name="run.toml"):
    return write_config(MODEL.format(R=R, M=M, E=E, n=n, mode=mode, start=start), name=name)


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_solve_floating(write_config, tmp_path, capsys):
    path = _config(write_config)
    assert cli.main(["solve", "--config", str(path), "--json"]) == 0
    payload = _json(capsys)
    assert payload["floating"] == 1
    assert 0.3 < payload["y_A"] < 60.0
    line, columns, rows = read_csv(tmp_path / "out" / "equilibrium.csv")
    assert line.startswith("# gasball ")
    assert "seed=3" in line
    assert columns[:3] == ["y_A", "lambda_A", "u_A"]
    assert len(rows) == 1
    _, columns, rows = read_csv(tmp_path / "out" / "psi_profile.csv")
    assert columns == ["y", "log_psi", "density"]
    assert len(rows) > 100


def test_solve_without_ball_writes_an_empty_profile(write_config, tmp_path, capsys):
    path = _config(write_config, R=0.0, M=0.0, E=2.0)
    assert cli.main(["solve", "--config", str(path), "--json"]) == 0
    payload = _json(capsys)
    assert payload["lambda_A"] == pytest.approx(4.0 / 4.0)
    _, columns, rows = read_csv(tmp_path / "out" / "psi_profile.csv")
    assert columns == ["y", "log_psi", "density"]
    assert rows == []


def test_solve_heavy_ball_reports_the_resting_solution(write_config, tmp_path, capsys):
    path = _config(write_config, M=5.0)
    assert cli.main(["solve", "--config", str(path)]) == 4
    out = capsys.readouterr().out
    assert "resting at the bottom" in out
    _, columns, rows = read_csv(tmp_path / "out" / "equilibrium.csv")
    row = dict(zip(columns, rows[0]))
    assert row["floating"] == "0"
    assert float(row["y_A"]) == pytest.approx(0.3)


def test_invalid_model_writes_nothing(write_config, tmp_path, capsys):
    path = _config(write_config, E=0.01)
    assert cli.main(["solve", "--config", str(path), "--json"]) == 1
    assert _json(capsys)["exit_code"] == 1
    assert not (tmp_path / "out").exists()


def test_missing_config_is_a_usage_error(tmp_path, capsys):
    assert cli.main(["solve"]) == 1
    assert "--config is required" in capsys.readouterr().err
    assert cli.main(["simulate", "--config", str(tmp_path / "absent.toml")]) == 1


def test_argument_errors_exit_with_usage_status():
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["simulate", "--mode", "diffuse"])
    assert excinfo.value.code == 1
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["explode"])
    assert excinfo.value.code == 1


def test_sample_writes_samples_and_diagnostics(write_config, tmp_path, capsys):
    path = _config(write_config, n=4)
    assert cli.main(["sample", "--config", str(path), "--json"]) == 0
    payload = _json(capsys)
    assert payload["samples"] == 5
    _, columns, rows = read_csv(tmp_path / "out" / "samples.csv")
    assert len(rows) == 5
    assert columns[0] == "sample"
    assert "ball_y" in columns
    _, columns, rows = read_csv(tmp_path / "out" / "diagnostics.csv")
    metrics = dict(rows)
    assert int(metrics["steps"]) == 200 + 5 * 10


def test_simulate_reruns_are_byte_identical(write_config, tmp_path, capsys):
    path = _config(write_config)
    for name in ("a", "b"):
        assert cli.main(["simulate", "--config", str(path), "--out-dir", str(tmp_path / name)]) == 0
    capsys.readouterr()
    for artifact in ("summary.csv", "histogram.csv", "report.txt"):
        first = (tmp_path / "a" / artifact).read_bytes()
        assert first == (tmp_path / "b" / artifact).read_bytes()
    report = (tmp_path / "a" / "report.txt").read_text(encoding="utf-8")
    assert report.startswith("# gasball ")
    assert "energy drift" in report


def test_simulate_flags_override_the_file(write_config, tmp_path, capsys):
    path = _config(write_config)
    code = cli.main(["simulate", "--config", str(path), "--seed", "8", "--n", "6", "--duration", "2", "--json"])
    assert code == 0
    payload = _json(capsys)
    assert payload["summary"]["seed"] == 8
    assert payload["summary"]["n_particles"] == 6
    names = [check["name"] for check in payload["checks"]]
    assert "energy drift" in names
    assert isinstance(payload["all_passed"], bool)


def test_simulate_degenerate_start_stays_vertical(write_config, tmp_path, capsys):
    path = _config(write_config, mode="specular", start="degenerate")
    assert cli.main(["simulate", "--config", str(path), "--json"]) == 0
    payload = _json(capsys)
    assert payload["summary"]["max_horizontal_speed"] == 0.0
    assert payload["summary"]["events_particle-ball"] == 0


def test_simulate_writes_optional_logs(write_config, tmp_path, capsys):
    path = write_config(
        MODEL.format(R=0.3, M=0.05, E=3.0, n=5, mode="specular", start="lattice").replace(
            'start = "lattice"', 'start = "lattice"\n    trajectory = true\n    event_log = true'
        )
    )
    assert cli.main(["simulate", "--config", str(path), "--duration", "1"]) == 0
    capsys.readouterr()
    _, columns, rows = read_csv(tmp_path / "out" / "events.csv")
    assert columns == ["t", "kind", "index"]
    assert rows
    _, columns, _ = read_csv(tmp_path / "out" / "trajectory.csv")
    assert columns[:2] == ["t", "object"]


def test_validate_without_config(tmp_path, capsys):
    code = cli.main(["validate", "--case", "no_ball", "--out-dir", str(tmp_path / "v"), "--json"])
    assert code == 0
    payload = _json(capsys)
    assert payload["cases"] == {"no_ball": 0}
    _, columns, rows = read_csv(tmp_path / "v" / "results.csv")
    assert columns[:2] == ["case", "check"]
    assert len(rows) == 4
    assert (tmp_path / "v" / "report.txt").exists()


def test_validate_failure_and_unknown_case(tmp_path, capsys):
    code = cli.main(
        [
            "validate",
            "--case",
            "velocity_equipartition",
            "--tolerance-scale",
            "1e-9",
            "--out-dir",
            str(tmp_path / "v"),
        ]
    )
    assert code == 3
    assert cli.main(["validate", "--case", "nope", "--out-dir", str(tmp_path / "v")]) == 1
    assert cli.main(["validate", "--tolerance-scale", "0", "--out-dir", str(tmp_path / "v")]) == 1

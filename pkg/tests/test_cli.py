import dataclasses
import subprocess
import sys

import numpy as np
import pytest

from ppcpcov.cli import (COLUMNS, EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_QUADRATURE, fmt, main,
                         render_csv, rows_for)
from ppcpcov.config import (ConfigError, ExperimentConfig, apply_overrides, builtin_presets,
                            dump_config, parse_config)


def test_presets():
    p = builtin_presets()
    assert sorted(p) == ["mcp-1.2", "mcp-2.8", "mcp-6.0", "tpp-0.3", "tpp-0.7", "tpp-1.5"]
    assert p["tpp-0.7"].model().kernel.second_moment == pytest.approx(1.4)
    assert p["mcp-6.0"].model().kernel.rd == pytest.approx(np.sqrt(6.0))
    for cfg in p.values():
        m = cfg.model()
        assert m.lambda_p == pytest.approx(0.1 / np.pi) and m.alpha == 10.0
        assert cfg.beta == 4.0 and cfg.window_radius == 100.0 and cfg.replications == 20000
    # the three cluster sizes share E|Y|^2 across kernels
    for a, b in (("tpp-0.3", "mcp-1.2"), ("tpp-0.7", "mcp-2.8"), ("tpp-1.5", "mcp-6.0")):
        assert p[a].model().kernel.second_moment == pytest.approx(p[b].model().kernel.second_moment)


def test_config_round_trip():
    cfg = dataclasses.replace(builtin_presets()["mcp-2.8"], seed=99, theta_step_db=0.5,
                              parent_buffer=2.5, lambda_p=1 / 3)
    assert parse_config(dump_config(cfg)) == cfg
    auto = builtin_presets()["tpp-0.3"]
    assert parse_config(dump_config(auto)) == auto


def test_parse_comments_and_errors():
    cfg = parse_config("# comment\nmode = analytic  # trailing\n\nmodel.sigma2 = 0.3\n")
    assert cfg.mode == "analytic" and cfg.sigma2 == 0.3
    with pytest.raises(ConfigError):
        parse_config("model.colour = blue\n")
    with pytest.raises(ConfigError):
        parse_config("no equals sign\n")
    with pytest.raises(ConfigError):
        parse_config("sim.replications = many\n")
    with pytest.raises(ConfigError):
        apply_overrides(ExperimentConfig(), [("theta.step_db", "0")]).validate()
    with pytest.raises(ConfigError):
        apply_overrides(ExperimentConfig(), [("pathloss.beta", "2")]).validate()


def test_theta_grid():
    cfg = ExperimentConfig(theta_start_db=-10, theta_stop_db=20, theta_step_db=1)
    g = cfg.theta_grid_db()
    assert g.size == 31 and g[0] == -10 and g[-1] == 20
    assert ExperimentConfig(theta_start_db=5, theta_stop_db=0).theta_grid_db().size == 0


def test_fmt():
    assert fmt(0.56009915351155739) == "0.5600991535"
    assert fmt(-10.0) == "-10"
    assert fmt(float("inf")) == "inf"


def test_ppp_single_row(capsys):
    code = main(["run", "--preset", "tpp-0.7", "--mode", "analytic", "--set", "model.kernel=ppp",
                 "--set", "theta.start_db=0", "--set", "theta.stop_db=0"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    lines = out.split("\n")
    assert lines[0] == "theta_db,coverage"
    assert len(lines) == 3 and lines[2] == ""
    db, p = lines[1].split(",")
    assert float(db) == 0 and float(p) == pytest.approx(0.5602, abs=1.5e-4)


def test_analytic_csv_file(tmp_path):
    out = tmp_path / "a.csv"
    code = main(["run", "--preset", "tpp-0.7", "--mode", "analytic", "--set", "theta.start_db=0",
                 "--set", "theta.stop_db=10", "--set", "theta.step_db=10", "--out", str(out)])
    assert code == EXIT_OK
    raw = out.read_bytes()
    assert b"\r" not in raw
    rows = raw.decode().splitlines()
    assert rows[0] == ",".join(COLUMNS["analytic"])
    assert [r.split(",")[0] for r in rows[1:]] == ["0", "10"]
    assert float(rows[1].split(",")[1]) > float(rows[2].split(",")[1])


def test_simulate_compare_and_contact_columns():
    base = dataclasses.replace(builtin_presets()["tpp-0.7"], window_radius=20.0, replications=50,
                               theta_start_db=0, theta_stop_db=0, contact_r_max=1.0,
                               contact_r_step=0.5)
    for mode, nrows in (("simulate", 1), ("compare", 1), ("contact", 3)):
        text = render_csv(dataclasses.replace(base, mode=mode))
        lines = text.splitlines()
        assert lines[0] == ",".join(COLUMNS[mode])
        assert len(lines) == 1 + nrows
        assert all(len(l.split(",")) == len(COLUMNS[mode]) for l in lines[1:])
    contact = render_csv(dataclasses.replace(base, mode="contact")).splitlines()
    assert contact[1].startswith("0,0,0")


def test_empty_grid_is_config_error(capsys):
    code = main(["run", "--preset", "tpp-0.3", "--set", "theta.start_db=5", "--set", "theta.stop_db=0"])
    assert code == EXIT_CONFIG
    assert "theta grid is empty" in capsys.readouterr().err


def test_exit_codes(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG
    assert main(["run", "--preset", "tpp-0.3", "--set", "bogus.key=1"]) == EXIT_CONFIG
    assert main(["run"]) == EXIT_CONFIG
    bad_dir = tmp_path / "nope" / "out.csv"
    assert main(["run", "--preset", "tpp-0.3", "--dump-config", "--out", str(bad_dir)]) == EXIT_IO
    # a single subdivision cannot reach the tolerance
    code = main(["run", "--preset", "mcp-2.8", "--mode", "analytic", "--set", "theta.start_db=0",
                 "--set", "theta.stop_db=0", "--set", "quad.max_subdivisions=1",
                 "--set", "quad.rel_tol=1e-12"])
    assert code == EXIT_QUADRATURE
    assert "quadrature failure at level" in capsys.readouterr().err


def test_config_file_and_flag_precedence(tmp_path, capsys):
    path = tmp_path / "exp.cfg"
    path.write_text("mode = simulate\nmodel.kernel = matern\nmodel.rd2 = 1.2\n")
    assert main(["run", "--config", str(path), "--set", "model.rd2=6.0", "--dump-config"]) == EXIT_OK
    cfg = parse_config(capsys.readouterr().out)
    assert cfg.mode == "simulate" and cfg.kernel == "matern" and cfg.rd2 == 6.0


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "ppcpcov", "run", "--preset", "tpp-0.3",
                          "--dump-config"], capture_output=True, text=True, check=True)
    assert "model.sigma2 = 0.3" in res.stdout


@pytest.mark.slow
@pytest.mark.parametrize("name", ["tpp-0.3", "tpp-0.7", "tpp-1.5"])


def test_compare_grid_sigma_diff(preset_runs, name, monkeypatch):

    cfg = dataclasses.replace(builtin_presets()[name], mode="compare")
    # reuse the shared 20,000-replication run instead of simulating again
    monkeypatch.setattr("ppcpcov.cli.simulate", lambda *a, **k: preset_runs(name))
    rows = list(rows_for(cfg))
    assert len(rows) == 31
    z = np.array([r[5] for r in rows])
    assert np.mean(np.abs(z) <= 3) >= 0.95

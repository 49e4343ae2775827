import numpy as np
import pytest

from hybridopt import bench, cli, runner, space
from hybridopt.afo import AfoConfig


def _tiny_cfg(method="random", seed=0, **kw):
    defaults = dict(benchmark="pressure_vessel", method=method, budget=8,
                    n_init=3, seed=seed,
                    afo=AfoConfig(cma_population=8, cma_budget=40,
                                  ls_restarts=2),
                    n_hyper_samples=2, burn_in=2)
    defaults.update(kw)
    return runner.RunConfig(**defaults)


def test_run_config_validation():
    with pytest.raises(ValueError):
        _tiny_cfg(budget=0)
    with pytest.raises(ValueError):
        _tiny_cfg(n_init=0)
    with pytest.raises(ValueError):
        _tiny_cfg(method="not_a_method")
    with pytest.raises(ValueError):
        _tiny_cfg(max_order=0)


def test_random_run_shape_and_best():
    log = runner.run(_tiny_cfg("random"))
    assert len(log.records) == 3 + 8  # init design plus budget iterations
    ys = [r.y for r in log.records]
    assert log.best == min(ys)
    assert log.best_record.y == log.best
    bests = [r.best for r in log.records]
    assert bests == [min(ys[:i + 1]) for i in range(len(ys))]
    assert log.total_s > 0


def test_random_run_deterministic():
    a = runner.run(_tiny_cfg("random", seed=7))
    b = runner.run(_tiny_cfg("random", seed=7))
    assert [r.y for r in a.records] == [r.y for r in b.records]
    c = runner.run(_tiny_cfg("random", seed=8))
    assert [r.y for r in a.records] != [r.y for r in c.records]


@pytest.mark.parametrize("method", ["hybo", "hybo_no_marg", "cont_bo",
                                    "vanilla_bo"])
def test_model_based_runs_complete(method):
    log = runner.run(_tiny_cfg(method))
    assert len(log.records) == 3 + 8
    assert all(np.isfinite(r.y) for r in log.records)
    # model-based iterations carry timing breakdowns
    assert any(r.fit_s + r.sample_s > 0 for r in log.records[3:])
    assert any(r.afo_s > 0 for r in log.records[3:])


def test_points_respect_space():
    log = runner.run(_tiny_cfg("hybo"))
    for r in log.records:
        space.check_point(log.spec, r.point)


def test_csv_round_trip(tmp_path):
    log = runner.run(_tiny_cfg("random"))
    path = tmp_path / "out.csv"
    runner.emit(log, path)
    header, rows = runner.read_csv(path)
    assert header == ["iter", "y", "best", "fit_s", "sample_s", "afo_s",
                      "d_shell_thickness", "d_head_thickness",
                      "c_inner_radius", "c_cylinder_length"]
    assert len(rows) == len(log.records)
    for rec, row in zip(log.records, rows):
        assert row[0] == rec.index
        assert row[1] == rec.y  # repr round-trips floats exactly
        assert row[2] == rec.best
        assert row[6:8] == [float(v) for v in rec.d_raw]
        assert row[8:10] == pytest.approx([float(v) for v in rec.c_raw])


def test_emit_trailer_and_config_echo(tmp_path):
    log = runner.run(_tiny_cfg("random"))
    path = tmp_path / "out.csv"
    runner.emit(log, path)
    text = path.read_text()
    assert "# benchmark = pressure_vessel" in text
    assert "# method = random" in text
    assert f"# final_best = {log.best!r}" in text
    assert "# total_wall_s = " in text


def test_surrogate_mae_experiment_shapes():
    rows, aggregates = runner.surrogate_mae_experiment(
        "pressure_vessel", [5, 10], seeds=[0, 1], test_size=20)
    assert len(rows) == 4
    assert set(aggregates) == {5, 10}
    for size in (5, 10):
        mean, two_se = aggregates[size]
        assert mean > 0 and two_se >= 0
    by_key = {(r["seed"], r["train_size"]): r["mae"] for r in rows}
    assert set(by_key) == {(0, 5), (0, 10), (1, 5), (1, 10)}


# --- CLI --------------------------------------------------------------------

def test_cli_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    for name in bench.names():
        assert name in out


def test_cli_bench_eval(capsys):
    rc = cli.main(["bench", "eval", "--name", "pressure_vessel",
                   "--values", "3", "2", "50", "100"])
    assert rc == 0
    out = capsys.readouterr().out.strip()
    assert float(out) == pytest.approx(30_003.99, abs=0.01)


def test_cli_bench_eval_wrong_arity(capsys):
    rc = cli.main(["bench", "eval", "--name", "pressure_vessel",
                   "--values", "3", "2", "50"])
    assert rc == 2


def test_cli_run_requires_seed_and_benchmark(capsys):
    assert cli.main(["run", "--benchmark", "pressure_vessel",
                     "--budget", "6"]) == 2
    assert cli.main(["run", "--seed", "0", "--budget", "6"]) == 2


def test_cli_run_writes_csv(tmp_path, capsys):
    out = tmp_path / "run.csv"
    rc = cli.main(["run", "--benchmark", "pressure_vessel",
                   "--method", "random", "--budget", "6", "--n-init", "3",
                   "--seed", "0", "--output", str(out)])
    assert rc == 0
    header, rows = runner.read_csv(out)
    assert len(rows) == 3 + 6
    assert "best=" in capsys.readouterr().out


def test_cli_unknown_benchmark(capsys):
    rc = cli.main(["run", "--benchmark", "nope", "--budget", "6",
                   "--seed", "0"])
    assert rc == 1
    assert "unknown benchmark" in capsys.readouterr().err


def test_cli_sweep(tmp_path, capsys):
    out = tmp_path / "sweep"
    rc = cli.main(["sweep", "--benchmark", "pressure_vessel",
                   "--method", "random", "--budget", "6", "--n-init", "3",
                   "--seeds", "0,1", "--output", str(out)])
    assert rc == 0
    assert (tmp_path / "sweep.seed0.csv").exists()
    assert (tmp_path / "sweep.seed1.csv").exists()
    assert "median over 2 seeds" in capsys.readouterr().out


def test_cli_mae(tmp_path, capsys):
    out = tmp_path / "mae.csv"
    rc = cli.main(["mae", "--benchmark", "pressure_vessel",
                   "--train-sizes", "5", "--seeds", "0", "--test-size", "10",
                   "--output", str(out)])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "seed,train_size,mae"
    assert len(lines) == 2


def test_cli_config_file(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("benchmark = pressure_vessel  # objective\n"
                   "method = random\n"
                   "budget = 6\n"
                   "n_init = 3\n")
    rc = cli.main(["run", "--config", str(cfg), "--seed", "0"])
    assert rc == 0


def test_cli_config_file_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("not_a_key = 1\n")
    assert cli.main(["run", "--config", str(cfg), "--seed", "0"]) == 1


def test_parse_config_file_types(tmp_path):
    cfg = tmp_path / "t.cfg"
    cfg.write_text("budget = 50\ncma_sigma0 = 0.25\nmax_order = 3\n")
    values = cli.parse_config_file(str(cfg))
    assert values == {"budget": 50, "cma_sigma0": 0.25, "max_order": "3"}

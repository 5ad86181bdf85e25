import json
import math

import numpy as np
import pytest

from graphon_sis import (ExperimentConfig, adjacency_eigenvalues, load_preset, noise_index_graph,
                         run_fig3, sample_graph)
from graphon_sis.cli import main
from graphon_sis.experiments import (FIG3_COLUMNS, OUTPUT_ENV, derive_seed, dumps_json,
                                     threshold_params, parse_fig3_csv,
                                     write_fig3_outputs)
from graphon_sis.sampling import read_edge_list

SUBCOMMANDS = ["spectrum", "sample", "index", "check", "simulate", "fig3"]


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# -- experiments ------------------------------------------------------------------

def test_derive_seed_distinct_and_stable():
    seeds = {derive_seed(m, n) for m in range(5) for n in (40, 100, 200)}
    assert len(seeds) == 15
    assert derive_seed(3, 100) == derive_seed(3, 100)
    assert 0 <= derive_seed(0, 40) < 2 ** 64


def test_threshold_params_threshold(wsb):
    p = threshold_params(wsb, [40])
    assert p.delta_bar == pytest.approx(0.1 * (0.5274984 + 1.5107), abs=1e-4)
    assert p.scaling == "fixed_beta"
    run = threshold_params(wsb, [40, 100], phi_at="running")
    assert set(run.scaling) == {40, 100}
    assert run.rates(100)[1] / 100 < run.rates(40)[1] / 40


def test_fig3_zero_graphon(tmp_path):
    cfg = ExperimentConfig(graphon="zero", n_grid=[10, 50], seeds=[0, 1], outputs=str(tmp_path))
    rows = run_fig3(cfg)
    assert len(rows) == 4
    assert all(r.delta_noise == 0.0 and r.relative_error == 0.0 for r in rows)


def test_fig3_row_is_sample_plus_index(wsb):
    cfg = ExperimentConfig(n_grid=[100], seeds=[7])
    (row,) = run_fig3(cfg, wsb)
    assert row.seed == derive_seed(7, 100)
    G = sample_graph(wsb, 100, row.seed)
    beta, delta = cfg.params(wsb).rates(100)
    assert row.j_graph == noise_index_graph(adjacency_eigenvalues(G), delta, beta, 1.0)


def test_fig3_workers_do_not_change_results(wsb):
    a = run_fig3(ExperimentConfig(n_grid=[40, 100], seeds=3), wsb)
    b = run_fig3(ExperimentConfig(n_grid=[40, 100], seeds=3, workers=3), wsb)
    assert a == b


def test_fig3_boundary_row_has_nan_bound(wsb):
    rows = run_fig3(ExperimentConfig(n_grid=[40, 100], seeds=[0]), wsb)
    assert math.isnan(rows[0].theorem_bound) and "bound" in rows[0].note
    assert math.isfinite(rows[1].theorem_bound)


def test_fig3_failure_rows(tmp_path):
    # rank 5 cannot be padded to 3 nodes
    cfg = ExperimentConfig(n_grid=[3, 40], seeds=[0], outputs=str(tmp_path))
    rows = run_fig3(cfg)
    assert math.isnan(rows[0].j_graph) and rows[0].note
    paths = write_fig3_outputs(rows, cfg)
    assert "failures" in paths
    assert "3," in paths["failures"].read_text()


def test_fig3_csv_roundtrip(tmp_path, wsb):
    cfg = ExperimentConfig(n_grid=[40, 100], seeds=2, outputs=str(tmp_path))
    rows = run_fig3(cfg, wsb)
    paths = write_fig3_outputs(rows, cfg)
    text = paths["fig3"].read_text()
    back, meta = parse_fig3_csv(text)
    assert meta["config_hash"] == cfg.digest()
    assert meta["package"] and meta["version"]
    assert [l for l in text.splitlines() if not l.startswith("#")][0] == ",".join(FIG3_COLUMNS)
    for a, b in zip(rows, back):
        np.testing.assert_array_equal(np.array(a.values(), float), np.array(b.values(), float))
    assert paths["summary"].exists()


def test_fig3_csv_rejects_bad_columns():
    with pytest.raises(ValueError):
        parse_fig3_csv("n,j\n1,2\n")


def test_json_nan_becomes_null():
    d = json.loads(dumps_json({"x": math.nan, "y": [1.0, math.inf]}, {"seed": 1}))
    assert d["x"] is None and d["y"][1] is None and d["meta"]["seed"] == 1


def test_config_load(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("graphon: wsb-uniform\nn_grid: [40, 80]\nseeds: 3\nsigma: 0.5\n")
    cfg = ExperimentConfig.load(path)
    assert cfg.seeds == [0, 1, 2] and cfg.n_grid == [40, 80] and cfg.sigma == 0.5
    path.write_text("graphon: wsb-paper\nbogus: 1\n")
    with pytest.raises(ValueError, match="bogus"):
        ExperimentConfig.load(path)


def test_config_validation_and_env(monkeypatch):
    with pytest.raises(ValueError):
        ExperimentConfig(n_grid=[100, 40])
    monkeypatch.setenv(OUTPUT_ENV, "/tmp/somewhere")
    assert ExperimentConfig().outputs == "/tmp/somewhere"
    assert ExperimentConfig(outputs="x").digest() == ExperimentConfig(outputs="y").digest()
    assert ExperimentConfig(sigma=0.5).digest() != ExperimentConfig().digest()


# -- CLI --------------------------------------------------------------------------

@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_help(capsys, sub):
    code, out, _ = run_cli(capsys, sub, "--help")
    assert code == 0 and "usage" in out


def test_usage_errors(capsys):
    assert run_cli(capsys, "bogus")[0] == 1
    assert run_cli(capsys)[0] == 1
    assert run_cli(capsys, "sample", "--preset", "wsb-paper")[0] == 1
    assert run_cli(capsys, "index", "--preset", "wsb-paper")[0] == 1


def test_computation_errors(capsys, tmp_path):
    assert run_cli(capsys, "spectrum", "--graph", tmp_path / "missing.txt")[0] == 2
    assert run_cli(capsys, "spectrum", "--preset", "no-such-preset")[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("3\n1 1\n")
    assert run_cli(capsys, "spectrum", "--graph", bad)[0] == 2
    code, _, err = run_cli(capsys, "sample", "--preset", "wsb-paper", "-n", 1, "--seed", 0)
    assert code == 2 and err


def test_spectrum_preset(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--preset", "wsb-paper")
    assert code == 0
    d = json.loads(out)
    np.testing.assert_allclose(d["spectrum"]["eigenvalues"],
                               [0.5275, 0.2098, 0.0126, -0.0128, -0.0971], atol=5e-5)
    assert d["meta"]["version"]


def test_sample_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for p in (a, b):
        assert run_cli(capsys, "sample", "--preset", "wsb-paper", "-n", 50, "--seed", 3, "-o", p)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    G = read_edge_list(a)
    assert np.array_equal(G.adjacency, sample_graph(load_preset("wsb-paper"), 50, 3).adjacency)


def test_index_matches_library(capsys, tmp_path, wsb):
    g = tmp_path / "g.txt"
    run_cli(capsys, "sample", "--preset", "wsb-paper", "-n", 100, "--seed", 5, "-o", g)
    code, out, _ = run_cli(capsys, "index", "--preset", "wsb-paper", "--graph", g)
    assert code == 0
    d = json.loads(out)
    beta, delta = threshold_params(wsb, [40]).rates(100)
    G = sample_graph(wsb, 100, 5)
    assert d["j_graph"] == pytest.approx(noise_index_graph(adjacency_eigenvalues(G), delta, beta, 1.0),
                                         rel=1e-15)
    assert d["meta"]["seed"] == 5
    code, out, _ = run_cli(capsys, "index", "--preset", "wsb-paper", "-n", 40)
    d = json.loads(out)
    assert d["theorem_bound"] is None and d["notes"]


def test_check(capsys):
    code, out, _ = run_cli(capsys, "check", "--preset", "wsb-paper", "-n", 8)
    assert code == 0
    d = json.loads(out)
    assert d["large_enough"]["condition_a"]["passed"] is False


def test_simulate_modes(capsys, tmp_path):
    g = tmp_path / "g.txt"
    run_cli(capsys, "sample", "--preset", "wsb-paper", "-n", 20, "--seed", 1, "-o", g)
    code, out, _ = run_cli(capsys, "simulate", "--graph", g, "--beta", 0.05, "--delta", 2.0,
                           "--dt", 0.01, "--horizon", 5, "--csv", tmp_path / "t.csv")
    assert code == 0 and json.loads(out)["final_max_abs"] < 1e-3
    assert (tmp_path / "t.csv").read_text().startswith("#")
    code, out, _ = run_cli(capsys, "simulate", "--graph", g, "--mode", "montecarlo", "--beta", 0.05,
                           "--delta", 2.0, "--dt", 0.01, "--horizon", 5, "--trials", 4)
    d = json.loads(out)
    assert code == 0 and d["estimate"] > 0 and d["closed_form"] > 0
    assert run_cli(capsys, "simulate", "--graph", g, "--mode", "montecarlo", "--beta", 1.0,
                   "--delta", 0.1, "--horizon", 1)[0] == 2


def test_fig3_cli(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "fig3", "--n-grid", 40, 100, "--n-seeds", 2, "--out", tmp_path)
    assert code == 0
    rows, meta = parse_fig3_csv((tmp_path / "fig3.csv").read_text())
    assert len(rows) == 4 and meta["graphon"] == "wsb-paper"
    assert (tmp_path / "fig3_summary.csv").exists()


def test_fig3_cli_config(capsys, tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(f"graphon: zero\nn_grid: [20]\nseeds: [4]\noutputs: {tmp_path / 'o'}\n")
    assert run_cli(capsys, "fig3", "--config", cfg)[0] == 0
    rows, _ = parse_fig3_csv((tmp_path / "o" / "fig3.csv").read_text())
    assert rows[0].seed == derive_seed(4, 20) and rows[0].delta_noise == 0

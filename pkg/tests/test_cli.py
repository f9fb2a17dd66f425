import csv
import io

import numpy as np
import pytest

from radial_bem import cli
from radial_bem.experiments import ConfigError, ExperimentConfig
from radial_bem.quadrature import gauss_legendre
from radial_bem.singular_opt import find_err0_zeros


def run(argv, tmp_path, name="out.csv"):
    out = tmp_path / name
    code = cli.main(list(argv) + ["--out", str(out)])
    text = out.read_bytes().decode("utf-8") if out.exists() else ""
    return code, text


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_optimal_points_eight(tmp_path):
    code, text = run(["optimal-points", "--nodes", "8"], tmp_path)
    assert code == 0
    table = rows(text)
    assert table[0] == ["zero_index", "s"]
    assert len(table) == 9
    assert "\r" not in text


def test_optimal_points_four_is_computed(tmp_path, capsys):
    code, text = run(["optimal-points", "--nodes", "4"], tmp_path)
    assert code == 0
    assert len(rows(text)) > 1
    assert "computed" in capsys.readouterr().out


def test_optimal_points_rejects_small_rule(tmp_path):
    code, _ = run(["optimal-points", "--nodes", "3"], tmp_path)
    assert code == 1


def test_error_profile_columns(tmp_path):
    code, text = run(["error-profile", "--nodes", "8", "--samples", "20"], tmp_path)
    assert code == 0
    table = rows(text)
    assert table[0] == ["s", "err0", "err1", "err2"]
    assert len(table) == 21


def test_csv_is_deterministic(tmp_path):
    argv = ["table", "--bases", "gaussian,tps", "--sizes", "8,16", "--bcs", "dirichlet,mixed"]
    _, a = run(argv, tmp_path, "a.csv")
    _, b = run(argv, tmp_path, "b.csv")
    assert a == b


def test_csv_round_trip(tmp_path):
    _, text = run(["table", "--bases", "gaussian", "--sizes", "8,16", "--bcs", "dirichlet"], tmp_path)
    for bc, rbf, N, err in rows(text)[1:]:
        val = float(err)
        assert cli.fmt(val) == err
        assert float(cli.fmt(val)) == val
        assert int(N) in (8, 16)
    for x in (1.234567890123e-7, -3.0, 0.0, 12345.6789):
        assert float(cli.fmt(float(cli.fmt(x)))) == float(cli.fmt(x))
    assert cli.fmt(float("nan")) == "nan"
    assert cli.fmt(2.05e-6) == "2.05000e-06"


def test_sweep_single_point(tmp_path):
    code, text = run(["sweep-s", "--basis", "linear", "--elements", "8", "--nodes", "8",
                      "--exact", "poly", "--s-grid", "0.58"], tmp_path)
    assert code == 0
    assert len(rows(text)) == 2


def test_s_grid_avoids_nodes():
    nodes = gauss_legendre(8).nodes
    grid = cli.s_grid(f"{nodes[5]}:0.9:3", 8)
    assert np.min(np.abs(grid[:, None] - nodes[None])) >= 1e-6 * 0.99
    assert len(cli.s_grid("0.01:0.99:200", 16)) == 200


def test_sweep_failures_become_nan(tmp_path, monkeypatch):
    def boom(cfg, s):
        raise np.linalg.LinAlgError("synthetic")

    monkeypatch.setattr(cli, "run_case", boom)
    code, text = run(["sweep-s", "--s-grid", "0.2:0.6:3"], tmp_path)
    assert code == 0
    assert [r[1] for r in rows(text)[1:]] == ["nan"] * 3


def test_table_failure_cell(tmp_path, monkeypatch):
    def boom(cfg):
        raise FloatingPointError("synthetic, overflow")

    monkeypatch.setattr(cli, "run_case", boom)
    code, text = run(["table", "--bases", "gaussian", "--sizes", "8", "--bcs", "dirichlet"], tmp_path)
    assert code == 0
    assert rows(text)[1][3] == "FAIL(synthetic; overflow)"


def test_numeric_failure_exit_code(tmp_path, monkeypatch):
    def boom(cfg):
        raise np.linalg.LinAlgError("synthetic")

    monkeypatch.setattr(cli, "run_parity", boom)
    code, _ = run(["parity"], tmp_path)
    assert code == 2


def test_parity_rejects_radial_basis(tmp_path):
    code, _ = run(["parity", "--basis", "gaussian"], tmp_path)
    assert code == 1


def test_expsum_lambda_validation(tmp_path, capsys):
    code, _ = run(["table", "--pde", "advdiff", "--h1", "1", "--lambda", "-2", "--exact", "expsum",
                   "--bases", "gaussian", "--sizes", "8"], tmp_path)
    assert code == 1
    assert "residual" in capsys.readouterr().err
    with pytest.raises(ConfigError, match="residual"):
        ExperimentConfig(pde="advdiff", h1=1.0, lam=-2.0, exact="expsum")
    assert ExperimentConfig(pde="advdiff", h1=1.0, exact="expsum").coefficients().lam == -3.0


@pytest.mark.parametrize("kw", [
    {"domain": "circle"}, {"basis": "spline"}, {"bc": "robin"},
    {"exact": "poly", "pde": "advdiff", "lam": -1.0}, {"exact": "expsum"},
])
def test_config_rejects(kw):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kw)


def test_config_file_and_flag_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# cell\nbases = gaussian\nelements = 8\nnodes = 8\nbasis = tps\nbc = mixed\n")
    args = cli.make_parser().parse_args(["sweep-s", "--config", str(conf), "--nodes", "16"])
    settings = cli._settings(args)
    cfg = cli.build_config(settings)
    assert (cfg.N, cfg.n, cfg.basis, cfg.bc) == (8, 16, "tps", "mixed")
    assert cfg.offset() == 0.43


def test_bad_config_file(tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("elements 8\n")
    code, _ = run(["sweep-s", "--config", str(conf)], tmp_path)
    assert code == 1


def test_summary_goes_to_stderr_without_out(capsys):
    assert cli.main(["optimal-points", "--nodes", "8"]) == 0
    cap = capsys.readouterr()
    assert cap.out.startswith("zero_index,s\n")
    assert "s_opt=0.58" in cap.err


@pytest.mark.slow
def test_linear_sweep_dip_near_a_zero(tmp_path):
    code, text = run(["sweep-s", "--basis", "linear", "--elements", "40", "--nodes", "8",
                      "--exact", "poly", "--jobs", "4"], tmp_path)
    assert code == 0
    data = np.array([[float(a), float(b)] for a, b in rows(text)[1:]])
    s_min = data[np.nanargmin(data[:, 1]), 0]
    zeros = np.array(find_err0_zeros(gauss_legendre(8)))
    published = np.array([0.12, 0.24, 0.47, 0.58, 0.76, 0.83, 0.94, 0.98])
    assert np.min(np.abs(published - s_min)) <= 0.02
    assert np.min(np.abs(zeros - s_min)) <= 0.02


@pytest.mark.slow
def test_compare_examples(tmp_path):
    code, text = run(["compare", "--h-values", "1,1", "--sizes", "40,80,200"], tmp_path)
    assert code == 0
    table = rows(text)[1:]
    err = {(r[4], int(r[5])): float(r[6]) for r in table}
    assert err[("radial", 80)] < err[("linear", 80)]
    assert err[("linear", 200)] < err[("linear", 40)]
    code, text = run(["compare", "--domain", "flower", "--h-values", "0,0", "--lambda", "-2",
                      "--sizes", "80"], tmp_path, "flower.csv")
    err = {r[4]: float(r[6]) for r in rows(text)[1:]}
    assert err["radial"] < err["linear"]


@pytest.mark.slow
def test_reference_integrator_is_deterministic():
    from radial_bem.basis import place_sources
    from radial_bem.geometry import discretize_square
    from radial_bem.kernels import PdeCoefficients
    from radial_bem.solver import reference_products

    mesh = discretize_square(8)
    src = place_sources(mesh, 0.43)
    a = reference_products(mesh, src, src.points, PdeCoefficients())
    b = reference_products(mesh, src, src.points, PdeCoefficients())
    for x, y in zip(a, b):
        assert np.max(np.abs(x - y)) <= 1e-12

"""Acceptance criteria at their stated tolerances.

Each test records a PASS/FAIL line (printed inline and in the terminal
summary) before asserting, so a failing criterion still reports its numbers.
"""
import time

import numpy as np
import pytest

from radial_bem import cli
from radial_bem.basis import BasisKind, build_matrices, place_sources
from radial_bem.experiments import ExperimentConfig, run_case, run_parity
from radial_bem.geometry import discretize_flower, discretize_square
from radial_bem.kernels import PdeCoefficients, bessel_k0, fundamental_u, fundamental_v, verify_fundamental
from radial_bem.quadrature import gauss_legendre, global_quadrature
from radial_bem.singular_opt import err_i, exact_log_moment, reference_singular_integral
from radial_bem.solver import BemProblem, BoundaryConditionSpec, assemble_influence

RESULTS = {}

LISTED_8 = [0.12, 0.24, 0.47, 0.58, 0.76, 0.83, 0.94, 0.98]
LISTED_16 = [0.06, 0.13, 0.25, 0.31, 0.43, 0.49, 0.59, 0.64, 0.73, 0.85, 0.88, 0.93, 0.96, 0.98]


def record(capsys, num, ok, detail):
    RESULTS[num] = (bool(ok), detail)
    with capsys.disabled():
        print(f"\n[criterion {num}] {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def _zeros_from_cli(n, tmp_path):
    out = tmp_path / f"zeros{n}.csv"
    assert cli.main(["optimal-points", "--nodes", str(n), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()[1:]
    return [float(line.split(",")[1]) for line in lines]


def _match(zeros, listed, tol=0.005):
    z = np.array(zeros)
    dev = [float(np.min(np.abs(z - v))) for v in listed]  # nearest computed root per listed value
    off = [f"{v} ({d:.5f})" for v, d in zip(listed, dev) if d > tol]
    ok = len(zeros) == len(listed) and not off
    detail = f"{len(zeros)} zeros (expected {len(listed)})"
    if off:
        detail += ", beyond 0.005: " + ", ".join(off)
    return ok, detail


def test_criterion_1_err0_zeros(tmp_path, capsys):
    t0 = time.perf_counter()
    z8 = _zeros_from_cli(8, tmp_path)
    z16 = _zeros_from_cli(16, tmp_path)
    elapsed = time.perf_counter() - t0
    ok8, d8 = _match(z8, LISTED_8)
    ok16, d16 = _match(z16, LISTED_16)
    ok = ok8 and ok16 and elapsed < 5.0
    record(capsys, 1, ok, f"n=8: {d8}; n=16: {d16}; {elapsed:.2f}s")


def test_criterion_2_linear_offset_dip(capsys):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(basis="linear", N=40, n=8, exact="poly")
    er = {s: run_case(cfg, s).flux_error for s in (0.58, 0.35, 0.50, 0.70)}
    elapsed = time.perf_counter() - t0
    ok = all(er[0.58] <= er[s] / 5 for s in (0.35, 0.50, 0.70)) and elapsed < 30
    detail = ", ".join(f"Er({s})={e:.3e}" for s, e in er.items())
    record(capsys, 2, ok, f"{detail}; {elapsed:.1f}s")


def test_criterion_3_radial_sweep(capsys):
    parts, ok = [], True
    for exact in ("poly", "expcos"):
        cfg = ExperimentConfig(basis="gaussian", N=40, n=16, exact=exact)
        er = {s: run_case(cfg, s).flux_error for s in (0.43, 0.50, 0.35)}
        ok &= er[0.43] < er[0.50] and er[0.43] < er[0.35]
        parts.append(f"{exact}: " + ", ".join(f"Er({s})={e:.3e}" for s, e in er.items()))
    record(capsys, 3, ok, "; ".join(parts))


@pytest.mark.slow
def test_criterion_4_quadrature_parity(capsys):
    parts, ok = [], True
    for exact in ("poly", "expcos"):
        res = run_parity(ExperimentConfig(basis="linear", N=40, n=16, exact=exact))
        ok &= res["relative_difference"] < 0.05
        parts.append(f"{exact}: GQR {res['error_quadrature']:.4e} vs reference "
                     f"{res['error_reference']:.4e} ({res['relative_difference']:.2%})")
    record(capsys, 4, ok, "; ".join(parts))


def _table_error(domain, basis, N):
    cfg = ExperimentConfig(domain=domain, basis=basis, N=N, n=16, s=0.43, exact="expcos")
    return run_case(cfg).interior_error


def test_criterion_5_square_table(capsys):
    cells = [("gaussian", 64, 1e-4), ("tps", 64, 1e-4), ("c0", 128, 1e-2)]
    errs = [(b, N, _table_error("square", b, N), lim) for b, N, lim in cells]
    ok = all(e <= lim for _, _, e, lim in errs)
    record(capsys, 5, ok, ", ".join(f"{b} N={N}: {e:.3e} (<= {lim:g})" for b, N, e, lim in errs))


def test_criterion_6_flower_table(capsys):
    cells = [("gaussian", 64, 7.5e-5), ("phs", 128, 1e-5)]
    errs = [(b, N, _table_error("flower", b, N), lim) for b, N, lim in cells]
    ok = all(e <= lim for _, _, e, lim in errs)
    record(capsys, 6, ok, ", ".join(f"{b} N={N}: {e:.3e} (<= {lim:g})" for b, N, e, lim in errs))


@pytest.mark.slow
def test_criterion_7_radial_beats_linear(capsys):
    losses, worst = [], 0.0
    for domain in ("square", "flower"):
        for h1, h2 in ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0)):
            for N in (40, 80, 160):
                cfg = ExperimentConfig(domain=domain, pde="advdiff", h1=h1, h2=h2, N=N, n=16, exact="expsum")
                radial = run_case(cfg.with_(basis="gaussian")).interior_error
                linear = run_case(cfg.with_(basis="linear")).interior_error
                worst = max(worst, radial / linear)
                if not radial < linear:
                    losses.append(f"{domain} h=({h1:g},{h2:g}) N={N}")
    record(capsys, 7, not losses,
           f"18 cells, radial/linear ratio at most {worst:.3g}" + (f"; lost: {losses}" if losses else ""))


def _property_checks():
    """(name, passed) for each property family; kept light enough for the time budget."""
    checks = []

    ok = True
    for n in (1, 2, 5, 8, 16, 32, 64):
        r = gauss_legendre(n)
        for k in range(2 * n):
            exact = 0.0 if k % 2 else 2.0 / (k + 1)
            ok &= abs(np.sum(r.nodes**k * r.weights) - exact) < 1e-13
    checks.append(("Gauss-Legendre exactness", ok))

    ok = True
    for N in (16, 32, 64):
        mesh = discretize_square(N)
        inf = assemble_influence(place_sources(mesh, 0.43), global_quadrature(mesh, gauss_legendre(16)),
                                 PdeCoefficients())
        ok &= np.max(np.abs(inf.H.sum(axis=1) + 0.5)) < 2e-3
    checks.append(("H row sums", ok))

    ok = True
    for mesh in (discretize_square(40), discretize_flower(40)):
        prob = BemProblem.build(mesh, "gaussian", 16, 0.43)
        K = len(prob.sources)
        sol = prob.solve(BoundaryConditionSpec.from_exact(np.ones(K, bool), np.ones(K), np.zeros(K)))
        inner = 0.5 * prob.sources.points
        ok &= np.mean(np.abs(sol.v)) < 1e-4
        ok &= np.max(np.abs(prob.potential(sol, inner) - 1.0)) < 1e-6
    checks.append(("constant solution", ok))

    ok = True
    rng = np.random.default_rng(1)
    for n in (8, 16):
        rule = gauss_legendre(n)
        s = np.linspace(0, 1, 502)[1:-1]
        e = np.array([[err_i(x, i, rule) for i in range(3)] for x in s])
        ok &= np.mean((e[:, 2] <= e[:, 1]) & (e[:, 1] <= e[:, 0])) >= 0.95
        for x in rng.uniform(0.01, 0.99, 30):
            ok &= all(abs(err_i(x, i, rule) - err_i(-x, i, rule)) < 1e-12 for i in range(3))
    checks.append(("Err^i symmetry and dominance", ok))

    adv = PdeCoefficients((1.0, 0.0), -1.0)
    wrong = lambda r: np.exp(-0.5 * r[:, 0]) * bessel_k0(adv.mu * np.hypot(r[:, 0], r[:, 1])) / (2 * np.pi)  # noqa: E731
    checks.append(("adjoint residual and wrong-sign guard",
                   verify_fundamental(PdeCoefficients()) < 1e-6 and verify_fundamental(adv) < 1e-4
                   and verify_fundamental(adv, u=wrong) > 1e-1))

    ok = True
    for pde in (PdeCoefficients(), PdeCoefficients((0, 0), -1.0), adv):
        for _ in range(20):
            rho, a, b = rng.uniform(0.3, 1.5), rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi)
            r, nrm = rho * np.array([np.cos(a), np.sin(a)]), np.array([np.cos(b), np.sin(b)])
            fd = (fundamental_u(pde, r + 1e-6 * nrm) - fundamental_u(pde, r - 1e-6 * nrm)) / 2e-6
            v = fundamental_v(pde, r, nrm)
            ok &= abs(v - fd) <= 1e-6 * max(abs(v), 1e-3)
    checks.append(("v* versus finite differences", ok))

    ok = True
    for N in (8, 16, 32):
        mesh = discretize_square(N)
        src = place_sources(mesh, 0.43)
        Psi = build_matrices(BasisKind.for_sources("gaussian", len(src)), src,
                             global_quadrature(mesh, gauss_legendre(16))).Psi
        ok &= np.allclose(Psi, Psi.T, atol=1e-13) and np.linalg.eigvalsh(Psi).min() > 0
    checks.append(("Gaussian Psi SPD", ok))

    ok = True
    for _ in range(20):
        s, i = float(rng.uniform(-0.98, 0.98)), int(rng.integers(0, 3))
        ref = reference_singular_integral(lambda dt, i=i: np.log(np.abs(dt)) * np.abs(dt) ** i, s, offsets=True)
        ok &= abs(ref - exact_log_moment(s, i)) < 1e-12
    checks.append(("closed-form log moments versus graded oracle", ok))
    return checks


def test_criterion_8_property_suites(capsys):
    t0 = time.perf_counter()
    checks = _property_checks()
    elapsed = time.perf_counter() - t0
    failed = [name for name, ok in checks if not ok]
    ok = not failed and elapsed < 120
    record(capsys, 8, ok, f"{len(checks) - len(failed)}/{len(checks)} property families hold"
           + (f" (failed: {failed})" if failed else "") + f"; {elapsed:.1f}s")

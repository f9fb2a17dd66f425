"""Experiment configurations and runners shared by the CLI and scripts/."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .basis import ALL_KINDS
from .geometry import discretize_flower, discretize_square, interior_points
from .kernels import PdeCoefficients
from .singular_opt import optimal_offset
from .solver import BemProblem, BoundaryConditionSpec, flux_error, interior_error, solve_reference


class ConfigError(ValueError):
    pass


# exact solutions: value and gradient
def _poly(p):
    x, y = p[:, 0], p[:, 1]
    return x * x - y * y, np.column_stack([2 * x, -2 * y])


def _expcos(p):
    x, y = p[:, 0], p[:, 1]
    ex = np.exp(x)
    return ex * np.cos(y), np.column_stack([ex * np.cos(y), -ex * np.sin(y)])


def _expsum(p):
    e = np.exp(p[:, 0] + p[:, 1])
    return e, np.column_stack([e, e])


EXACT = {"poly": _poly, "expcos": _expcos, "expsum": _expsum}


def pde_residual(exact: str, pde: PdeCoefficients) -> float:
    """Constant c with L(u) = c * u for the exponential/polynomial families
    (zero when the exact solution satisfies the PDE)."""
    if exact == "expsum":
        return 2.0 + pde.h[0] + pde.h[1] + pde.lam
    if pde.is_laplace:
        return 0.0
    return math.inf  # poly / expcos are harmonic only


@dataclass(frozen=True)
class ExperimentConfig:
    domain: str = "square"
    pde: str = "laplace"
    h1: float = 0.0
    h2: float = 0.0
    lam: Optional[float] = None
    basis: str = "gaussian"
    N: int = 40
    n: int = 16
    s: float | str = "auto"
    bc: str = "dirichlet"
    exact: str = "expcos"
    eps2: Optional[float] = None

    def __post_init__(self):
        if self.domain not in ("square", "flower"):
            raise ConfigError(f"unknown domain {self.domain!r}")
        if self.pde not in ("laplace", "advdiff"):
            raise ConfigError(f"unknown pde {self.pde!r}")
        if self.basis not in ALL_KINDS:
            raise ConfigError(f"unknown basis {self.basis!r}")
        if self.bc not in ("dirichlet", "mixed"):
            raise ConfigError(f"unknown boundary condition {self.bc!r}")
        if self.exact not in EXACT:
            raise ConfigError(f"unknown exact solution {self.exact!r}")
        if self.exact == "expsum" and self.pde == "advdiff" and self.lam is not None:
            res = 2.0 + self.h1 + self.h2 + self.lam
            if abs(res) > 1e-12:
                raise ConfigError(
                    f"exp(x+y) leaves PDE residual {res:+.6g}*u; need lambda = -(2 + h1 + h2) "
                    f"= {-(2.0 + self.h1 + self.h2):.6g}"
                )
        try:
            pde = self.coefficients()
        except ValueError as err:
            raise ConfigError(str(err)) from err
        if abs(pde_residual(self.exact, pde)) > 1e-12:
            if self.exact == "expsum":
                raise ConfigError("exp(x+y) needs the advection-diffusion PDE with lambda = -(2 + h1 + h2)")
            raise ConfigError(f"exact solution {self.exact!r} only solves the Laplace equation")

    def coefficients(self) -> PdeCoefficients:
        if self.pde == "laplace":
            return PdeCoefficients()
        lam = self.lam if self.lam is not None else -(2.0 + self.h1 + self.h2)
        return PdeCoefficients((self.h1, self.h2), lam)

    def offset(self) -> float:
        if self.s in ("auto", "optimal", None):
            return optimal_offset(self.n).s_opt
        return float(self.s)

    def mesh(self):
        if self.domain == "square":
            return discretize_square(self.N)
        return discretize_flower(self.N)

    def with_(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


def dirichlet_mask(cfg: ExperimentConfig, sources) -> np.ndarray:
    """Square mixed: u on top/bottom, flux on left/right. Flower mixed: u for
    theta in [0, pi), flux for theta in [pi, 2 pi)."""
    K = len(sources)
    if cfg.bc == "dirichlet":
        return np.ones(K, dtype=bool)
    n = sources.normals
    if cfg.domain == "square":
        return np.abs(n[:, 1]) > 0.5
    theta = np.mod(np.arctan2(sources.points[:, 1], sources.points[:, 0]), 2 * np.pi)
    return theta < np.pi


@dataclass
class CaseResult:
    config: ExperimentConfig
    s: float
    flux_error: float
    interior_error: float
    condition: float


def boundary_data(cfg, sources):
    u, grad = EXACT[cfg.exact](sources.points)
    v = np.einsum("ki,ki->k", grad, sources.normals)
    return u, v


def run_case(cfg: ExperimentConfig, s: Optional[float] = None) -> CaseResult:
    s = cfg.offset() if s is None else s
    prob = BemProblem.build(cfg.mesh(), cfg.basis, cfg.n, s, cfg.coefficients(), cfg.eps2)
    u_ex, v_ex = boundary_data(cfg, prob.sources)
    bc = BoundaryConditionSpec.from_exact(dirichlet_mask(cfg, prob.sources), u_ex, v_ex)
    sol = prob.solve(bc)
    inner = interior_points(prob.sources.points, 0.5)
    u_in = prob.potential(sol, inner)
    return CaseResult(
        config=cfg,
        s=s,
        flux_error=flux_error(sol, v_ex),
        interior_error=interior_error(u_in, EXACT[cfg.exact](inner)[0]),
        condition=sol.condition_estimate,
    )


def run_parity(cfg: ExperimentConfig) -> dict:
    """Interior error of the linear BEM with Gauss-rule integrals versus the
    graded reference integrator, on identical sources and boundary data."""
    if cfg.basis != "linear":
        raise ConfigError("parity check is defined for the linear basis")
    s = cfg.offset()
    quad = run_case(cfg, s)
    prob = BemProblem.build(cfg.mesh(), "linear", cfg.n, s, cfg.coefficients())
    u_ex, v_ex = boundary_data(cfg, prob.sources)
    bc = BoundaryConditionSpec.from_exact(dirichlet_mask(cfg, prob.sources), u_ex, v_ex)
    inner = interior_points(prob.sources.points, 0.5)
    _, u_ref = solve_reference(prob.mesh, prob.sources, prob.pde, bc, inner)
    ref_err = interior_error(u_ref, EXACT[cfg.exact](inner)[0])
    return {
        "s": s,
        "error_quadrature": quad.interior_error,
        "error_reference": ref_err,
        "relative_difference": abs(quad.interior_error - ref_err) / ref_err,
    }

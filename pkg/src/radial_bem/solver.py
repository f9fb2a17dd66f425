"""Assembly and solution of the collocated boundary integral equation.

For a source point p with free-term coefficient c(p),

    -c(p) u(p) = int v* u dG - int u* u (h.n) dG - int u* v dG,

and with u = Phi alpha, v = Phi beta on the boundary every integral becomes a
row of H, G1 or G2 (kernel times quadrature weight) times Phi. Collocating at
the K sources (c = 1/2) and adding the interpolation and boundary-condition
rows gives the 4K x 4K block system

    [ A  -B   0   0 ] [alpha]   [0]
    [ Psi 0  -I   0 ] [beta ] = [0]
    [ 0  Psi  0  -I ] [u    ]   [0]
    [ 0   0  C1  C2 ] [v    ]   [w]

with A = Psi/2 + H Phi - G1 Phi and B = G2 Phi.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .basis import BasisKind, BasisMatrices, IllConditionedError, SourceSet, build_matrices, place_sources
from .geometry import BoundaryMesh, winding_number
from .kernels import PdeCoefficients, check_fundamental, fundamental_u, fundamental_v
from .quadrature import GlobalQuadrature, gauss_legendre, global_quadrature

FREE_TERM_BOUNDARY = 0.5
BOUNDARY_CLEARANCE = 1e-9


@dataclass(frozen=True)
class InfluenceMatrices:
    """Rows are collocation points, columns are boundary quadrature points."""

    H: np.ndarray
    G1: np.ndarray
    G2: np.ndarray


@dataclass(frozen=True)
class BoundaryConditionSpec:
    dirichlet: np.ndarray  # (K,) bool, True where u is prescribed
    values: np.ndarray  # (K,) prescribed u or v

    def __post_init__(self):
        if self.dirichlet.shape != self.values.shape:
            raise ValueError("mask and values must have the same length")

    @property
    def dirichlet_indices(self):
        return np.flatnonzero(self.dirichlet)

    @property
    def neumann_indices(self):
        return np.flatnonzero(~self.dirichlet)

    @classmethod
    def from_exact(cls, dirichlet, u_values, v_values):
        dirichlet = np.asarray(dirichlet, dtype=bool)
        return cls(dirichlet, np.where(dirichlet, u_values, v_values).astype(float))


@dataclass(frozen=True)
class BemSolution:
    alpha: np.ndarray
    beta: np.ndarray
    u: np.ndarray
    v: np.ndarray
    condition_estimate: float
    refinement_diverged: bool = False


def assemble_influence(points, gq: GlobalQuadrature, pde: PdeCoefficients) -> InfluenceMatrices:
    """Kernel rows for each collocation point (sources or interior points)."""
    check_fundamental(pde)
    p = np.asarray(getattr(points, "points", points), dtype=float).reshape(-1, 2)
    r = gq.points[None, :, :] - p[:, None, :]
    dist = np.hypot(r[..., 0], r[..., 1])
    if dist.min() == 0.0:
        k, g = np.unravel_index(np.argmin(dist), dist.shape)
        raise ValueError(f"source {k} coincides with quadrature point {g}")
    nG = np.broadcast_to(gq.normals[None, :, :], r.shape)
    H = fundamental_v(pde, r, nG) * gq.weights
    G2 = fundamental_u(pde, r) * gq.weights
    hn = pde.h[0] * gq.normals[:, 0] + pde.h[1] * gq.normals[:, 1]
    G1 = G2 * hn
    for name, M in (("H", H), ("G1", G1), ("G2", G2)):
        bad = ~np.isfinite(M)
        if bad.any():
            k, g = np.argwhere(bad)[0]
            raise FloatingPointError(f"non-finite {name} entry at source {k}, quadrature point {g}")
    return InfluenceMatrices(H, G1, G2)


def _block_system(HPhi, G1Phi, G2Phi, Psi, bc: BoundaryConditionSpec):
    K = Psi.shape[0]
    if HPhi.shape != (K, K) or G1Phi.shape != (K, K) or G2Phi.shape != (K, K):
        raise ValueError("influence products must be K x K")
    if bc.dirichlet.shape != (K,):
        raise ValueError(f"boundary conditions cover {bc.dirichlet.shape[0]} sources, expected {K}")
    A = FREE_TERM_BOUNDARY * Psi + HPhi - G1Phi
    B = G2Phi
    I = np.eye(K)
    Z = np.zeros((K, K))
    C1 = np.diag(bc.dirichlet.astype(float))
    C2 = np.diag((~bc.dirichlet).astype(float))
    system = np.block([[A, -B, Z, Z], [Psi, Z, -I, Z], [Z, Psi, Z, -I], [Z, Z, C1, C2]])
    rhs = np.concatenate([np.zeros(3 * K), bc.values])
    return system, rhs


def assemble_system(inf: InfluenceMatrices, bm: BasisMatrices, bc: BoundaryConditionSpec):
    K = bm.Psi.shape[0]
    if inf.H.shape[0] != K or inf.H.shape[1] != bm.Phi.shape[0] or bm.Phi.shape[1] != K:
        raise ValueError(
            f"dimension mismatch: H {inf.H.shape}, Phi {bm.Phi.shape}, Psi {bm.Psi.shape}"
        )
    return _block_system(inf.H @ bm.Phi, inf.G1 @ bm.Phi, inf.G2 @ bm.Phi, bm.Psi, bc)


def solve_dense(system, rhs) -> BemSolution:
    """LU with partial pivoting plus one step of iterative refinement."""
    system = np.asarray(system, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = system.shape[0]
    if system.shape != (n, n) or rhs.shape != (n,):
        raise ValueError("system must be square and match the right-hand side")
    lu, piv = sla.lu_factor(system)
    rcond, _ = sla.lapack.dgecon(lu, np.linalg.norm(system, 1), norm="1")
    cond = 1.0 / rcond if rcond > 0 else np.inf
    if np.abs(np.diag(lu)).min() == 0.0 or not np.all(np.isfinite(lu)):
        raise IllConditionedError("block system is singular to working precision", cond)
    if rcond < np.finfo(float).eps:
        warnings.warn(f"block system is badly conditioned (condition estimate {cond:.3e})")
    x = sla.lu_solve((lu, piv), rhs)
    res0 = rhs - system @ x
    x1 = x + sla.lu_solve((lu, piv), res0)
    res1 = rhs - system @ x1
    diverged = np.linalg.norm(res1, np.inf) > np.linalg.norm(res0, np.inf)
    if diverged:
        warnings.warn("iterative refinement increased the residual; keeping the unrefined solution")
    else:
        x = x1
    K = n // 4
    return BemSolution(
        alpha=x[:K], beta=x[K : 2 * K], u=x[2 * K : 3 * K], v=x[3 * K :],
        condition_estimate=cond, refinement_diverged=bool(diverged),
    )


def check_interior(points, mesh: BoundaryMesh):
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    poly = mesh.polyline()
    w = winding_number(pts, poly)
    seg_a, seg_b = poly[:-1], poly[1:]
    d = seg_b - seg_a
    rel = pts[:, None, :] - seg_a[None, :, :]
    lam = np.clip(np.einsum("pki,ki->pk", rel, d) / np.einsum("ki,ki->k", d, d), 0.0, 1.0)
    dist = np.linalg.norm(rel - lam[..., None] * d[None], axis=-1).min(axis=1)
    bad = (np.abs(w - 1.0) > 1e-6) | (dist < BOUNDARY_CLEARANCE)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise ValueError(f"point {k} at {pts[k]} is not strictly inside the domain")
    return pts


def interior_potential(sol: BemSolution, inf_at_p: InfluenceMatrices, bm: BasisMatrices):
    """u(p) = -H_p Phi alpha + G1_p Phi alpha + G2_p Phi beta  (c(p) = 1)."""
    ua = bm.Phi @ sol.alpha
    vb = bm.Phi @ sol.beta
    return -inf_at_p.H @ ua + inf_at_p.G1 @ ua + inf_at_p.G2 @ vb


def flux_error(sol: BemSolution, exact_v) -> float:
    """Mean absolute flux error at the sources."""
    return float(np.mean(np.abs(sol.v - np.asarray(exact_v))))


def interior_error(u_numeric, exact_u) -> float:
    return float(np.mean(np.abs(np.asarray(u_numeric) - np.asarray(exact_u))))


@dataclass
class BemProblem:
    """A discretized boundary with sources, quadrature, basis and kernels wired
    together; ``solve`` only needs boundary data."""

    mesh: BoundaryMesh
    sources: SourceSet
    gq: GlobalQuadrature
    basis: BasisMatrices
    pde: PdeCoefficients
    influence: InfluenceMatrices

    @classmethod
    def build(cls, mesh, basis: str | BasisKind, n: int, s: float, pde=None, eps2=None):
        pde = pde or PdeCoefficients()
        gq = global_quadrature(mesh, gauss_legendre(n))
        sources = place_sources(mesh, s)
        kind = basis if isinstance(basis, BasisKind) else BasisKind.for_sources(basis, len(sources), eps2)
        bm = build_matrices(kind, sources, gq)
        inf = assemble_influence(sources, gq, pde)
        return cls(mesh, sources, gq, bm, pde, inf)

    def solve(self, bc: BoundaryConditionSpec) -> BemSolution:
        return solve_dense(*assemble_system(self.influence, self.basis, bc))

    def potential(self, sol: BemSolution, points):
        pts = check_interior(points, self.mesh)
        return interior_potential(sol, assemble_influence(pts, self.gq, self.pde), self.basis)


# element integrals by the graded reference integrator (oracle path)

def reference_products(mesh: BoundaryMesh, sources: SourceSet, points, pde: PdeCoefficients):
    """H Phi, G1 Phi, G2 Phi for the linear element basis with every element
    integral evaluated by the graded-mesh reference integrator instead of the
    solver's Gauss rule. ``points`` are the collocation points; those that are
    sources are matched to their host element for the singular split."""
    from .singular_opt import reference_singular_integral

    check_fundamental(pde)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    K = len(sources)
    P = len(pts)
    HPhi, G1Phi, G2Phi = np.zeros((P, K)), np.zeros((P, K)), np.zeros((P, K))
    s = sources.s
    t_probe = np.linspace(-1.0, 1.0, 401)
    for k, p in enumerate(pts):
        on_src = np.flatnonzero(np.all(sources.points == p, axis=1))
        host = int(sources.element[on_src[0]]) if on_src.size else -1
        for j, e in enumerate(mesh.elements):
            if j == host:
                split = float(sources.local_t[on_src[0]])
                rfun = lambda split, dt, e=e: e.displacement(split, dt)  # noqa: E731
            else:
                d = np.linalg.norm(e.point(t_probe) - p, axis=-1)
                split = float(np.clip(t_probe[np.argmin(d)], -1 + 1e-9, 1 - 1e-9))
                rfun = lambda split, dt, e=e, p=p: e.point(np.clip(split + dt, -1, 1)) - p  # noqa: E731

            def integrand(dt, e=e, rfun=rfun, split=split):
                t = np.clip(split + dt, -1.0, 1.0)
                r = rfun(split, dt)
                n = e.normal(t)
                jac = e.jacobian(t)
                u = fundamental_u(pde, r) * jac
                v = fundamental_v(pde, r, n) * jac
                hn = pde.h[0] * n[:, 0] + pde.h[1] * n[:, 1]
                phi1 = -(t - s) / (2 * s)
                phi2 = (t + s) / (2 * s)
                return np.stack([v * phi1, v * phi2, u * hn * phi1, u * hn * phi2, u * phi1, u * phi2], axis=1)

            vals = reference_singular_integral(integrand, split, offsets=True)
            cols = [2 * j, 2 * j + 1]
            HPhi[k, cols] = vals[0:2]
            G1Phi[k, cols] = vals[2:4]
            G2Phi[k, cols] = vals[4:6]
    return HPhi, G1Phi, G2Phi


def solve_reference(mesh, sources, pde, bc, interior):
    """Linear-element BEM with reference element integrals; returns the
    solution and the potential at the interior points."""
    HPhi, G1Phi, G2Phi = reference_products(mesh, sources, sources.points, pde)
    Psi = np.eye(len(sources))
    sol = solve_dense(*_block_system(HPhi, G1Phi, G2Phi, Psi, bc))
    pts = check_interior(interior, mesh)
    Hi, G1i, G2i = reference_products(mesh, sources, pts, pde)
    u = -Hi @ sol.alpha + G1i @ sol.alpha + G2i @ sol.beta
    return sol, u

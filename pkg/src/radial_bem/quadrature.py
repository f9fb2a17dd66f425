"""Gauss-Legendre rules and the concatenated boundary quadrature."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_NODES = 64
_NEWTON_MAXITER = 100


@dataclass(frozen=True)
class QuadratureRule:
    n: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f, a: float = -1.0, b: float = 1.0) -> float:
        x = 0.5 * (a + b) + 0.5 * (b - a) * self.nodes
        return 0.5 * (b - a) * float(np.dot(f(x), self.weights))


def _legendre(n, x):
    """P_n(x) and P_n'(x) by the three-term recurrence."""
    p0, p1 = np.ones_like(x), x.copy()
    if n == 0:
        return p0, np.zeros_like(x)
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [-1, 1].

    Roots of P_n are polished by Newton's method from Chebyshev-type
    starting values; weights are 2 / ((1 - t^2) P_n'(t)^2).
    """
    if not 1 <= n <= MAX_NODES:
        raise ValueError(f"n={n} outside supported range 1..{MAX_NODES}")
    k = np.arange(1, n + 1)
    x = -np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(_NEWTON_MAXITER):
        p, dp = _legendre(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    else:
        if np.max(np.abs(dx)) > 1e-14:
            raise RuntimeError(f"Newton iteration for Legendre roots (n={n}) did not converge")
    _, dp = _legendre(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(n=n, nodes=x, weights=w)


@dataclass(frozen=True)
class GlobalQuadrature:
    """Quadrature points, weights and unit normals for the whole boundary,
    stored element by element (n consecutive entries per element)."""

    points: np.ndarray  # (nN, 2)
    weights: np.ndarray  # (nN,)
    normals: np.ndarray  # (nN, 2)
    element_of: np.ndarray  # (nN,)
    local_t: np.ndarray  # (nN,) local coordinate of each point on its element
    rule: QuadratureRule

    def __len__(self):
        return len(self.weights)


def global_quadrature(mesh, rule: QuadratureRule) -> GlobalQuadrature:
    if mesh.n_elements == 0:
        raise ValueError("mesh has no elements")
    t = rule.nodes
    pts, wts, nrm = [], [], []
    for e in mesh.elements:
        pts.append(e.point(t))
        if e.is_straight:
            wts.append(0.5 * e.length * rule.weights)
        else:
            wts.append(e.jacobian(t) * rule.weights)
        nrm.append(e.normal(t))
    N = mesh.n_elements
    return GlobalQuadrature(
        points=np.concatenate(pts),
        weights=np.concatenate(wts),
        normals=np.concatenate(nrm),
        element_of=np.repeat(np.arange(N), rule.n),
        local_t=np.tile(np.asarray(t), N),
        rule=rule,
    )


def integrate_boundary(values, gq: GlobalQuadrature) -> float:
    values = np.asarray(values, dtype=float)
    if len(gq) == 0:
        raise ValueError("empty quadrature")
    if values.shape != gq.weights.shape:
        raise ValueError(f"expected {len(gq)} values, got {values.shape}")
    return float(values @ gq.weights)

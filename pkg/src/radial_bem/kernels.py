"""Fundamental solutions of  lap(u) + h.grad(u) + lam*u = 0  in the plane.

The boundary integral equation needs the solution of the *adjoint* problem

    lap(u*) - h.grad(u*) + lam*u* = -delta,

written here as a function of r = q - p. Substituting
u* = exp(h.r/2) w(r) removes the first-order term and leaves
lap(w) - mu^2 w = -delta with mu^2 = |h|^2/4 - lam, so
w = K0(mu |r|) / (2 pi). The sign of the exponent is checked numerically by
:func:`verify_fundamental` rather than taken on trust.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

TWO_PI = 2.0 * np.pi
EULER_GAMMA = 0.5772156649015329
RESIDUAL_TOL = 1e-4


def bessel_k0(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("K0 is only defined for x > 0")
    return special.k0(x)


def bessel_k1(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("K1 is only defined for x > 0")
    return special.k1(x)


@dataclass(frozen=True)
class PdeCoefficients:
    h: tuple = (0.0, 0.0)
    lam: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "h", (float(self.h[0]), float(self.h[1])))
        object.__setattr__(self, "lam", float(self.lam))
        if not self.is_laplace and self.mu2 <= 0:
            raise ValueError(
                f"|h|^2/4 - lambda = {self.mu2:.6g} <= 0: oscillatory regime is not supported"
            )

    @classmethod
    def laplace(cls):
        return cls()

    @property
    def is_laplace(self) -> bool:
        return self.h == (0.0, 0.0) and self.lam == 0.0

    @property
    def has_advection(self) -> bool:
        return self.h != (0.0, 0.0)

    @property
    def mu2(self) -> float:
        return 0.25 * (self.h[0] ** 2 + self.h[1] ** 2) - self.lam

    @property
    def mu(self) -> float:
        return float(np.sqrt(self.mu2))


def _split(r):
    r = np.asarray(r, dtype=float)
    rho = np.hypot(r[..., 0], r[..., 1])
    if np.any(rho == 0):
        raise ValueError("fundamental solution evaluated at its singularity r = 0")
    return r, rho


def fundamental_u(pde: PdeCoefficients, r):
    r, rho = _split(r)
    if pde.is_laplace:
        return -np.log(rho) / TWO_PI
    drift = 0.5 * (pde.h[0] * r[..., 0] + pde.h[1] * r[..., 1])
    return np.exp(drift) * bessel_k0(pde.mu * rho) / TWO_PI


def fundamental_v(pde: PdeCoefficients, r, normal):
    """Derivative of u* along ``normal`` with respect to the field point q."""
    r, rho = _split(r)
    n = np.asarray(normal, dtype=float)
    rn = r[..., 0] * n[..., 0] + r[..., 1] * n[..., 1]
    if pde.is_laplace:
        return -rn / (TWO_PI * rho**2)
    mu = pde.mu
    hn = pde.h[0] * n[..., 0] + pde.h[1] * n[..., 1]
    drift = 0.5 * (pde.h[0] * r[..., 0] + pde.h[1] * r[..., 1])
    x = mu * rho
    return np.exp(drift) / TWO_PI * (0.5 * hn * bessel_k0(x) - mu * bessel_k1(x) * rn / rho)


def _sample_points(count=50, seed=0):
    rng = np.random.default_rng(seed)
    rho = rng.uniform(0.3, 1.5, count)
    ang = rng.uniform(0.0, TWO_PI, count)
    return np.column_stack([rho * np.cos(ang), rho * np.sin(ang)])


def verify_fundamental(pde: PdeCoefficients, u=None, step: float = 1e-4) -> float:
    """Max |lap(u*) - h.grad(u*) + lam u*| over 50 points with 0.3 < |r| < 1.5,
    by 5-point finite differences. ``u`` overrides the kernel under test."""
    if u is None:
        u = lambda r: fundamental_u(pde, r)  # noqa: E731
    pts = _sample_points()
    ex, ey = np.array([step, 0.0]), np.array([0.0, step])
    c = u(pts)
    xp, xm, yp, ym = u(pts + ex), u(pts - ex), u(pts + ey), u(pts - ey)
    lap = (xp + xm + yp + ym - 4.0 * c) / step**2
    gx, gy = (xp - xm) / (2 * step), (yp - ym) / (2 * step)
    res = lap - (pde.h[0] * gx + pde.h[1] * gy) + pde.lam * c
    return float(np.max(np.abs(res)))


@lru_cache(maxsize=64)
def check_fundamental(pde: PdeCoefficients) -> float:
    """verify_fundamental with the acceptance threshold applied; cached per pde."""
    res = verify_fundamental(pde)
    if res >= RESIDUAL_TOL:
        raise RuntimeError(f"fundamental solution fails the adjoint PDE check (residual {res:.3e})")
    return res

"""Quadrature error of Gauss-Legendre rules on log-singular integrands and the
choice of source offsets where that error vanishes.

For a source at local coordinate s, the rule's error on
``int_{-1}^{1} ln|t-s| |t-s|^i dt`` is a function of s only. Its zeros are
the offsets where a plain rule integrates the singular kernel exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .quadrature import QuadratureRule, gauss_legendre

# Offsets read off the error curves for the two rules used in practice.
PUBLISHED_OFFSETS = {8: 0.58, 16: 0.43}

ZERO_GRID = 2000
ZERO_XTOL = 1e-13
NODE_CLEARANCE = 1e-13


@dataclass(frozen=True)
class ErrorProfile:
    n: int
    s: np.ndarray
    err0: np.ndarray
    err1: np.ndarray
    err2: np.ndarray
    zeros_of_err0: tuple


@dataclass(frozen=True)
class OffsetChoice:
    n: int
    s_opt: float
    provenance: str  # "table" or "computed"


def _xlogx_moment(a: float, i: int) -> float:
    """int_0^a x^i ln x dx for a >= 0."""
    if a == 0.0:
        return 0.0
    k = i + 1
    return a**k / k * (np.log(a) - 1.0 / k)


def exact_log_moment(s: float, i: int) -> float:
    """Closed form of int_{-1}^{1} ln|t-s| |t-s|^i dt."""
    if not -1.0 < s < 1.0:
        raise ValueError(f"s={s} must lie strictly inside (-1, 1)")
    if i < 0:
        raise ValueError("moment order must be non-negative")
    return _xlogx_moment(1.0 - s, i) + _xlogx_moment(1.0 + s, i)


def quad_log_moment(s: float, i: int, rule: QuadratureRule) -> float:
    d = np.abs(rule.nodes - s)
    if d.min() < NODE_CLEARANCE:
        raise ValueError(f"s={s} coincides with a quadrature node")
    return float(np.sum(np.log(d) * d**i * rule.weights))


def signed_err0(s: float, rule: QuadratureRule) -> float:
    return exact_log_moment(s, 0) - quad_log_moment(s, 0, rule)


def err_i(s: float, i: int, rule: QuadratureRule) -> float:
    return abs(exact_log_moment(s, i) - quad_log_moment(s, i, rule))


def error_profile(rule: QuadratureRule, samples: int = 500) -> ErrorProfile:
    s = np.linspace(0.0, 1.0, samples + 2)[1:-1]
    s = s[np.min(np.abs(s[:, None] - rule.nodes[None, :]), axis=1) >= NODE_CLEARANCE]
    errs = [np.array([err_i(x, i, rule) for x in s]) for i in range(3)]
    return ErrorProfile(rule.n, s, *errs, zeros_of_err0=tuple(find_err0_zeros(rule)))


def find_err0_zeros(rule: QuadratureRule) -> list:
    """All sign changes of the signed order-0 error on (0, 1), refined by Brent's method."""
    if rule.n < 4:
        raise ValueError("zero search needs a rule with at least 4 nodes")
    grid = np.linspace(0.0, 1.0, ZERO_GRID + 2)[1:-1]
    near_node = np.min(np.abs(grid[:, None] - rule.nodes[None, :]), axis=1) < NODE_CLEARANCE
    grid = grid[~near_node]
    vals = np.array([signed_err0(x, rule) for x in grid])
    zeros = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            zeros.append(float(a))
        elif np.sign(fa) != np.sign(fb):
            # e(s) -> +inf at every node, so no bracket can straddle one
            zeros.append(brentq(signed_err0, a, b, args=(rule,), xtol=ZERO_XTOL))
    return zeros


def optimal_offset(n: int) -> OffsetChoice:
    if n < 4:
        raise ValueError(f"n={n}: need at least 4 quadrature nodes")
    if n in PUBLISHED_OFFSETS:
        return OffsetChoice(n, PUBLISHED_OFFSETS[n], "table")
    zeros = np.array(find_err0_zeros(gauss_legendre(n)))
    if zeros.size == 0:
        raise RuntimeError(f"no zero of the order-0 error found for n={n}")
    return OffsetChoice(n, float(zeros[np.argmin(np.abs(zeros - 0.5))]), "computed")


# graded-mesh reference integrator (test oracle, not used by the solver)

GRADING_RATIO = 0.15
GRADING_LEVELS = 30
PANEL_NODES = 24
_CONVERGENCE_TOL = 1e-9


def _graded_side(kernel, s: float, end: float, levels: int, rule: QuadratureRule, offsets: bool):
    """Integrate over the segment from s to end with panels shrinking
    geometrically toward s. Panels are laid out in dt = t - s."""
    L = end - s
    breaks = L * GRADING_RATIO ** np.arange(levels + 1)
    breaks = np.append(breaks, 0.0)
    a, b = breaks[1:], breaks[:-1]  # panel k spans [a_k, b_k] (reversed if L < 0)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    dt = mid[:, None] + half[:, None] * rule.nodes[None, :]
    w = half[:, None] * rule.weights[None, :]
    if offsets:
        arg = dt
    else:
        arg = s + dt
        # panels below the resolution of t around s cannot be sampled
        keep = np.all(arg != s, axis=1)
        arg, w = arg[keep], w[keep]
    vals = np.asarray(kernel(arg.ravel()), dtype=float)
    vals = vals.reshape(arg.shape + vals.shape[1:])
    return np.tensordot(w, vals, axes=([0, 1], [0, 1]))


def _graded(kernel, s, levels, rule, offsets):
    right = _graded_side(kernel, s, 1.0, levels, rule, offsets)
    left = _graded_side(kernel, s, -1.0, levels, rule, offsets)
    return right - left


def reference_singular_integral(kernel, s: float, levels: int = GRADING_LEVELS, offsets: bool = False):
    """int_{-1}^{1} kernel(t) dt for kernels with at worst a log singularity at s.

    With ``offsets=True`` the kernel is called with dt = t - s instead of t,
    which keeps the innermost panels resolvable. The kernel is vectorized and
    may return extra trailing axes, in which case the result is an array.
    Raises if one extra grading level moves the result by more than 1e-9.
    """
    if not -1.0 < s < 1.0:
        raise ValueError(f"s={s} must lie strictly inside (-1, 1)")
    rule = gauss_legendre(PANEL_NODES)
    coarse = _graded(kernel, s, levels, rule, offsets)
    fine = _graded(kernel, s, levels + 1, rule, offsets)
    change = np.max(np.abs(fine - coarse))
    if not change <= _CONVERGENCE_TOL:
        raise RuntimeError(f"graded integration not converged (change {change:.3e})")
    return float(fine) if np.ndim(fine) == 0 else fine

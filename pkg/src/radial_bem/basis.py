"""Boundary basis functions and their evaluation matrices.

Two families are supported: radial functions centred at the source points
(phi_k(q) = phi(|q - p_k|)), and the discontinuous piecewise-linear element
basis whose two functions on each element are cardinal at t = -s and t = +s.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

SMOOTH_KINDS = ("gaussian", "mq", "imq", "iq")
RADIAL_KINDS = SMOOTH_KINDS + ("tps", "phs", "c0", "c2")
ALL_KINDS = RADIAL_KINDS + ("linear",)

CONDITION_LIMIT = 1e16


class IllConditionedError(np.linalg.LinAlgError):
    def __init__(self, msg, condition=np.inf):
        super().__init__(f"{msg} (condition estimate {condition:.3e})")
        self.condition = condition


@dataclass(frozen=True)
class BasisKind:
    tag: str
    eps2: Optional[float] = None
    exponent: int = 1

    def __post_init__(self):
        if self.tag not in ALL_KINDS:
            raise ValueError(f"unknown basis {self.tag!r}; choose from {ALL_KINDS}")
        if self.tag in SMOOTH_KINDS and not (self.eps2 and self.eps2 > 0):
            raise ValueError(f"{self.tag} needs a positive shape parameter eps2")
        if self.exponent < 1:
            raise ValueError("TPS/PHS exponent must be >= 1")

    @property
    def is_radial(self) -> bool:
        return self.tag != "linear"

    @classmethod
    def for_sources(cls, tag: str, K: int, eps2: Optional[float] = None):
        """Basis with eps2 defaulted from the source count for smooth kinds."""
        if tag in SMOOTH_KINDS and eps2 is None:
            eps2 = default_shape_parameter(K)
        return cls(tag, eps2 if tag in SMOOTH_KINDS else None)


def default_shape_parameter(K: int) -> float:
    """eps^2 = K^2 / 1000."""
    if K < 2:
        raise ValueError(f"K={K}: need at least two sources")
    return K * K / 1000.0


def rbf_value(kind: BasisKind, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("distance must be non-negative")
    tag, e2 = kind.tag, kind.eps2
    if tag == "gaussian":
        return np.exp(-e2 * r * r)
    if tag == "mq":
        return np.sqrt(1.0 + e2 * r * r)
    if tag == "imq":
        return 1.0 / np.sqrt(1.0 + e2 * r * r)
    if tag == "iq":
        return 1.0 / (1.0 + e2 * r * r)
    if tag == "tps":
        m = 2 * kind.exponent
        with np.errstate(divide="ignore", invalid="ignore"):
            out = r**m * np.log(r)
        return np.where(r > 0, out, 0.0)
    if tag == "phs":
        return r ** (2 * kind.exponent + 1)
    if tag == "c0":
        return np.clip(1.0 - r, 0.0, None) ** 2
    if tag == "c2":
        return np.clip(1.0 - r, 0.0, None) ** 4 * (1.0 + 4.0 * r)
    raise ValueError(f"{tag!r} is not a radial kind")


@dataclass(frozen=True)
class SourceSet:
    """K = 2N boundary source points, two per element at t = -s and t = +s."""

    points: np.ndarray  # (K, 2)
    element: np.ndarray  # (K,) host element index
    local_t: np.ndarray  # (K,)
    normals: np.ndarray  # (K, 2)
    s: float

    def __len__(self):
        return len(self.points)


def place_sources(mesh, s: float) -> SourceSet:
    if not -1.0 < s < 1.0 or s == 0.0:
        raise ValueError(f"offset s={s} must be in (-1, 1) and nonzero")
    t = np.array([-s, s])
    pts = np.concatenate([e.point(t) for e in mesh.elements])
    nrm = np.concatenate([e.normal(t) for e in mesh.elements])
    N = mesh.n_elements
    return SourceSet(
        points=pts,
        element=np.repeat(np.arange(N), 2),
        local_t=np.tile(t, N),
        normals=nrm,
        s=float(s),
    )


def linear_basis_value(k: int, t, s: float):
    """Local linear basis on one element: k=1 is cardinal at -s, k=2 at +s."""
    t = np.asarray(t, dtype=float)
    if k == 1:
        return -(t - s) / (2.0 * s)
    if k == 2:
        return (t + s) / (2.0 * s)
    raise ValueError("local index must be 1 or 2")


def _linear_matrix(element_of, t, sources: SourceSet):
    """Rows: evaluation points on their host elements; columns: sources."""
    K = len(sources)
    M = np.zeros((len(t), K))
    rows = np.arange(len(t))
    M[rows, 2 * element_of] = linear_basis_value(1, t, sources.s)
    M[rows, 2 * element_of + 1] = linear_basis_value(2, t, sources.s)
    return M


def evaluate(kind: BasisKind, sources: SourceSet, points, element_of=None, local_t=None):
    """phi_k at arbitrary boundary points. The linear basis needs each point's
    host element and local coordinate."""
    if kind.is_radial:
        pts = np.asarray(points, dtype=float)
        d = np.linalg.norm(pts[:, None, :] - sources.points[None, :, :], axis=-1)
        return rbf_value(kind, d)
    if element_of is None or local_t is None:
        raise ValueError("linear basis needs element indices and local coordinates")
    return _linear_matrix(np.asarray(element_of), np.asarray(local_t, dtype=float), sources)


@dataclass(frozen=True)
class BasisMatrices:
    kind: BasisKind
    Phi: np.ndarray  # (nN, K) basis at quadrature points
    Psi: np.ndarray  # (K, K) basis at source points


def build_matrices(kind: BasisKind, sources: SourceSet, gq) -> BasisMatrices:
    Phi = evaluate(kind, sources, gq.points, gq.element_of, gq.local_t)
    Psi = evaluate(kind, sources, sources.points, sources.element, sources.local_t)
    return BasisMatrices(kind, Phi, Psi)


def rbf_interpolate(kind: BasisKind, centers, values):
    """Coefficients gamma of the interpolant sum_k gamma_k phi(|x - x_k|)."""
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    b = np.asarray(values, dtype=float)
    if len(b) != len(centers):
        raise ValueError("one value per center required")
    d = np.linalg.norm(centers[:, None, :] - centers[None, :, :], axis=-1)
    A = rbf_value(kind, d)
    return _guarded_solve(A, b)


def _guarded_solve(A, b):
    lu, piv = sla.lu_factor(A, check_finite=True)
    pivots = np.abs(np.diag(lu))
    anorm = np.linalg.norm(A, 1)
    if pivots.min() < 1e-300:
        raise IllConditionedError("interpolation matrix is singular", np.inf)
    rcond, _ = sla.lapack.dgecon(lu, anorm, norm="1")
    cond = 1.0 / rcond if rcond > 0 else np.inf
    if cond > CONDITION_LIMIT:
        raise IllConditionedError("interpolation matrix is ill-conditioned", cond)
    return sla.lu_solve((lu, piv), b)

"""Discretized closed boundaries: straight-sided square and curved flower domain.

Every element is parametrized over t in [-1, 1] with t = -1 at its first
vertex and t = +1 at its second. Meshes are traversed anticlockwise so that
the normal (tangent.y, -tangent.x) points out of the domain.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .quadrature import gauss_legendre

# Node count used to measure curved elements; matches the solver's default rule.
ARC_LENGTH_NODES = 16


@dataclass(frozen=True)
class FlowerCurve:
    """Star-shaped curve r(theta) = 1 + amplitude * cos(lobes * theta)."""

    amplitude: float = 0.25
    lobes: int = 4

    def radius(self, theta):
        return 1.0 + self.amplitude * np.cos(self.lobes * theta)

    def dradius(self, theta):
        return -self.amplitude * self.lobes * np.sin(self.lobes * theta)

    def point(self, theta):
        theta = np.asarray(theta, dtype=float)
        r = self.radius(theta)
        return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)

    def dpoint(self, theta):
        """dq/dtheta."""
        theta = np.asarray(theta, dtype=float)
        r, dr = self.radius(theta), self.dradius(theta)
        c, s = np.cos(theta), np.sin(theta)
        return np.stack([dr * c - r * s, dr * s + r * c], axis=-1)


@dataclass(frozen=True)
class Element:
    """One boundary element. ``curve`` is None for straight elements."""

    index: int
    start: tuple
    end: tuple
    length: float
    curve: Optional[FlowerCurve] = None
    theta_start: float = 0.0
    theta_end: float = 0.0

    @property
    def is_straight(self) -> bool:
        return self.curve is None

    def theta(self, t):
        mid = 0.5 * (self.theta_start + self.theta_end)
        half = 0.5 * (self.theta_end - self.theta_start)
        return mid + half * np.asarray(t, dtype=float)

    def point(self, t):
        t = _check_t(t)
        if self.is_straight:
            a, b = np.asarray(self.start), np.asarray(self.end)
            return 0.5 * (a + b) + 0.5 * (b - a) * t[..., None]
        return self.curve.point(self.theta(t))

    def displacement(self, s, dt):
        """q(s + dt) - q(s), accurate even when dt is far below the spacing of
        floating-point numbers near s."""
        dt = np.asarray(dt, dtype=float)
        if self.is_straight:
            d = 0.5 * (np.asarray(self.end) - np.asarray(self.start))
            return dt[..., None] * d
        th0 = self.theta(s)
        dth = 0.5 * (self.theta_end - self.theta_start) * dt
        th1 = th0 + dth
        c = self.curve
        half_sum, half_diff = th0 + 0.5 * dth, 0.5 * dth
        k = c.lobes
        r0 = c.radius(th0)
        dr = -2.0 * c.amplitude * np.sin(k * half_sum) * np.sin(k * half_diff)
        dcos = -2.0 * np.sin(half_sum) * np.sin(half_diff)
        dsin = 2.0 * np.cos(half_sum) * np.sin(half_diff)
        dx = dr * np.cos(th1) + r0 * dcos
        dy = dr * np.sin(th1) + r0 * dsin
        return np.stack([dx, dy], axis=-1)

    def tangent(self, t):
        """dq/dt (not normalized)."""
        t = _check_t(t)
        if self.is_straight:
            d = 0.5 * (np.asarray(self.end) - np.asarray(self.start))
            return np.broadcast_to(d, t.shape + (2,)).copy()
        half = 0.5 * (self.theta_end - self.theta_start)
        return half * self.curve.dpoint(self.theta(t))

    def jacobian(self, t):
        return np.linalg.norm(self.tangent(t), axis=-1)

    def normal(self, t):
        tan = self.tangent(t)
        norm = np.linalg.norm(tan, axis=-1)
        if np.any(norm == 0.0):
            raise ValueError(f"element {self.index} has a zero-length tangent")
        return np.stack([tan[..., 1], -tan[..., 0]], axis=-1) / norm[..., None]


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + 1e-14):
        raise ValueError("local coordinate t must lie in [-1, 1]")
    return t


@dataclass(frozen=True)
class BoundaryMesh:
    vertices: np.ndarray  # (N + 1, 2), last row repeats the first
    elements: tuple
    kind: str = "square"
    anticlockwise: bool = field(default=True)

    def __post_init__(self):
        self.vertices.setflags(write=False)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def signed_area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))

    def perimeter(self) -> float:
        return float(sum(e.length for e in self.elements))

    def polyline(self, per_element: int = 64) -> np.ndarray:
        """Closed polyline through the boundary, used for inside/outside tests."""
        t = np.linspace(-1.0, 1.0, per_element + 1)[:-1]
        pts = np.concatenate([e.point(t) for e in self.elements])
        return np.vstack([pts, pts[:1]])


def discretize_square(N: int, half_width: float = 1.0) -> BoundaryMesh:
    """Square [-a, a]^2 split into N equal straight elements, anticlockwise
    from the corner (-a, -a). N must be a multiple of 4 so corners are vertices."""
    if N < 4 or N % 4:
        raise ValueError(f"N={N}: the square needs a positive multiple of 4 elements")
    if half_width <= 0:
        raise ValueError("half_width must be positive")
    a = float(half_width)
    m = N // 4
    s = np.linspace(-a, a, m + 1)[:-1]
    bottom = np.column_stack([s, np.full(m, -a)])
    right = np.column_stack([np.full(m, a), s])
    top = np.column_stack([-s, np.full(m, a)])
    left = np.column_stack([np.full(m, -a), -s])
    vertices = np.vstack([bottom, right, top, left, [[-a, -a]]])
    elements = tuple(
        Element(
            index=j,
            start=tuple(vertices[j]),
            end=tuple(vertices[j + 1]),
            length=float(np.hypot(*(vertices[j + 1] - vertices[j]))),
        )
        for j in range(N)
    )
    return BoundaryMesh(vertices=vertices, elements=elements, kind="square")


def discretize_flower(N: int, amplitude: float = 0.25) -> BoundaryMesh:
    """Flower r = 1 + amplitude*cos(4 theta) cut into N curved elements of equal
    theta-width."""
    if N < 8:
        raise ValueError(f"N={N}: the flower needs at least 8 elements")
    curve = FlowerCurve(amplitude=amplitude)
    thetas = 2.0 * np.pi * np.arange(N + 1) / N
    vertices = curve.point(thetas)
    vertices[-1] = vertices[0]
    rule = gauss_legendre(ARC_LENGTH_NODES)
    elements = []
    for j in range(N):
        th0, th1 = float(thetas[j]), float(thetas[j + 1])
        speed = np.linalg.norm(curve.dpoint(0.5 * (th0 + th1) + 0.5 * (th1 - th0) * rule.nodes), axis=-1)
        length = 0.5 * (th1 - th0) * float(speed @ rule.weights)
        elements.append(
            Element(
                index=j,
                start=tuple(vertices[j]),
                end=tuple(vertices[j + 1]),
                length=length,
                curve=curve,
                theta_start=th0,
                theta_end=th1,
            )
        )
    return BoundaryMesh(vertices=vertices, elements=tuple(elements), kind="flower")


def element_point(e: Element, t):
    return e.point(t)


def outward_normal(e: Element, t):
    return e.normal(t)


def interior_points(sources, factor: float = 0.5) -> np.ndarray:
    """Scale points toward the origin; valid for domains star-shaped about it."""
    if not 0.0 < factor < 1.0:
        raise ValueError("factor must lie in (0, 1)")
    pts = np.asarray(sources, dtype=float).reshape(-1, 2)
    return factor * pts


def winding_number(points, polyline) -> np.ndarray:
    """Winding number of a closed polyline around each point."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    d = polyline[None, :, :] - pts[:, None, :]
    ang = np.arctan2(d[..., 1], d[..., 0])
    dang = np.diff(ang, axis=1)
    dang = (dang + np.pi) % (2.0 * np.pi) - np.pi
    return dang.sum(axis=1) / (2.0 * np.pi)

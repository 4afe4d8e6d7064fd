"""Right-trapezoid outlines and the plane maps used to glue diagrams.

All coordinates are diagram-local with the y axis pointing up and one unit
equal to one wire spacing. Maps act on numpy arrays of shape ``(..., 2)``;
:func:`apply` and :func:`apply_wire` are the scalar / wire conveniences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple, Union

import numpy as np


class GeometryError(ValueError):
    pass


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Trapezoid:
    """Outline with vertices ``(0,0), (w,0), (w,r), (0,l)``."""

    l: float
    r: float
    w: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.l, self.r, self.w)):
            raise GeometryError(f"non-finite trapezoid {self}")
        if self.l < 1 or self.r < 1:
            raise GeometryError(f"trapezoid sides must be >= 1, got l={self.l}, r={self.r}")
        if self.w <= 0:
            raise GeometryError(f"trapezoid width must be positive, got {self.w}")

    @property
    def slope(self) -> float:
        return (self.r - self.l) / self.w

    def top(self, x):
        """Height of the top edge above ``x`` (scalar or array)."""
        return (self.r - self.l) / self.w * x + self.l

    @property
    def vertices(self) -> Tuple[Point, Point, Point, Point]:
        return (Point(0.0, 0.0), Point(self.w, 0.0), Point(self.w, self.r), Point(0.0, self.l))

    def contains(self, xy: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        x, y = xy[..., 0], xy[..., 1]
        return (x >= -tol) & (x <= self.w + tol) & (y >= -tol) & (y <= self.top(x) + tol)


def top_edge_slope(trap: Trapezoid) -> float:
    return trap.slope


def seam_height(w1: float, w2: float, l1: float, r2: float) -> float:
    """Height at ``x = w1`` of the line from ``(0, l1)`` to ``(w1 + w2, r2)``.

    Pinching both inner corners of a sequential composite to this height
    keeps the composite's top edge straight.
    """
    if min(w1, w2, l1, r2) <= 0:
        raise GeometryError("seam_height arguments must be positive")
    return (w1 * r2 + w2 * l1) / (w1 + w2)


# -- plane maps ---------------------------------------------------------------


def _checked(out: np.ndarray) -> np.ndarray:
    if not np.isfinite(out).all():
        raise GeometryError("plane map produced a non-finite coordinate")
    return out


def _scale_y(out: np.ndarray, a: float, b: float, c: float, d: float) -> None:
    """``y *= (a*x + b) / (c*x + d)`` with two temporaries.

    The operations are the ones the ``ratio`` methods perform, in the same
    order, so results agree bit for bit.
    """
    x = out[..., 0]
    num = np.multiply(x, a)
    num += b
    den = np.multiply(x, c)
    den += d
    num /= den
    out[..., 1] *= num


def _run(m, xy) -> np.ndarray:
    out = np.array(xy, dtype=float)
    # overflow is reported as a GeometryError below rather than a warning
    with np.errstate(over="ignore", invalid="ignore"):
        m.inplace(out)
    return _checked(out)


@dataclass(frozen=True)
class PinchR:
    """Move the top-right corner of ``trap`` to height ``h``.

    Each vertical line is scaled by ``f_r(x) / f_o(x)``, where ``f_o`` is the
    current top edge and ``f_r`` the line from ``(0, l)`` to ``(w, h)``.
    """

    trap: Trapezoid
    h: float

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise GeometryError("pinch height must be positive")

    def ratio(self, x):
        t = self.trap
        return ((self.h - t.l) / t.w * x + t.l) / t.top(x)

    def inplace(self, out: np.ndarray) -> None:
        t = self.trap
        _scale_y(out, (self.h - t.l) / t.w, t.l, (t.r - t.l) / t.w, t.l)

    def __call__(self, xy: np.ndarray) -> np.ndarray:
        return _run(self, xy)


@dataclass(frozen=True)
class PinchL:
    """Move the top-left corner of ``trap`` to height ``h``; the right edge is fixed."""

    trap: Trapezoid
    h: float

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise GeometryError("pinch height must be positive")

    def ratio(self, x):
        t = self.trap
        return ((t.r - self.h) / t.w * x + self.h) / t.top(x)

    def inplace(self, out: np.ndarray) -> None:
        t = self.trap
        _scale_y(out, (t.r - self.h) / t.w, self.h, (t.r - t.l) / t.w, t.l)

    def __call__(self, xy: np.ndarray) -> np.ndarray:
        return _run(self, xy)


@dataclass(frozen=True)
class ScaleX:
    factor: float

    def __post_init__(self) -> None:
        if not self.factor > 0:
            raise GeometryError("scale factor must be positive")

    def inplace(self, out: np.ndarray) -> None:
        out[..., 0] *= self.factor

    def __call__(self, xy: np.ndarray) -> np.ndarray:
        return _run(self, xy)


@dataclass(frozen=True)
class ShearY:
    """``(x, y) -> (x, slope * x + y)``; a horizontal edge ends up with ``slope``."""

    slope: float

    def inplace(self, out: np.ndarray) -> None:
        out[..., 1] += self.slope * out[..., 0]

    def __call__(self, xy: np.ndarray) -> np.ndarray:
        return _run(self, xy)


@dataclass(frozen=True)
class Translate:
    dx: float
    dy: float

    def inplace(self, out: np.ndarray) -> None:
        out[..., 0] += self.dx
        out[..., 1] += self.dy

    def __call__(self, xy: np.ndarray) -> np.ndarray:
        return _run(self, xy)


PlaneMap = Union[PinchR, PinchL, ScaleX, ShearY, Translate]


def apply_all(maps: Sequence[PlaneMap], xy: np.ndarray) -> np.ndarray:
    """Apply ``maps`` left to right to a copy of ``xy``."""
    out = np.array(xy, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        for m in maps:
            m.inplace(out)
    return _checked(out)


def apply(m: PlaneMap, p: Tuple[float, float]) -> Point:
    x, y = m(np.array(p, dtype=float))
    return Point(float(x), float(y))


# -- wires --------------------------------------------------------------------

BOUNDARY_LEFT = "boundary-left"
BOUNDARY_RIGHT = "boundary-right"
NODE_PORT = "node-port"

Segment = Tuple[Point, Point, Point, Point]


@dataclass(frozen=True)
class Wire:
    """A chain of cubic Bézier segments drawn left to right."""

    segments: Tuple[Segment, ...]
    start_role: str
    end_role: str

    def __post_init__(self) -> None:
        if not self.segments:
            raise GeometryError("a wire needs at least one segment")

    @property
    def start(self) -> Point:
        return self.segments[0][0]

    @property
    def end(self) -> Point:
        return self.segments[-1][3]

    @classmethod
    def from_array(cls, ctrl: np.ndarray, start_role: str, end_role: str) -> Wire:
        segs = tuple(tuple(Point(float(x), float(y)) for x, y in seg) for seg in np.asarray(ctrl))
        return cls(segs, start_role, end_role)

    def to_array(self) -> np.ndarray:
        return np.array(self.segments, dtype=float).reshape(len(self.segments), 4, 2)


def apply_wire(m: PlaneMap, wire: Wire) -> Wire:
    """Map every control point; roles are kept."""
    return Wire.from_array(m(wire.to_array()), wire.start_role, wire.end_role)


def line_segment(p0: Sequence[float], p3: Sequence[float]) -> np.ndarray:
    """A straight segment as a cubic with control points at the thirds."""
    p0 = np.asarray(p0, dtype=float)
    p3 = np.asarray(p3, dtype=float)
    return np.stack([p0, p0 + (p3 - p0) / 3.0, p0 + 2.0 * (p3 - p0) / 3.0, p3])


def bezier_point(seg: np.ndarray, t: float) -> np.ndarray:
    seg = np.asarray(seg, dtype=float)
    s = 1.0 - t
    return s**3 * seg[0] + 3 * s * s * t * seg[1] + 3 * s * t * t * seg[2] + t**3 * seg[3]

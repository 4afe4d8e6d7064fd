"""Layout of typechecked terms as trapezoid-shaped string diagrams.

:func:`layout` folds over a term: generators become single-node leaves,
identities become bundles of straight wires, ``;`` glues two diagrams side by
side after pinching their shared corners to a common height, and ``*`` stacks
them after scaling both to the wider width and shearing the upper one onto the
lower one's top edge. Every intermediate result is a right trapezoid whose
left and right sides have the term's source and target arities.

Geometry is held in flat numpy arrays so a composition is a handful of
vectorised maps and concatenations. The BSP tree mirrors the term structure
and records, for every node, how many segments / node marks / splits its
subtree owns plus the maps that placed its children; absolute indices and
seam geometry in final coordinates are recovered by walking the tree.

:func:`layout_naive` is the squash-into-a-unit-square translation kept as a
comparison oracle. It is expected to misalign wires at sequential seams.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from .geometry import (
    BOUNDARY_LEFT,
    BOUNDARY_RIGHT,
    NODE_PORT,
    PinchL,
    PinchR,
    Point,
    ScaleX,
    ShearY,
    Translate,
    Trapezoid,
    Wire,
    line_segment,
    seam_height,
)
from .semantics import MonoidalAlgebra, fold
from .term import Gen, Signature, Term, ZeroArity

BOX_HALF = 0.25
HANDLE_FRACTION = 0.3
SEAM_SAMPLES = 10


class LayoutError(ValueError):
    pass


class BoundaryMismatch(LayoutError):
    pass


# -- BSP tree -----------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    """A leaf cell: one generator box or one identity bundle."""

    kind: str  # "gen" or "id"
    label: Optional[str]
    outline: Trapezoid
    n_segments: int
    n_nodes: int
    n_splits: int = field(default=0, init=False)


@dataclass(frozen=True, eq=False)
class SeqSplit:
    """Vertical cut at ``seam_x`` (coordinates of the composite it created).

    ``maps`` holds the plane maps that carried each child into this node's
    coordinates. ``joins`` pairs, for every wire crossing the cut, the left
    child's last segment with the right child's first segment, both indexed
    locally within the child.
    """

    seam_x: float
    left: "BspNode"
    right: "BspNode"
    outline: Trapezoid
    maps: Tuple[tuple, tuple]
    joins: Tuple[np.ndarray, np.ndarray]
    n_connectors: int = 0
    n_segments: int = field(init=False)
    n_nodes: int = field(init=False)
    n_splits: int = field(init=False)

    def __post_init__(self) -> None:
        _sum_counts(self, self.left, self.right, self.n_connectors)

    @property
    def children(self) -> Tuple["BspNode", "BspNode"]:
        return self.left, self.right


@dataclass(frozen=True, eq=False)
class TenSplit:
    """Cut along the line ``(0, seam[0]) -> (w, seam[1])``; ``top`` lies above it."""

    seam: Tuple[float, float]
    top: "BspNode"
    bottom: "BspNode"
    outline: Trapezoid
    maps: Tuple[tuple, tuple]
    n_connectors: int = field(default=0, init=False)
    n_segments: int = field(init=False)
    n_nodes: int = field(init=False)
    n_splits: int = field(init=False)

    def __post_init__(self) -> None:
        _sum_counts(self, self.top, self.bottom, 0)

    @property
    def children(self) -> Tuple["BspNode", "BspNode"]:
        return self.top, self.bottom


BspNode = Union[Region, SeqSplit, TenSplit]


def _sum_counts(node, a, b, extra) -> None:
    object.__setattr__(node, "n_segments", a.n_segments + b.n_segments + extra)
    object.__setattr__(node, "n_nodes", a.n_nodes + b.n_nodes)
    object.__setattr__(node, "n_splits", a.n_splits + b.n_splits + 1)


def _glued_edges(node: BspNode) -> Tuple[np.ndarray, np.ndarray]:
    """The two child edges a split glues together, each in its child's coordinates."""
    a, b = node.children
    oa, ob = a.outline, b.outline
    if isinstance(node, SeqSplit):
        return _edge(oa.w, 0.0, oa.w, oa.r), _edge(0.0, 0.0, 0.0, ob.l)
    return _edge(0.0, 0.0, oa.w, 0.0), _edge(0.0, ob.l, ob.w, ob.r)


def _run_maps(maps, xy: np.ndarray) -> np.ndarray:
    for m in maps:
        m.inplace(xy)
    return xy


def tree_seams(tree: BspNode) -> np.ndarray:
    """Both glued edges of every split, in ``tree``'s coordinates, post-order.

    Shape ``(K, 2, SEAM_SAMPLES, 2)``: ``[k, 0]`` is the left (or top)
    child's edge and ``[k, 1]`` the right (or bottom) child's.
    """
    # leaves are shared between subtrees, so results go on a value stack
    values: list[np.ndarray] = []
    stack = [(tree, False)]
    m = SEAM_SAMPLES
    while stack:
        node, ready = stack.pop()
        if isinstance(node, Region):
            values.append(np.zeros((0, 2), dtype=float))
            continue
        if not ready:
            a, b = node.children
            stack.append((node, True))
            stack.append((b, False))
            stack.append((a, False))
            continue
        vb, va = values.pop(), values.pop()
        ea, eb = _glued_edges(node)
        sa = _run_maps(node.maps[0], np.concatenate([va, ea]))
        sb = _run_maps(node.maps[1], np.concatenate([vb, eb]))
        values.append(np.concatenate([sa[:-m], sb[:-m], sa[-m:], sb[-m:]]))
    return values[0].reshape(-1, 2, SEAM_SAMPLES, 2)


@dataclass(frozen=True)
class NodeMark:
    anchor: Point
    label: str
    half_extent: Tuple[float, float] = (BOX_HALF, BOX_HALF)


# -- diagrams -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Diagram:
    """A laid-out term.

    All point data lives in one ``(P, 2)`` array ``pts`` so a plane map is
    applied once per composition: Bézier control points first (:attr:`ctrl`,
    four rows per segment) and then node anchors (:attr:`anchors`).

    ``seg_wire`` gives the wire of each segment; a wire's segments appear
    left to right. ``left_ports[i]`` is the first segment of the wire leaving
    the ``i``-th left boundary point counting from the top, ``right_ports[j]``
    the last segment of the wire reaching the ``j``-th right boundary point.

    Seam data is not carried through the fold. :attr:`joins` and
    :attr:`seams` rebuild it in final coordinates from the BSP tree.
    """

    outline: Trapezoid
    tree: BspNode
    pts: np.ndarray
    n_segments: int
    n_joins: int
    seg_wire: np.ndarray
    n_wires: int
    left_ports: np.ndarray
    right_ports: np.ndarray
    half_extents: np.ndarray  # (N, 2)
    labels: Tuple[str, ...]

    def __post_init__(self) -> None:
        for a in (self.pts, self.seg_wire, self.left_ports, self.right_ports, self.half_extents):
            a.flags.writeable = False

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_seams(self) -> int:
        return self.tree.n_splits

    @property
    def ctrl(self) -> np.ndarray:
        return self.pts[: 4 * self.n_segments].reshape(-1, 4, 2)

    @property
    def anchors(self) -> np.ndarray:
        return self.pts[4 * self.n_segments :]

    def _sections(self, pts: np.ndarray):
        """Split a mapped copy of ``pts`` the same way as ``self.pts``."""
        a = 4 * self.n_segments
        return pts[:a], pts[a:]

    @property
    def left_endpoints(self) -> np.ndarray:
        return self.pts[4 * self.left_ports]

    @property
    def right_endpoints(self) -> np.ndarray:
        return self.pts[4 * self.right_ports + 3]

    def join_rows(self) -> np.ndarray:
        """``(J, 2)`` rows of :attr:`pts`: the two wire ends glued at each sequential seam."""
        parts = []
        for node, s0, _, _ in self.walk():
            if isinstance(node, SeqSplit) and len(node.joins[0]):
                ends = 4 * (s0 + node.joins[0]) + 3
                starts = 4 * (s0 + node.left.n_segments + node.n_connectors + node.joins[1])
                parts.append(np.stack([ends, starts], axis=-1))
        return np.concatenate(parts) if parts else np.zeros((0, 2), dtype=np.int64)

    @property
    def joins(self) -> np.ndarray:
        """``(J, 2, 2)``: both glued wire ends at every sequential seam, final coordinates."""
        return self.pts[self.join_rows()]

    @cached_property
    def seams(self) -> np.ndarray:
        """Both glued edges of every split in final coordinates; see :func:`tree_seams`."""
        return tree_seams(self.tree)

    def seam_gaps(self) -> np.ndarray:
        """Distance between the two wire ends glued at every sequential seam."""
        j = self.joins
        return np.linalg.norm(j[:, 0] - j[:, 1], axis=-1) if len(j) else np.zeros(0)

    def wire_slices(self) -> Tuple[np.ndarray, list[slice]]:
        """Segment order grouped by wire, and each wire's slice into it."""
        order = np.argsort(self.seg_wire, kind="stable")
        counts = np.bincount(self.seg_wire, minlength=self.n_wires)
        bounds = np.concatenate([[0], np.cumsum(counts)]).tolist()
        return order, [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]

    def wire_roles(self) -> list[Tuple[str, str]]:
        starts = set(self.left_ports.tolist())
        ends = set(self.right_ports.tolist())
        order, slices = self.wire_slices()
        return [
            (
                BOUNDARY_LEFT if int(order[sl.start]) in starts else NODE_PORT,
                BOUNDARY_RIGHT if int(order[sl.stop - 1]) in ends else NODE_PORT,
            )
            for sl in slices
        ]

    @cached_property
    def wires(self) -> list[Wire]:
        order, slices = self.wire_slices()
        ctrl = self.ctrl
        return [
            Wire.from_array(ctrl[order[sl]], a, b) for sl, (a, b) in zip(slices, self.wire_roles())
        ]

    @property
    def nodes(self) -> list[NodeMark]:
        return [
            NodeMark(Point(float(a[0]), float(a[1])), label, (float(e[0]), float(e[1])))
            for a, label, e in zip(self.anchors, self.labels, self.half_extents)
        ]

    def polygon(self) -> np.ndarray:
        return np.array(self.outline.vertices, dtype=float)

    def walk(self) -> Iterator[Tuple[BspNode, int, int, int]]:
        """Pre-order ``(node, first_segment, first_node, seam_index)``.

        ``seam_index`` is the node's row in :attr:`seams` (``-1`` for regions).
        """
        stack = [(self.tree, 0, 0, 0)]
        while stack:
            node, s0, n0, k0 = stack.pop()
            yield node, s0, n0, (k0 + node.n_splits - 1 if node.n_splits else -1)
            if isinstance(node, Region):
                continue
            a, b = node.children
            stack.append((b, s0 + a.n_segments + node.n_connectors, n0 + a.n_nodes, k0 + a.n_splits))
            stack.append((a, s0, n0, k0))

    def regions(self) -> Iterator[Tuple[Region, slice, slice]]:
        for node, s0, n0, _ in self.walk():
            if isinstance(node, Region):
                yield node, slice(s0, s0 + node.n_segments), slice(n0, n0 + node.n_nodes)


class NaiveDiagram(Diagram):
    """Output of :func:`layout_naive`, drawn in the unit square.

    Outline sides do not track arities and seam joins need not coincide.
    """


def _empty(*shape) -> np.ndarray:
    return np.zeros((0,) + shape, dtype=float)


def _pack(cls, tree, ctrl, anchors, seg_wire, n_wires, left_ports, right_ports, half_extents, labels):
    """A single-region diagram (a leaf)."""
    ctrl = np.asarray(ctrl, dtype=float).reshape(-1, 4, 2)
    return cls(
        outline=tree.outline,
        tree=tree,
        pts=np.concatenate([ctrl.reshape(-1, 2), np.asarray(anchors, dtype=float).reshape(-1, 2)]),
        n_segments=len(ctrl),
        n_joins=0,
        seg_wire=np.asarray(seg_wire, dtype=np.int64),
        n_wires=n_wires,
        left_ports=np.asarray(left_ports, dtype=np.int64),
        right_ports=np.asarray(right_ports, dtype=np.int64),
        half_extents=np.asarray(half_extents, dtype=float).reshape(-1, 2),
        labels=tuple(labels),
    )


# -- leaves -------------------------------------------------------------------


def _ports(center: float, half: float, n: int) -> np.ndarray:
    return center + half - (np.arange(n) + 0.5) * (2.0 * half / n)


def _node_leaf(cls, outline, label, left_ys, right_ys, anchor, half) -> Diagram:
    """One box at ``anchor`` wired to boundary points at heights ``left_ys`` / ``right_ys``.

    Each wire runs boundary -> box edge as a Bézier with horizontal end
    tangents, then box edge -> anchor as a straight tail hidden by the box.
    """
    ax, ay = anchor
    hx, hy = half
    w = outline.w
    n_l, n_r = len(left_ys), len(right_ys)
    box_l, box_r = ax - hx, ax + hx
    segs = []
    grip_l = HANDLE_FRACTION * box_l
    for y0, yp in zip(left_ys, _ports(ay, hy, n_l)):
        segs.append([[0.0, y0], [grip_l, y0], [box_l - grip_l, yp], [box_l, yp]])
        segs.append(line_segment((box_l, yp), (ax, ay)))
    grip_r = HANDLE_FRACTION * (w - box_r)
    for y3, yp in zip(right_ys, _ports(ay, hy, n_r)):
        segs.append(line_segment((ax, ay), (box_r, yp)))
        segs.append([[box_r, yp], [box_r + grip_r, yp], [w - grip_r, y3], [w, y3]])
    return _pack(
        cls,
        Region("gen", label, outline, len(segs), 1),
        segs,
        [[ax, ay]],
        np.repeat(np.arange(n_l + n_r), 2),
        n_l + n_r,
        2 * np.arange(n_l),
        2 * (n_l + np.arange(n_r)) + 1,
        [[hx, hy]],
        (label,),
    )


def _id_leaf(cls, outline, ys) -> Diagram:
    n = len(ys)
    segs = [line_segment((0.0, y), (outline.w, y)) for y in ys]
    return _pack(cls, Region("id", None, outline, n, 0), segs, _empty(2), np.arange(n), n,
                 np.arange(n), np.arange(n), _empty(2), ())


def _boundary(n: int) -> np.ndarray:
    """Boundary heights ``n - 1/2, n - 3/2, ..., 1/2`` (top first)."""
    return n - (np.arange(n) + 0.5)


@lru_cache(maxsize=4096)
def _leaf(label: str, n_left: int, n_right: int, width: Optional[float] = None) -> Diagram:
    # the geometry only depends on the interface; share it between labels
    d = _leaf_shape(n_left, n_right, width)
    tree = replace(d.tree, label=label)
    return replace(d, tree=tree, labels=(label,))


@lru_cache(maxsize=1024)
def _leaf_shape(n_left: int, n_right: int, width: Optional[float]) -> Diagram:
    label = ""
    if n_left < 1 or n_right < 1:
        raise ZeroArity()
    w = float(max(n_left, n_right)) if width is None else float(width)
    if w <= 2 * BOX_HALF:
        raise LayoutError(f"leaf width {w} cannot hold a node box")
    outline = Trapezoid(n_left, n_right, w)
    anchor = (w / 2.0, outline.top(w / 2.0) / 2.0)
    d = _node_leaf(Diagram, outline, label, _boundary(n_left), _boundary(n_right), anchor, (BOX_HALF, BOX_HALF))
    corners = np.array(anchor) + np.array([[-1, -1], [-1, 1], [1, -1], [1, 1]]) * BOX_HALF
    if not (outline.contains(d.pts).all() and outline.contains(corners).all()):
        raise LayoutError(f"leaf width {w} is too narrow for a {n_left} -> {n_right} node box")
    return d


def layout_leaf(name: str, sig: Signature, width: Optional[float] = None) -> Diagram:
    """Diagram of a single generator; ``width`` defaults to ``max(l, r)``."""
    src, tgt = sig.generators[name]
    return _leaf(name, len(src), len(tgt), width)


@lru_cache(maxsize=256)
def _identity(n: int, width: float) -> Diagram:
    if n < 1:
        raise ZeroArity()
    return _id_leaf(Diagram, Trapezoid(n, n, width), _boundary(n))


def layout_id(objects: Sequence[str] | int, width: float = 1.0) -> Diagram:
    """Straight wires at heights ``n - 1/2, ..., 1/2`` across a ``width``-wide box."""
    return _identity(objects if isinstance(objects, int) else len(objects), float(width))


# -- composition --------------------------------------------------------------

_T = np.linspace(0.0, 1.0, SEAM_SAMPLES)


def _edge(x0: float, y0: float, x1: float, y1: float) -> np.ndarray:
    """``SEAM_SAMPLES`` evenly spaced points from ``(x0, y0)`` to ``(x1, y1)``."""
    out = np.empty((SEAM_SAMPLES, 2))
    out[:, 0] = x0 + (x1 - x0) * _T
    out[:, 1] = y0 + (y1 - y0) * _T
    return out


def _mapped(d: Diagram, maps) -> np.ndarray:
    """A copy of ``d.pts`` pushed through ``maps``.

    The finiteness check is left to :func:`layout`, once per diagram.
    """
    if not maps:
        return d.pts
    out = np.array(d.pts)
    for m in maps:
        m.inplace(out)
    return out


def _glue(d1: Diagram, maps1, d2: Diagram, maps2) -> np.ndarray:
    """``[ctrl1, ctrl2, anchors1, anchors2]`` after mapping each operand."""
    p1, p2 = _mapped(d1, maps1), _mapped(d2, maps2)
    n1, n2 = 4 * d1.n_segments, 4 * d2.n_segments
    k1 = n1 + n2
    k2 = k1 + len(p1) - n1
    out = np.empty((len(p1) + len(p2), 2))
    out[:n1] = p1[:n1]
    out[n1:k1] = p2[:n2]
    out[k1:k2] = p1[n1:]
    out[k2:] = p2[n2:]
    return out


def _flatten_handles(pts, end_rows, handle_rows, upper_b, upper_s, lower_b=0.0, lower_s=0.0) -> None:
    """Make boundary tangents horizontal again after a non-rigid map.

    ``end_rows`` are rows of ``pts`` holding boundary wire ends and
    ``handle_rows`` the adjacent Bézier handles. The bottom and top edges of
    the piece each port belongs to are ``y = lower_b + lower_s * x`` and
    ``y = upper_b + upper_s * x`` (scalars or per-port arrays). Each handle
    is moved to its end's height; where that would cross an edge line the
    handle is also pulled towards the end until it fits, so the control
    polygon, and with it the curve, stays inside the outline.
    """
    ye = pts[end_rows, 1]
    hx = pts[handle_rows, 0]
    fits = (ye <= upper_b + upper_s * hx) & (ye >= lower_b + lower_s * hx)
    if not fits.all():
        xe = pts[end_rows, 0]
        dx = hx - xe
        room_up = np.maximum(upper_b + upper_s * xe - ye, 0.0)
        room_down = np.maximum(ye - lower_b - lower_s * xe, 0.0)
        rise_up = -np.asarray(upper_s) * dx  # > 0 when the top edge closes in
        rise_down = np.asarray(lower_s) * dx
        t = np.ones_like(dx)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(rise_up > 0, np.minimum(t, room_up / rise_up), t)
            t = np.where(rise_down > 0, np.minimum(t, room_down / rise_down), t)
        pts[handle_rows, 0] = xe + t * dx
    pts[handle_rows, 1] = ye


def _merge_wires(d1: Diagram, d2: Diagram) -> Tuple[np.ndarray, int]:
    """Relabel ``d2``'s wires so the ones entering at the seam continue ``d1``'s."""
    fresh = np.ones(d2.n_wires, dtype=np.int64)
    outgoing = d2.seg_wire[d2.left_ports]
    fresh[outgoing] = 0
    mapping = np.cumsum(fresh)
    n_fresh = int(mapping[-1])
    mapping += d1.n_wires - 1
    mapping[outgoing] = d1.seg_wire[d1.right_ports]
    return np.concatenate([d1.seg_wire, mapping[d2.seg_wire]]), d1.n_wires + n_fresh


# Maps that would be exact identities are left out: a pinch to the height the
# corner already has scales by exactly 1.0, so skipping it changes no bits.


def seq_maps(o1: Trapezoid, o2: Trapezoid) -> Tuple[tuple, tuple]:
    """Maps placing the two operands of ``;`` in the composite's coordinates."""
    h = seam_height(o1.w, o2.w, o1.l, o2.r)
    left = () if h == o1.r else (PinchR(o1, h),)
    right = (Translate(o1.w, 0.0),) if h == o2.l else (PinchL(o2, h), Translate(o1.w, 0.0))
    return left, right


def tensor_maps(o1: Trapezoid, o2: Trapezoid) -> Tuple[tuple, tuple]:
    """Maps placing the two operands of ``*`` (first on top) in the composite's coordinates."""
    w = max(o1.w, o2.w)
    top = [] if w == o1.w else [ScaleX(w / o1.w)]
    if o2.r != o2.l:
        top.append(ShearY((o2.r - o2.l) / w))
    top.append(Translate(0.0, o2.l))
    return tuple(top), (() if w == o2.w else (ScaleX(w / o2.w),))


def compose_seq(d1: Diagram, d2: Diagram) -> Diagram:
    """``d1 ; d2``: pinch the shared corners to the seam height and glue."""
    o1, o2 = d1.outline, d2.outline
    if o1.r != o2.l or len(d1.right_ports) != len(d2.left_ports):
        raise BoundaryMismatch(f"right side {o1.r} does not match left side {o2.l}")
    h = seam_height(o1.w, o2.w, o1.l, o2.r)
    maps = seq_maps(o1, o2)
    pts = _glue(d1, maps[0], d2, maps[1])

    n1 = d1.n_segments
    r1_rows = 4 * d1.right_ports + 3
    l2_rows = 4 * d2.left_ports

    # every boundary handle of both pieces, seam side included
    off = 4 * n1
    l1_rows = 4 * d1.left_ports
    r2_rows = 4 * d2.right_ports + 3 + off
    l2_rows = l2_rows + off
    end_rows = np.concatenate([l1_rows, r1_rows, l2_rows, r2_rows])
    handle_rows = np.concatenate([l1_rows + 1, r1_rows - 1, l2_rows + 1, r2_rows - 1])
    k1 = len(l1_rows) + len(r1_rows)
    k2 = len(end_rows) - k1
    slope1 = (h - o1.l) / o1.w
    slope2 = (o2.r - h) / o2.w
    upper_b = np.empty(k1 + k2)
    upper_b[:k1] = o1.l
    upper_b[k1:] = h - slope2 * o1.w
    upper_s = np.empty(k1 + k2)
    upper_s[:k1] = slope1
    upper_s[k1:] = slope2
    _flatten_handles(pts, end_rows, handle_rows, upper_b, upper_s)
    seg_wire, n_wires = _merge_wires(d1, d2)
    outline = Trapezoid(o1.l, o2.r, o1.w + o2.w)
    return Diagram(
        outline=outline,
        tree=SeqSplit(o1.w, d1.tree, d2.tree, outline, maps, (d1.right_ports, d2.left_ports)),
        pts=pts,
        n_segments=n1 + d2.n_segments,
        n_joins=d1.n_joins + d2.n_joins + len(r1_rows),
        seg_wire=seg_wire,
        n_wires=n_wires,
        left_ports=d1.left_ports,
        right_ports=d2.right_ports + n1,
        half_extents=np.concatenate([d1.half_extents, d2.half_extents]),
        labels=d1.labels + d2.labels,
    )


def compose_tensor(d1: Diagram, d2: Diagram) -> Diagram:
    """``d1 * d2`` with ``d1`` on top.

    Both are scaled to the wider width, then ``d1`` is sheared so its bottom
    edge takes the slope of ``d2``'s top edge and lifted onto it.
    """
    o1, o2 = d1.outline, d2.outline
    w = max(o1.w, o2.w)
    slope = (o2.r - o2.l) / w
    maps = tensor_maps(o1, o2)
    pts = _glue(d1, maps[0], d2, maps[1])

    l1_rows = 4 * d1.left_ports
    r1_rows = 4 * d1.right_ports + 3
    _flatten_handles(
        pts,
        np.concatenate([l1_rows, r1_rows]),
        np.concatenate([l1_rows + 1, r1_rows - 1]),
        o1.l + o2.l,
        slope + (o1.r - o1.l) / w,
        o2.l,
        slope,
    )
    n1 = d1.n_segments
    outline = Trapezoid(o1.l + o2.l, o1.r + o2.r, w)
    return Diagram(
        outline=outline,
        tree=TenSplit((float(o2.l), float(o2.r)), d1.tree, d2.tree, outline, maps),
        pts=pts,
        n_segments=n1 + d2.n_segments,
        n_joins=d1.n_joins + d2.n_joins,
        seg_wire=np.concatenate([d1.seg_wire, d2.seg_wire + d1.n_wires]),
        n_wires=d1.n_wires + d2.n_wires,
        left_ports=np.concatenate([d1.left_ports, d2.left_ports + n1]),
        right_ports=np.concatenate([d1.right_ports, d2.right_ports + n1]),
        half_extents=np.concatenate([d1.half_extents, d2.half_extents]),
        labels=d1.labels + d2.labels,
    )


def layout_algebra(leaf_width: Union[str, float] = "max", id_width: float = 1.0) -> MonoidalAlgebra:
    """The layout fold as an algebra; ``leaf_width`` is ``"max"`` or a number."""
    fixed = None if leaf_width == "max" else float(leaf_width)

    def on_gen(g: Gen) -> Diagram:
        if not g.typed:
            raise LayoutError(f"generator {g.name!r} is not typechecked")
        return _leaf(g.name, len(g.src), len(g.tgt), fixed)

    return MonoidalAlgebra(
        on_gen=on_gen,
        on_id=lambda i: layout_id(i.objects, id_width),
        on_seq=compose_seq,
        on_ten=compose_tensor,
    )


def layout(term: Term, *, leaf_width: Union[str, float] = "max", id_width: float = 1.0) -> Diagram:
    d = fold(term, layout_algebra(leaf_width, id_width))
    if not np.isfinite(d.pts).all():
        raise LayoutError("layout produced a non-finite coordinate")
    return d


# -- naive oracle -------------------------------------------------------------

_UNIT = Trapezoid(1, 1, 1.0)


@dataclass(frozen=True)
class _Squash:
    """``(x, y) -> (sx * x + dx, sy * y + dy)``: the naive layout's only map."""

    sx: float
    sy: float
    dx: float
    dy: float

    def inplace(self, out: np.ndarray) -> None:
        out[..., 0] = out[..., 0] * self.sx + self.dx
        out[..., 1] = out[..., 1] * self.sy + self.dy


_NAIVE_SEQ = ((_Squash(0.5, 1.0, 0.0, 0.0),), (_Squash(0.5, 1.0, 0.5, 0.0),))
_NAIVE_TEN = ((_Squash(1.0, 0.5, 0.0, 0.5),), (_Squash(1.0, 0.5, 0.0, 0.0),))


def _squashed(d: Diagram, m: _Squash):
    return d._sections(_mapped(d, (m,))), d.half_extents * np.array([m.sx, m.sy])


def _naive_seq(d1: Diagram, d2: Diagram) -> NaiveDiagram:
    if len(d1.right_ports) != len(d2.left_ports):
        raise BoundaryMismatch("arity mismatch at sequential seam")
    (c1, a1), ext1 = _squashed(d1, _NAIVE_SEQ[0][0])
    (c2, a2), ext2 = _squashed(d2, _NAIVE_SEQ[1][0])
    ends = c1[4 * d1.right_ports + 3]
    starts = c2[4 * d2.left_ports]
    # straight connectors show the misalignment and keep wires continuous
    bridges = np.array([line_segment(a, b) for a, b in zip(ends, starts)], dtype=float).reshape(-1, 2)
    k = len(ends)
    seg_wire, n_wires = _merge_wires(d1, d2)
    n1 = d1.n_segments
    return NaiveDiagram(
        outline=_UNIT,
        tree=SeqSplit(0.5, d1.tree, d2.tree, _UNIT, _NAIVE_SEQ, (d1.right_ports, d2.left_ports), n_connectors=k),
        pts=np.concatenate([c1, bridges, c2, a1, a2]),
        n_segments=n1 + k + d2.n_segments,
        n_joins=d1.n_joins + d2.n_joins + k,
        seg_wire=np.concatenate([seg_wire[:n1], d1.seg_wire[d1.right_ports], seg_wire[n1:]]),
        n_wires=n_wires,
        left_ports=d1.left_ports,
        right_ports=d2.right_ports + n1 + k,
        half_extents=np.concatenate([ext1, ext2]),
        labels=d1.labels + d2.labels,
    )


def _naive_ten(d1: Diagram, d2: Diagram) -> NaiveDiagram:
    (c1, a1), ext1 = _squashed(d1, _NAIVE_TEN[0][0])
    (c2, a2), ext2 = _squashed(d2, _NAIVE_TEN[1][0])
    n1 = d1.n_segments
    return NaiveDiagram(
        outline=_UNIT,
        tree=TenSplit((0.5, 0.5), d1.tree, d2.tree, _UNIT, _NAIVE_TEN),
        pts=np.concatenate([c1, c2, a1, a2]),
        n_segments=n1 + d2.n_segments,
        n_joins=d1.n_joins + d2.n_joins,
        seg_wire=np.concatenate([d1.seg_wire, d2.seg_wire + d1.n_wires]),
        n_wires=d1.n_wires + d2.n_wires,
        left_ports=np.concatenate([d1.left_ports, d2.left_ports + n1]),
        right_ports=np.concatenate([d1.right_ports, d2.right_ports + n1]),
        half_extents=np.concatenate([ext1, ext2]),
        labels=d1.labels + d2.labels,
    )


def _unit_heights(n: int) -> np.ndarray:
    return 1.0 - (np.arange(n) + 0.5) / n


def naive_algebra() -> MonoidalAlgebra:
    def on_gen(g: Gen) -> NaiveDiagram:
        if not g.typed:
            raise LayoutError(f"generator {g.name!r} is not typechecked")
        return _node_leaf(
            NaiveDiagram, _UNIT, g.name, _unit_heights(len(g.src)), _unit_heights(len(g.tgt)),
            (0.5, 0.5), (BOX_HALF, BOX_HALF),
        )

    return MonoidalAlgebra(
        on_gen=on_gen,
        on_id=lambda i: _id_leaf(NaiveDiagram, _UNIT, _unit_heights(len(i.objects))),
        on_seq=_naive_seq,
        on_ten=_naive_ten,
    )


def layout_naive(term: Term) -> NaiveDiagram:
    """Every sub-diagram squashed back into the unit square; no pinching."""
    return fold(term, naive_algebra())

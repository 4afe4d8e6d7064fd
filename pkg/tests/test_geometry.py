from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import line_at
from trapdiag.geometry import (
    BOUNDARY_LEFT,
    BOUNDARY_RIGHT,
    GeometryError,
    PinchL,
    PinchR,
    Point,
    ScaleX,
    ShearY,
    Translate,
    Trapezoid,
    Wire,
    apply,
    apply_all,
    apply_wire,
    bezier_point,
    line_segment,
    seam_height,
    top_edge_slope,
)

STEEP = Trapezoid(1, 3, 1.0)


def test_trapezoid_vertices():
    assert Trapezoid(1, 2, 2.0).vertices == ((0, 0), (2, 0), (2, 2), (0, 1))


@pytest.mark.parametrize("l, r, w", [(0, 1, 1), (1, 0.5, 1), (1, 1, 0), (1, 1, -2), (float("nan"), 1, 1)])
def test_degenerate_trapezoids_rejected(l, r, w):
    with pytest.raises(GeometryError):
        Trapezoid(l, r, w)


def test_pinch_r_moves_top_right_corner():
    assert apply(PinchR(STEEP, 1.5), (1, 3)) == Point(1, 1.5)


def test_pinch_r_fixes_left_edge_point():
    assert apply(PinchR(STEEP, 1.5), (0, 0.5)) == Point(0, 0.5)


def test_pinch_r_halves_right_edge():
    # h / r = 0.5 at x = w
    assert apply(PinchR(STEEP, 1.5), (1, 2)) == Point(1, 1)


def test_scale_x_unit_square():
    assert apply(ScaleX(2), (1, 3)) == Point(2, 3)


def test_shear_and_translate():
    assert apply(ShearY(0.5), (2, 0)) == Point(2, 1)
    assert apply(Translate(1, -2), (0.5, 0.5)) == Point(1.5, -1.5)


def test_map_rejects_non_finite_output():
    with pytest.raises(GeometryError):
        ShearY(1e308)(np.array([[1e308, 1e308]]))


def test_map_parameters_validated():
    with pytest.raises(GeometryError):
        ScaleX(0)
    with pytest.raises(GeometryError):
        PinchR(STEEP, 0)


@pytest.mark.parametrize(
    "args, expected",
    [((1, 1, 1, 2), 1.5), ((1, 1, 7, 7), 7), ((2, 1, 1, 4), 3), ((3, 5, 2, 2), 2)],
)
def test_seam_height_examples(args, expected):
    assert seam_height(*args) == pytest.approx(expected, abs=1e-12)


def test_seam_height_matches_line_oracle():
    w1, w2, l1, r2 = 2.0, 1.0, 1.0, 4.0
    assert seam_height(w1, w2, l1, r2) == pytest.approx(line_at((0, l1), (w1 + w2, r2), w1))


@pytest.mark.parametrize("trap, slope", [(Trapezoid(1, 2, 2), 0.5), (Trapezoid(3, 3, 5), 0.0), (Trapezoid(3, 1, 1), -2.0)])
def test_top_edge_slope(trap, slope):
    assert top_edge_slope(trap) == slope


def test_apply_wire_keeps_roles():
    wire = Wire.from_array(line_segment((0, 0.5), (1, 0.5))[None], BOUNDARY_LEFT, BOUNDARY_RIGHT)
    moved = apply_wire(Translate(1, 0), wire)
    assert (moved.start, moved.end) == (Point(1, 0.5), Point(2, 0.5))
    assert (moved.start_role, moved.end_role) == (BOUNDARY_LEFT, BOUNDARY_RIGHT)


def test_shear_wire():
    wire = Wire.from_array(line_segment((0, 0), (2, 0))[None], BOUNDARY_LEFT, BOUNDARY_RIGHT)
    sheared = apply_wire(ShearY(0.5), wire)
    assert (sheared.start, sheared.end) == (Point(0, 0), Point(2, 1))


def test_bezier_endpoints_and_midpoint():
    seg = line_segment((0, 0), (3, 6))
    assert np.allclose(bezier_point(seg, 0), (0, 0))
    assert np.allclose(bezier_point(seg, 0.5), (1.5, 3))
    assert np.allclose(bezier_point(seg, 1), (3, 6))


def test_wire_needs_a_segment():
    with pytest.raises(GeometryError):
        Wire((), BOUNDARY_LEFT, BOUNDARY_RIGHT)


# -- properties ---------------------------------------------------------------

sides = st.integers(min_value=1, max_value=12).map(float) | st.floats(min_value=1.0, max_value=20.0)
widths = st.floats(min_value=0.05, max_value=50.0)
unit = st.floats(min_value=0.0, max_value=1.0)
heights = st.floats(min_value=0.2, max_value=30.0)


def _samples(trap, n=17):
    xs = np.linspace(0.0, trap.w, n)
    return xs, trap.top(xs)


@settings(max_examples=200, deadline=None)
@given(sides, sides, widths, heights)
def test_pinches_fix_bottom_and_their_anchor_edge(l, r, w, h):
    t = Trapezoid(l, r, w)
    xs, _ = _samples(t)
    bottom = np.stack([xs, np.zeros_like(xs)], axis=-1)
    ys = np.linspace(0.0, l, 9)
    left = np.stack([np.zeros_like(ys), ys], axis=-1)
    ys = np.linspace(0.0, r, 9)
    right = np.stack([np.full_like(ys, w), ys], axis=-1)
    assert np.array_equal(PinchR(t, h)(bottom), bottom)
    assert np.array_equal(PinchL(t, h)(bottom), bottom)
    assert np.allclose(PinchR(t, h)(left), left, rtol=0, atol=1e-12)
    assert np.allclose(PinchL(t, h)(right), right, rtol=0, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(sides, sides, widths, heights)
def test_pinch_r_sends_top_edge_to_f_r(l, r, w, h):
    t = Trapezoid(l, r, w)
    xs, top = _samples(t)
    out = PinchR(t, h)(np.stack([xs, top], axis=-1))
    expected = np.array([line_at((0, l), (w, h), x) for x in xs])
    assert np.abs(out[:, 0] - xs).max() == 0
    assert np.abs(out[:, 1] - expected).max() < 1e-9


@settings(max_examples=200, deadline=None)
@given(sides, sides, widths, heights)
def test_pinch_l_sends_top_edge_to_f_l(l, r, w, h):
    t = Trapezoid(l, r, w)
    xs, top = _samples(t)
    out = PinchL(t, h)(np.stack([xs, top], axis=-1))
    expected = np.array([line_at((0, h), (w, r), x) for x in xs])
    assert np.abs(out[:, 1] - expected).max() < 1e-9


@settings(max_examples=200, deadline=None)
@given(sides, sides, widths, unit, unit)
def test_pinch_to_own_corner_is_exact_identity(l, r, w, fx, fy):
    t = Trapezoid(l, r, w)
    x = fx * w
    p = np.array([[x, fy * float(t.top(x))]])
    assert np.array_equal(PinchR(t, r)(p), p)
    assert np.array_equal(PinchL(t, l)(p), p)


@settings(max_examples=200, deadline=None)
@given(sides, sides, widths, heights, unit, unit, st.floats(min_value=0.0, max_value=3.0))
def test_pinch_scales_each_vertical_uniformly(l, r, w, h, fx, fy, s):
    t = Trapezoid(l, r, w)
    x = fx * w
    y = fy * float(t.top(x))
    for m in (PinchR(t, h), PinchL(t, h)):
        base = apply(m, (x, y)).y
        assert apply(m, (x, s * y)).y == pytest.approx(s * base, rel=1e-12, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-20, max_value=20), st.floats(min_value=0.01, max_value=100),
       st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)), min_size=1, max_size=10))
def test_shear_and_scale_invert(slope, k, pts):
    xy = np.array(pts, dtype=float)
    back = apply_all([ShearY(slope), ShearY(-slope)], xy)
    assert np.allclose(back, xy, rtol=0, atol=1e-12 * (1 + np.abs(xy).max() * (1 + abs(slope))))
    back = apply_all([ScaleX(k), ScaleX(1 / k)], xy)
    assert np.allclose(back, xy, rtol=1e-12, atol=1e-12)


@settings(max_examples=300, deadline=None)
@given(widths, widths, sides, sides)
def test_seam_height_is_strict_convex_combination(w1, w2, l1, r2):
    h = seam_height(w1, w2, l1, r2)
    lo, hi = min(l1, r2), max(l1, r2)
    if hi - lo > 1e-6 * hi:
        assert lo < h < hi
    elif l1 != r2:
        # adjacent floats leave no room strictly between them
        assert lo <= h <= hi
    else:
        assert h == pytest.approx(l1)
    assert abs(h - line_at((0, l1), (w1 + w2, r2), w1)) < 1e-9 * max(1.0, l1, r2)


def test_apply_all_copies_input():
    xy = np.array([[1.0, 1.0]])
    apply_all([Translate(1, 1)], xy)
    assert xy.tolist() == [[1.0, 1.0]]


@settings(max_examples=200, deadline=None)
@given(
    st.integers(min_value=1, max_value=8),
    st.integers(min_value=1, max_value=8),
    st.floats(min_value=0.3, max_value=20),
    st.floats(min_value=0.5, max_value=9),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_pinch_kernel_matches_ratio_bit_for_bit(l, r, w, h, seed):
    trap = Trapezoid(l, r, w)
    pts = np.random.default_rng(seed).uniform(0.0, w, (17, 2))
    for m in (PinchR(trap, h), PinchL(trap, h)):
        fast = pts.copy()
        m.inplace(fast)
        slow = pts.copy()
        slow[:, 1] *= m.ratio(slow[:, 0])
        assert np.array_equal(fast, slow)

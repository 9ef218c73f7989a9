"""Geometry primitives: symmetries, walks, lines, crossing predicates."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sawlab.lattice import (
    SYMMETRIES,
    Bond,
    DegenerateTouch,
    Line,
    Walk,
    WalkContext,
    apply_symmetry,
    is_self_avoiding,
    segment_crosses_line,
    steps_of,
    transform_line,
    walk_line_crossings,
)


def test_symmetry_group_structure():
    mats = [m for m in SYMMETRIES]
    assert np.array_equal(mats[0], np.eye(2, dtype=np.int64))
    for m in mats:
        # orthogonal integer matrices with determinant +-1
        assert np.array_equal(m @ m.T, np.eye(2, dtype=np.int64))
        assert round(np.linalg.det(m)) in (-1, 1)
    # closure: every product is again one of the eight
    for a in mats:
        for b in mats:
            assert any(np.array_equal(a @ b, c) for c in mats)
    # all eight are distinct
    assert len({m.tobytes() for m in mats}) == 8


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(0, 7),
       st.integers(-5, 5), st.integers(-5, 5))
def test_apply_symmetry_is_isometry(x, y, s, px, py):
    pts = np.array([[x, y], [x + 1, y]])
    out = apply_symmetry(pts, s, (px, py))
    d = out[1] - out[0]
    assert abs(d).sum() == 1  # unit steps map to unit steps
    # pivot point is fixed
    assert np.array_equal(apply_symmetry(np.array([[px, py]]), s, (px, py)),
                          [[px, py]])


def test_is_self_avoiding():
    assert is_self_avoiding([(0, 0), (1, 0), (1, 1)])
    assert not is_self_avoiding([(0, 0), (1, 0), (0, 0)])
    with pytest.raises(ValueError):
        is_self_avoiding([(0, 0), (2, 0)])  # not nearest neighbors
    with pytest.raises(ValueError):
        is_self_avoiding(np.zeros((2, 3)))


def test_walk_validation_and_context():
    w = Walk(np.array([[0, 0], [1, 0]]), WalkContext(delta=0.5, n_steps=1))
    assert w.n_steps == 1
    assert np.allclose(w.physical(), [[0, 0], [0.5, 0]])
    with pytest.raises(ValueError):
        Walk(np.array([[0, 0], [1, 0], [0, 0]]))
    with pytest.raises(ValueError):
        WalkContext(delta=0.0)


def test_scaling_context():
    ctx = WalkContext.scaling(16)
    assert ctx.delta == pytest.approx(16 ** -0.75)


def test_bond_orientation():
    assert Bond((0, 0), (1, 0)).orientation == "h"
    assert Bond((2, 3), (2, 4)).orientation == "v"
    with pytest.raises(ValueError):
        Bond((0, 0), (1, 1))


def test_line_canonicalization():
    assert Line(math.pi + 0.3).theta == pytest.approx(0.3)
    ln = Line.through_offset(0.0, 2.5)
    assert ln.point == (0.0, 2.5)
    nx, ny = ln.normal
    assert (nx, ny) == pytest.approx((0.0, 1.0))


def test_segment_crosses_line_basic():
    horizontal = Line.through_offset(0.0, 0.5)
    assert segment_crosses_line(Bond((0, 0), (0, 1)), horizontal)
    assert not segment_crosses_line(Bond((0, 1), (0, 2)), horizontal)
    with pytest.raises(DegenerateTouch):
        segment_crosses_line(Bond((0, 0), (0, 1)), Line.through_offset(0.0, 0.0))


def test_transform_line_preserves_distances():
    rng = np.random.default_rng(5)
    for _ in range(50):
        theta = rng.uniform(0, math.pi)
        pt = tuple(rng.uniform(-3, 3, 2))
        ln = Line(theta, pt)
        s = rng.integers(0, 8)
        piv = tuple(rng.uniform(-2, 2, 2))
        ln2 = transform_line(ln, s, piv)
        for _ in range(5):
            x = rng.uniform(-5, 5, 2)
            m = SYMMETRIES[s]
            x2 = np.asarray(piv) + m @ (x - np.asarray(piv))
            assert abs(ln.signed_distance(x)) == pytest.approx(
                abs(ln2.signed_distance(x2)), abs=1e-12)


def _exact_crossings(points, p, q, r):
    """Crossing count against the line p*x + q*y = r in exact arithmetic."""
    vals = [Fraction(p) * x + Fraction(q) * y - Fraction(r) for x, y in points]
    assert all(v != 0 for v in vals)
    return sum(1 for a, b in zip(vals, vals[1:]) if (a < 0) != (b < 0))


def test_walk_line_crossings_vs_rational_oracle():
    # lines with rational direction (a, b): theta = atan2(b, a), through (0, l).
    # signed value is proportional to -b*x + a*y - a*l, exact over Fraction.
    rng = np.random.default_rng(17)
    for trial in range(200):
        n = int(rng.integers(2, 30))
        pts = [(0, 0)]
        occupied = {(0, 0)}
        while len(pts) < n + 1:
            x, y = pts[-1]
            cands = [(x + dx, y + dy) for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))
                     if (x + dx, y + dy) not in occupied]
            if not cands:
                break
            nxt = cands[rng.integers(len(cands))]
            pts.append(nxt)
            occupied.add(nxt)
        a, b = int(rng.integers(1, 7)), int(rng.integers(-6, 7))
        l = Fraction(int(rng.integers(1, 20)), 41)  # denominator avoids sites
        theta = math.atan2(b, a)
        line = Line.through_offset(theta, float(l))
        count, idx = walk_line_crossings(np.array(pts), line)
        exact = _exact_crossings(pts, -b, a, a * l)
        assert count == exact == len(idx)


def test_walk_line_crossings_degenerate():
    with pytest.raises(DegenerateTouch):
        walk_line_crossings(np.array([[0, 0], [0, 1]]), Line.through_offset(0.0, 1.0))


def test_steps_of():
    assert np.array_equal(steps_of([(0, 0), (1, 0), (1, 1)]), [[1, 0], [0, 1]])

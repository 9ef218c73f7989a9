"""Exact enumeration oracles: counts, constrained ensembles, line survival."""

import math
from fractions import Fraction

import numpy as np
import pytest

from sawlab import enumeration
from sawlab.lattice import DegenerateTouch, is_self_avoiding

# c_1..c_10 for the square lattice, cross-checked below by two
# independent enumerators
KNOWN_COUNTS = [4, 12, 36, 100, 284, 780, 2172, 5916, 16268, 44100]


def test_known_counts():
    assert enumeration.saw_counts(10) == KNOWN_COUNTS


def test_dual_enumerators_agree():
    for n in range(1, 11):
        direct = enumeration.enumerate_saws(n).count
        reduced = enumeration.enumerate_saws_reduced(n).count
        assert direct == reduced == KNOWN_COUNTS[n - 1]


def test_visitor_sees_every_walk():
    seen = []
    enumeration.enumerate_saws(3, lambda p: seen.append(tuple(p)))
    assert len(seen) == 36
    assert len(set(seen)) == 36
    for w in seen:
        assert is_self_avoiding(list(w))


def test_cap_refusal():
    with pytest.raises(ValueError, match="cap"):
        enumeration.enumerate_saws(17)
    with pytest.raises(ValueError):
        enumeration.enumerate_saws(0)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_midbond_count_is_half_of_total(n):
    # reversal maps each N-step SAW onto one with the traversal direction
    # of its middle bond flipped, so d_N = c_N / 2
    assert enumeration.midbond_count(n) == KNOWN_COUNTS[n - 1] // 2


def test_midbond_walks_are_pinned_saws():
    walks = list(enumeration.enumerate_midbond_walks(5))
    n = 2
    for w in walks:
        assert w[n] == (0, 0) and w[n + 1] == (0, 1)
        assert is_self_avoiding(w)
    assert len(set(map(tuple, walks))) == len(walks)


def test_halfplane_walks_match_filtered_enumeration():
    for n in (3, 5):
        constrained = {tuple(w) for w in enumeration.enumerate_halfplane_walks(n)}
        unconstrained = []
        enumeration.enumerate_saws(
            n, lambda p: unconstrained.append(tuple(p)))
        filtered = {w for w in unconstrained if all(y >= 0 for _, y in w)}
        assert constrained == filtered


def test_estimate_mu():
    est = enumeration.estimate_mu(KNOWN_COUNTS)
    assert len(est["ratios"]) == 9
    # ratios hover around the connective constant already at these sizes
    assert 2.5 < est["ratios"][-1] < 2.9
    assert est["roots"][-1] == pytest.approx(44100 ** 0.1)
    with pytest.raises(ValueError):
        enumeration.estimate_mu([4])


def test_exact_line_survival_horizontal():
    # theta = 0: the line y = l with l in (0,1) is crossed iff the walk
    # reaches height 1, independent of l.  For N = 1 exactly one of the
    # four walks (the north step) crosses.
    out = enumeration.exact_line_survival(1, [0.0], [0.5])
    assert out[(0.5, 0.0)] == Fraction(3, 4)


def test_exact_line_survival_vertical_symmetry():
    # the x<->y reflection maps the line y = 0.3 to x = 0.3; the image
    # line goes through (0.3, 0), which through_offset cannot express,
    # so count against it directly
    from sawlab.lattice import Line, walk_line_crossings

    a = enumeration.exact_line_survival(4, [0.0], [0.3])[(0.3, 0.0)]
    vertical = Line(math.pi / 2, (0.3, 0.0))
    survivors = 0
    total = 0

    def visit(path):
        nonlocal survivors, total
        total += 1
        count, _ = walk_line_crossings(np.array(path), vertical)
        survivors += count == 0

    enumeration.enumerate_saws(4, visit)
    assert a == Fraction(survivors, total)


def test_offset_line_at_ninety_degrees_is_degenerate():
    # theta = 90 through (0, l) is the line x = 0 through the origin;
    # this is why the p-estimator grid stops at 89 degrees
    with pytest.raises(DegenerateTouch):
        enumeration.exact_line_survival(2, [math.pi / 2], [0.3])


def test_exact_line_survival_values_are_probabilities():
    out = enumeration.exact_line_survival(
        5, np.radians([0.0, 20.0, 45.0]), [0.25, 0.75])
    assert len(out) == 6
    for frac in out.values():
        assert 0 < frac <= 1
        assert frac.denominator <= 284  # c_5 walks in the denominator


def test_exact_line_survival_degenerate_grid_point():
    # l = 0 puts the line through the origin, a walk site
    with pytest.raises(DegenerateTouch):
        enumeration.exact_line_survival(2, [0.0], [0.0])

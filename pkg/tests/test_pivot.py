"""Pivot chain semantics: ensembles, reference implementation, validity."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sawlab import enumeration
from sawlab.lattice import is_self_avoiding
from sawlab.pivot import (
    EnsembleConstraint,
    PivotChain,
    fast_self_avoidance_check,
    naive_self_avoidance_check,
    pivot_step,
    run_chain,
    run_naive_chain,
)


def test_initial_walks_satisfy_constraints():
    for kind, n in [("free", 10), ("halfplane", 10), ("midbond", 11)]:
        c = EnsembleConstraint(kind)
        pts = c.initial_walk(n)
        assert is_self_avoiding(pts)
        assert c.satisfied_by(pts)
    with pytest.raises(ValueError):
        EnsembleConstraint("midbond").initial_walk(10)
    with pytest.raises(ValueError):
        EnsembleConstraint("sphere")


def test_satisfied_by():
    hp = EnsembleConstraint("halfplane")
    assert not hp.satisfied_by(np.array([[0, 0], [0, -1]]))
    mb = EnsembleConstraint("midbond")
    good = mb.initial_walk(5)
    assert mb.satisfied_by(good)
    assert not mb.satisfied_by(good + [1, 0])


@pytest.mark.parametrize("kind,n", [("free", 20), ("halfplane", 20), ("midbond", 21)])
def test_reference_chain_preserves_ensemble(kind, n):
    c = EnsembleConstraint(kind)
    rng = np.random.default_rng(4)
    pts = c.initial_walk(n)
    accepted = 0
    for _ in range(2000):
        pts, ok = pivot_step(pts, c, rng)
        accepted += ok
        assert is_self_avoiding(pts)
        assert c.satisfied_by(pts)
    assert accepted > 200  # the chain actually moves


def test_compiled_chain_matches_reference_distribution():
    """Both chains must be uniform over all 100 four-step free walks."""
    from scipy import stats as sps

    n = 4
    walks = []
    enumeration.enumerate_saws(n, lambda p: walks.append(tuple(p)))
    index = {w: i for i, w in enumerate(walks)}

    # reference chain occupancy
    c = EnsembleConstraint("free")
    rng = np.random.default_rng(8)
    pts = c.initial_walk(n)
    ref_counts = np.zeros(len(walks))
    for t in range(120_000):
        pts, _ = pivot_step(pts, c, rng)
        if t % 10 == 0:
            ref_counts[index[tuple(map(tuple, pts - pts[0]))]] += 1

    chain = PivotChain(n, "free", seed=8)
    mc_counts = np.zeros(len(walks))
    for w in chain.samples(12_000, 10):
        mc_counts[index[tuple(map(tuple, w.points))]] += 1

    for counts in (ref_counts, mc_counts):
        assert counts.min() > 0
        expected = counts.sum() / len(walks)
        chi2 = ((counts - expected) ** 2 / expected).sum()
        assert sps.chi2.sf(chi2, len(walks) - 1) > 1e-3


def test_free_walks_are_rooted_at_origin():
    chain = PivotChain(30, "free", seed=2)
    for w in chain.samples(50, 20):
        assert tuple(w.points[0]) == (0, 0)
        assert w.context.delta == 1.0


def test_end_to_end_amplitude():
    """<R^2> ~ 0.771 N^{3/2} for square-lattice SAWs (literature amplitude)."""
    from sawlab import kernels

    n = 1000
    chain = PivotChain(n, "free", seed=31)
    chain.equilibrate()
    out = np.empty(3000)
    kernels.end_to_end_samples(*chain._state_args(), chain.constraint.code,
                               3000, 100, out, chain._take_seed())
    ratio = out.mean() / n ** 1.5
    assert ratio == pytest.approx(0.771, rel=0.05)


def test_run_chain_generator():
    samples = list(run_chain(12, "free", n_samples=5, stride=7, seed=3))
    assert len(samples) == 5
    for w in samples:
        assert w.n_steps == 12


def test_run_naive_chain_wrapper():
    pts, acc = run_naive_chain(15, "halfplane", 400, seed=6)
    assert is_self_avoiding(pts)
    assert np.all(pts[:, 1] >= 0)
    assert acc > 0


def test_avoidance_checks_agree_on_random_fragments():
    rng = np.random.default_rng(12)
    disagreements = 0
    for _ in range(100_000):
        a = rng.integers(-4, 5, size=(rng.integers(1, 12), 2))
        b = rng.integers(-4, 5, size=(rng.integers(1, 12), 2))
        if fast_self_avoidance_check(a, b) != naive_self_avoidance_check(a, b):
            disagreements += 1
    assert disagreements == 0


@settings(max_examples=200)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)),
                min_size=1, max_size=40),
       st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)),
                min_size=1, max_size=40))
def test_avoidance_checks_agree_property(a, b):
    a = np.array(a)
    b = np.array(b)
    assert fast_self_avoidance_check(a, b) == naive_self_avoidance_check(a, b)

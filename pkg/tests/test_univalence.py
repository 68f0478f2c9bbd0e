import pytest

from univalent.fincat import DomainError
from univalent.sset.homotopy import ScopeError
from univalent.sset.lifting import is_kan_fibration
from univalent.sset.simplex import to_point
from univalent.sset.universe import (
    classify,
    cyclic_group,
    disjoint_copies_fibration,
    nerve,
    nerve_map,
    nerve_universe,
    ordered_iso,
    permutation_groupoid,
    pullback_covering,
    univalence_check,
)


def test_universe_levels_count_ordered_sets_and_bijections():
    u, p = nerve_universe(4, 2)
    assert len(u.at[0]) == 4
    # one edge per bijection of a set of size < 4
    assert len(u.at[1]) == 1 + 1 + 2 + 6
    assert len(p.source.at[0]) == 0 + 1 + 2 + 3


def test_universe_projection_is_a_fibration():
    _, p = nerve_universe(3, 3)
    assert is_kan_fibration(p, 3).passed


def test_universe_fiber_sizes():
    u, p = nerve_universe(4, 2)
    fibers = p.fibers()[0]
    assert {v: len(fibers[v]) for v in u.at[0]} == {(n, ()): n for n in range(4)}


def _swap_cover(universe):
    """The double cover of the nerve of Z2 in which the generator swaps the sheets."""
    base = nerve(cyclic_group(2), universe[0].N)
    groupoid = permutation_groupoid(len(universe[0].at[0]))
    swap = {0: groupoid.identity[2], 1: (2, (1, 0))}
    c = nerve_map(lambda o: 2, lambda a: swap[a], base, universe[0])
    return c


def test_classify_inverts_pullback():
    universe = nerve_universe(3, 2)
    c = _swap_cover(universe)
    q, order = pullback_covering(c, universe[1])
    assert classify(q, order, universe) == c


def test_pulled_back_classifier_is_isomorphic():
    universe = nerve_universe(3, 2)
    q, order = pullback_covering(_swap_cover(universe), universe[1])
    back, order2 = pullback_covering(classify(q, order, universe), universe[1])
    assert ordered_iso(q, back, order, order2)


def test_classify_rejects_non_coverings():
    # the point has one edge and the nerve two edges over it
    with pytest.raises(DomainError):
        classify(to_point(nerve(cyclic_group(2), 2)))


@pytest.mark.parametrize("bound", [1, 2, 3])
def test_universe_is_univalent(bound):
    _, p = nerve_universe(bound, 2)
    report = univalence_check(p)
    assert report.passed
    assert report.weq.pi0_matched == report.weq.pi0_target == bound
    assert all(ok for *_, ok in report.weq.pi1)
    assert report.witness() == []


def test_two_copies_are_not_univalent():
    report = univalence_check(disjoint_copies_fibration(2))
    assert not report.passed
    assert len(report.witness()) == 2
    assert report.as_dict()["pi0_witness"]


def test_truncation_must_match():
    _, p = nerve_universe(2, 2)
    with pytest.raises(ScopeError):
        univalence_check(p, 3)

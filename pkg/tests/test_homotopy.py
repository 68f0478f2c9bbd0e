from itertools import permutations

import pytest

from univalent.fincat import identity
from univalent.sset.homotopy import Group, ScopeError, components, is_weak_equivalence_1type, pi0, pi1
from univalent.sset.simplex import boundary, disjoint_union, point, sset_map, standard_simplex, to_point
from univalent.sset.universe import cyclic_group, nerve, nerve_map, permutation_groupoid, symmetric_group


def _brute_group_order(gens):
    """Order of the group generated by permutations, by closure."""
    seen = {tuple(range(len(gens[0])))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                gh = tuple(g[i] for i in h)
                if gh not in seen:
                    seen.add(gh)
                    nxt.append(gh)
        frontier = nxt
    return len(seen)


def test_presented_cyclic_group():
    assert Group.presented(1, [[1, 1, 1, 1, 1]]).order == 5


def test_presented_symmetric_group_matches_permutations():
    # <a, b | a^2, b^2, (ab)^3> is S3
    g = Group.presented(2, [[1, 1], [2, 2], [1, 2, 1, 2, 1, 2]])
    brute = _brute_group_order([(1, 0, 2), (0, 2, 1)])
    assert g.order == brute == 6


def test_presented_klein_group_is_commutative():
    g = Group.presented(2, [[1, 1], [2, 2], [1, 2, -1, -2]])
    assert g.order == 4
    table = g.multiplication_table()
    assert all(table[a][b] == table[b][a] for a in range(4) for b in range(4))


def test_pi0_of_disjoint_union():
    x = disjoint_union([standard_simplex(1, 2), point(2), standard_simplex(2, 2)])
    assert len(components(x)) == 3
    reps = pi0(x)
    assert reps[(0, (0,))] == reps[(0, (1,))]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_pi1_of_cyclic_nerve(n):
    x = nerve(cyclic_group(n), 2)
    assert pi1(x, x.at[0][0]).order == n


def test_pi1_of_symmetric_nerve():
    x = nerve(symmetric_group(3), 2)
    assert pi1(x, x.at[0][0]).order == len(list(permutations(range(3))))


def test_pi1_of_simplex_is_trivial():
    x = standard_simplex(3, 2)
    assert pi1(x, (0,)).order == 1


def test_pi1_of_groupoid_nerve_at_each_object():
    x = nerve(permutation_groupoid(4), 2)
    orders = [pi1(x, v).order for v in x.at[0]]
    assert orders == [1, 1, 2, 6]


def test_pi1_needs_two_simplices():
    with pytest.raises(ScopeError):
        pi1(standard_simplex(1, 1), (0,))


def test_simplex_to_point_is_a_weak_equivalence():
    assert is_weak_equivalence_1type(to_point(standard_simplex(2, 2))).passed


def test_group_nerve_to_point_is_not():
    report = is_weak_equivalence_1type(to_point(nerve(cyclic_group(3), 2)))
    assert not report.passed
    assert report.pi1[0][2:4] == (3, 1)


def test_two_points_to_one_is_not():
    x = disjoint_union([point(2), point(2)])
    report = is_weak_equivalence_1type(to_point(x))
    assert not report.passed
    assert (report.pi0_source, report.pi0_target) == (2, 1)


def test_identity_and_automorphisms_are_weak_equivalences():
    x = nerve(cyclic_group(3), 2)
    assert is_weak_equivalence_1type(identity(x)).passed
    neg = nerve_map(lambda o: o, lambda a: (-a) % 3, x, x)
    assert is_weak_equivalence_1type(neg).passed


def test_trivial_homomorphism_is_not():
    x = nerve(cyclic_group(2), 2)
    y = nerve(cyclic_group(2), 2)
    ident = cyclic_group(2).identity["*"]
    f = sset_map(x, y, lambda n, s: (s[0], tuple(ident for _ in s[1])))
    assert not is_weak_equivalence_1type(f).passed


def test_circle_boundary_needs_kan_when_required():
    bd, _ = boundary(2, 2)
    with pytest.raises(ScopeError):
        is_weak_equivalence_1type(identity(bd), require_kan=True)

from itertools import product as cartesian

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from univalent.fincat import (
    DomainError,
    FinCategory,
    FinPresheaf,
    PresheafMap,
    dependent_product,
    finite_set_universe,
    hom_over,
    identity,
    maps,
    maps_over,
    pullback,
    terminal,
    to_terminal,
    verify_pullback,
)
from univalent.sset.simplex import simplex_category

ONE = FinCategory.single()


def sets(**levels):
    """A presheaf on the one-object index from a list of elements."""
    (name, elems), = levels.items()
    return FinPresheaf(ONE, {"*": list(elems)}, lambda m, x: x, name=name)


def fn(src, tgt, table):
    return PresheafMap(src, tgt, {"*": table})


def arrow_category():
    return FinCategory(["a", "b"], {"f": ("a", "b")}, {"a": "id:a", "b": "id:b"}, {})


def arrow_presheaf(at_a, at_b, act, name=""):
    return FinPresheaf(arrow_category_cached, {"a": at_a, "b": at_b}, {"f": act}, name=name)


arrow_category_cached = arrow_category()


# -- categories and presheaves ------------------------------------------------


def test_arrow_category_is_a_category():
    assert arrow_category().problems() == []


def test_missing_composite_is_reported():
    cat = FinCategory(
        ["a", "b", "c"], {"f": ("a", "b"), "g": ("b", "c")}, {o: f"id:{o}" for o in "abc"}, {}
    )
    assert any("missing composite" in p for p in cat.problems())


def test_non_associative_table_is_reported():
    # (z.e).z = z.z = e but z.(e.z) = z.e = z
    objs = ["*"]
    mors = {"e": ("*", "*"), "z": ("*", "*")}
    comp = {("e", "e"): "e", ("e", "z"): "e", ("z", "e"): "z", ("z", "z"): "e"}
    cat = FinCategory(objs, mors, {"*": "1"}, comp)
    assert any("associativity" in p for p in cat.problems())


def test_contravariance_is_checked():
    x = arrow_presheaf(["x0", "x1"], ["y"], {"y": "x0"})
    assert x.problems() == []
    bad = FinPresheaf(arrow_category_cached, {"a": ["x0"], "b": ["y"]}, {"f": {"y": "nowhere"}})
    assert bad.problems()


def test_naturality_is_checked():
    x = arrow_presheaf(["x0", "x1"], ["y"], {"y": "x0"})
    y = arrow_presheaf(["u0", "u1"], ["v"], {"v": "u0"})
    good = PresheafMap(x, y, {"a": {"x0": "u0", "x1": "u1"}, "b": {"y": "v"}})
    bad = PresheafMap(x, y, {"a": {"x0": "u1", "x1": "u1"}, "b": {"y": "v"}})
    assert good.problems() == []
    assert any("naturality" in p for p in bad.problems())


# -- pullbacks ------------------------------------------------------------------


def test_pullback_along_identity_is_the_other_map():
    z = sets(Z=[0, 1])
    y = sets(Y=["c", "d", "e"])
    g = fn(y, z, {"c": 0, "d": 1, "e": 1})
    obj, p1, p2 = pullback(identity(z), g)
    assert p2.is_iso()
    assert p1 == g.compose(p2)


def test_pullback_matches_equal_images():
    z = sets(Z=[0, 1])
    f = fn(sets(X=["a", "b"]), z, {"a": 0, "b": 1})
    g = fn(sets(Y=["c"]), z, {"c": 0})
    obj, _, _ = pullback(f, g)
    brute = [(x, y) for x in ["a", "b"] for y in ["c"] if f("*", x) == g("*", y)]
    assert list(obj.at["*"]) == brute == [("a", "c")]


def test_pullback_of_empty_source_is_empty():
    z = sets(Z=[0, 1])
    f = fn(sets(X=["a", "b"]), z, {"a": 0, "b": 1})
    g = fn(sets(Y=[]), z, {})
    obj, _, _ = pullback(f, g)
    assert obj.size() == 0


def test_pullback_rejects_mismatched_targets():
    f = fn(sets(X=["a"]), sets(Z=[0]), {"a": 0})
    g = fn(sets(Y=["c"]), sets(W=[0]), {"c": 0})
    with pytest.raises(DomainError):
        pullback(f, g)


def test_pullback_universal_property_on_arrow_category():
    base = arrow_presheaf([0, 1], [0], {0: 0})
    x = arrow_presheaf(["x0", "x1", "x2"], ["y0", "y1"], {"y0": "x0", "y1": "x2"})
    f = PresheafMap(x, base, {"a": {"x0": 0, "x1": 1, "x2": 0}, "b": {"y0": 0, "y1": 0}})
    y = arrow_presheaf(["u"], ["v"], {"v": "u"})
    g = PresheafMap(y, base, {"a": {"u": 0}, "b": {"v": 0}})
    obj, p1, p2 = pullback(f, g)
    tests = [terminal(arrow_category_cached), x, y, obj]
    assert verify_pullback(obj, p1, p2, f, g, tests) == []


def test_non_pullback_square_fails_the_universal_property():
    z = sets(Z=[0])
    f = fn(sets(X=["a", "b"]), z, {"a": 0, "b": 0})
    g = fn(sets(Y=["c"]), z, {"c": 0})
    apex = sets(A=["only"])
    left = fn(apex, f.source, {"only": "a"})
    top = fn(apex, g.source, {"only": "c"})
    assert verify_pullback(apex, left, top, f, g, [terminal(ONE)])


# -- terminal ---------------------------------------------------------------------


def test_terminal_has_unique_maps_into_it():
    pt = terminal(ONE)
    x = sets(X=["a", "b", "c"])
    assert len(maps(x, pt)) == 1
    assert len(maps(pt, pt)) == 1
    assert maps(x, pt)[0] == to_terminal(x, pt)


def test_terminal_on_simplex_index_is_the_point():
    pt = terminal(simplex_category(3))
    assert all(len(pt.at[n]) == 1 for n in range(4))


# -- dependent products -----------------------------------------------------------


def _bundle(sizes):
    """``a: A -> E -> B = {*}`` with ``|A_e| = sizes[e]``."""
    b = sets(B=["*"])
    e = sets(E=list(range(len(sizes))))
    a = sets(A=[(i, k) for i, n in enumerate(sizes) for k in range(n)])
    p = fn(e, b, {i: "*" for i in range(len(sizes))})
    am = fn(a, e, {x: x[0] for x in a.at["*"]})
    return p, am


def test_dependent_product_counts_sections():
    p, a = _bundle([2, 3])
    assert len(dependent_product(p, a).presheaf.at["*"]) == 6


def test_dependent_product_along_identity_is_the_family():
    e = sets(E=[0, 1])
    a = sets(A=["x", "y", "z"])
    am = fn(a, e, {"x": 0, "y": 0, "z": 1})
    dp = dependent_product(identity(e), am)
    assert sorted(len(v) for v in dp.map.fibers()["*"].values()) == [1, 2]


def test_dependent_product_over_empty_fiber_is_a_point():
    b = sets(B=["*"])
    e = sets(E=[])
    p = fn(e, b, {})
    a = fn(sets(A=[]), e, {})
    assert len(dependent_product(p, a).presheaf.at["*"]) == 1


def test_dependent_product_adjunction_on_arrow_category():
    # B = pt on the arrow category, E and A small; Hom_/B(X, Pi A) ~ Hom_/E(p*X, A)
    cat = arrow_category_cached
    pt = terminal(cat)
    e = arrow_presheaf(["e0", "e1"], ["f0"], {"f0": "e0"})
    a = arrow_presheaf(["a0", "a1", "a2"], ["b0", "b1"], {"b0": "a0", "b1": "a2"})
    am = PresheafMap(a, e, {"a": {"a0": "e0", "a1": "e0", "a2": "e1"}, "b": {"b0": "f0", "b1": "f0"}})
    p = to_terminal(e, pt)
    dp = dependent_product(p, am)
    for x in (pt, e, arrow_presheaf(["x"], [], {})):
        to_pt = to_terminal(x, pt)
        left = maps_over(x, dp.presheaf, to_pt, dp.map)
        pbx, pr1, pr2 = pullback(to_pt, p)
        right = maps_over(pbx, a, pr2, am)
        assert len(left) == len(right)


def test_dependent_product_rejects_non_composable_input():
    p, a = _bundle([1])
    with pytest.raises(DomainError):
        dependent_product(a, a)


# -- internal homs over U --------------------------------------------------------


def test_hom_over_counts_functions():
    u = sets(U=["u"])
    a = fn(sets(A=[1, 2]), u, {1: "u", 2: "u"})
    b = fn(sets(B=[1, 2, 3]), u, {1: "u", 2: "u", 3: "u"})
    assert len(hom_over(u, a, b).presheaf.at["*"]) == 9


def test_hom_over_contains_identity_family():
    u = sets(U=["u", "v"])
    a = fn(sets(A=[1, 2, 3]), u, {1: "u", 2: "u", 3: "v"})
    h = hom_over(u, a, a)
    for u0 in ["u", "v"]:
        assert h.lookup("*", u0, lambda m, x: x) is not None


def test_hom_over_with_empty_fibers_is_a_point_per_code():
    u = sets(U=["u", "v"])
    a = fn(sets(A=[]), u, {})
    b = fn(sets(B=[1]), u, {1: "u"})
    fibers = hom_over(u, a, b).map.fibers()["*"]
    assert {k: len(v) for k, v in fibers.items()} == {"u": 1, "v": 1}


def test_hom_over_rejects_mismatched_targets():
    u, w = sets(U=["u"]), sets(W=["u"])
    a = fn(sets(A=[1]), u, {1: "u"})
    b = fn(sets(B=[1]), w, {1: "u"})
    with pytest.raises(DomainError):
        hom_over(u, a, b)


# -- universes ---------------------------------------------------------------------


def test_chosen_pullback_is_a_function_of_the_map():
    u = finite_set_universe(3, category=ONE)
    x = sets(X=["a", "b"])
    f = PresheafMap(x, u.U, {"*": {"a": 2, "b": 1}})
    g = PresheafMap(x, u.U, {"*": {"a": 2, "b": 1}})
    assert u.choose(f) is u.choose(g)
    assert u.problems([f]) == []


# -- properties ----------------------------------------------------------------------


small_maps = st.lists(st.integers(0, 2), min_size=0, max_size=4)


@settings(max_examples=60, deadline=None)
@given(small_maps, small_maps)
def test_pullback_matches_brute_force(xs, ys):
    z = sets(Z=[0, 1, 2])
    f = fn(sets(X=list(range(len(xs)))), z, dict(enumerate(xs)))
    g = fn(sets(Y=list(range(len(ys)))), z, dict(enumerate(ys)))
    obj, _, _ = pullback(f, g)
    brute = [(i, j) for i, j in cartesian(range(len(xs)), range(len(ys))) if xs[i] == ys[j]]
    assert list(obj.at["*"]) == brute


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=0, max_size=3))
def test_dependent_product_size_is_product_of_fiber_sizes(sizes):
    p, a = _bundle(sizes)
    expected = 1
    for n in sizes:
        expected *= n
    assert len(dependent_product(p, a).presheaf.at["*"]) == expected


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=3), st.lists(st.integers(0, 1), min_size=1, max_size=3))
def test_pullback_of_composite_is_iterated_pullback(fs, gs):
    # pulling back along g then f is isomorphic to pulling back along f . g
    z = sets(Z=[0, 1])
    y = sets(Y=list(range(len(fs))))
    w = sets(W=list(range(len(gs))))
    f = fn(y, z, dict(enumerate(fs)))
    g = fn(w, y, {i: v % len(fs) for i, v in enumerate(gs)})
    e = sets(E=["p", "q", "r"])
    p = fn(e, z, {"p": 0, "q": 1, "r": 1})
    once, _, _ = pullback(f.compose(g), p)
    first, a1, _ = pullback(f, p)
    twice, _, _ = pullback(g, a1)
    assert once.size() == twice.size()

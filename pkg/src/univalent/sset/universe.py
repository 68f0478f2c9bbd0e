"""Nerves of groupoids, the finite universe of ordered coverings and the univalence check."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from ..fincat import DomainError, FinCategory, PresheafMap, hom_over, product
from .homotopy import ScopeError, WeakEquivalenceReport, components, is_weak_equivalence_1type, pi0
from .lifting import is_kan_fibration
from .simplex import TruncatedSSet, simplex_map, sset_map, sset_pullback


def nerve(cat: FinCategory, top: int, name: str = "") -> TruncatedSSet:
    """Nerve through dimension ``top``.

    An ``m``-simplex is ``(x0, (a1, ..., am))`` with ``ai: x(i-1) -> xi``.
    """
    levels = [[(x, ()) for x in cat.objects]]
    for m in range(1, top + 1):
        level = []
        for x0, arrows in levels[-1]:
            end = x0 if not arrows else cat.tgt[arrows[-1]]
            for a in cat.morphisms:
                if cat.src[a] == end:
                    level.append((x0, arrows + (a,)))
        levels.append(level)

    def act(arrow, simplex):
        _, _, f = arrow
        x0, arrows = simplex
        objs = [x0] + [cat.tgt[a] for a in arrows]
        out = []
        for i in range(1, len(f)):
            a = cat.identity[objs[f[i - 1]]]
            for t in range(f[i - 1], f[i]):
                a = cat.compose(arrows[t], a)
            out.append(a)
        return (objs[f[0]], tuple(out))

    return TruncatedSSet(levels, act, name=name, check=False)


def nerve_map(f_obj, f_mor, source: TruncatedSSet, target: TruncatedSSet, check: bool = True) -> PresheafMap:
    """Map of nerves induced by a functor given on objects and morphisms."""
    return sset_map(source, target, lambda n, s: (f_obj(s[0]), tuple(f_mor(a) for a in s[1])), check=check)


def _compose_perm(g, f):
    return tuple(g[v] for v in f)


def group_category(elements, mul, unit, name: str = "G") -> FinCategory:
    """One-object category of a finite group; ``mul(g, h)`` means ``g`` after ``h``."""
    elements = list(elements)
    return FinCategory(
        ["*"],
        {g: ("*", "*") for g in elements if g != unit},
        {"*": unit},
        {(g, h): mul(g, h) for g in elements for h in elements},
        name=name,
    )


def cyclic_group(order: int) -> FinCategory:
    return group_category(range(order), lambda a, b: (a + b) % order, 0, name=f"Z{order}")


def symmetric_group(n: int) -> FinCategory:
    elems = list(permutations(range(n)))
    return group_category(elems, _compose_perm, tuple(range(n)), name=f"S{n}")


def permutation_groupoid(bound: int) -> FinCategory:
    """Canonically ordered sets ``{0..n-1}`` with ``n < bound`` and their bijections."""
    mors, ident, comp = {}, {}, {}
    for n in range(bound):
        perms = list(permutations(range(n)))
        ident[n] = (n, tuple(range(n)))
        for g in perms:
            mors[(n, g)] = (n, n)
            for h in perms:
                comp[((n, g), (n, h))] = (n, _compose_perm(g, h))
    return FinCategory(range(bound), mors, ident, comp, name=f"Sets<{bound}")


def pointed_permutation_groupoid(bound: int) -> FinCategory:
    """Pointed variant: objects ``(n, i)``; a bijection ``g`` goes ``(n, i) -> (n, g(i))``."""
    objs = [(n, i) for n in range(bound) for i in range(n)]
    mors, ident, comp = {}, {}, {}
    for n in range(bound):
        perms = list(permutations(range(n)))
        for i in range(n):
            ident[(n, i)] = (n, i, tuple(range(n)))
            for g in perms:
                mors[(n, i, g)] = ((n, i), (n, g[i]))
                for h in perms:
                    comp[((n, h[i], g), (n, i, h))] = (n, i, _compose_perm(g, h))
    return FinCategory(objs, mors, ident, comp, name=f"PointedSets<{bound}")


def nerve_universe(bound: int, top: int = 3) -> tuple[TruncatedSSet, PresheafMap]:
    """``(U, p)``: the nerve of ordered sets of size ``< bound`` and the map forgetting the point."""
    if bound < 1 or top < 2:
        raise DomainError("nerve_universe needs bound >= 1 and truncation >= 2")
    base = nerve(permutation_groupoid(bound), top, name="U")
    total = nerve(pointed_permutation_groupoid(bound), top, name="U~")
    p = nerve_map(lambda x: x[0], lambda a: (a[0], a[2]), total, base, check=False)
    p.name = "p"
    return base, p


# -- classification of ordered coverings ---------------------------------------


def fiber_order(q: PresheafMap) -> dict:
    """Default order on vertex fibers: the level order of the total space."""
    order = {}
    for b, xs in q.fibers()[0].items():
        for i, x in enumerate(xs):
            order[x] = i
    return order


def classify(q: PresheafMap, order: dict | None = None, universe: tuple | None = None) -> PresheafMap:
    """The map ``B -> U`` classifying an ordered covering ``q: E -> B``.

    Vertices go to fiber sizes; each edge goes to the permutation obtained by
    lifting it from every point of the source fiber.
    """
    e, b = q.source, q.target
    order = order if order is not None else fiber_order(q)
    fib0 = q.fibers()[0]
    size = {v: len(fib0[v]) for v in b.at[0]}
    bound = max(size.values(), default=0) + 1
    base, p = universe if universe is not None else nerve_universe(bound, b.N)
    if max(size.values(), default=0) >= len(base.at[0]):
        raise DomainError("fiber larger than the universe allows")
    by_index = {v: sorted(fib0[v], key=lambda x: order[x]) for v in b.at[0]}
    lifts: dict = {}
    for edge in e.at[1]:
        lifts.setdefault((q.comp[1][edge], e.d(1, 1, edge)), []).append(e.d(1, 0, edge))
    perm_of = {}
    for edge in b.at[1]:
        src, tgt = b.d(1, 1, edge), b.d(1, 0, edge)
        if size[src] != size[tgt]:
            raise DomainError(f"edge {edge!r} joins fibers of different sizes")
        perm = []
        for x in by_index[src]:
            ends = lifts.get((edge, x), [])
            if len(ends) != 1:
                raise DomainError(f"edge {edge!r} has {len(ends)} lifts from {x!r}; not a covering")
            perm.append(order[ends[0]])
        perm_of[edge] = (size[src], tuple(perm))

    def comp(n, s):
        verts = b.vertices(n, s)
        arrows = tuple(perm_of[b.act[(1, n, (i - 1, i))][s]] for i in range(1, n + 1))
        return (size[verts[0]], arrows)

    return sset_map(b, base, comp)


def ordered_iso(q1: PresheafMap, q2: PresheafMap, order1: dict, order2: dict) -> bool:
    """Is there an isomorphism over the base matching vertex fibers in order?"""
    from ..fincat import search_maps

    if q1.target is not q2.target:
        raise DomainError("coverings over different bases")
    fib2 = q2.fibers()
    rank2 = {(q2.comp[0][x], order2[x]): x for x in q2.source.at[0]}

    def candidates(n, x):
        if n == 0:
            y = rank2.get((q1.comp[0][x], order1[x]))
            return [y] if y is not None else []
        return fib2[n].get(q1.comp[n][x], ())

    for f in search_maps(q1.source, q2.source, candidates):
        if f.is_iso():
            return True
    return False


def pullback_covering(c: PresheafMap, p: PresheafMap) -> tuple[PresheafMap, dict]:
    """Pull ``p`` back along ``c`` and order fibers by the point index."""
    obj, proj, q = sset_pullback(c, p)
    # a vertex of the pointed nerve is ((n, i), ()); order by the point i
    order = {x: q.comp[0][x][0][1] for x in obj.at[0]}
    return proj, order


# -- univalence ------------------------------------------------------------------


@dataclass
class UnivalenceReport:
    weq: WeakEquivalenceReport
    base_components: list
    eq_components: list  # (representative, source fiber size, target fiber size, hit by m_q)
    hom_size: list = field(default_factory=list)
    eq_size: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.weq.passed

    def witness(self) -> list:
        """Components of Eq missed by the diagonal map (empty when pi0 matches)."""
        return [c for c in self.eq_components if not c[3]]

    def as_dict(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "weak_equivalence": self.weq.as_dict(),
            "hom_level_sizes": self.hom_size,
            "eq_level_sizes": self.eq_size,
            "eq_components": [
                {"vertex": repr(r), "fiber_sizes": [a, b], "hit": hit} for r, a, b, hit in self.eq_components
            ],
            "pi0_witness": [repr(c[0]) for c in self.witness()],
        }

    def lines(self) -> list[str]:
        w = self.weq
        out = [
            f"verdict: {'pass' if self.passed else 'fail'}",
            f"pi0: base {w.pi0_source}, Eq {w.pi0_target}, matched {w.pi0_matched}/{w.pi0_target}",
        ]
        for a, b, m, n, ok in w.pi1:
            out.append(f"pi1 at {a!r}: order {m} -> {n} ({'iso' if ok else 'not iso'})")
        for r, s, t, hit in self.eq_components:
            out.append(f"Eq component over fibers {s}->{t}: {'hit' if hit else 'missed'}")
        if self.witness():
            out.append(f"pi0 witness: {len(self.witness())} component(s) of Eq outside the image")
        if w.reason:
            out.append(f"reason: {w.reason}")
        return out


def _fiber(p: PresheafMap, vertex):
    obj, _, proj = sset_pullback(simplex_map(p.target, 0, vertex), p)
    return obj


def univalence_check(p: PresheafMap, top: int | None = None, check_kan: bool = True) -> UnivalenceReport:
    """Decide whether ``m_q: B -> Eq`` is a weak equivalence of 1-types.

    ``H = Hom_{BxB}(E x B, B x E)``; ``Eq`` is the union of the components of
    ``H`` whose vertex fiber maps are weak equivalences; ``m_q`` sends a
    simplex to its identity family over the diagonal.
    """
    e, b = p.source, p.target
    top = b.N if top is None else top
    if top != b.N:
        raise ScopeError(f"univalence check runs at the truncation level ({b.N}), not {top}")
    if top < 2:
        raise ScopeError("univalence check needs truncation at least 2")
    if check_kan and not is_kan_fibration(p, top).passed:
        raise ScopeError("p is not a Kan fibration up to the requested dimension")
    bb, _, _ = product(b, b, name="BxB")
    eb, _, _ = product(e, b, name="ExB")
    be, _, _ = product(b, e, name="BxE")
    left = PresheafMap(eb, bb, lambda n, x: (p.comp[n][x[0]], x[1]))
    right = PresheafMap(be, bb, lambda n, x: (x[0], p.comp[n][x[1]]))
    hom = hom_over(bb, left, right)
    h = TruncatedSSet.from_presheaf(hom.presheaf, name="H")
    comp = pi0(h)
    fibers = {}
    for v in b.at[0]:
        fibers[v] = _fiber(p, v)
    chosen = {}
    for r in components(h):
        b1, b2 = r[0]
        f1, f2 = fibers[b1], fibers[b2]

        def fiber_map(n, x, r=r, b2=b2):
            hn = h.act[(n, 0, (0,) * (n + 1))][r]
            bn = b.act[(n, 0, (0,) * (n + 1))][b2]
            return (x[0], hom.apply(n, hn, hom.category.identity[n], (x[1], bn))[1])

        fmap = sset_map(f1, f2, fiber_map, check=False)
        chosen[r] = (is_weak_equivalence_1type(fmap).passed, len(f1.at[0]), len(f2.at[0]))
    keep = {r for r, (ok, _, _) in chosen.items() if ok}
    eq = TruncatedSSet.from_presheaf(
        h.subpresheaf(lambda n, x: comp[h.act[(0, n, (0,))][x]] in keep, name="Eq"), name="Eq"
    )

    def diagonal(n, s):
        return hom.make(n, (s, s), lambda m, x: (x[1], x[0]))

    m_q = sset_map(b, eq, diagonal, check=False, name="m_q")
    weq = is_weak_equivalence_1type(m_q)
    hit = {comp[m_q.comp[0][v]] for v in b.at[0]}
    eq_components = [(r, chosen[r][1], chosen[r][2], r in hit) for r in components(h) if r in keep]
    return UnivalenceReport(
        weq,
        components(b),
        eq_components,
        [len(h.at[n]) for n in range(top + 1)],
        [len(eq.at[n]) for n in range(top + 1)],
    )


def disjoint_copies_fibration(top: int = 3) -> PresheafMap:
    """Non-univalent example: two base points, each with a one-point fiber, no edges between."""
    from .simplex import disjoint_union, point

    base = disjoint_union([point(top), point(top)], name="2pt")
    total = disjoint_union([point(top), point(top)], name="2pt~")
    return sset_map(total, base, lambda n, x: x, name="copies")

"""Finite categories, finite-set-valued presheaves and their lccc structure.

Everything here is computed by enumeration.  A presheaf stores one tuple of
elements per index object and, for every index morphism ``m: j' -> j``, the
restriction table ``act[m]: at[j] -> at[j']``.  All iteration follows the
stored tuple order, so every "chosen" construction is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

Obj = Hashable
Mor = Hashable
Elem = Hashable


class DomainError(ValueError):
    """Operands do not fit together (mismatched targets, non-composable maps, ...)."""


class FinCategory:
    """A finite category given by its composition table.

    ``compose`` maps ``(g, f)`` to ``g . f`` (apply ``f`` first).  Composites
    with identities are filled in automatically.
    """

    def __init__(
        self,
        objects: Iterable[Obj],
        morphisms: Mapping[Mor, tuple[Obj, Obj]],
        identities: Mapping[Obj, Mor],
        compose: Mapping[tuple[Mor, Mor], Mor],
        name: str = "",
    ):
        self.name = name
        self.objects = tuple(objects)
        self.identity = dict(identities)
        self.src: dict[Mor, Obj] = {}
        self.tgt: dict[Mor, Obj] = {}
        for j in self.objects:
            i = self.identity[j]
            self.src[i] = self.tgt[i] = j
        for m, (s, t) in morphisms.items():
            self.src[m] = s
            self.tgt[m] = t
        self.morphisms = tuple(self.src)
        self._compose = dict(compose)
        for m in self.morphisms:
            self._compose.setdefault((self.identity[self.tgt[m]], m), m)
            self._compose.setdefault((m, self.identity[self.src[m]]), m)
        self.into: dict[Obj, tuple[Mor, ...]] = {
            j: tuple(m for m in self.morphisms if self.tgt[m] == j) for j in self.objects
        }
        self.hom: dict[tuple[Obj, Obj], tuple[Mor, ...]] = {
            (a, b): tuple(m for m in self.into[b] if self.src[m] == a)
            for a in self.objects
            for b in self.objects
        }

    def compose(self, g: Mor, f: Mor) -> Mor:
        try:
            return self._compose[(g, f)]
        except KeyError:
            if self.tgt[f] != self.src[g]:
                raise DomainError(f"cannot compose {g!r} after {f!r}") from None
            raise DomainError(f"composition table has no entry for {g!r} . {f!r}") from None

    def is_identity(self, m: Mor) -> bool:
        return self.identity[self.src[m]] == m

    def problems(self) -> list[str]:
        """Exhaustive check of totality, typing, identity and associativity laws."""
        out = []
        for j, i in self.identity.items():
            if self.src[i] != j or self.tgt[i] != j:
                out.append(f"identity of {j!r} is not an endomorphism")
        for f in self.morphisms:
            for g in self.morphisms:
                if self.src[g] != self.tgt[f]:
                    continue
                h = self._compose.get((g, f))
                if h is None:
                    out.append(f"missing composite {g!r} . {f!r}")
                elif self.src.get(h) != self.src[f] or self.tgt.get(h) != self.tgt[g]:
                    out.append(f"composite {g!r} . {f!r} = {h!r} has wrong type")
        if out:
            return out
        for f in self.morphisms:
            for g in self.morphisms:
                if self.tgt[f] != self.src[g]:
                    continue
                for h in self.morphisms:
                    if self.src[h] != self.tgt[g]:
                        continue
                    left = self.compose(h, self.compose(g, f))
                    right = self.compose(self.compose(h, g), f)
                    if left != right:
                        out.append(f"associativity fails on ({h!r}, {g!r}, {f!r})")
        return out

    @classmethod
    def single(cls, name: str = "*") -> "FinCategory":
        """The terminal category: presheaves on it are plain finite sets."""
        return cls([name], {}, {name: ("id", name)}, {}, name="1")


class FinPresheaf:
    """A finite-set-valued contravariant functor on a :class:`FinCategory`."""

    def __init__(
        self,
        category: FinCategory,
        at: Mapping[Obj, Sequence[Elem]],
        act: Mapping[Mor, Mapping[Elem, Elem]] | Callable[[Mor, Elem], Elem] | None = None,
        name: str = "",
    ):
        self.category = category
        self.name = name
        self.at = {j: tuple(at.get(j, ())) for j in category.objects}
        self.index = {j: {x: i for i, x in enumerate(xs)} for j, xs in self.at.items()}
        for j, xs in self.at.items():
            if len(self.index[j]) != len(xs):
                raise DomainError(f"duplicate elements at {j!r} in presheaf {name!r}")
        self.act: dict[Mor, dict[Elem, Elem]] = {}
        for m in category.morphisms:
            src = self.at[category.tgt[m]]
            if category.is_identity(m):
                self.act[m] = {x: x for x in src}
            elif callable(act):
                self.act[m] = {x: act(m, x) for x in src}
            elif act is not None and m in act:
                self.act[m] = dict(act[m])
            else:
                if src:
                    raise DomainError(f"presheaf {name!r} has no action for {m!r}")
                self.act[m] = {}

    def __repr__(self):
        sizes = ", ".join(f"{j}:{len(xs)}" for j, xs in self.at.items())
        return f"<FinPresheaf {self.name or '?'} [{sizes}]>"

    def elements(self) -> Iterator[tuple[Obj, Elem]]:
        for j in self.category.objects:
            for x in self.at[j]:
                yield j, x

    def size(self) -> int:
        return sum(len(xs) for xs in self.at.values())

    def contains(self, j: Obj, x: Elem) -> bool:
        return x in self.index[j]

    def restrict(self, m: Mor, x: Elem) -> Elem:
        return self.act[m][x]

    def problems(self) -> list[str]:
        """Exhaustive functoriality check (contravariant)."""
        cat = self.category
        out = []
        for m in cat.morphisms:
            table = self.act[m]
            s = cat.src[m]
            if set(table) != set(self.at[cat.tgt[m]]):
                out.append(f"action of {m!r} is not total")
                continue
            for x, y in table.items():
                if y not in self.index[s]:
                    out.append(f"action of {m!r} sends {x!r} outside the presheaf")
        if out:
            return out
        for f in cat.morphisms:
            for g in cat.into[cat.src[f]]:
                gf = cat.compose(f, g)
                for x in self.at[cat.tgt[f]]:
                    if self.act[gf][x] != self.act[g][self.act[f][x]]:
                        out.append(f"contravariance fails for {f!r} . {g!r} at {x!r}")
                        break
        return out

    def subpresheaf(self, keep: Callable[[Obj, Elem], bool], name: str = "") -> "FinPresheaf":
        at = {j: [x for x in xs if keep(j, x)] for j, xs in self.at.items()}
        kept = {j: set(xs) for j, xs in at.items()}
        cat = self.category
        for m in cat.morphisms:
            for x in at[cat.tgt[m]]:
                if self.act[m][x] not in kept[cat.src[m]]:
                    raise DomainError(f"subset is not closed under {m!r}")
        act = {m: {x: self.act[m][x] for x in at[cat.tgt[m]]} for m in cat.morphisms}
        return FinPresheaf(cat, at, act, name=name or self.name)

    def relabel(self, label: Callable[[Obj, Elem], Elem], name: str = "") -> tuple["FinPresheaf", "PresheafMap"]:
        """Copy with renamed elements, plus the isomorphism from ``self``."""
        cat = self.category
        new = {j: {x: label(j, x) for x in xs} for j, xs in self.at.items()}
        act = {m: {new[cat.tgt[m]][x]: new[cat.src[m]][y] for x, y in self.act[m].items()} for m in cat.morphisms}
        out = FinPresheaf(cat, {j: [new[j][x] for x in xs] for j, xs in self.at.items()}, act, name=name)
        return out, PresheafMap(self, out, new)


class PresheafMap:
    """A natural transformation between finite presheaves on the same index."""

    def __init__(
        self,
        source: FinPresheaf,
        target: FinPresheaf,
        components: Mapping[Obj, Mapping[Elem, Elem]] | Callable[[Obj, Elem], Elem],
        name: str = "",
    ):
        if source.category is not target.category:
            raise DomainError("presheaf map between different index categories")
        self.source = source
        self.target = target
        self.name = name
        if callable(components):
            self.comp = {j: {x: components(j, x) for x in source.at[j]} for j in source.at}
        else:
            self.comp = {j: dict(components.get(j, {})) for j in source.at}

    def __call__(self, j: Obj, x: Elem) -> Elem:
        return self.comp[j][x]

    def __repr__(self):
        return f"<PresheafMap {self.name or '?'}: {self.source.name or '?'} -> {self.target.name or '?'}>"

    def __eq__(self, other):
        if not isinstance(other, PresheafMap):
            return NotImplemented
        return self.source is other.source and self.target is other.target and self.comp == other.comp

    __hash__ = None  # type: ignore[assignment]

    def key(self) -> tuple:
        """Hashable component data aligned with the source's element order."""
        return tuple(tuple(self.comp[j][x] for x in self.source.at[j]) for j in self.source.category.objects)

    def problems(self) -> list[str]:
        out = []
        cat = self.source.category
        for j, xs in self.source.at.items():
            comp = self.comp[j]
            for x in xs:
                if x not in comp:
                    out.append(f"component at {j!r} undefined on {x!r}")
                elif comp[x] not in self.target.index[j]:
                    out.append(f"component at {j!r} sends {x!r} outside the target")
        if out:
            return out
        for m in cat.morphisms:
            s, t = cat.src[m], cat.tgt[m]
            for x in self.source.at[t]:
                if self.comp[s][self.source.act[m][x]] != self.target.act[m][self.comp[t][x]]:
                    out.append(f"naturality fails for {m!r} at {x!r}")
                    break
        return out

    def is_valid(self) -> bool:
        return not self.problems()

    def compose(self, other: "PresheafMap") -> "PresheafMap":
        """``self . other``."""
        if other.target is not self.source:
            raise DomainError("maps are not composable")
        return PresheafMap(
            other.source,
            self.target,
            {j: {x: self.comp[j][y] for x, y in other.comp[j].items()} for j in other.comp},
        )

    def is_iso(self) -> bool:
        for j, xs in self.source.at.items():
            image = {self.comp[j][x] for x in xs}
            if len(image) != len(xs) or len(image) != len(self.target.at[j]):
                return False
        return True

    def inverse(self) -> "PresheafMap":
        if not self.is_iso():
            raise DomainError("map is not invertible")
        return PresheafMap(self.target, self.source, {j: {y: x for x, y in c.items()} for j, c in self.comp.items()})

    def fibers(self) -> dict[Obj, dict[Elem, list[Elem]]]:
        out: dict[Obj, dict[Elem, list[Elem]]] = {}
        for j, xs in self.source.at.items():
            fib: dict[Elem, list[Elem]] = {y: [] for y in self.target.at[j]}
            for x in xs:
                fib.setdefault(self.comp[j][x], []).append(x)
            out[j] = fib
        return out


def identity(x: FinPresheaf) -> PresheafMap:
    return PresheafMap(x, x, {j: {e: e for e in xs} for j, xs in x.at.items()}, name="id")


def terminal(category: FinCategory, label: Elem = ()) -> FinPresheaf:
    """The final presheaf: one element (``label``) at every index object."""
    return FinPresheaf(category, {j: [label] for j in category.objects}, lambda m, x: x, name="pt")


def to_terminal(x: FinPresheaf, pt: FinPresheaf) -> PresheafMap:
    return PresheafMap(x, pt, lambda j, e: pt.at[j][0])


def representable(category: FinCategory, j: Obj) -> FinPresheaf:
    """Yoneda presheaf ``hom(-, j)``; elements are morphisms, action is precomposition."""
    return FinPresheaf(
        category,
        {i: category.hom[(i, j)] for i in category.objects},
        lambda n, m: category.compose(m, n),
        name=f"y({j})",
    )


def yoneda_map(category: FinCategory, j: Obj, x: FinPresheaf, elem: Elem) -> PresheafMap:
    """The map ``y(j) -> x`` classifying ``elem`` in ``x(j)``."""
    return PresheafMap(representable(category, j), x, lambda i, m: x.act[m][elem])


def pullback(
    f: PresheafMap, g: PresheafMap, name: str = "", fibers: dict | None = None
) -> tuple[FinPresheaf, PresheafMap, PresheafMap]:
    """Pointwise fiber product ``{(x, y) | f(x) = g(y)}`` with its two projections.

    ``fibers`` may pass precomputed ``g.fibers()``.
    """
    if f.target is not g.target:
        raise DomainError("pullback of maps with different targets")
    cat = f.source.category
    fib = fibers if fibers is not None else g.fibers()
    at = {j: [(x, y) for x in f.source.at[j] for y in fib[j].get(f.comp[j][x], ())] for j in cat.objects}
    xa, ya = f.source.act, g.source.act
    obj = FinPresheaf(cat, at, lambda m, e: (xa[m][e[0]], ya[m][e[1]]), name=name)
    p1 = PresheafMap(obj, f.source, lambda j, e: e[0])
    p2 = PresheafMap(obj, g.source, lambda j, e: e[1])
    return obj, p1, p2


def product(x: FinPresheaf, y: FinPresheaf, name: str = "") -> tuple[FinPresheaf, PresheafMap, PresheafMap]:
    cat = x.category
    at = {j: [(a, b) for a in x.at[j] for b in y.at[j]] for j in cat.objects}
    obj = FinPresheaf(cat, at, lambda m, e: (x.act[m][e[0]], y.act[m][e[1]]), name=name)
    return obj, PresheafMap(obj, x, lambda j, e: e[0]), PresheafMap(obj, y, lambda j, e: e[1])


def pair_into(target: FinPresheaf, f: PresheafMap, g: PresheafMap) -> PresheafMap:
    """``<f, g>`` into a pullback/product built by this module (elements are pairs)."""
    if f.source is not g.source:
        raise DomainError("pairing maps with different sources")
    out = PresheafMap(f.source, target, lambda j, w: (f.comp[j][w], g.comp[j][w]))
    for j, comp in out.comp.items():
        for w, e in comp.items():
            if e not in target.index[j]:
                raise DomainError(f"pair {e!r} is not an element of the target (cone does not commute)")
    return out


def pullback_comparison(
    apex: FinPresheaf, left: PresheafMap, top: PresheafMap, bottom: PresheafMap, right: PresheafMap
) -> tuple[PresheafMap | None, list[str]]:
    """Compare a commutative square with the canonical fiber product.

    The square is ``top: apex -> R``, ``left: apex -> L``, ``bottom: L -> Z``,
    ``right: R -> Z``.  Returns the comparison map into ``L x_Z R`` and a list
    of problems; the square is a pullback iff the list is empty.
    """
    problems = []
    for j, xs in apex.at.items():
        for w in xs:
            if bottom.comp[j][left.comp[j][w]] != right.comp[j][top.comp[j][w]]:
                problems.append(f"square does not commute at {j!r} on {w!r}")
                return None, problems
    canon, _, _ = pullback(bottom, right)
    comparison = pair_into(canon, left, top)
    for j, xs in apex.at.items():
        image = [comparison.comp[j][w] for w in xs]
        if len(set(image)) != len(image):
            problems.append(f"comparison map not injective at {j!r}")
        missing = set(canon.at[j]) - set(image)
        if missing:
            problems.append(f"comparison map misses {sorted(map(repr, missing))[0]} at {j!r}")
    return comparison, problems


# -- exhaustive search for natural families -----------------------------------


@dataclass
class SearchStats:
    """Accounting for a backtracking search.

    ``space`` is the product of all candidate-list sizes; every candidate
    assignment is either a solution or lies in an eliminated subtree, so a
    complete search ends with ``eliminated + solutions == space``.
    """

    space: int = 0
    eliminated: int = 0
    solutions: int = 0

    @property
    def complete(self) -> bool:
        return self.eliminated + self.solutions == self.space


class FamilySearch:
    """Backtracking over assignments ``slot -> target element`` subject to naturality.

    Slots are ``(j, x)`` for ``x`` in ``levels[j]``; ``restrict(n, x)`` is the
    slot's restriction along ``n: j' -> j``; ``target`` supplies the action on
    values.  Slots are visited in index-object order, then element order.
    """

    def __init__(self, category, levels, restrict, target: FinPresheaf, candidates=None):
        self.slots = [(j, x) for j in category.objects for x in levels.get(j, ())]
        self.position = pos = {s: i for i, s in enumerate(self.slots)}
        self.checks: list[list[tuple[int, dict, bool]]] = [[] for _ in self.slots]
        self.forced: list[tuple[int, dict] | None] = [None] * len(self.slots)
        self.self_checks: list[list[dict]] = [[] for _ in self.slots]
        for i, (j, x) in enumerate(self.slots):
            for n in category.into[j]:
                if category.is_identity(n):
                    continue
                k = pos[(category.src[n], restrict(n, x))]
                table = target.act[n]
                if k == i:
                    self.self_checks[i].append(table)
                elif k < i:
                    # value at i restricts to value at k
                    self.checks[i].append((k, table, True))
                else:
                    # value at k is forced by the value at i
                    if self.forced[k] is None:
                        self.forced[k] = (i, table)
                    else:
                        self.checks[k].append((i, table, False))
        if candidates is not None:
            self.set_candidates(candidates)

    def set_candidates(self, candidates) -> "FamilySearch":
        """Install per-slot candidate lists; the constraint skeleton is reused."""
        self.cands = [list(candidates(j, x)) for j, x in self.slots]
        self.suffix = [1] * (len(self.slots) + 1)
        for i in range(len(self.slots) - 1, -1, -1):
            self.suffix[i] = self.suffix[i + 1] * len(self.cands[i])
        return self

    def _ok(self, i, v, vals) -> bool:
        for k, table, down in self.checks[i]:
            if down:
                if table[v] != vals[k]:
                    return False
            elif table[vals[k]] != v:
                return False
        for table in self.self_checks[i]:
            if table[v] != v:
                return False
        return True

    def _options(self, i, vals, stats):
        cands = self.cands[i]
        rest = self.suffix[i + 1]
        forced = self.forced[i]
        if forced is not None:
            k, table = forced
            v = table[vals[k]]
            if v in cands and self._ok(i, v, vals):
                stats.eliminated += (len(cands) - 1) * rest
                yield v
            else:
                stats.eliminated += len(cands) * rest
            return
        for v in cands:
            if self._ok(i, v, vals):
                yield v
            else:
                stats.eliminated += rest

    def run(self, stats: SearchStats | None = None) -> Iterator[dict]:
        stats = stats if stats is not None else SearchStats()
        stats.space += self.suffix[0]
        n = len(self.slots)
        if n == 0:
            stats.solutions += 1
            yield {}
            return
        vals: list[Any] = [None] * n
        stack = []
        i = 0
        it = self._options(0, vals, stats)
        done = object()
        while True:
            v = next(it, done)
            if v is done:
                if i == 0:
                    return
                i -= 1
                it = stack.pop()
                continue
            vals[i] = v
            if i == n - 1:
                stats.solutions += 1
                yield {s: vals[t] for t, s in enumerate(self.slots)}
                continue
            stack.append(it)
            i += 1
            it = self._options(i, vals, stats)


def search_maps(
    source: FinPresheaf,
    target: FinPresheaf,
    candidates: Callable[[Obj, Elem], Iterable[Elem]] | None = None,
    stats: SearchStats | None = None,
) -> Iterator[PresheafMap]:
    """Enumerate natural maps ``source -> target`` (optionally restricted per element)."""
    cat = source.category
    if candidates is None:
        candidates = lambda j, x: target.at[j]  # noqa: E731
    search = FamilySearch(cat, source.at, lambda n, x: source.act[n][x], target, candidates)
    for sol in search.run(stats):
        comps: dict[Obj, dict[Elem, Elem]] = {j: {} for j in cat.objects}
        for (j, x), v in sol.items():
            comps[j][x] = v
        yield PresheafMap(source, target, comps)


def maps(source: FinPresheaf, target: FinPresheaf) -> list[PresheafMap]:
    return list(search_maps(source, target))


def maps_over(
    source: FinPresheaf, target: FinPresheaf, base_s: PresheafMap, base_t: PresheafMap
) -> list[PresheafMap]:
    """Maps ``h: source -> target`` with ``base_t . h = base_s``."""
    fib = base_t.fibers()
    return list(search_maps(source, target, lambda j, x: fib[j].get(base_s.comp[j][x], ())))


def verify_pullback(
    apex: FinPresheaf,
    left: PresheafMap,
    top: PresheafMap,
    bottom: PresheafMap,
    right: PresheafMap,
    tests: Iterable[FinPresheaf],
) -> list[str]:
    """Universal-property test of a square against every cone from each test object.

    Each cone ``(a: W -> L, b: W -> R)`` with ``bottom a = right b`` must factor
    through the apex by exactly one map.
    """
    problems = []
    for j, xs in apex.at.items():
        for w in xs:
            if bottom.comp[j][left.comp[j][w]] != right.comp[j][top.comp[j][w]]:
                return [f"square does not commute at {j!r}"]
    for w_obj in tests:
        into_apex = maps(w_obj, apex)
        for a in maps(w_obj, left.target):
            ba = bottom.compose(a)
            for b in maps_over(w_obj, top.target, ba, right):
                factors = [h for h in into_apex if left.compose(h) == a and top.compose(h) == b]
                if len(factors) != 1:
                    problems.append(f"cone from {w_obj.name or w_obj!r} factors {len(factors)} times")
                    return problems
    return problems


# -- dependent products and internal homs -------------------------------------


class DependentProduct:
    """``Pi_p A`` for ``p: E -> B`` and ``a: A -> E``, with its map to ``B``.

    An element over ``b`` in ``B(j)`` is a natural family of sections ``s`` of
    ``a`` indexed by pairs ``(m, e)`` with ``m: j' -> j`` and ``p(e) = B(m)(b)``;
    it is stored as ``(b, values)`` with ``values`` aligned to :meth:`pairs`.
    """

    def __init__(self, p: PresheafMap, a: PresheafMap, name: str = "Pi"):
        if a.target is not p.source:
            raise DomainError("dependent product: a does not land in the domain of p")
        self.p, self.a = p, a
        self.base, self.fam = p.target, a.source
        cat = self.base.category
        self.category = cat
        e_fib = p.fibers()
        a_fib = a.fibers()
        self._e_fib, self._a_fib = e_fib, a_fib
        self._pairs: dict[tuple[Obj, Elem], tuple] = {}
        self._pos: dict[tuple[Obj, Elem], dict] = {}
        at: dict[Obj, list] = {}
        for j in cat.objects:
            at[j] = []
            for b in self.base.at[j]:
                levels = self._domain(j, b)
                search = FamilySearch(
                    cat,
                    levels,
                    lambda n, me: (cat.compose(me[0], n), p.source.act[n][me[1]]),
                    self.fam,
                    lambda i, me: a_fib[i].get(me[1], ()),
                )
                pairs = self._pairs[(j, b)]
                for sol in search.run():
                    at[j].append((b, tuple(sol[(i, me)] for i, me in pairs)))
        act = {}
        for n in cat.morphisms:
            table = {}
            s, t = cat.src[n], cat.tgt[n]
            for elem in at[t]:
                table[elem] = self._restrict(n, s, t, elem)
            act[n] = table
        self.presheaf = FinPresheaf(cat, at, act, name=name)
        self.map = PresheafMap(self.presheaf, self.base, lambda j, el: el[0], name=f"{name}->B")

    def _domain(self, j, b) -> dict:
        cat = self.category
        levels: dict[Obj, list] = {}
        pairs = []
        for i in cat.objects:
            levels[i] = []
            for m in cat.hom[(i, j)]:
                bm = self.base.act[m][b]
                for e in self._e_fib[i].get(bm, ()):
                    levels[i].append((m, e))
                    pairs.append((i, (m, e)))
        self._pairs[(j, b)] = tuple(pairs)
        self._pos[(j, b)] = {me: k for k, (_, me) in enumerate(pairs)}
        return levels

    def _restrict(self, n, s, t, elem):
        cat = self.category
        b, vals = elem
        b2 = self.base.act[n][b]
        if (s, b2) not in self._pairs:
            self._domain(s, b2)
        pos = self._pos[(t, b)]
        return (b2, tuple(vals[pos[(cat.compose(n, m), e)]] for _, (m, e) in self._pairs[(s, b2)]))

    def pairs(self, j: Obj, b: Elem) -> tuple:
        """``((j', (m, e)), ...)``: the index set of a family over ``b``."""
        if (j, b) not in self._pairs:
            self._domain(j, b)
        return self._pairs[(j, b)]

    def value(self, j: Obj, elem, m: Mor, e: Elem) -> Elem:
        return elem[1][self._pos[(j, elem[0])][(m, e)]]

    def element(self, j: Obj, b: Elem, fn: Callable[[Mor, Elem], Elem]):
        """The element over ``b`` whose family is ``fn``; raises if not natural."""
        elem = (b, tuple(fn(m, e) for _, (m, e) in self.pairs(j, b)))
        if elem not in self.presheaf.index[j]:
            raise DomainError("family is not an element of the dependent product")
        return elem

    def transpose(self, xmap: PresheafMap, h: Callable[[Obj, Elem, Elem], Elem]) -> PresheafMap:
        """Adjunct of ``h: p*X -> A`` (given on pairs ``(x, e)``) as a map ``X -> Pi_p A``."""
        x = xmap.source
        cat = self.category

        def comp(j, w):
            b = xmap.comp[j][w]
            return self.element(j, b, lambda m, e: h(cat.src[m], x.act[m][w], e))

        return PresheafMap(x, self.presheaf, comp)

    def untranspose(self, g: PresheafMap) -> Callable[[Obj, Elem, Elem], Elem]:
        """Inverse of :meth:`transpose`: ``(j, x, e) -> g(x)(id, e)``."""
        ident = self.category.identity
        return lambda j, w, e: self.value(j, g.comp[j][w], ident[j], e)

    def evaluation(self) -> tuple[FinPresheaf, PresheafMap]:
        """Counit ``p*(Pi_p A) -> A`` on the canonical pullback ``Pi x_B E``."""
        obj, _, _ = pullback(self.map, self.p)
        ident = self.category.identity
        return obj, PresheafMap(obj, self.fam, lambda j, pe: self.value(j, pe[0], ident[j], pe[1]))


def dependent_product(p: PresheafMap, a: PresheafMap) -> DependentProduct:
    return DependentProduct(p, a)


class HomOver(DependentProduct):
    """Internal hom ``Hom_U(A, B) -> U`` in the slice over ``U``, as ``Pi_a a*B``.

    Family values are stored as elements of ``a*B``; :meth:`apply` and
    :meth:`make` speak in terms of ``B``-elements.
    """

    def __init__(self, u: FinPresheaf, a: PresheafMap, b: PresheafMap, name: str = "Hom"):
        if a.target is not u or b.target is not u:
            raise DomainError("hom_over: a and b must share the target u")
        self.u, self.src_map, self.tgt_map = u, a, b
        pb, pr1, _ = pullback(a, b)
        super().__init__(a, pr1, name=name)

    def apply(self, j: Obj, elem, m: Mor, x: Elem) -> Elem:
        return self.value(j, elem, m, x)[1]

    def make(self, j: Obj, u0: Elem, fn: Callable[[Mor, Elem], Elem]):
        return self.element(j, u0, lambda m, x: (x, fn(m, x)))

    def lookup(self, j: Obj, u0: Elem, fn: Callable[[Mor, Elem], Elem]):
        """Like :meth:`make` but returns ``None`` for families outside the object."""
        elem = (u0, tuple((x, fn(m, x)) for _, (m, x) in self.pairs(j, u0)))
        return elem if elem in self.presheaf.index[j] else None

    def precompose(self, other: "HomOver", i: PresheafMap) -> PresheafMap:
        """``Hom_U(A, B) -> Hom_U(A', B)`` for ``i: A' -> A`` over ``U`` (``other`` is the target)."""
        cat = self.category
        return PresheafMap(
            self.presheaf,
            other.presheaf,
            lambda j, h: other.make(j, h[0], lambda m, x: self.apply(j, h, m, i.comp[cat.src[m]][x])),
        )

    def postcompose(self, other: "HomOver", g: PresheafMap) -> PresheafMap:
        """``Hom_U(A, B) -> Hom_U(A, B')`` for ``g: B -> B'`` over ``U``."""
        cat = self.category
        return PresheafMap(
            self.presheaf,
            other.presheaf,
            lambda j, h: other.make(j, h[0], lambda m, x: g.comp[cat.src[m]][self.apply(j, h, m, x)]),
        )


def hom_over(u: FinPresheaf, a: PresheafMap, b: PresheafMap) -> HomOver:
    return HomOver(u, a, b)


# -- universes -----------------------------------------------------------------


@dataclass(eq=False)
class ChosenPullback:
    """A chosen square ``(X;f) -> U~`` over ``f: X -> U``."""

    f: PresheafMap
    obj: FinPresheaf
    proj: PresheafMap
    q: PresheafMap
    _index: dict = field(repr=False, default_factory=dict)

    def element(self, j: Obj, x: Elem, e: Elem) -> Elem:
        """The unique element over ``x`` with ``Q``-component ``e``."""
        try:
            return self._index[j][(x, e)]
        except KeyError:
            raise DomainError(f"({x!r}, {e!r}) is not a cone element at {j!r}") from None

    def split(self, j: Obj, z: Elem) -> tuple[Elem, Elem]:
        return self.proj.comp[j][z], self.q.comp[j][z]


class UniverseStructure:
    """A morphism ``p: U~ -> U`` with a chosen pullback along every map into ``U``.

    The default choice uses canonical pairs ``(x, e)``; ``chooser(j, (x, e))``
    renames them, which gives a different but isomorphic choice.  ``pt`` is the
    chosen final object.
    """

    def __init__(
        self,
        p: PresheafMap,
        pt: FinPresheaf | None = None,
        chooser: Callable[[Obj, tuple], Elem] | None = None,
        name: str = "",
    ):
        self.p = p
        self.U = p.target
        self.Ut = p.source
        self.category = self.U.category
        self.pt = pt if pt is not None else terminal(self.category)
        self.chooser = chooser
        self.name = name
        self._fib = p.fibers()
        self._cache: dict = {}

    def fiber(self, j: Obj, u: Elem) -> list[Elem]:
        return self._fib[j].get(u, [])

    def choose(self, f: PresheafMap) -> ChosenPullback:
        if f.target is not self.U:
            raise DomainError("classifying map does not land in U")
        key = (id(f.source), f.key())
        hit = self._cache.get(key)
        if hit is not None and hit.f.source is f.source:
            return hit
        obj, proj, q = pullback(f, self.p, fibers=self._fib)
        if self.chooser is not None:
            obj, iso = obj.relabel(self.chooser)
            inv = iso.inverse()
            proj, q = proj.compose(inv), q.compose(inv)
        index = {j: {(proj.comp[j][z], q.comp[j][z]): z for z in obj.at[j]} for j in obj.at}
        chosen = ChosenPullback(f, obj, proj, q, index)
        self._cache[key] = chosen
        return chosen

    def constant(self, x: FinPresheaf, code: Elem) -> PresheafMap:
        """``x -> pt -> U`` picking the global element ``code`` (a dict gives one code per level)."""
        return PresheafMap(x, self.U, lambda j, w: code[j] if isinstance(code, dict) else code)

    def restrict(self, keep: Callable[[Obj, Elem], bool], name: str = "") -> "UniverseStructure":
        """Sub-universe on the codes satisfying ``keep`` (must be a sub-presheaf of ``U``).

        Element names are unchanged, so data built for the sub-universe is
        valid for this one.
        """
        sub_u = self.U.subpresheaf(keep, name="U")
        sub_ut = self.Ut.subpresheaf(lambda j, e: keep(j, self.p.comp[j][e]), name="U~")
        sub_p = PresheafMap(sub_ut, sub_u, lambda j, e: self.p.comp[j][e], name="p")
        return UniverseStructure(sub_p, self.pt, self.chooser, name=name)

    def problems(self, maps_to_u: Iterable[PresheafMap]) -> list[str]:
        """Check chosen squares (commuting, pullback, deterministic) for each given map."""
        out = []
        for f in maps_to_u:
            c1 = self.choose(f)
            c2 = self.choose(f)
            if c1.obj.at != c2.obj.at or c1.proj.comp != c2.proj.comp or c1.q.comp != c2.q.comp:
                out.append("chosen pullback is not a function of f")
            _, probs = pullback_comparison(c1.obj, c1.proj, c1.q, f, self.p)
            out.extend(probs)
        out.extend(self.pt_problems())
        return out

    def pt_problems(self) -> list[str]:
        if any(len(xs) != 1 for xs in self.pt.at.values()):
            return ["pt is not a final object"]
        return []


def finite_set_universe(
    bound: int,
    chooser: Callable[[Obj, tuple], Elem] | None = None,
    pt_label: Elem = (),
    category: FinCategory | None = None,
) -> UniverseStructure:
    """Universe of canonically ordered finite sets of size ``< bound``.

    ``U`` has the codes ``0..bound-1``; the fiber of ``U~`` over ``n`` is
    ``(n, 0) < ... < (n, n-1)``.  Over a non-trivial index category the same
    sets are used as constant presheaves.
    """
    cat = category or FinCategory.single()
    u = FinPresheaf(cat, {j: list(range(bound)) for j in cat.objects}, lambda m, x: x, name="U")
    ut = FinPresheaf(
        cat,
        {j: [(n, i) for n in range(bound) for i in range(n)] for j in cat.objects},
        lambda m, x: x,
        name="U~",
    )
    p = PresheafMap(ut, u, lambda j, e: e[0], name="p")
    return UniverseStructure(p, terminal(cat, pt_label), chooser, name=f"sets<{bound}")

"""Truncated simplicial sets as presheaves on the simplex category cut at ``N``."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from ..fincat import DomainError, FinCategory, FinPresheaf, PresheafMap, pullback, terminal

# A morphism [m] -> [n] of the simplex category is (m, n, values).
Arrow = tuple


def monotone_maps(m: int, n: int) -> list[tuple[int, ...]]:
    """Order-preserving maps ``[m] -> [n]`` in lexicographic order."""
    return list(combinations_with_replacement(range(n + 1), m + 1))


def face_arrow(n: int, i: int) -> Arrow:
    """The coface ``[n-1] -> [n]`` skipping ``i``; presheaves turn it into ``d_i``."""
    return (n - 1, n, tuple(v if v < i else v + 1 for v in range(n)))


def degeneracy_arrow(n: int, i: int) -> Arrow:
    """The codegeneracy ``[n+1] -> [n]`` hitting ``i`` twice; it acts as ``s_i``."""
    return (n + 1, n, tuple(v if v <= i else v - 1 for v in range(n + 2)))


class SimplexCategory(FinCategory):
    """The full subcategory of the simplex category on ``[0] .. [N]``.

    Composition is computed rather than tabulated.
    """

    def __init__(self, top: int):
        self.top = top
        self.name = f"Delta<={top}"
        self.objects = tuple(range(top + 1))
        self.identity = {n: (n, n, tuple(range(n + 1))) for n in self.objects}
        self.src, self.tgt = {}, {}
        for n in self.objects:
            for m in self.objects:
                for f in monotone_maps(m, n):
                    arrow = (m, n, f)
                    self.src[arrow] = m
                    self.tgt[arrow] = n
        self.morphisms = tuple(self.src)
        self.into = {n: tuple(a for a in self.morphisms if a[1] == n) for n in self.objects}
        self.hom = {(m, n): tuple(a for a in self.into[n] if a[0] == m) for m in self.objects for n in self.objects}
        self._memo: dict = {}

    def compose(self, g: Arrow, f: Arrow) -> Arrow:
        try:
            return self._memo[(g, f)]
        except KeyError:
            pass
        if f[1] != g[0]:
            raise DomainError(f"cannot compose {g!r} after {f!r}")
        out = self._memo[(g, f)] = (f[0], g[1], tuple(g[2][v] for v in f[2]))
        return out

    def is_identity(self, m: Arrow) -> bool:
        return m[0] == m[1] and m[2] == tuple(range(m[0] + 1))


@lru_cache(maxsize=None)
def simplex_category(top: int) -> SimplexCategory:
    return SimplexCategory(top)


def _decompose(arrow: Arrow) -> list[tuple[str, int, int]]:
    """Write a monotone map as faces and degeneracies, listed in order of action.

    Returns ``[("d"|"s", level, i), ...]``: apply the first operator to an
    ``n``-simplex first.
    """
    m, n, f = arrow
    ops = []
    f = list(f)
    # split off the injective part: f = delta . sigma
    while True:
        rep = next((i for i in range(len(f) - 1) if f[i] == f[i + 1]), None)
        if rep is None:
            break
        ops.append(("s", len(f) - 2, rep))
        del f[rep + 1]
    faces = []
    image = set(f)
    level = n
    for j in range(n, -1, -1):
        if j not in image:
            faces.append(("d", level, j))
            level -= 1
    # faces act first (the injective part is applied to the simplex first)
    return faces + list(reversed(ops))


class TruncatedSSet(FinPresheaf):
    """A simplicial set recorded through dimension ``N``.

    Level ``m`` holds ``at[m]``; ``act[(m, n, f)]`` sends ``n``-simplices to
    ``m``-simplices.  ``d(n, i, x)`` and ``s(n, i, x)`` are the usual face and
    degeneracy operators on an ``n``-simplex ``x``.
    """

    def __init__(self, levels: Sequence[Sequence[Hashable]], act: Callable | Mapping, name: str = "", check: bool = True):
        top = len(levels) - 1
        if top < 0:
            raise DomainError("a truncated simplicial set needs at least level 0")
        self.N = top
        super().__init__(simplex_category(top), {n: levels[n] for n in range(top + 1)}, act, name=name)
        if check:
            probs = self.problems()
            if probs:
                raise DomainError(f"simplicial identities fail: {probs[0]}")

    @classmethod
    def from_presheaf(cls, x: FinPresheaf, name: str = "") -> "TruncatedSSet":
        if not isinstance(x.category, SimplexCategory):
            raise DomainError("presheaf is not indexed by a simplex category")
        return cls([x.at[n] for n in x.category.objects], x.act, name=name or x.name, check=False)

    @classmethod
    def from_tables(
        cls,
        levels: Sequence[Sequence[Hashable]],
        faces: Mapping[tuple[int, int], Mapping],
        degeneracies: Mapping[tuple[int, int], Mapping],
        name: str = "",
    ) -> "TruncatedSSet":
        """Build from ``d_i`` tables keyed by ``(n, i)`` (on ``n``-simplices) and ``s_i`` likewise."""

        def act(arrow, x):
            for kind, level, i in _decompose(arrow):
                table = faces if kind == "d" else degeneracies
                try:
                    x = table[(level, i)][x]
                except KeyError:
                    raise DomainError(f"missing {kind}_{i} on level {level} for {x!r}") from None
            return x

        return cls(levels, act, name=name)

    def level(self, n: int) -> tuple:
        return self.at[n]

    def d(self, n: int, i: int, x):
        return self.act[face_arrow(n, i)][x]

    def s(self, n: int, i: int, x):
        return self.act[degeneracy_arrow(n, i)][x]

    def vertices(self, n: int, x) -> tuple:
        return tuple(self.act[(0, n, (v,))][x] for v in range(n + 1))

    def is_degenerate(self, n: int, x) -> bool:
        return any(x == self.s(n - 1, i, self.d(n, i, x)) for i in range(n)) if n > 0 else False

    def nondegenerate(self, n: int) -> list:
        return [x for x in self.at[n] if not self.is_degenerate(n, x)]

    def face_tables(self) -> dict:
        return {(n, i): [self.d(n, i, x) for x in self.at[n]] for n in range(1, self.N + 1) for i in range(n + 1)}

    def degeneracy_tables(self) -> dict:
        return {(n, i): [self.s(n, i, x) for x in self.at[n]] for n in range(self.N) for i in range(n + 1)}


def sset_map(source: TruncatedSSet, target: TruncatedSSet, fn: Callable | Mapping, check: bool = True, name: str = "") -> PresheafMap:
    """Levelwise map ``fn(n, x)``; verified against all simplicial operators."""
    if source.N != target.N:
        raise DomainError("simplicial sets truncated at different levels")
    f = PresheafMap(source, target, fn, name=name)
    if check:
        probs = f.problems()
        if probs:
            raise DomainError(f"not a simplicial map: {probs[0]}")
    return f


def standard_simplex(n: int, top: int) -> TruncatedSSet:
    """``Delta^n``: level ``m`` is the monotone maps ``[m] -> [n]`` as value tuples."""
    if n < 0 or top < 0:
        raise DomainError("dimensions must be non-negative")
    levels = [monotone_maps(m, n) for m in range(top + 1)]
    return TruncatedSSet(levels, lambda a, x: tuple(x[v] for v in a[2]), name=f"Delta{n}", check=False)


def point(top: int) -> TruncatedSSet:
    return TruncatedSSet.from_presheaf(terminal(simplex_category(top)), name="pt")


def to_point(x: TruncatedSSet, pt: TruncatedSSet | None = None) -> PresheafMap:
    pt = pt or point(x.N)
    return PresheafMap(x, pt, lambda n, e: ())


def _generated(n: int, top: int, keep: Callable[[tuple], bool], name: str) -> tuple[TruncatedSSet, PresheafMap]:
    whole = standard_simplex(n, top)
    levels = [[x for x in whole.at[m] if keep(x)] for m in range(top + 1)]
    sub = TruncatedSSet(levels, lambda a, x: tuple(x[v] for v in a[2]), name=name, check=False)
    return sub, PresheafMap(sub, whole, lambda m, x: x, name="incl")


def horn(n: int, k: int, top: int) -> tuple[TruncatedSSet, PresheafMap]:
    """``Lambda^n_k`` with its inclusion into ``Delta^n``.

    A simplex lies in the horn iff together with ``k`` it misses some vertex.
    """
    if n < 1 or not 0 <= k <= n:
        raise DomainError(f"no horn Lambda^{n}_{k}")
    full = set(range(n + 1))
    return _generated(n, top, lambda x: set(x) | {k} != full, f"Lambda{n},{k}")


def boundary(n: int, top: int) -> tuple[TruncatedSSet, PresheafMap]:
    full = set(range(n + 1))
    return _generated(n, top, lambda x: set(x) != full, f"dDelta{n}")


def simplex_map(x: TruncatedSSet, n: int, simplex) -> PresheafMap:
    """The map ``Delta^n -> X`` picking an ``n``-simplex."""
    delta = standard_simplex(n, x.N)
    return PresheafMap(delta, x, lambda m, a: x.act[(m, n, a)][simplex])


def sset_pullback(f: PresheafMap, g: PresheafMap, name: str = "") -> tuple[TruncatedSSet, PresheafMap, PresheafMap]:
    obj, p1, p2 = pullback(f, g)
    sset = TruncatedSSet.from_presheaf(obj, name=name)
    return (
        sset,
        PresheafMap(sset, f.source, p1.comp),
        PresheafMap(sset, g.source, p2.comp),
    )


def sset_product(x: TruncatedSSet, y: TruncatedSSet, name: str = "") -> tuple[TruncatedSSet, PresheafMap, PresheafMap]:
    pt = point(x.N)
    return sset_pullback(to_point(x, pt), to_point(y, pt), name=name)


def disjoint_union(parts: Iterable[TruncatedSSet], name: str = "") -> TruncatedSSet:
    """Coproduct with simplices tagged ``(index, simplex)``."""
    parts = list(parts)
    top = parts[0].N
    levels = [[(t, x) for t, part in enumerate(parts) for x in part.at[n]] for n in range(top + 1)]
    return TruncatedSSet(levels, lambda a, e: (e[0], parts[e[0]].act[a][e[1]]), name=name, check=False)


def relabel(x: TruncatedSSet, label: Callable[[int, Hashable], Hashable]) -> tuple[TruncatedSSet, PresheafMap]:
    obj, iso = x.relabel(label)
    out = TruncatedSSet.from_presheaf(obj, name=x.name)
    return out, PresheafMap(x, out, iso.comp)


def count_nondegenerate(n: int, m: int) -> int:
    """Injective monotone maps ``[m] -> [n]``."""
    return sum(1 for _ in combinations(range(n + 1), m + 1))

"""The contextual category of towers of classifying maps over a universe."""

from __future__ import annotations

from dataclasses import dataclass

from ..fincat import (
    DomainError,
    FinPresheaf,
    PresheafMap,
    UniverseStructure,
    maps,
    pullback_comparison,
)
from .contextual import ContextualCategory


@dataclass(frozen=True)
class Tower:
    """An object ``(F1, ..., Fm)``; each entry is the component data of a map into ``U``."""

    codes: tuple

    def __len__(self):
        return len(self.codes)

    def parent(self) -> "Tower":
        return Tower(self.codes[:-1])

    def extend(self, code) -> "Tower":
        return Tower(self.codes + (code,))


@dataclass(frozen=True)
class TowerMap:
    """A morphism: an ambient map between the totals, stored by its component data."""

    src: Tower
    tgt: Tower
    comps: tuple


class UniverseCC(ContextualCategory):
    """``CC(C, p)`` built from a :class:`UniverseStructure`.

    The total of ``(F1..Fm)`` is obtained by iterated chosen pullbacks; totals
    and classifier maps are cached so repeated requests yield the same data.
    """

    def __init__(self, universe: UniverseStructure, name: str = ""):
        self.u = universe
        self.name = name or f"CC({universe.name or 'p'})"
        self._pt = Tower(())
        self._totals: dict = {self._pt: universe.pt}
        self._classifiers: dict = {}
        self._chosen: dict = {}
        self._objects: dict = {}

    # -- ambient data ---------------------------------------------------------

    @property
    def pt(self):
        return self._pt

    def total(self, x: Tower) -> FinPresheaf:
        hit = self._totals.get(x)
        if hit is None:
            hit = self.chosen(x).obj
            self._totals[x] = hit
        return hit

    def classifier(self, x: Tower) -> PresheafMap:
        """The last classifier ``F_m: total(ft x) -> U`` as a map."""
        if len(x) == 0:
            raise DomainError("pt has no classifier")
        hit = self._classifiers.get(x)
        if hit is None:
            base = self.total(x.parent())
            code = x.codes[-1]
            comps = {}
            for j, row in zip(base.category.objects, code):
                if len(row) != len(base.at[j]):
                    raise DomainError("classifier data does not match the total of the parent")
                comps[j] = dict(zip(base.at[j], row))
            hit = PresheafMap(base, self.u.U, comps)
            self._classifiers[x] = hit
        return hit

    def chosen(self, x: Tower):
        hit = self._chosen.get(x)
        if hit is None:
            hit = self.u.choose(self.classifier(x))
            self._chosen[x] = hit
        return hit

    def code_of(self, f: PresheafMap) -> tuple:
        return f.key()

    def tower(self, base: Tower, f: PresheafMap) -> Tower:
        """Extend ``base`` by a classifier ``f: total(base) -> U``."""
        if f.source is not self.total(base) or f.target is not self.u.U:
            raise DomainError("classifier must map the total of the base into U")
        return base.extend(f.key())

    def to_map(self, f: TowerMap) -> PresheafMap:
        src, tgt = self.total(f.src), self.total(f.tgt)
        return PresheafMap(src, tgt, {j: dict(zip(src.at[j], row)) for j, row in zip(src.category.objects, f.comps)})

    def from_map(self, src: Tower, tgt: Tower, f: PresheafMap) -> TowerMap:
        if f.source is not self.total(src) or f.target is not self.total(tgt):
            raise DomainError("map does not go between the given totals")
        return TowerMap(src, tgt, f.key())

    # -- contextual structure -------------------------------------------------

    def length(self, x: Tower) -> int:
        return len(x)

    def ft(self, x: Tower) -> Tower:
        return x.parent() if len(x) else x

    def proj(self, x: Tower) -> TowerMap:
        if len(x) == 0:
            return self.identity(x)
        return self.from_map(x, x.parent(), self.chosen(x).proj)

    def pullback(self, x: Tower, f: TowerMap) -> tuple[Tower, TowerMap]:
        if len(x) == 0 or f.tgt != x.parent():
            raise DomainError("pullback needs f: Y -> ft(X) with X of positive length")
        fmap = self.to_map(f)
        new = self.classifier(x).compose(fmap)
        fstar = self.tower(f.src, new)
        mine, theirs = self.chosen(fstar), self.chosen(x)
        q = PresheafMap(
            mine.obj,
            theirs.obj,
            lambda j, z: theirs.element(j, fmap.comp[j][mine.proj.comp[j][z]], mine.q.comp[j][z]),
        )
        return fstar, self.from_map(fstar, x, q)

    def objects(self, depth: int) -> list:
        out = [self._pt]
        frontier = [self._pt]
        for _ in range(depth):
            nxt = []
            for x in frontier:
                for f in maps(self.total(x), self.u.U):
                    nxt.append(x.extend(f.key()))
            out.extend(nxt)
            frontier = nxt
        return out

    def hom(self, x: Tower, y: Tower) -> list:
        key = (x, y)
        hit = self._objects.get(key)
        if hit is None:
            hit = [TowerMap(x, y, f.key()) for f in maps(self.total(x), self.total(y))]
            self._objects[key] = hit
        return hit

    def compose(self, g: TowerMap, f: TowerMap) -> TowerMap:
        if f.tgt != g.src:
            raise DomainError("morphisms are not composable")
        return self.from_map(f.src, g.tgt, self.to_map(g).compose(self.to_map(f)))

    def identity(self, x: Tower) -> TowerMap:
        t = self.total(x)
        return TowerMap(x, x, tuple(tuple(t.at[j]) for j in t.category.objects))

    def source(self, f: TowerMap):
        return f.src

    def target(self, f: TowerMap):
        return f.tgt

    def describe(self, v) -> str:
        if isinstance(v, Tower):
            return "(" + ", ".join(_short(c) for c in v.codes) + ")"
        if isinstance(v, TowerMap):
            return f"{self.describe(v.src)} -> {self.describe(v.tgt)} {_short(v.comps)}"
        return repr(v)

    # -- helpers used by the structures --------------------------------------

    def section(self, x: Tower, term: PresheafMap) -> TowerMap:
        """The section ``ft(x) -> x`` of ``p_x`` whose ``Q``-component is ``term``."""
        chosen = self.chosen(x)
        base = self.total(x.parent())
        if term.source is not base:
            raise DomainError("term is not defined on the base of the object")
        sec = PresheafMap(base, chosen.obj, lambda j, w: chosen.element(j, w, term.comp[j][w]))
        return self.from_map(x.parent(), x, sec)

    def term_of(self, x: Tower, s: TowerMap) -> PresheafMap:
        """Inverse of :meth:`section`: the ``Q``-component of a section."""
        return self.chosen(x).q.compose(self.to_map(s))

    def ambient_square_problems(self, x: Tower, f: TowerMap) -> list[str]:
        fstar, q = self.pullback(x, f)
        _, probs = pullback_comparison(
            self.total(fstar), self.to_map(self.proj(fstar)), self.to_map(q), self.to_map(f), self.to_map(self.proj(x))
        )
        return probs

    def pullback_section(self, f: TowerMap, s: TowerMap) -> TowerMap:
        """Substitution: pull a section ``s`` of ``p_x`` back along ``f: W -> ft(x)``."""
        x = s.tgt
        fstar, _ = self.pullback(x, f)
        term = self.term_of(x, s).compose(self.to_map(f))
        return self.section(fstar, term)


def _short(data) -> str:
    text = repr(data)
    return text if len(text) <= 80 else text[:77] + "..."


def build_cc(universe: UniverseStructure, name: str = "") -> UniverseCC:
    return UniverseCC(universe, name=name)

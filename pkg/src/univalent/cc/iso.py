"""Isomorphisms between the contextual categories of equivalent universe presentations."""

from __future__ import annotations

from dataclasses import dataclass

from ..fincat import DomainError, PresheafMap, UniverseStructure
from .universe_cc import Tower, TowerMap, UniverseCC


@dataclass
class UniverseIso:
    """Isomorphisms ``codes: U1 -> U2`` and ``points: U1~ -> U2~`` commuting with the projections."""

    codes: PresheafMap
    points: PresheafMap

    def problems(self, u1: UniverseStructure, u2: UniverseStructure) -> list[str]:
        out = []
        if self.codes.source is not u1.U or self.codes.target is not u2.U:
            out.append("code map must go from U1 to U2")
        if self.points.source is not u1.Ut or self.points.target is not u2.Ut:
            out.append("point map must go from U1~ to U2~")
        if out:
            return out
        for m in (self.codes, self.points):
            out.extend(m.problems())
            if not m.problems() and not m.is_iso():
                out.append(f"{m.name or 'map'} is not invertible")
        if out:
            return out
        if u2.p.compose(self.points) != self.codes.compose(u1.p):
            out.append("the square with the two projections does not commute")
        return out

    def then(self, other: "UniverseIso") -> "UniverseIso":
        return UniverseIso(other.codes.compose(self.codes), other.points.compose(self.points))


def identity_witness(u: UniverseStructure) -> UniverseIso:
    from ..fincat import identity

    return UniverseIso(identity(u.U), identity(u.Ut))


def relabeled_universe(
    u: UniverseStructure, code_label=None, point_label=None, chooser=None, pt_label=None, name: str = ""
) -> tuple[UniverseStructure, UniverseIso]:
    """A second presentation of ``u``: renamed codes/points, another pullback choice and final object."""
    code_label = code_label or (lambda j, x: x)
    point_label = point_label or (lambda j, x: x)
    new_u, codes = u.U.relabel(code_label, name="U")
    new_ut, points = u.Ut.relabel(point_label, name="U~")
    inv = points.inverse()
    p = PresheafMap(new_ut, new_u, lambda j, e: codes.comp[j][u.p.comp[j][inv.comp[j][e]]], name="p")
    pt = u.pt
    if pt_label is not None:
        from ..fincat import terminal

        pt = terminal(u.category, pt_label)
    out = UniverseStructure(p, pt, chooser, name=name or f"{u.name}'")
    return out, UniverseIso(codes, points)


class ContextualIso:
    """The isomorphism ``CC(C, p1) -> CC(C, p2)`` induced by a universe isomorphism.

    ``theta(x)`` identifies the totals; objects go to towers of transported
    classifiers and morphisms are conjugated by ``theta``.
    """

    def __init__(self, cc1: UniverseCC, cc2: UniverseCC, witness: UniverseIso):
        probs = witness.problems(cc1.u, cc2.u)
        if probs:
            raise DomainError(f"witness is not an equivalence: {probs[0]}")
        self.cc1, self.cc2, self.w = cc1, cc2, witness
        self._obj: dict = {cc1.pt: cc2.pt}
        self._theta: dict = {}

    def theta(self, x: Tower) -> PresheafMap:
        """Isomorphism ``total1(x) -> total2(F(x))``."""
        hit = self._theta.get(x)
        if hit is not None:
            return hit
        t1 = self.cc1.total(x)
        y = self.obj(x)
        t2 = self.cc2.total(y)
        if len(x) == 0:
            hit = PresheafMap(t1, t2, lambda j, e: t2.at[j][0])
        else:
            base = self.theta(x.parent())
            c1, c2 = self.cc1.chosen(x), self.cc2.chosen(y)
            pts = self.w.points.comp
            hit = PresheafMap(
                t1, t2, lambda j, z: c2.element(j, base.comp[j][c1.proj.comp[j][z]], pts[j][c1.q.comp[j][z]])
            )
        self._theta[x] = hit
        return hit

    def obj(self, x: Tower) -> Tower:
        hit = self._obj.get(x)
        if hit is not None:
            return hit
        parent = self.obj(x.parent())
        back = self.theta(x.parent()).inverse()
        new = self.w.codes.compose(self.cc1.classifier(x)).compose(back)
        hit = self.cc2.tower(parent, new)
        self._obj[x] = hit
        return hit

    def mor(self, f: TowerMap) -> TowerMap:
        src, tgt = self.obj(f.src), self.obj(f.tgt)
        conj = self.theta(f.tgt).compose(self.cc1.to_map(f)).compose(self.theta(f.src).inverse())
        return self.cc2.from_map(src, tgt, conj)

    def __call__(self, v):
        return self.obj(v) if isinstance(v, Tower) else self.mor(v)


def canonical_iso(cc1: UniverseCC, cc2: UniverseCC, witness: UniverseIso) -> ContextualIso:
    return ContextualIso(cc1, cc2, witness)


def preservation_problems(iso: ContextualIso, depth: int, pb_depth: int | None = None) -> list[str]:
    """Exhaustively compare ``pt``, length, ``ft``, ``p`` and ``pb`` on both sides.

    Also checks that objects map bijectively onto the objects of the target
    up to ``depth``.
    """
    cc1, cc2 = iso.cc1, iso.cc2
    out = []
    if iso(cc1.pt) != cc2.pt:
        out.append("pt not preserved")
    objs1 = cc1.objects(depth)
    images = [iso(x) for x in objs1]
    if len(set(images)) != len(images) or set(images) != set(cc2.objects(depth)):
        out.append("not a bijection on objects")
    pb_depth = depth if pb_depth is None else pb_depth
    for x, fx in zip(objs1, images):
        if len(fx) != len(x):
            out.append(f"length changed at {cc1.describe(x)}")
        if iso(cc1.ft(x)) != cc2.ft(fx):
            out.append(f"ft not preserved at {cc1.describe(x)}")
        if iso(cc1.proj(x)) != cc2.proj(fx):
            out.append(f"projection not preserved at {cc1.describe(x)}")
        if len(x) == 0:
            continue
        for y in objs1:
            if len(y) > pb_depth - 1:
                continue
            for f in cc1.hom(y, cc1.ft(x)):
                fstar, q = cc1.pullback(x, f)
                gstar, r = cc2.pullback(fx, iso(f))
                if iso(fstar) != gstar or iso(q) != r:
                    out.append(f"pullback not preserved at {cc1.describe(x)} along {cc1.describe(f)}")
        if out:
            break
    return out


def composition_problems(first: ContextualIso, second: ContextualIso, direct: ContextualIso, depth: int) -> list[str]:
    """``second . first`` must agree with ``direct`` on objects and on all morphisms between them."""
    out = []
    objs = first.cc1.objects(depth)
    for x in objs:
        if second(first(x)) != direct(x):
            out.append(f"objects disagree at {first.cc1.describe(x)}")
    for x in objs:
        for y in objs:
            for f in first.cc1.hom(x, y):
                if second(first(f)) != direct(f):
                    out.append(f"morphisms disagree at {first.cc1.describe(f)}")
                    return out
    return out

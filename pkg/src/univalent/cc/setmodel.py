"""Canonical classifier data for the universe of finite ordered sets.

The universe has codes ``0 .. M-1`` where ``M`` is large enough to hold every
product and sum of families drawn from the window of codes ``< window``.
Points of the fiber over ``n`` are ``(n, 0) .. (n, n-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

from ..fincat import PresheafMap, UniverseStructure, finite_set_universe
from .structures import (
    IdData,
    IdStructure,
    PiStructure,
    SigmaStructure,
    StructureError,
    Window,
    derive_id_structure,
    derive_pi_structure,
    derive_sigma_structure,
    id_homs,
    sigma_tower,
)
from .universe_cc import UniverseCC


def universe_size(window: int) -> int:
    """Smallest code count closing the window under products and sums."""
    top = window - 1
    return max(top**top, top * top, window) + 1


def _codes(win: Window, hom, j, elem) -> list:
    """Values of a family or section at the points of its base fiber, in fiber order."""
    return [win.at(hom, j, elem, x) for x in win.w.fiber(j, elem[0])]


@dataclass
class Classifiers:
    P: PresheafMap
    Pt: PresheafMap
    S: PresheafMap
    St: PresheafMap
    Omega: PresheafMap
    Eq: PresheafMap
    j_section: PresheafMap


def canonical_classifiers(win: Window, reverse: bool = False) -> Classifiers:
    """Products as mixed-radix tuples, sums as blocks, equality as a one-point set.

    ``reverse`` enumerates products and sums in the opposite order, giving a
    second valid presentation.
    """
    u = win.u
    fam, sec = win.families, win.sections
    order = (lambda xs: xs[::-1]) if reverse else (lambda xs: xs)

    def p_code(j, f):
        return prod(_codes(win, fam, j, f))

    def pt_point(j, s):
        points = order(_codes(win, sec, j, s))
        index, scale = 0, 1
        for code, i in points:
            index += i * scale
            scale *= code
        return (prod(c for c, _ in points), index)

    P = PresheafMap(fam.presheaf, u.U, p_code, name="P")
    Pt = PresheafMap(sec.presheaf, u.Ut, pt_point, name="P~")

    tower = sigma_tower(win)
    S = PresheafMap(fam.presheaf, u.U, lambda j, f: sum(_codes(win, fam, j, f)), name="S")

    def st_point(j, t):
        (f, x), (_, y) = t
        codes = _codes(win, fam, j, f)
        points = win.w.fiber(j, f[0])
        k = points.index(x)
        if reverse:
            offset = sum(codes[k + 1 :]) + (codes[k] - 1 - y)
        else:
            offset = sum(codes[:k]) + y
        return (sum(codes), offset)

    St = PresheafMap(tower.presheaf, u.Ut, st_point, name="S~")

    Omega = PresheafMap(win.w.Ut, u.Ut, lambda j, a: (1, 0), name="Omega")
    data = IdData(win, Omega, PresheafMap(win.pairs, u.U, lambda j, e: int(e[0] == e[1]), name="Eq"))
    _, ext_sec, _, obj, _, _, _ = id_homs(win, data)

    def j_value(j, pair):
        _, base = pair
        return ext_sec.make(j, base[0], lambda m, e: sec.apply(j, base, m, e[0][0]))

    js = PresheafMap(obj, ext_sec.presheaf, j_value, name="J")
    win.__dict__["_id_data"] = data
    return Classifiers(P, Pt, S, St, Omega, data.Eq, js)


@dataclass
class StructuredModel:
    """A universe with its contextual category and the three verified structures."""

    universe: UniverseStructure
    window: Window
    cc: UniverseCC
    pi: PiStructure
    sigma: SigmaStructure
    ident: IdStructure
    name: str = ""


def derive_all(u: UniverseStructure, win: Window, cls: Classifiers, name: str = "") -> StructuredModel:
    pi = derive_pi_structure(u, cls.Pt, cls.P, win)
    sigma = derive_sigma_structure(u, cls.St, cls.S, win)
    data = win.__dict__.get("_id_data")
    if data is None or data.Eq is not cls.Eq or data.Omega is not cls.Omega:
        data = None
    ident = derive_id_structure(u, cls.Omega, cls.Eq, cls.j_section, win, data=data)
    return StructuredModel(u, win, UniverseCC(u), pi, sigma, ident, name=name)


def set_model(window: int = 4, reverse: bool = False, chooser=None, name: str = "") -> StructuredModel:
    """Finite-set model whose structures are verified on fibers of size ``< window``."""
    if window < 1:
        raise StructureError("window must be positive")
    u = finite_set_universe(universe_size(window), chooser=chooser)
    u.name = name or f"sets<{window}"
    win = Window(u, u.restrict(lambda j, c: c < window, name=f"window<{window}"))
    return derive_all(u, win, canonical_classifiers(win, reverse=reverse), name=u.name)


def alternate_model(window: int = 4) -> StructuredModel:
    """Second presentation: reversed product/sum enumeration and relabeled chosen pullbacks."""
    return set_model(window, reverse=True, chooser=lambda j, e: ("pb", e), name=f"sets<{window}'")


# -- mutated classifier data for precondition tests ----------------------------


def mutated_classifiers(win: Window, kind: str) -> Classifiers:
    """Canonical data with one seeded defect named by ``kind``."""
    cls = canonical_classifiers(win)
    u = win.u
    if kind == "P-tilde-collapse":
        # every section lands on the first point: not injective on fibers
        old = cls.Pt
        cls.Pt = PresheafMap(old.source, u.Ut, lambda j, s: (old.comp[j][s][0], 0))
    elif kind == "P-shifted":
        old = cls.P
        cls.P = PresheafMap(old.source, u.U, lambda j, f: (old.comp[j][f] + 1) % len(u.U.at[j]))
    elif kind == "S-tilde-collapse":
        old = cls.St
        cls.St = PresheafMap(old.source, u.Ut, lambda j, t: (old.comp[j][t][0], 0))
    elif kind == "Eq-doubled":
        old = cls.Eq
        cls.Eq = PresheafMap(old.source, u.U, lambda j, e: 2 if e[0] == e[1] else 0)
    elif kind == "Omega-off-diagonal":
        cls.Omega = PresheafMap(cls.Omega.source, u.Ut, lambda j, a: (2, 1))
    elif kind == "J-swapped":
        ext_sec = cls.j_section.target
        old = cls.j_section
        table = {}
        for j, xs in old.source.at.items():
            table[j] = {}
            for pair in xs:
                h = old.comp[j][pair]
                vals = h[1]
                if len(vals) >= 2 and vals[0][1] != vals[1][1]:
                    (e0, b0), (e1, b1) = vals[:2]
                    swapped = (h[0], ((e0, b1), (e1, b0)) + vals[2:])
                    if swapped in ext_sec.index[j]:
                        h = swapped
                table[j][pair] = h
        cls.j_section = PresheafMap(old.source, ext_sec, table)
    else:
        raise ValueError(f"unknown mutation {kind!r}")
    return cls


MUTATIONS = ("P-tilde-collapse", "P-shifted", "S-tilde-collapse", "Eq-doubled", "Omega-off-diagonal", "J-swapped")

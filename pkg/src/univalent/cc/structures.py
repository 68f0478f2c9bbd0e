"""Dependent products, sums and identity types from classifier data on a universe.

Every structure works with *terms*: maps ``t: G -> U~`` from a total ``G``
(the ambient object of a context) that lie over a classifier ``A: G -> U``
(``p . t = A``).  Sections in the contextual category correspond to terms by
:meth:`UniverseCC.section` / :meth:`UniverseCC.term_of`.

The classifier maps are defined on internal homs taken over a *window*
sub-universe ``W`` of ``U`` (same element names, fewer codes) and land in the
full universe.  Operations whose inputs leave the window raise
:class:`StructureError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from ..fincat import (
    DomainError,
    FinPresheaf,
    HomOver,
    PresheafMap,
    UniverseStructure,
    pullback,
    pullback_comparison,
)


class StructureError(Exception):
    """Classifier data fails a precondition, or an operation leaves the verified window."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def _first_problem(kind: str, probs: list[str], witness=None):
    if probs:
        raise StructureError(f"{kind}: {probs[0]}", witness if witness is not None else probs[0])


class Window:
    """Internal homs over the window universe ``w`` used as classifier domains.

    ``families``  = Hom_W(W~, W_ x W)   (a code for each point of a fiber)
    ``sections``  = Hom_W(W~, W_ x W~)  (a point for each point of a fiber)
    The underlined factor is the base: elements of the products are ``(base, value)``.
    """

    def __init__(self, full: UniverseStructure, window: UniverseStructure | None = None):
        self.u = full
        self.w = window or full
        if self.w.category is not full.category:
            raise DomainError("window and universe live over different index categories")
        self.cat = full.category

    def _product(self, value: FinPresheaf, name: str):
        base = self.w.U
        at = {j: [(b, v) for b in base.at[j] for v in value.at[j]] for j in self.cat.objects}
        obj = FinPresheaf(self.cat, at, lambda m, e: (base.act[m][e[0]], value.act[m][e[1]]), name=name)
        return obj, PresheafMap(obj, base, lambda j, e: e[0])

    @cached_property
    def families(self) -> HomOver:
        _, to_base = self._product(self.w.U, "W_xW")
        return HomOver(self.w.U, self.w.p, to_base, name="Fam")

    @cached_property
    def sections(self) -> HomOver:
        _, to_base = self._product(self.w.Ut, "W_xW~")
        return HomOver(self.w.U, self.w.p, to_base, name="Sec")

    @cached_property
    def post(self) -> PresheafMap:
        """Hom(W~, W_ x p): a section to the family of codes it lives over."""
        fam_b = self.families.tgt_map.source
        sec_b = self.sections.tgt_map.source
        idp = PresheafMap(sec_b, fam_b, lambda j, e: (e[0], self.w.p.comp[j][e[1]]))
        return self.sections.postcompose(self.families, idp)

    @cached_property
    def pairs(self) -> FinPresheaf:
        """``W~ x_W W~``: pairs of points in a common fiber."""
        return pullback(self.w.p, self.w.p, name="W~xW~")[0]

    # element helpers --------------------------------------------------------

    def in_window(self, j, code) -> bool:
        return code in self.w.U.index[j]

    def _require(self, j, code, what):
        if not self.in_window(j, code):
            raise StructureError(f"{what} code {code!r} lies outside the verified window")

    def family(self, j, u0, fn) -> tuple:
        """Element of ``families`` over ``u0``; ``fn(m, x)`` gives the code at a point ``x``."""
        self._require(j, u0, "base")
        cat, U = self.cat, self.w.U
        out = self.families.lookup(j, u0, lambda m, x: (U.act[m][u0], fn(m, x)))
        if out is None:
            for m_x in self.families.pairs(j, u0):
                _, (m, x) = m_x
                self._require(cat.src[m], fn(m, x), "family")
            raise StructureError("family is not natural")
        return out

    def section(self, j, u0, fn) -> tuple:
        self._require(j, u0, "base")
        U = self.w.U
        out = self.sections.lookup(j, u0, lambda m, x: (U.act[m][u0], fn(m, x)))
        if out is None:
            raise StructureError("section leaves the verified window or is not natural")
        return out

    def at(self, hom: HomOver, j, elem, x):
        """Value of a family or section at a point ``x`` of the level-``j`` fiber."""
        return hom.apply(j, elem, self.cat.identity[j], x)[1]

    def transpose(self, classifier: PresheafMap, inner) -> PresheafMap:
        """``G -> families`` sending ``w`` to ``x |-> inner(j', G(m) w, x)`` over ``classifier(w)``.

        ``inner(j', w', x)`` receives the restricted context element and a point
        over ``classifier(w')``.
        """
        g = classifier.source
        return PresheafMap(
            g,
            self.families.presheaf,
            lambda j, w: self.family(
                j, classifier.comp[j][w], lambda m, x: inner(self.cat.src[m], g.act[m][w], x)
            ),
        )

    def transpose_section(self, classifier: PresheafMap, inner) -> PresheafMap:
        g = classifier.source
        return PresheafMap(
            g,
            self.sections.presheaf,
            lambda j, w: self.section(
                j, classifier.comp[j][w], lambda m, x: inner(self.cat.src[m], g.act[m][w], x)
            ),
        )


def _fiber_inverse(f: PresheafMap, over: PresheafMap) -> dict:
    """For a map ``f`` that is bijective on each fiber of ``over``: ``(j, base, f-value) -> element``."""
    out = {}
    for j, xs in f.source.at.items():
        for x in xs:
            out[(j, over.comp[j][x], f.comp[j][x])] = x
    return out


# -- dependent products ----------------------------------------------------------


class PiStructure:
    """Products of families from ``P: families -> U`` and ``P~: sections -> U~``."""

    def __init__(self, window: Window, P: PresheafMap, Pt: PresheafMap):
        self.win, self.P, self.Pt = window, P, Pt
        self.u = window.u
        self._inv = _fiber_inverse(Pt, window.post)

    def code(self, F: PresheafMap, G: PresheafMap) -> PresheafMap:
        """``Pi(F, G)``: ``F: Gam -> U``, ``G: Gam.F -> U``."""
        chosen = self.u.choose(F)
        fam = self.win.transpose(F, lambda j, w, x: G.comp[j][chosen.element(j, w, x)])
        return self.P.compose(fam)

    def lam(self, F: PresheafMap, G: PresheafMap, body: PresheafMap) -> PresheafMap:
        """Abstraction of a term ``body: Gam.F -> U~`` over ``G``."""
        chosen = self.u.choose(F)
        sec = self.win.transpose_section(F, lambda j, w, x: body.comp[j][chosen.element(j, w, x)])
        return self.Pt.compose(sec)

    def app(self, F: PresheafMap, G: PresheafMap, fn: PresheafMap, arg: PresheafMap) -> PresheafMap:
        """Evaluation: ``fn`` over ``Pi(F, G)`` and ``arg`` over ``F`` give a term over ``G[arg]``."""
        gam = F.source
        win = self.win
        out = {}
        for j, ws in gam.at.items():
            out[j] = {}
            for w in ws:
                sec = self._inv.get((j, self.family(F, G, j, w), fn.comp[j][w]))
                if sec is None:
                    raise StructureError("function term does not lie over the product code")
                out[j][w] = win.at(win.sections, j, sec, arg.comp[j][w])
        return PresheafMap(gam, self.u.Ut, out)

    def unlam(self, F: PresheafMap, G: PresheafMap, fn: PresheafMap) -> PresheafMap:
        """Evaluation at the generic point: a term on ``Gam.F`` over ``G`` (inverse of :meth:`lam`)."""
        chosen = self.u.choose(F)
        win = self.win
        out = {}
        for j, zs in chosen.obj.at.items():
            out[j] = {}
            for z in zs:
                w, x = chosen.split(j, z)
                sec = self._inv.get((j, self.family(F, G, j, w), fn.comp[j][w]))
                if sec is None:
                    raise StructureError("function term does not lie over the product code")
                out[j][z] = win.at(win.sections, j, sec, x)
        return PresheafMap(chosen.obj, self.u.Ut, out)

    def family(self, F, G, j, w):
        """The element of ``families`` classifying ``G`` on the fiber of ``F`` at ``w``."""
        return _family(self.win, self.u.choose(F), F, G, j, w)


def _family(win: Window, chosen, F, G, j, w):
    cat, gam = win.cat, F.source
    return win.family(
        j, F.comp[j][w], lambda m, x: G.comp[cat.src[m]][chosen.element(cat.src[m], gam.act[m][w], x)]
    )


def derive_pi_structure(u: UniverseStructure, Pt: PresheafMap, P: PresheafMap, window: UniverseStructure | None = None) -> PiStructure:
    """Verify the product square and return the structure.

    The square ``sections -P~-> U~``, ``families -P-> U`` with the post-composition
    with ``p`` on the left must commute and be a pullback.
    """
    win = window if isinstance(window, Window) else Window(u, window)
    fams, secs = win.families.presheaf, win.sections.presheaf
    if P.source is not fams or P.target is not u.U:
        raise StructureError("P must map the families object to U")
    if Pt.source is not secs or Pt.target is not u.Ut:
        raise StructureError("P~ must map the sections object to U~")
    _first_problem("P is not natural", P.problems())
    _first_problem("P~ is not natural", Pt.problems())
    _, probs = pullback_comparison(secs, win.post, Pt, P, u.p)
    _first_problem("product square", probs)
    return PiStructure(win, P, Pt)


# -- dependent sums ----------------------------------------------------------------


class SigmaStructure:
    """Sums of families from ``S: families -> U`` and ``S~: T -> U~``.

    ``T`` is the tower of pairs ``((family, x), y)`` with ``x`` a point of the
    base fiber and ``y`` a point of the fiber over the family's value at ``x``.
    """

    def __init__(self, window: Window, tower: "SigmaTower", S: PresheafMap, St: PresheafMap):
        self.win, self.tower, self.S, self.St = window, tower, S, St
        self.u = window.u
        self._inv = _fiber_inverse(St, tower.to_families)

    def code(self, F: PresheafMap, G: PresheafMap) -> PresheafMap:
        chosen = self.u.choose(F)
        fam = self.win.transpose(F, lambda j, w, x: G.comp[j][chosen.element(j, w, x)])
        return self.S.compose(fam)

    def _family(self, F, G, j, w):
        return _family(self.win, self.u.choose(F), F, G, j, w)

    def pair(self, F, G, first: PresheafMap, second: PresheafMap) -> PresheafMap:
        gam = F.source
        out = {}
        for j, ws in gam.at.items():
            out[j] = {}
            for w in ws:
                fam = self._family(F, G, j, w)
                elem = ((fam, first.comp[j][w]), second.comp[j][w])
                if elem not in self.tower.presheaf.index[j]:
                    raise StructureError("pair components do not lie over the family")
                out[j][w] = self.St.comp[j][elem]
        return PresheafMap(gam, self.u.Ut, out)

    def _split(self, F, G, c, j, w):
        fam = self._family(F, G, j, w)
        elem = self._inv.get((j, fam, c.comp[j][w]))
        if elem is None:
            raise StructureError("pair term does not lie over the sum code")
        return elem

    def fst(self, F, G, c: PresheafMap) -> PresheafMap:
        return PresheafMap(F.source, self.u.Ut, lambda j, w: self._split(F, G, c, j, w)[0][1])

    def snd(self, F, G, c: PresheafMap) -> PresheafMap:
        return PresheafMap(F.source, self.u.Ut, lambda j, w: self._split(F, G, c, j, w)[1])


class SigmaTower:
    """``T``: pull ``p`` back along evaluation ``families x_W W~ -> W``."""

    def __init__(self, win: Window):
        fam = win.families
        at_point, _, _ = pullback(fam.map, win.w.p, name="Fam x W~")
        cat = win.cat
        ident = cat.identity
        ev = PresheafMap(at_point, win.w.U, lambda j, fx: fam.apply(j, fx[0], ident[j], fx[1])[1])
        self.presheaf, _, _ = pullback(ev, win.w.p, name="T")
        self.to_families = PresheafMap(self.presheaf, fam.presheaf, lambda j, t: t[0][0])
        self.evaluation = ev


def derive_sigma_structure(
    u: UniverseStructure, St: PresheafMap, S: PresheafMap, window: UniverseStructure | Window | None = None
) -> SigmaStructure:
    win = window if isinstance(window, Window) else Window(u, window)
    tower = sigma_tower(win)
    if S.source is not win.families.presheaf or S.target is not u.U:
        raise StructureError("S must map the families object to U")
    if St.source is not tower.presheaf or St.target is not u.Ut:
        raise StructureError("S~ must map the tower T to U~")
    _first_problem("S is not natural", S.problems())
    _first_problem("S~ is not natural", St.problems())
    _, probs = pullback_comparison(tower.presheaf, tower.to_families, St, S, u.p)
    _first_problem("sum square", probs)
    return SigmaStructure(win, tower, S, St)


def sigma_tower(win: Window) -> SigmaTower:
    hit = win.__dict__.get("_sigma_tower")
    if hit is None:
        hit = SigmaTower(win)
        win.__dict__["_sigma_tower"] = hit
    return hit


# -- identity types ------------------------------------------------------------------


class IdData:
    """The objects around ``Omega`` and ``Eq`` on the window.

    ``pairs`` = W~ x_W W~, ``diag``: W~ -> pairs, ``ext`` = E W~ (pull ``p`` back
    along ``Eq``) viewed over ``W`` and ``incl``: W~ -> E W~, ``a |-> ((a, a), Omega a)``.
    """

    def __init__(self, win: Window, Omega: PresheafMap, Eq: PresheafMap):
        w = win.w
        self.win = win
        self.pairs = win.pairs
        self.Omega, self.Eq = Omega, Eq
        self.ext, _, _ = pullback(Eq, win.u.p, name="EW~")
        self.ext_base = PresheafMap(self.ext, w.U, lambda j, e: w.p.comp[j][e[0][0]])

    def incl(self) -> PresheafMap:
        return PresheafMap(self.win.w.Ut, self.ext, lambda j, a: ((a, a), self.Omega.comp[j][a]))


class IdStructure:
    def __init__(self, data: IdData, j_section: PresheafMap, homs):
        self.data, self.j_section = data, j_section
        self.win = data.win
        self.u = data.win.u
        self.ext_fam, self.ext_sec, self.restrict_fam, self.product_obj = homs

    def code(self, T: PresheafMap, a: PresheafMap, b: PresheafMap) -> PresheafMap:
        """``Eq(T, a, b)`` for terms ``a``, ``b`` over ``T``."""
        gam = T.source
        pairs = self.data.pairs
        out = {}
        for j, ws in gam.at.items():
            out[j] = {}
            for w in ws:
                e = (a.comp[j][w], b.comp[j][w])
                if e not in pairs.index[j]:
                    raise StructureError("identity type of terms outside the verified window")
                out[j][w] = self.data.Eq.comp[j][e]
        return PresheafMap(gam, self.u.U, out)

    def refl(self, T: PresheafMap, a: PresheafMap) -> PresheafMap:
        out = {}
        for j, ws in a.source.at.items():
            out[j] = {}
            for w in ws:
                if a.comp[j][w] not in self.data.Omega.comp[j]:
                    raise StructureError("reflexivity outside the verified window")
                out[j][w] = self.data.Omega.comp[j][a.comp[j][w]]
        return PresheafMap(a.source, self.u.Ut, out)

    def context(self, T: PresheafMap):
        """Chosen data for ``Gam, x:T, y:T, e:Eq(T, x, y)``.

        Returns ``(c1, c2, c3)`` chosen pullbacks, the last one over the total.
        """
        u = self.u
        c1 = u.choose(T)
        T2 = T.compose(c1.proj)
        c2 = u.choose(T2)
        x_term = c1.q.compose(c2.proj)
        eq = self.code(T2.compose(c2.proj), x_term, c2.q)
        c3 = u.choose(eq)
        return c1, c2, c3

    def refl_inclusion(self, T: PresheafMap) -> PresheafMap:
        """``Gam.T -> Gam.T.T.Eq``, ``z |-> (z, z, refl)``."""
        c1, c2, c3 = self.context(T)
        om = self.data.Omega.comp
        return PresheafMap(
            c1.obj,
            c3.obj,
            lambda j, z: c3.element(j, c2.element(j, z, c1.q.comp[j][z]), om[j][c1.q.comp[j][z]]),
        )

    def elim(self, T: PresheafMap, C: PresheafMap, d: PresheafMap) -> PresheafMap:
        """The eliminator: a term over ``C`` on ``Gam.T.T.Eq`` agreeing with ``d`` along reflexivity.

        ``C`` classifies the motive on ``Gam.T.T.Eq`` and ``d`` is a term on
        ``Gam.T`` over ``C`` restricted along :meth:`refl_inclusion`.
        """
        c1, c2, c3 = self.context(T)
        gam = T.source
        cat = self.win.cat
        ext_fam, ext_sec = self.ext_fam, self.ext_sec
        win = self.win
        w_U = win.w.U

        def motive_at(jj, w, e):
            (t1, t2), om = e
            z1 = c1.element(jj, w, t1)
            z2 = c2.element(jj, z1, t2)
            return C.comp[jj][c3.element(jj, z2, om)]

        def base_at(jj, w, x):
            return d.comp[jj][c1.element(jj, w, x)]

        lifted = {}
        for j, ws in gam.at.items():
            for w in ws:
                code = T.comp[j][w]
                if code not in w_U.index[j]:
                    raise StructureError("eliminator outside the verified window")
                hc = ext_fam.lookup(j, code, lambda m, e: (w_U.act[m][code], motive_at(cat.src[m], gam.act[m][w], e)))
                hd = win.sections.lookup(j, code, lambda m, x: (w_U.act[m][code], base_at(cat.src[m], gam.act[m][w], x)))
                if hc is None or hd is None:
                    raise StructureError("motive or base leaves the verified window")
                if (hc, hd) not in self.product_obj.index[j]:
                    raise StructureError("base does not lie over the motive along reflexivity")
                lifted[(j, w)] = self.j_section.comp[j][(hc, hd)]
        out = {}
        ident = cat.identity
        for j, zs in c3.obj.at.items():
            out[j] = {}
            for z3 in zs:
                z2, om = c3.proj.comp[j][z3], c3.q.comp[j][z3]
                z1, t2 = c2.proj.comp[j][z2], c2.q.comp[j][z2]
                w, t1 = c1.proj.comp[j][z1], c1.q.comp[j][z1]
                h = lifted[(j, w)]
                out[j][z3] = ext_sec.apply(j, h, ident[j], ((t1, t2), om))[1]
        return PresheafMap(c3.obj, self.u.Ut, out)

    def j_term(self, T, C, d, a, b, e) -> PresheafMap:
        """Eliminator instantiated at terms ``a``, ``b`` over ``T`` and ``e`` over ``Eq(T, a, b)``."""
        c1, c2, c3 = self.context(T)
        lift = self.elim(T, C, d)
        gam = T.source
        return PresheafMap(
            gam,
            self.u.Ut,
            lambda j, w: lift.comp[j][
                c3.element(j, c2.element(j, c1.element(j, w, a.comp[j][w]), b.comp[j][w]), e.comp[j][w])
            ],
        )


def id_homs(win: Window, data: IdData):
    """Hom(EW~, W_xW), Hom(EW~, W_xW~), restriction along the inclusion and the fiber product."""
    hit = data.__dict__.get("_homs")
    if hit is None:
        hit = data.__dict__["_homs"] = _id_homs(win, data)
    return hit


def _id_homs(win: Window, data: IdData):
    fam_b = win.families.tgt_map
    sec_b = win.sections.tgt_map
    ext_fam = HomOver(win.w.U, data.ext_base, fam_b, name="Hom(EW~,W_xW)")
    ext_sec = HomOver(win.w.U, data.ext_base, sec_b, name="Hom(EW~,W_xW~)")
    incl = data.incl()
    restrict = ext_fam.precompose(win.families, incl)
    obj, first, second = pullback(restrict, win.post, name="Hom x Sec")
    return ext_fam, ext_sec, restrict, obj, first, second, incl


def derive_id_structure(
    u: UniverseStructure,
    Omega: PresheafMap,
    Eq: PresheafMap,
    j_section: PresheafMap,
    window: UniverseStructure | Window | None = None,
    data: IdData | None = None,
) -> IdStructure:
    """Verify the reflexivity square and the section, and return the structure."""
    win = window if isinstance(window, Window) else Window(u, window)
    w = win.w
    if Omega.source is not w.Ut or Omega.target is not u.Ut:
        raise StructureError("Omega must map W~ to U~")
    data = data or IdData(win, Omega, Eq)
    if Eq.source is not data.pairs or Eq.target is not u.U:
        raise StructureError("Eq must map W~ x_W W~ to U")
    _first_problem("Omega is not natural", Omega.problems())
    _first_problem("Eq is not natural", Eq.problems())
    for j, xs in w.Ut.at.items():
        for a in xs:
            if u.p.comp[j][Omega.comp[j][a]] != Eq.comp[j][(a, a)]:
                raise StructureError("reflexivity square does not commute", {"point": a, "level": j})
    ext_fam, ext_sec, restrict, obj, first, second, incl = id_homs(win, data)
    if j_section.source is not obj or j_section.target is not ext_sec.presheaf:
        raise StructureError("j_section must map the fiber product to Hom(EW~, W_xW~)")
    _first_problem("j_section is not natural", j_section.problems())
    # comparison h |-> (post(Id x p) h, h . incl)
    fam_b = win.families.tgt_map.source
    sec_b = win.sections.tgt_map.source
    idp = PresheafMap(sec_b, fam_b, lambda j, e: (e[0], w.p.comp[j][e[1]]))
    post_ext = ext_sec.postcompose(ext_fam, idp)
    pre_incl = ext_sec.precompose(win.sections, incl)
    for j, xs in obj.at.items():
        for pair in xs:
            h = j_section.comp[j][pair]
            back = (post_ext.comp[j][h], pre_incl.comp[j][h])
            if back != pair:
                raise StructureError("j_section is not a section of the comparison map", {"level": j, "element": pair})
    out = IdStructure(data, j_section, (ext_fam, ext_sec, restrict, obj))
    return out


@dataclass
class Structures:
    pi: PiStructure
    sigma: SigmaStructure
    ident: IdStructure

"""Shared test fixtures: seeded contextual-category mutants and fibration catalogues."""

from __future__ import annotations

from itertools import product

from univalent.cc.universe_cc import TowerMap, UniverseCC
from univalent.fincat import PresheafMap, finite_set_universe


class _Mutant(UniverseCC):
    breaks = ""

    def __init__(self, bound=3):
        super().__init__(finite_set_universe(bound))


class FtOfPt(_Mutant):
    breaks = "C1"

    def ft(self, x):
        if len(x) == 0:
            return x.extend(((0,),))
        return super().ft(x)


class ProjToSelf(_Mutant):
    breaks = "proj-typing"

    def proj(self, x):
        return self.identity(x)


class NonUnital(_Mutant):
    """Composing with an identity on the right gives another morphism when one exists."""

    breaks = "category"

    def compose(self, g, f):
        out = super().compose(g, f)
        if f == self.identity(f.src):
            others = [h for h in self.hom(out.src, out.tgt) if h != out]
            if others:
                return others[0]
        return out


class WrongLegTarget(_Mutant):
    breaks = "pb-typing"

    def pullback(self, x, f):
        fstar, _ = super().pullback(x, f)
        return fstar, self.identity(fstar)


class NonCommuting(_Mutant):
    breaks = "square-commutes"

    def pullback(self, x, f):
        fstar, q = super().pullback(x, f)
        px, pf = self.proj(x), self.proj(fstar)
        want = self.compose(f, pf)
        for h in self.hom(fstar, x):
            if self.compose(px, h) != want:
                return fstar, h
        return fstar, q


class EmptyPullback(_Mutant):
    """Replaces ``f*X`` by the empty family over ``Y``: the square commutes but is no pullback."""

    breaks = "square-pullback"

    def pullback(self, x, f):
        fstar, q = super().pullback(x, f)
        base = self.total(f.src)
        empty = self.tower(f.src, self.u.constant(base, 0))
        src = self.total(empty)
        return empty, TowerMap(empty, x, tuple(() for _ in src.category.objects))


def _swap(cc, x):
    """Automorphism of ``total(x)`` over ``ft(x)`` exchanging the two points of two-point fibers."""
    chosen = cc.chosen(x)

    def flip(j, z):
        w, (n, i) = chosen.split(j, z)
        return chosen.element(j, w, (n, 1 - i)) if n == 2 else z

    return PresheafMap(chosen.obj, chosen.obj, flip)


class _Twisted(_Mutant):
    """Pullback legs precomposed with a fiber swap; squares stay pullbacks."""

    def twist(self, f) -> bool:
        raise NotImplementedError

    def pullback(self, x, f):
        fstar, q = super().pullback(x, f)
        if not self.twist(f):
            return fstar, q
        q2 = self.to_map(q).compose(_swap(self, fstar))
        return fstar, self.from_map(fstar, x, q2)


class TwistAlongIdentity(_Twisted):
    breaks = "C2-morphism"

    def twist(self, f):
        return f == self.identity(f.src)


class TwistAlongOthers(_Twisted):
    breaks = "C3-morphism"

    def twist(self, f):
        return f != self.identity(f.src)


CC_MUTANTS = (
    FtOfPt,
    ProjToSelf,
    NonUnital,
    WrongLegTarget,
    NonCommuting,
    EmptyPullback,
    TwistAlongIdentity,
    TwistAlongOthers,
)


# -- exhaustive structure oracles on the one-object index ------------------------


def _level(total):
    (j,) = total.category.objects
    return j


def classifiers(u, total, window):
    """Every map ``total -> U`` with codes below ``window``."""
    j = _level(total)
    xs = total.at[j]
    for codes in product(range(window), repeat=len(xs)):
        yield PresheafMap(total, u.U, {j: dict(zip(xs, codes))})


def terms(u, cls):
    """Every term over ``cls``: maps ``total -> U~`` picking a point of each fiber."""
    total = cls.source
    j = _level(total)
    xs = total.at[j]
    for pts in product(*(u.fiber(j, cls.comp[j][x]) for x in xs)):
        yield PresheafMap(total, u.Ut, {j: dict(zip(xs, pts))})


def substitute(u, F, a):
    """The section ``Gam -> Gam.F`` of a term ``a`` over ``F``."""
    chosen = u.choose(F)
    return PresheafMap(F.source, chosen.obj, lambda j, w: chosen.element(j, w, a.comp[j][w]))


def check_pi(model, window, gam):
    """Beta and eta for every family with fibers below ``window`` over ``gam``; returns (cases, failures)."""
    u, pi = model.universe, model.pi
    cases, bad = 0, []
    for F in classifiers(u, gam, window):
        ext = u.choose(F).obj
        for G in classifiers(u, ext, window):
            for body in terms(u, G):
                fn = pi.lam(F, G, body)
                cases += 1
                if pi.unlam(F, G, fn) != body:
                    bad.append(("eta", F, G, body))
                for a in terms(u, F):
                    cases += 1
                    if pi.app(F, G, fn, a) != body.compose(substitute(u, F, a)):
                        bad.append(("beta", F, G, body, a))
            for fn in terms(u, pi.code(F, G)):
                cases += 1
                if pi.lam(F, G, pi.unlam(F, G, fn)) != fn:
                    bad.append(("eta", F, G, fn))
    return cases, bad


def check_sigma(model, window, gam):
    """Projection beta and surjective pairing for every family below ``window``."""
    u, sg = model.universe, model.sigma
    cases, bad = 0, []
    for F in classifiers(u, gam, window):
        ext = u.choose(F).obj
        for G in classifiers(u, ext, window):
            for a in terms(u, F):
                Ga = G.compose(substitute(u, F, a))
                for b in terms(u, Ga):
                    cases += 1
                    c = sg.pair(F, G, a, b)
                    if sg.fst(F, G, c) != a or sg.snd(F, G, c) != b:
                        bad.append(("proj-beta", F, G, a, b))
            for c in terms(u, sg.code(F, G)):
                cases += 1
                if sg.pair(F, G, sg.fst(F, G, c), sg.snd(F, G, c)) != c:
                    bad.append(("pair-eta", F, G, c))
    return cases, bad


def check_id(model, window, gam):
    """The J computation rule for every motive and base below ``window``."""
    u, ident = model.universe, model.ident
    cases, bad = 0, []
    for T in classifiers(u, gam, window):
        c1, c2, c3 = ident.context(T)
        incl = ident.refl_inclusion(T)
        for C in classifiers(u, c3.obj, window):
            for d in terms(u, C.compose(incl)):
                for a in terms(u, T):
                    cases += 1
                    got = ident.j_term(T, C, d, a, a, ident.refl(T, a))
                    if got != d.compose(substitute(u, T, a)):
                        bad.append(("J", T, C, d, a))
    return cases, bad


# -- kernel corpora --------------------------------------------------------------

DEFEQ_CONTEXT = (
    "(A : U0) (B : A -> U0) (C : U0) (a : A) (a2 : A) (b : B a) (c : C) (f : A -> C)"
    " (g : forall (x : A), B x) (k : A -> A -> C) (p : sigma (x : A), B x) (q : A * C) (e : Id A a a2)"
)

# (rule, left, right, type); every pair is definitionally equal
DEFEQ_CORPUS = (
    ("beta", "(fun (x : A) => x) a", "a", "A"),
    ("beta", "(fun (x : A) => f x) a", "f a", "C"),
    ("beta", "(fun (x : A) (y : A) => x) a a2", "a", "A"),
    ("beta", "(fun (x : A) (y : A) => y) a a2", "a2", "A"),
    ("beta", "(fun (h : A -> C) => h a) f", "f a", "C"),
    ("beta", "(fun (x : A) => ((x, c) : A * C)) a", "(a, c)", "A * C"),
    ("beta", "(fun (X : U0) => X) A", "A", "U0"),
    ("beta", "(fun (x : A) => refl A x) a", "refl A a", "Id A a a"),
    ("eta", "fun (x : A) => f x", "f", "A -> C"),
    ("eta", "fun (x : A) => g x", "g", "forall (x : A), B x"),
    ("eta", "fun (x : A) => (fun (y : A) => f y) x", "f", "A -> C"),
    ("eta", "fun (h : A -> C) => h", "fun (h : A -> C) (x : A) => h x", "(A -> C) -> A -> C"),
    ("eta", "fun (x : A) (y : A) => k x y", "k", "A -> A -> C"),
    ("eta", "fun (x : A) => k x", "k", "A -> A -> C"),
    ("eta", "(fst p, snd p)", "p", "sigma (x : A), B x"),
    ("eta", "(fst q, snd q)", "q", "A * C"),
    ("sigma-beta", "fst ((a, c) : A * C)", "a", "A"),
    ("sigma-beta", "snd ((a, c) : A * C)", "c", "C"),
    ("sigma-beta", "fst ((a, b) : sigma (x : A), B x)", "a", "A"),
    ("sigma-beta", "snd ((a, b) : sigma (x : A), B x)", "b", "B a"),
    ("sigma-beta", "(fst ((a, c) : A * C), snd ((a, c) : A * C))", "(a, c)", "A * C"),
    ("sigma-beta", "snd ((a, c, a2) : A * C * A)", "(c, a2)", "C * A"),
    ("sigma-beta", "fst (snd ((a, c, a2) : A * C * A))", "c", "C"),
    ("iota", "J(x y r. A, z. z, A, a, a, refl A a)", "a", "A"),
    ("iota", "J(x y r. C, z. f z, A, a, a, refl A a)", "f a", "C"),
    ("iota", "J(x y r. Id A y x, z. refl A z, A, a, a, refl A a)", "refl A a", "Id A a a"),
    ("iota", "J(x y r. A -> C, z. f, A, a, a, refl A a)", "f", "A -> C"),
    ("iota", "J(x y r. B x, z. g z, A, a, a, refl A a)", "g a", "B a"),
    ("iota", "J(x y r. C, z. (fun (w : A) => f w) z, A, a, a, refl A a)", "f a", "C"),
    ("iota", "J(x y r. C, z. f z, A, a, a2, e)", "J(x y r. C, z. (fun (w : A) => f w) z, A, a, a2, e)", "C"),
)

# (left, right, type); well-typed but not definitionally equal
DEFEQ_DISTINCT = (
    ("f a", "f a2", "C"),
    ("J(x y r. C, z. f z, A, a, a2, e)", "f a", "C"),
    ("fun (x : A) => f a", "f", "A -> C"),
    ("(a, c)", "(a2, c)", "A * C"),
    ("fst p", "a", "A"),
)

# (declaration, text, replacement): each edit makes the bundled library ill-typed
LIBRARY_MUTANTS = (
    ("hfiber", "Id Y (f x) y", "Id Y y (f x)"),
    ("iscontr", "Id T t c", "Id T t t"),
    ("idfun", "fun (x : X) => x", "fun (x : X) => X"),
    ("idweq", "(idfun X, idisweq X)", "(idfun X, idfun X)"),
    ("eqweqmap", "J(a b p. weq a b", "J(a b p. weq b a"),
    ("univalence", "(eqweqmap X Y)", "(eqweqmap Y X)"),
    ("isprop", "Id P a b", "Id P a P"),
    ("neg", "def neg (P : U1) : U1", "def neg (P : U1) : U0"),
    ("Empty", "forall (X : U0), X\n", "forall (X : U0), X X\n"),
    ("contractible_choice", "iscontr (P x)", "iscontr (P X)"),
)


def mutate_library(source, text, replacement):
    assert source.count(text) == 1, text
    return source.replace(text, replacement)


# -- Kan fibrations and base maps for pullback closure ----------------------------


def fibration_catalogue(top):
    """Named Kan fibrations ``q: E -> B`` truncated at ``top``."""
    from univalent.fincat import identity
    from univalent.sset.simplex import sset_product, standard_simplex, to_point
    from univalent.sset.universe import cyclic_group, disjoint_copies_fibration, nerve, nerve_universe

    _, proj, _ = sset_product(nerve(cyclic_group(2), top), nerve(cyclic_group(2), top))
    return [
        ("universe", nerve_universe(3, top)[1]),
        ("product-projection", proj),
        ("group-to-point", to_point(nerve(cyclic_group(3), top))),
        ("two-copies", disjoint_copies_fibration(top)),
        ("identity", identity(standard_simplex(2, top))),
    ]


def base_maps(base):
    """A vertex, an edge and a triangle of ``base``, as maps from standard simplices."""
    from univalent.sset.simplex import simplex_map

    out = []
    for n in (0, 1, 2):
        cells = base.nondegenerate(n) or list(base.at[n])
        out.append((f"simplex{n}", simplex_map(base, n, cells[-1])))
    return out

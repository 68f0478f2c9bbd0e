"""Bidirectional type checking and normalization by evaluation.

Definitional equality is beta for functions, the projection rules for pairs,
eta for functions and pairs, the J rule on ``refl`` and unfolding of
definitions.  ``U0 : U1`` and ``U0`` is included in ``U1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .parser import Decl, KernelError, parse, parse_context, parse_file, pretty
from .syntax import Ann, App, Const, Id, J, Lam, Pair, Pi, Proj1, Proj2, Refl, Sigma, Term, Univ, Var


class TypeMismatch(KernelError):
    def __init__(self, message: str, expected: str = "", actual: str = "", line: int = 0, col: int = 0):
        super().__init__(message, line, col)
        self.expected, self.actual = expected, actual

    def as_dict(self) -> dict:
        out = super().as_dict()
        out.update(expected=self.expected, actual=self.actual)
        return out


class CheckError(KernelError):
    """Ill-formed input other than a plain mismatch (bad context, uninferable term, ...)."""


# -- values -----------------------------------------------------------------------


@dataclass(frozen=True)
class Closure:
    env: tuple
    body: Term
    glob: "Globals" = field(default=None, compare=False, repr=False)

    def __call__(self, *args):
        return evaluate(self.body, self.env + tuple(args), self.glob)


@dataclass(frozen=True)
class VUniv:
    level: int


@dataclass(frozen=True)
class VPi:
    dom: object
    cod: Closure
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class VSigma:
    dom: object
    cod: Closure
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class VLam:
    dom: object
    body: Closure
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class VPair:
    fst: object
    snd: object


@dataclass(frozen=True)
class VId:
    type: object
    lhs: object
    rhs: object


@dataclass(frozen=True)
class VRefl:
    type: object
    term: object


@dataclass(frozen=True)
class HVar:
    level: int


@dataclass(frozen=True)
class HConst:
    name: str


@dataclass(frozen=True)
class EApp:
    arg: object


@dataclass(frozen=True)
class EFst:
    pass


@dataclass(frozen=True)
class ESnd:
    pass


@dataclass(frozen=True)
class EJ:
    motive: Closure
    base: Closure
    type: object
    lhs: object
    rhs: object
    names: tuple = field(default=("x", "y", "e", "z"), compare=False)


@dataclass(frozen=True)
class VNeutral:
    head: object
    spine: tuple = ()

    def push(self, elim):
        return VNeutral(self.head, self.spine + (elim,))


def var(level: int) -> VNeutral:
    return VNeutral(HVar(level))


# -- global environment -------------------------------------------------------------


@dataclass
class GlobalEntry:
    name: str
    type: Term
    value: Term | None
    line: int = 0


class Globals:
    """Checked declarations; definitions unfold during evaluation."""

    def __init__(self):
        self.entries: dict[str, GlobalEntry] = {}
        self._values: dict[str, object] = {}

    def __contains__(self, name):
        return name in self.entries

    def names(self):
        return list(self.entries)

    def add(self, entry: GlobalEntry):
        self.entries[entry.name] = entry
        self._values.pop(entry.name, None)

    def value(self, name):
        hit = self._values.get(name)
        if hit is None:
            entry = self.entries[name]
            hit = VNeutral(HConst(name)) if entry.value is None else evaluate(entry.value, (), self)
            self._values[name] = hit
        return hit

    def type_value(self, name):
        return evaluate(self.entries[name].type, (), self)


EMPTY = Globals()


def evaluate(t: Term, env: tuple, g: Globals | None = None):
    """Evaluate under ``env`` (index 0 is the last entry) with definitions from ``g``."""
    g = EMPTY if g is None else g
    ev = evaluate
    if isinstance(t, Var):
        return env[len(env) - 1 - t.index]
    if isinstance(t, Univ):
        return VUniv(t.level)
    if isinstance(t, Const):
        if t.name not in g:
            raise CheckError(f"unknown constant {t.name!r}")
        return g.value(t.name)
    if isinstance(t, Pi):
        return VPi(ev(t.dom, env, g), Closure(env, t.cod, g), t.name)
    if isinstance(t, Sigma):
        return VSigma(ev(t.dom, env, g), Closure(env, t.cod, g), t.name)
    if isinstance(t, Lam):
        return VLam(ev(t.dom, env, g), Closure(env, t.body, g), t.name)
    if isinstance(t, App):
        return apply(ev(t.fn, env, g), ev(t.arg, env, g))
    if isinstance(t, Pair):
        return VPair(ev(t.fst, env, g), ev(t.snd, env, g))
    if isinstance(t, Proj1):
        return fst(ev(t.pair, env, g))
    if isinstance(t, Proj2):
        return snd(ev(t.pair, env, g))
    if isinstance(t, Id):
        return VId(ev(t.type, env, g), ev(t.lhs, env, g), ev(t.rhs, env, g))
    if isinstance(t, Refl):
        return VRefl(ev(t.type, env, g), ev(t.term, env, g))
    if isinstance(t, J):
        return j_elim(
            Closure(env, t.motive, g),
            Closure(env, t.base, g),
            ev(t.type, env, g),
            ev(t.lhs, env, g),
            ev(t.rhs, env, g),
            ev(t.proof, env, g),
            t.names,
        )
    if isinstance(t, Ann):
        return ev(t.term, env, g)
    raise TypeError(f"not a term: {t!r}")


def apply(f, a):
    if isinstance(f, VLam):
        return f.body(a)
    if isinstance(f, VNeutral):
        return f.push(EApp(a))
    raise CheckError("applying a non-function during evaluation")


def fst(p):
    if isinstance(p, VPair):
        return p.fst
    if isinstance(p, VNeutral):
        return p.push(EFst())
    raise CheckError("projecting from a non-pair during evaluation")


def snd(p):
    if isinstance(p, VPair):
        return p.snd
    if isinstance(p, VNeutral):
        return p.push(ESnd())
    raise CheckError("projecting from a non-pair during evaluation")


def j_elim(motive, base, ty, lhs, rhs, proof, names=("x", "y", "e", "z")):
    if isinstance(proof, VRefl):
        return base(proof.term)
    if isinstance(proof, VNeutral):
        return proof.push(EJ(motive, base, ty, lhs, rhs, names))
    raise CheckError("path induction on a non-path during evaluation")


# -- read-back ----------------------------------------------------------------------


def quote(v, lvl: int) -> Term:
    """Normal form of a value at context length ``lvl``."""
    if isinstance(v, VUniv):
        return Univ(v.level)
    if isinstance(v, VPi):
        return Pi(quote(v.dom, lvl), quote(v.cod(var(lvl)), lvl + 1), v.name)
    if isinstance(v, VSigma):
        return Sigma(quote(v.dom, lvl), quote(v.cod(var(lvl)), lvl + 1), v.name)
    if isinstance(v, VLam):
        return Lam(quote(v.dom, lvl), quote(v.body(var(lvl)), lvl + 1), v.name)
    if isinstance(v, VPair):
        return Pair(quote(v.fst, lvl), quote(v.snd, lvl))
    if isinstance(v, VId):
        return Id(quote(v.type, lvl), quote(v.lhs, lvl), quote(v.rhs, lvl))
    if isinstance(v, VRefl):
        return Refl(quote(v.type, lvl), quote(v.term, lvl))
    if isinstance(v, VNeutral):
        h = v.head
        out = Var(lvl - 1 - h.level) if isinstance(h, HVar) else Const(h.name)
        for e in v.spine:
            if isinstance(e, EApp):
                out = App(out, quote(e.arg, lvl))
            elif isinstance(e, EFst):
                out = Proj1(out)
            elif isinstance(e, ESnd):
                out = Proj2(out)
            else:
                x, y, p, z = var(lvl), var(lvl + 1), var(lvl + 2), var(lvl)
                out = J(
                    quote(e.motive(x, y, p), lvl + 3),
                    quote(e.base(z), lvl + 1),
                    quote(e.type, lvl),
                    quote(e.lhs, lvl),
                    quote(e.rhs, lvl),
                    out,
                    e.names,
                )
        return out
    raise TypeError(f"not a value: {v!r}")


# -- conversion ---------------------------------------------------------------------


def conv(a, b, lvl: int) -> bool:
    """Definitional equality of two values, with eta for functions and pairs."""
    if isinstance(a, VLam) or isinstance(b, VLam):
        x = var(lvl)
        return conv(apply(a, x), apply(b, x), lvl + 1)
    if isinstance(a, VPair) or isinstance(b, VPair):
        return conv(fst(a), fst(b), lvl) and conv(snd(a), snd(b), lvl)
    if type(a) is not type(b):
        return False
    if isinstance(a, VUniv):
        return a.level == b.level
    if isinstance(a, (VPi, VSigma)):
        x = var(lvl)
        return conv(a.dom, b.dom, lvl) and conv(a.cod(x), b.cod(x), lvl + 1)
    if isinstance(a, VId):
        return conv(a.type, b.type, lvl) and conv(a.lhs, b.lhs, lvl) and conv(a.rhs, b.rhs, lvl)
    if isinstance(a, VRefl):
        return conv(a.type, b.type, lvl) and conv(a.term, b.term, lvl)
    if isinstance(a, VNeutral):
        if a.head != b.head or len(a.spine) != len(b.spine):
            return False
        for ea, eb in zip(a.spine, b.spine):
            if type(ea) is not type(eb):
                return False
            if isinstance(ea, EApp):
                if not conv(ea.arg, eb.arg, lvl):
                    return False
            elif isinstance(ea, EJ):
                x, y, p = var(lvl), var(lvl + 1), var(lvl + 2)
                if not (
                    conv(ea.type, eb.type, lvl)
                    and conv(ea.lhs, eb.lhs, lvl)
                    and conv(ea.rhs, eb.rhs, lvl)
                    and conv(ea.motive(x, y, p), eb.motive(x, y, p), lvl + 3)
                    and conv(ea.base(x), eb.base(x), lvl + 1)
                ):
                    return False
        return True
    return False


def subtype(a, b, lvl: int) -> bool:
    """Cumulativity: ``U0 <= U1``, covariantly in codomains of function types."""
    if isinstance(a, VUniv) and isinstance(b, VUniv):
        return a.level <= b.level
    if isinstance(a, VPi) and isinstance(b, VPi):
        x = var(lvl)
        return conv(a.dom, b.dom, lvl) and subtype(a.cod(x), b.cod(x), lvl + 1)
    return conv(a, b, lvl)


# -- contexts and checking ---------------------------------------------------------------


@dataclass(frozen=True)
class Context:
    """Typing context: names, type values and the environment of variables."""

    names: tuple = ()
    types: tuple = ()
    env: tuple = ()

    def __len__(self):
        return len(self.names)

    def extend(self, name: str, ty, value=None) -> "Context":
        value = var(len(self)) if value is None else value
        return Context(self.names + (name,), self.types + (ty,), self.env + (value,))

    def show(self, v) -> str:
        return pretty(quote(v, len(self)), self.names)


@dataclass(frozen=True)
class Judgment:
    """``context |- term : type`` as produced by the checker (syntax kept for interpretation)."""

    context: tuple  # ((name, type term), ...)
    term: Term
    type: Term


class Checker:
    def __init__(self, glob: Globals | None = None):
        self.glob = glob or Globals()

    # evaluation helpers bound to this checker's globals
    def eval(self, t: Term, ctx: Context):
        return evaluate(t, ctx.env, self.glob)

    def _mismatch(self, ctx, msg, expected, actual):
        return TypeMismatch(msg, ctx.show(expected), ctx.show(actual))

    def infer_universe(self, ctx: Context, t: Term) -> int:
        ty = self.infer(ctx, t)
        if not isinstance(ty, VUniv):
            raise TypeMismatch("expected a type", "a universe", ctx.show(ty))
        return ty.level

    def check_type(self, ctx: Context, t: Term) -> int:
        """``t`` is a type; returns its universe level (2 for ``U1`` itself)."""
        if t == Univ(1):
            return 2
        return self.infer_universe(ctx, t)

    def check(self, ctx: Context, t: Term, ty) -> None:
        self._check(ctx, t, ty)

    def infer(self, ctx: Context, t: Term):
        return self._infer(ctx, t)

    def _check(self, ctx: Context, t: Term, ty) -> None:
        if isinstance(t, Lam) and isinstance(ty, VPi):
            self.check_type(ctx, t.dom)
            dom = self.eval(t.dom, ctx)
            if not conv(dom, ty.dom, len(ctx)):
                raise self._mismatch(ctx, "binder annotation does not match the function type", ty.dom, dom)
            x = var(len(ctx))
            self._check(ctx.extend(t.name, dom), t.body, ty.cod(x))
            return
        if isinstance(t, Pair) and isinstance(ty, VSigma):
            self._check(ctx, t.fst, ty.dom)
            self._check(ctx, t.snd, ty.cod(self.eval(t.fst, ctx)))
            return
        if isinstance(t, Pair):
            raise TypeMismatch("a pair needs a pair type", "a pair type", ctx.show(ty))
        if isinstance(t, Lam):
            raise TypeMismatch("a function needs a function type", "a function type", ctx.show(ty))
        actual = self._infer(ctx, t)
        if not subtype(actual, ty, len(ctx)):
            raise self._mismatch(ctx, f"type mismatch for {pretty(t, ctx.names)}", ty, actual)

    def _infer(self, ctx: Context, t: Term):
        n = len(ctx)
        if isinstance(t, Var):
            if t.index >= n:
                raise CheckError(f"variable index {t.index} out of scope")
            return ctx.types[n - 1 - t.index]
        if isinstance(t, Univ):
            if t.level == 0:
                return VUniv(1)
            raise CheckError("U1 has no type")
        if isinstance(t, Const):
            if t.name not in self.glob:
                raise CheckError(f"unknown constant {t.name!r}")
            return self.glob.type_value(t.name)
        if isinstance(t, (Pi, Sigma)):
            # level 2 marks a large type: usable as a binder type, not a term of U1
            a = self.check_type(ctx, t.dom)
            b = self.check_type(ctx.extend(t.name, self.eval(t.dom, ctx)), t.cod)
            return VUniv(max(a, b))
        if isinstance(t, Lam):
            self.check_type(ctx, t.dom)
            dom = self.eval(t.dom, ctx)
            inner = ctx.extend(t.name, dom)
            body_ty = self._infer(inner, t.body)
            return VPi(dom, Closure(ctx.env, quote(body_ty, n + 1), self.glob), t.name)
        if isinstance(t, App):
            fty = self._infer(ctx, t.fn)
            if not isinstance(fty, VPi):
                raise TypeMismatch(
                    f"applying a non-function {pretty(t.fn, ctx.names)}", "a function type", ctx.show(fty)
                )
            self._check(ctx, t.arg, fty.dom)
            return fty.cod(self.eval(t.arg, ctx))
        if isinstance(t, Pair):
            raise CheckError("cannot infer the type of a pair; annotate it as (p : T)")
        if isinstance(t, (Proj1, Proj2)):
            pty = self._infer(ctx, t.pair)
            if not isinstance(pty, VSigma):
                raise TypeMismatch("projection from a non-pair", "a pair type", ctx.show(pty))
            if isinstance(t, Proj1):
                return pty.dom
            return pty.cod(fst(self.eval(t.pair, ctx)))
        if isinstance(t, Id):
            level = self.infer_universe(ctx, t.type)
            ty = self.eval(t.type, ctx)
            self._check(ctx, t.lhs, ty)
            self._check(ctx, t.rhs, ty)
            return VUniv(level)
        if isinstance(t, Refl):
            self.infer_universe(ctx, t.type)
            ty = self.eval(t.type, ctx)
            self._check(ctx, t.term, ty)
            a = self.eval(t.term, ctx)
            return VId(ty, a, a)
        if isinstance(t, J):
            return self._infer_j(ctx, t)
        if isinstance(t, Ann):
            self.check_type(ctx, t.type)
            ty = self.eval(t.type, ctx)
            self._check(ctx, t.term, ty)
            return ty
        raise TypeError(f"not a term: {t!r}")

    def _infer_j(self, ctx: Context, t: J):
        n = len(ctx)
        self.infer_universe(ctx, t.type)
        ty = self.eval(t.type, ctx)
        self._check(ctx, t.lhs, ty)
        self._check(ctx, t.rhs, ty)
        lhs, rhs = self.eval(t.lhs, ctx), self.eval(t.rhs, ctx)
        self._check(ctx, t.proof, VId(ty, lhs, rhs))
        x, y = var(n), var(n + 1)
        mctx = ctx.extend(t.names[0], ty).extend(t.names[1], ty).extend(t.names[2], VId(ty, x, y))
        self.check_type(mctx, t.motive)
        motive = Closure(ctx.env, t.motive, self.glob)
        z = var(n)
        self._check(ctx.extend(t.names[3], ty), t.base, motive(z, z, VRefl(ty, z)))
        return motive(lhs, rhs, self.eval(t.proof, ctx))

    # -- public conveniences ---------------------------------------------------

    def context(self, binders) -> Context:
        """Check ``[(name, type term), ...]`` left to right."""
        ctx = Context()
        for name, ty in binders:
            try:
                self.check_type(ctx, ty)
            except KernelError as exc:
                raise CheckError(f"ill-formed context at {name}: {exc.message}") from None
            ctx = ctx.extend(name, self.eval(ty, ctx))
        return ctx

    def judge(self, binders, t: Term, ty: Term | None = None) -> Judgment:
        ctx = self.context(binders)
        if ty is None:
            tyv = self.infer(ctx, t)
            ty = quote(tyv, len(ctx))
        else:
            self.check_type(ctx, ty) if ty != Univ(1) else None
            self.check(ctx, t, self.eval(ty, ctx))
        return Judgment(tuple(binders), t, ty)

    def normalize(self, binders, t: Term) -> Term:
        ctx = self._ctx_unchecked(binders)
        return quote(self.eval(t, ctx), len(ctx))

    def defeq(self, binders, a: Term, b: Term, ty: Term | None = None) -> bool:
        """Decide ``a == b``; with ``ty`` both sides are first checked against it."""
        ctx = self.context(binders)
        if ty is not None:
            tyv = self.eval(ty, ctx)
            self.check(ctx, a, tyv)
            self.check(ctx, b, tyv)
        return conv(self.eval(a, ctx), self.eval(b, ctx), len(ctx))

    def _ctx_unchecked(self, binders) -> Context:
        ctx = Context()
        for name, ty in binders:
            ctx = ctx.extend(name, self.eval(ty, ctx))
        return ctx

    def add_decl(self, d: Decl) -> GlobalEntry:
        if d.name in self.glob:
            raise CheckError(f"{d.name!r} is already defined", d.line, d.col)
        try:
            self.check_type(Context(), d.type)
            if d.value is not None:
                self.check(Context(), d.value, self.eval(d.type, Context()))
        except KernelError as exc:
            exc.line, exc.col = d.line, d.col
            exc.args = (f"{d.line}:{d.col}: in {d.name}: {exc.message}",)
            exc.decl = d.name
            raise
        entry = GlobalEntry(d.name, d.type, d.value, d.line)
        self.glob.add(entry)
        return entry

    def load(self, text: str) -> list[GlobalEntry]:
        return [self.add_decl(d) for d in parse_file(text, self.glob.names())]

    # parsing against this checker's globals
    def parse(self, text: str, scope=()) -> Term:
        return parse(text, scope, self.glob.names())

    def parse_context(self, text: str):
        return parse_context(text, self.glob.names())

"""Terms of the type theory with de Bruijn indices.

Binder names are kept for printing only and do not take part in equality,
so ``==`` on terms is alpha-equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    index: int


@dataclass(frozen=True)
class Univ(Term):
    level: int


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class Pi(Term):
    dom: Term
    cod: Term  # binds one variable
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Lam(Term):
    dom: Term
    body: Term  # binds one variable
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Sigma(Term):
    dom: Term
    cod: Term  # binds one variable
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term


@dataclass(frozen=True)
class Proj1(Term):
    pair: Term


@dataclass(frozen=True)
class Proj2(Term):
    pair: Term


@dataclass(frozen=True)
class Id(Term):
    type: Term
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Refl(Term):
    type: Term
    term: Term


@dataclass(frozen=True)
class J(Term):
    """Path induction.

    ``motive`` lives in the context extended by ``x : type, y : type,
    e : Id type x y`` (three binders); ``base`` lives in the context extended
    by ``z : type`` and has type ``motive[z, z, refl z]``.
    """

    motive: Term
    base: Term
    type: Term
    lhs: Term
    rhs: Term
    proof: Term
    names: tuple = field(default=("x", "y", "e", "z"), compare=False)


@dataclass(frozen=True)
class Ann(Term):
    """``(term : type)``; erased by evaluation."""

    term: Term
    type: Term


U0 = Univ(0)
U1 = Univ(1)


def arrow(dom: Term, cod: Term) -> Pi:
    """Non-dependent function type; ``cod`` is given in the outer scope."""
    return Pi(dom, shift(cod, 1), "_")


def product(dom: Term, cod: Term) -> Sigma:
    return Sigma(dom, shift(cod, 1), "_")


def _map(t: Term, on_var, depth: int = 0) -> Term:
    """Rebuild ``t`` replacing each variable by ``on_var(index, depth)``."""
    m = _map
    if isinstance(t, Var):
        return on_var(t.index, depth)
    if isinstance(t, (Univ, Const)):
        return t
    if isinstance(t, Pi):
        return Pi(m(t.dom, on_var, depth), m(t.cod, on_var, depth + 1), t.name)
    if isinstance(t, Lam):
        return Lam(m(t.dom, on_var, depth), m(t.body, on_var, depth + 1), t.name)
    if isinstance(t, Sigma):
        return Sigma(m(t.dom, on_var, depth), m(t.cod, on_var, depth + 1), t.name)
    if isinstance(t, App):
        return App(m(t.fn, on_var, depth), m(t.arg, on_var, depth))
    if isinstance(t, Pair):
        return Pair(m(t.fst, on_var, depth), m(t.snd, on_var, depth))
    if isinstance(t, Proj1):
        return Proj1(m(t.pair, on_var, depth))
    if isinstance(t, Proj2):
        return Proj2(m(t.pair, on_var, depth))
    if isinstance(t, Id):
        return Id(m(t.type, on_var, depth), m(t.lhs, on_var, depth), m(t.rhs, on_var, depth))
    if isinstance(t, Refl):
        return Refl(m(t.type, on_var, depth), m(t.term, on_var, depth))
    if isinstance(t, J):
        return J(
            m(t.motive, on_var, depth + 3),
            m(t.base, on_var, depth + 1),
            m(t.type, on_var, depth),
            m(t.lhs, on_var, depth),
            m(t.rhs, on_var, depth),
            m(t.proof, on_var, depth),
            t.names,
        )
    if isinstance(t, Ann):
        return Ann(m(t.term, on_var, depth), m(t.type, on_var, depth))
    raise TypeError(f"not a term: {t!r}")


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add ``by`` to every variable at or above ``cutoff``."""
    if by == 0:
        return t

    def on_var(i, depth):
        return Var(i + by) if i >= cutoff + depth else Var(i)

    return _map(t, on_var)


def subst(t: Term, index: int, value: Term) -> Term:
    """Replace variable ``index`` by ``value`` (no index adjustment otherwise)."""

    def on_var(i, depth):
        return shift(value, depth) if i == index + depth else Var(i)

    return _map(t, on_var)


def instantiate(body: Term, value: Term) -> Term:
    """Beta-substitute ``value`` for the innermost bound variable of ``body``."""
    return shift(subst(body, 0, shift(value, 1)), -1)


def instantiate_many(body: Term, values: list[Term]) -> Term:
    """Substitute for ``len(values)`` binders at once; ``values[0]`` is the outermost."""
    n = len(values)

    def on_var(i, depth):
        if i < depth:
            return Var(i)
        if i < depth + n:
            return shift(values[n - 1 - (i - depth)], depth)
        return Var(i - n)

    return _map(body, on_var)


def free_vars(t: Term) -> set[int]:
    out: set[int] = set()

    def on_var(i, depth):
        if i >= depth:
            out.add(i - depth)
        return Var(i)

    _map(t, on_var)
    return out


def constants(t: Term) -> set[str]:
    out: set[str] = set()

    def walk(s):
        if isinstance(s, Const):
            out.add(s.name)
        for v in getattr(s, "__dataclass_fields__", {}):
            child = getattr(s, v)
            if isinstance(child, Term):
                walk(child)

    walk(t)
    return out


def size(t: Term) -> int:
    n = 1
    for v in getattr(t, "__dataclass_fields__", {}):
        child = getattr(t, v)
        if isinstance(child, Term):
            n += size(child)
    return n

"""Concrete syntax for terms and source files, and the matching printer.

Grammar (``--`` starts a comment)::

    file     ::= decl*
    decl     ::= 'def' NAME binder* ':' term ':=' term
               | 'axiom' NAME binder* ':' term
    binder   ::= '(' NAME+ ':' term ')'
    term     ::= 'fun' binder+ '=>' term
               | 'forall' binder+ ',' term
               | 'sigma' binder+ ',' term
               | prod ('->' term)?
    prod     ::= app ('*' prod)?
    app      ::= head atom*
    head     ::= 'fst' atom | 'snd' atom | 'Id' atom atom atom | 'refl' atom atom | atom
    atom     ::= NAME | 'U0' | 'U1'
               | '(' term ')' | '(' term ',' term (',' term)* ')' | '(' term ':' term ')'
               | 'J' '(' NAME NAME NAME '.' term ',' NAME '.' term ',' term ',' term ',' term ',' term ')'

In ``J(x y e. C, z. d, T, a, b, p)`` the motive ``C`` binds ``x y : T`` and
``e : Id T x y``; the base ``d`` binds ``z : T``.  ``A -> B`` and ``A * B``
are the non-dependent function and pair types; tuples nest to the right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    Ann,
    App,
    Const,
    Id,
    J,
    Lam,
    Pair,
    Pi,
    Proj1,
    Proj2,
    Refl,
    Sigma,
    Term,
    Univ,
    Var,
    constants,
    free_vars,
    shift,
)

KEYWORDS = {"def", "axiom", "fun", "forall", "sigma", "fst", "snd", "Id", "refl", "J", "U0", "U1"}
_TOKEN = re.compile(r"\s+|--[^\n]*|(?P<tok>:=|=>|->|[()*,:.]|[A-Za-z_][A-Za-z0-9_']*)")


class KernelError(Exception):
    """Base class for diagnostics from the kernel."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message, self.line, self.col = message, line, col

    def as_dict(self) -> dict:
        return {"kind": type(self).__name__, "line": self.line, "col": self.col, "message": self.message}


class ParseError(KernelError):
    pass


class UnboundName(ParseError):
    pass


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        if m.group("tok"):
            out.append(Token(m.group("tok"), line, pos - line_start + 1))
        chunk = m.group(0)
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(Token("<eof>", line, pos - line_start + 1))
    return out


@dataclass
class Decl:
    kind: str  # "def" or "axiom"
    name: str
    type: Term
    value: Term | None
    line: int
    col: int = 1


class Parser:
    def __init__(self, text: str, known=()):
        self.toks = tokenize(text)
        self.i = 0
        self.known = set(known)

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def err(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def next(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            raise self.err(f"expected {text!r}, found {self.tok.text!r}")
        return self.next()

    def name(self) -> str:
        tok = self.tok
        if tok.text in KEYWORDS or not re.match(r"[A-Za-z_]", tok.text):
            raise self.err(f"expected a name, found {tok.text!r}")
        self.i += 1
        return tok.text

    # -- grammar --------------------------------------------------------------

    def binders(self, scope, at_least_one):
        out = []
        while self.tok.text == "(" and self._looks_like_binder():
            self.next()
            names = [self.name()]
            while self.tok.text != ":":
                names.append(self.name())
            self.expect(":")
            for k, n in enumerate(names):
                # the type is parsed once per name so each copy sees the earlier names
                if k == 0:
                    start = self.i
                    ty = self.term(scope + [b[0] for b in out])
                    end = self.i
                else:
                    save = self.i
                    self.i = start
                    ty = self.term(scope + [b[0] for b in out])
                    self.i = save if save > end else end
                out.append((n, ty))
            self.expect(")")
        if at_least_one and not out:
            raise self.err("expected a binder '(x : A)'")
        return out

    def _looks_like_binder(self) -> bool:
        k = self.i + 1
        if self.toks[k].text in KEYWORDS:
            return False
        while re.match(r"[A-Za-z_]", self.toks[k].text) and self.toks[k].text not in KEYWORDS:
            k += 1
        return k > self.i + 1 and self.toks[k].text == ":"

    def term(self, scope) -> Term:
        t = self.tok.text
        if t in ("fun", "forall", "sigma"):
            self.next()
            bs = self.binders(scope, True)
            self.expect("=>" if t == "fun" else ",")
            body = self.term(scope + [n for n, _ in bs])
            node = {"fun": Lam, "forall": Pi, "sigma": Sigma}[t]
            for n, ty in reversed(bs):
                body = node(ty, body, n)
            return body
        left = self.prod(scope)
        if self.tok.text == "->":
            self.next()
            right = self.term(scope)
            return Pi(left, shift(right, 1), "_")
        return left

    def prod(self, scope) -> Term:
        left = self.app(scope)
        if self.tok.text == "*":
            self.next()
            right = self.prod(scope)
            return Sigma(left, shift(right, 1), "_")
        return left

    def app(self, scope) -> Term:
        t = self.tok.text
        if t in ("fst", "snd"):
            self.next()
            head = (Proj1 if t == "fst" else Proj2)(self.atom(scope))
        elif t == "Id":
            self.next()
            head = Id(self.atom(scope), self.atom(scope), self.atom(scope))
        elif t == "refl":
            self.next()
            head = Refl(self.atom(scope), self.atom(scope))
        else:
            head = self.atom(scope)
        while self._starts_atom():
            head = App(head, self.atom(scope))
        return head

    def _starts_atom(self) -> bool:
        t = self.tok.text
        if t in ("(", "U0", "U1", "J"):
            return True
        return t not in KEYWORDS and bool(re.match(r"[A-Za-z_]", t))

    def atom(self, scope) -> Term:
        tok = self.tok
        t = tok.text
        if t in ("U0", "U1"):
            self.next()
            return Univ(int(t[1]))
        if t == "J":
            return self.j_form(scope)
        if t == "(":
            self.next()
            first = self.term(scope)
            if self.tok.text == ")":
                self.next()
                return first
            if self.tok.text == ":":
                self.next()
                ty = self.term(scope)
                self.expect(")")
                return Ann(first, ty)
            items = [first]
            while self.tok.text == ",":
                self.next()
                items.append(self.term(scope))
            self.expect(")")
            out = items[-1]
            for item in reversed(items[:-1]):
                out = Pair(item, out)
            return out
        if t in KEYWORDS or not re.match(r"[A-Za-z_]", t):
            raise self.err(f"unexpected {t!r}")
        self.next()
        for k in range(len(scope) - 1, -1, -1):
            if scope[k] == t:
                return Var(len(scope) - 1 - k)
        if t in self.known:
            return Const(t)
        raise UnboundName(f"unbound identifier {t!r}", tok.line, tok.col)

    def j_form(self, scope) -> Term:
        self.expect("J")
        self.expect("(")
        x, y, e = self.name(), self.name(), self.name()
        self.expect(".")
        motive = self.term(scope + [x, y, e])
        self.expect(",")
        z = self.name()
        self.expect(".")
        base = self.term(scope + [z])
        rest = []
        for _ in range(4):
            self.expect(",")
            rest.append(self.term(scope))
        self.expect(")")
        return J(motive, base, *rest, names=(x, y, e, z))

    def decl(self) -> Decl:
        tok = self.next()
        kind = tok.text
        name = self.name()
        bs = self.binders([], False)
        scope = [n for n, _ in bs]
        self.expect(":")
        ty = self.term(scope)
        value = None
        if kind == "def":
            self.expect(":=")
            value = self.term(scope)
        for n, b in reversed(bs):
            ty = Pi(b, ty, n)
            if value is not None:
                value = Lam(b, value, n)
        return Decl(kind, name, ty, value, tok.line, tok.col)

    def file(self) -> list[Decl]:
        out = []
        while self.tok.text != "<eof>":
            if self.tok.text not in ("def", "axiom"):
                raise self.err(f"expected 'def' or 'axiom', found {self.tok.text!r}")
            d = self.decl()
            if d.name in self.known:
                raise ParseError(f"{d.name!r} is already defined", d.line, d.col)
            out.append(d)
            self.known.add(d.name)
        return out


def parse(text: str, scope=(), known=()) -> Term:
    """Parse one term; ``scope`` lists the bound names, innermost last."""
    p = Parser(text, known)
    t = p.term(list(scope))
    if p.tok.text != "<eof>":
        raise p.err(f"unexpected {p.tok.text!r} after term")
    return t


def parse_context(text: str, known=()) -> list[tuple[str, Term]]:
    """``(x : A) (y : B) ...`` as a list of ``(name, type)``."""
    p = Parser(text, known)
    bs = p.binders([], False)
    if p.tok.text != "<eof>":
        raise p.err(f"unexpected {p.tok.text!r} in context")
    return bs


def parse_file(text: str, known=()) -> list[Decl]:
    return Parser(text, known).file()


# -- printing ---------------------------------------------------------------------


def _fresh(name: str, taken) -> str:
    if name in ("_", "") or name in KEYWORDS:
        name = "x"
    if name not in taken:
        return name
    k = 1
    while f"{name}{k}" in taken:
        k += 1
    return f"{name}{k}"


def pretty(t: Term, scope=()) -> str:
    """Print ``t`` so that :func:`parse` reads it back as the same term."""
    reserved = constants(t)
    return _print(t, list(scope), reserved, 0)


def _print(t: Term, names: list, reserved: set, prec: int) -> str:
    def p(s, ns=names, level=0):
        return _print(s, ns, reserved, level)

    def wrap(text, level):
        return f"({text})" if prec > level else text

    taken = set(names) | reserved
    if isinstance(t, Var):
        k = len(names) - 1 - t.index
        return names[k] if 0 <= k < len(names) else f"#{t.index}"
    if isinstance(t, Univ):
        return f"U{t.level}"
    if isinstance(t, Const):
        return t.name
    if isinstance(t, (Pi, Sigma)) and 0 not in free_vars(t.cod):
        inner = p(t.cod, names + ["_"], 0 if isinstance(t, Pi) else 1)
        if isinstance(t, Pi):
            return wrap(f"{p(t.dom, level=1)} -> {inner}", 0)
        return wrap(f"{p(t.dom, level=2)} * {inner}", 1)
    if isinstance(t, (Pi, Sigma, Lam)):
        n = _fresh(t.name, taken)
        body = t.body if isinstance(t, Lam) else t.cod
        kw, sep = {Pi: ("forall", ","), Sigma: ("sigma", ","), Lam: ("fun", " =>")}[type(t)]
        return wrap(f"{kw} ({n} : {p(t.dom)}){sep} {p(body, names + [n])}", 0)
    if isinstance(t, App):
        return wrap(f"{p(t.fn, level=2)} {p(t.arg, level=3)}", 2)
    if isinstance(t, Proj1):
        return wrap(f"fst {p(t.pair, level=3)}", 2)
    if isinstance(t, Proj2):
        return wrap(f"snd {p(t.pair, level=3)}", 2)
    if isinstance(t, Id):
        return wrap(f"Id {p(t.type, level=3)} {p(t.lhs, level=3)} {p(t.rhs, level=3)}", 2)
    if isinstance(t, Refl):
        return wrap(f"refl {p(t.type, level=3)} {p(t.term, level=3)}", 2)
    if isinstance(t, Pair):
        return f"({p(t.fst)}, {p(t.snd)})"
    if isinstance(t, Ann):
        return f"({p(t.term)} : {p(t.type)})"
    if isinstance(t, J):
        x = _fresh(t.names[0], taken)
        y = _fresh(t.names[1], taken | {x})
        e = _fresh(t.names[2], taken | {x, y})
        z = _fresh(t.names[3], taken)
        return (
            f"J({x} {y} {e}. {p(t.motive, names + [x, y, e])}, {z}. {p(t.base, names + [z])}, "
            f"{p(t.type)}, {p(t.lhs)}, {p(t.rhs)}, {p(t.proof)})"
        )
    raise TypeError(f"not a term: {t!r}")


def pretty_decl(d: Decl) -> str:
    if d.kind == "axiom":
        return f"axiom {d.name} : {pretty(d.type)}"
    return f"def {d.name} : {pretty(d.type)} := {pretty(d.value)}"

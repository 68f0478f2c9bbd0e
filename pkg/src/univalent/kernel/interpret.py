"""Interpretation of checked judgments in a structured universe model.

Contexts become towers of the contextual category, types become classifier
maps ``total(ctx) -> U`` and terms become maps ``total(ctx) -> U~`` lying over
the classifier of their type.  Terms are interpreted structurally: every
constructor uses the matching product, sum or identity operation, so two
definitionally equal terms receive equal maps only if the model is sound.

The universe ``U0`` itself has no interpretation; base types and their
points come from model constants (``type`` and ``point`` directives).
Axioms without a model value block interpretation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..fincat import PresheafMap
from .checker import Checker, Context, quote
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
    instantiate,
    instantiate_many,
    shift,
)


class InterpretError(Exception):
    """The judgment uses something the model cannot interpret."""


class AxiomBlocked(InterpretError):
    def __init__(self, name: str):
        super().__init__(f"axiom-blocked: {name} has no value in the model")
        self.name = name


@dataclass
class ModelConstants:
    """Values of axiom constants: ``types[name] = code``, ``points[name] = index in its fiber``."""

    types: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)


@dataclass
class Scope:
    """A context during interpretation: tower, total, variable terms and the checker context."""

    tower: object
    total: object
    terms: tuple  # one term map per variable, outermost first
    classifiers: tuple
    ctx: Context

    def weaken(self, cc, classifier: PresheafMap, name: str, tyv) -> "Scope":
        chosen = cc.u.choose(classifier)
        terms = tuple(t.compose(chosen.proj) for t in self.terms) + (chosen.q,)
        classifiers = tuple(c.compose(chosen.proj) for c in self.classifiers) + (classifier.compose(chosen.proj),)
        tower = cc.tower(self.tower, classifier)
        return Scope(tower, cc.total(tower), terms, classifiers, self.ctx.extend(name, tyv))


_TYPE_FORMERS = (Pi, Sigma, Id)


class Interpreter:
    """Interpret judgments of ``checker`` in a :class:`StructuredModel`."""

    def __init__(self, checker: Checker, model, constants: ModelConstants | None = None, max_depth: int | None = None):
        self.checker = checker
        self.max_depth = max_depth
        self.model = model
        self.cc = model.cc
        self.u = model.universe
        self.constants = constants or ModelConstants()

    # -- contexts -------------------------------------------------------------

    def empty(self) -> Scope:
        pt = self.cc.pt
        return Scope(pt, self.cc.total(pt), (), (), Context())

    def extend(self, scope: Scope, name: str, ty: Term) -> Scope:
        if self.max_depth is not None and len(scope.tower) >= self.max_depth:
            raise InterpretError(f"context longer than the depth bound {self.max_depth}")
        cls = self.type(scope, ty)
        return scope.weaken(self.cc, cls, name, self.checker.eval(ty, scope.ctx))

    def context(self, binders) -> Scope:
        self.checker.context(binders)
        scope = self.empty()
        for name, ty in binders:
            scope = self.extend(scope, name, ty)
        return scope

    # -- types ----------------------------------------------------------------

    def _whnf_type(self, scope: Scope, ty: Term) -> Term:
        if isinstance(ty, _TYPE_FORMERS) or (isinstance(ty, Const) and ty.name in self.constants.types):
            return ty
        return quote(self.checker.eval(ty, scope.ctx), len(scope.ctx))

    def type(self, scope: Scope, ty: Term) -> PresheafMap:
        """Classifier map ``total(scope) -> U`` of a type."""
        ty = self._whnf_type(scope, ty)
        if isinstance(ty, Const) and ty.name in self.constants.types:
            return self.u.constant(scope.total, self.constants.types[ty.name])
        if isinstance(ty, (Pi, Sigma)):
            F = self.type(scope, ty.dom)
            inner = self.extend(scope, ty.name, ty.dom)
            G = self.type(inner, ty.cod)
            structure = self.model.pi if isinstance(ty, Pi) else self.model.sigma
            return structure.code(F, G)
        if isinstance(ty, Id):
            T = self.type(scope, ty.type)
            return self.model.ident.code(T, self.term(scope, ty.lhs, ty.type), self.term(scope, ty.rhs, ty.type))
        if isinstance(ty, Univ):
            raise InterpretError(f"the universe U{ty.level} has no interpretation in this model")
        if isinstance(ty, Const):
            raise AxiomBlocked(ty.name)
        if isinstance(ty, Var):
            raise InterpretError("type variables range over a universe and have no interpretation")
        raise InterpretError(f"cannot interpret {type(ty).__name__} as a type")

    # -- terms ----------------------------------------------------------------

    def _infer(self, scope: Scope, t: Term) -> Term:
        return quote(self.checker.infer(scope.ctx, t), len(scope.ctx))

    def term(self, scope: Scope, t: Term, ty: Term | None = None) -> PresheafMap:
        """Term map ``total(scope) -> U~`` of ``t`` (checked against ``ty`` when given)."""
        if isinstance(t, Var):
            return scope.terms[len(scope.terms) - 1 - t.index]
        if isinstance(t, Ann):
            return self.term(scope, t.term, t.type)
        if isinstance(t, Const):
            return self._constant(scope, t.name)
        if isinstance(t, (Univ, Pi, Sigma, Id)):
            raise InterpretError("codes of types have no interpretation without a universe structure")
        if isinstance(t, Lam):
            fty = self._infer(scope, t) if ty is None else ty
            fty = self._whnf_type(scope, fty)
            if not isinstance(fty, Pi):
                raise InterpretError("function checked against a non-function type")
            F = self.type(scope, t.dom)
            inner = self.extend(scope, t.name, t.dom)
            G = self.type(inner, fty.cod)
            return self.model.pi.lam(F, G, self.term(inner, t.body, fty.cod))
        if isinstance(t, App):
            fty = self._whnf_type(scope, self._infer(scope, t.fn))
            F, G = self._family(scope, fty)
            fn = self.term(scope, t.fn, fty)
            return self.model.pi.app(F, G, fn, self.term(scope, t.arg, fty.dom))
        if isinstance(t, Pair):
            if ty is None:
                raise InterpretError("cannot interpret an unannotated pair")
            sty = self._whnf_type(scope, ty)
            if not isinstance(sty, Sigma):
                raise InterpretError("pair checked against a non-pair type")
            F, G = self._family(scope, sty)
            first = self.term(scope, t.fst, sty.dom)
            second = self.term(scope, t.snd, instantiate(sty.cod, t.fst))
            return self.model.sigma.pair(F, G, first, second)
        if isinstance(t, (Proj1, Proj2)):
            sty = self._whnf_type(scope, self._infer(scope, t.pair))
            F, G = self._family(scope, sty)
            c = self.term(scope, t.pair, sty)
            op = self.model.sigma.fst if isinstance(t, Proj1) else self.model.sigma.snd
            return op(F, G, c)
        if isinstance(t, Refl):
            T = self.type(scope, t.type)
            return self.model.ident.refl(T, self.term(scope, t.term, t.type))
        if isinstance(t, J):
            return self._j(scope, t)
        raise InterpretError(f"cannot interpret {type(t).__name__}")

    def _family(self, scope: Scope, ty: Term):
        """Classifiers of the domain and the dependent codomain of a product or sum type."""
        if not isinstance(ty, (Pi, Sigma)):
            raise InterpretError("expected a product or sum type")
        F = self.type(scope, ty.dom)
        G = self.type(self.extend(scope, ty.name, ty.dom), ty.cod)
        return F, G

    def _constant(self, scope: Scope, name: str) -> PresheafMap:
        entry = self.checker.glob.entries.get(name)
        if entry is None:
            raise InterpretError(f"unknown constant {name!r}")
        if entry.value is not None:
            return self.term(scope, entry.value, entry.type)
        if name in self.constants.points:
            T = self.type(scope, entry.type)
            index = self.constants.points[name]
            out = {}
            for j, ws in scope.total.at.items():
                out[j] = {}
                for w in ws:
                    fiber = self.u.fiber(j, T.comp[j][w])
                    if not 0 <= index < len(fiber):
                        raise InterpretError(f"point {name} index {index} outside its fiber")
                    out[j][w] = fiber[index]
            return PresheafMap(scope.total, self.u.Ut, out)
        raise AxiomBlocked(name)

    def _j(self, scope: Scope, t: J) -> PresheafMap:
        x, y, e, z = t.names
        T = self.type(scope, t.type)
        s1 = self.extend(scope, x, t.type)
        s2 = self.extend(s1, y, shift(t.type, 1))
        s3 = self.extend(s2, e, Id(shift(t.type, 2), Var(1), Var(0)))
        C = self.type(s3, t.motive)
        sz = self.extend(scope, z, t.type)
        base_ty = instantiate_many(shift(t.motive, 1, 3), [Var(0), Var(0), Refl(shift(t.type, 1), Var(0))])
        d = self.term(sz, t.base, base_ty)
        a = self.term(scope, t.lhs, t.type)
        b = self.term(scope, t.rhs, t.type)
        p = self.term(scope, t.proof, Id(t.type, t.lhs, t.rhs))
        return self.model.ident.j_term(T, C, d, a, b, p)

    # -- judgments ------------------------------------------------------------

    def section(self, binders, t: Term, ty: Term):
        """The judgment ``binders |- t : ty`` as a section of the tower of ``ty``."""
        scope = self.context(binders)
        self.checker.check(scope.ctx, t, self.checker.eval(ty, scope.ctx))
        cls = self.type(scope, ty)
        tower = self.cc.tower(scope.tower, cls)
        return self.cc.section(tower, self.term(scope, t, ty))


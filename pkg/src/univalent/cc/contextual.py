"""Contextual categories as checkable data and the exhaustive axiom checker."""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Any


class ContextualCategory(abc.ABC):
    """Interface shared by concrete and mutated contextual categories.

    Objects and morphisms are plain hashable values; morphisms must know their
    source and target through :meth:`source` and :meth:`target`.
    """

    name = "cc"

    @property
    @abc.abstractmethod
    def pt(self) -> Any: ...

    @abc.abstractmethod
    def length(self, x) -> int: ...

    @abc.abstractmethod
    def ft(self, x): ...

    @abc.abstractmethod
    def proj(self, x):
        """Canonical projection ``x -> ft(x)``."""

    @abc.abstractmethod
    def pullback(self, x, f):
        """``(f*x, q(f, x))`` for ``f: y -> ft(x)``."""

    @abc.abstractmethod
    def objects(self, depth: int) -> list:
        """All objects of length at most ``depth``, in a fixed order."""

    @abc.abstractmethod
    def hom(self, x, y) -> list:
        """All morphisms ``x -> y``."""

    @abc.abstractmethod
    def compose(self, g, f): ...

    @abc.abstractmethod
    def identity(self, x): ...

    @abc.abstractmethod
    def source(self, f): ...

    @abc.abstractmethod
    def target(self, f): ...

    def describe(self, v) -> str:
        return repr(v)


class OneObjectCC(ContextualCategory):
    """The contextual category whose only object is ``pt``."""

    name = "one-object"
    pt = "pt"

    def length(self, x):
        return 0

    def ft(self, x):
        return "pt"

    def proj(self, x):
        return ("id", "pt")

    def pullback(self, x, f):
        raise ValueError("no object of positive length")

    def objects(self, depth):
        return ["pt"]

    def hom(self, x, y):
        return [("id", "pt")]

    def compose(self, g, f):
        return ("id", "pt")

    def identity(self, x):
        return ("id", "pt")

    def source(self, f):
        return "pt"

    def target(self, f):
        return "pt"


AXIOMS = (
    "C1",
    "grading",
    "proj-typing",
    "category",
    "pb-typing",
    "square-commutes",
    "square-pullback",
    "C2-object",
    "C2-morphism",
    "C3-object",
    "C3-morphism",
)


@dataclass
class AxiomResult:
    axiom: str
    checked: int = 0
    witness: dict | None = None

    @property
    def passed(self) -> bool:
        return self.witness is None


@dataclass
class CCReport:
    """Outcome of :func:`check_cc_axioms`; one entry per axiom in checking order."""

    depth: int
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failed(self) -> list[str]:
        return [r.axiom for r in self.results if not r.passed]

    @property
    def first_failure(self) -> AxiomResult | None:
        return next((r for r in self.results if not r.passed), None)

    def result(self, axiom: str) -> AxiomResult:
        return next(r for r in self.results if r.axiom == axiom)

    def as_dict(self) -> dict:
        first = self.first_failure
        return {
            "verdict": "pass" if self.passed else "fail",
            "depth": self.depth,
            "first_failure": first.axiom if first else None,
            "axioms": [
                {"axiom": r.axiom, "status": "pass" if r.passed else "fail", "checked": r.checked, "witness": r.witness}
                for r in self.results
            ],
        }

    def lines(self) -> list[str]:
        out = [f"verdict: {'pass' if self.passed else 'fail'} (depth {self.depth})"]
        for r in self.results:
            out.append(f"{r.axiom}: {'pass' if r.passed else 'FAIL'} ({r.checked} checked)")
            if r.witness:
                for key, val in r.witness.items():
                    out.append(f"  {key}: {val}")
        return out


class _Recorder:
    def __init__(self, cc: ContextualCategory, depth: int):
        self.cc = cc
        self.report = CCReport(depth)
        self.by_name = {}
        for axiom in AXIOMS:
            r = AxiomResult(axiom)
            self.report.results.append(r)
            self.by_name[axiom] = r

    def tick(self, axiom: str, ok: bool, **witness) -> bool:
        r = self.by_name[axiom]
        r.checked += 1
        if not ok and r.witness is None:
            r.witness = {k: self.cc.describe(v) for k, v in witness.items() if v is not None}
        return ok

    def skipped(self, axiom: str) -> bool:
        return not self.by_name[axiom].passed


def _safe(fn, *args):
    try:
        return fn(*args), None
    except Exception as exc:  # a broken structure map is a failed axiom, not a crash
        return None, exc


def check_cc_axioms(cc: ContextualCategory, depth: int, cone_depth: int | None = None) -> CCReport:
    """Check every contextual-category axiom on objects of length at most ``depth``.

    Pullback operations are checked for all ``f: Y -> ft(X)`` with ``f*X`` of
    length at most ``depth``; the pullback property is tested against cones
    from every object of length at most ``cone_depth`` (default ``depth - 1``).
    Violations are recorded, never raised.
    """
    rec = _Recorder(cc, depth)
    cone_depth = max(0, depth - 1) if cone_depth is None else cone_depth
    objs = cc.objects(depth)
    pt = cc.pt

    ok = cc.length(pt) == 0 and cc.ft(pt) == pt
    rec.tick("C1", ok, object=pt, ft=_safe(cc.ft, pt)[0])

    for x in objs:
        if x == pt:
            continue
        fx, err = _safe(cc.ft, x)
        rec.tick("grading", err is None and cc.length(fx) == cc.length(x) - 1, object=x, ft=fx)
        px, err = _safe(cc.proj, x)
        good = err is None and cc.source(px) == x and cc.target(px) == fx
        rec.tick("proj-typing", good, object=x, projection=px)

    # category laws on the small objects
    small = [x for x in objs if cc.length(x) <= max(0, depth - 1)]
    homs = {(a, b): cc.hom(a, b) for a in small for b in small}
    for (a, b), fs in homs.items():
        for f in fs:
            good = cc.compose(f, cc.identity(a)) == f and cc.compose(cc.identity(b), f) == f
            rec.tick("category", good, morphism=f)
    for a in small:
        for b in small:
            for c in small:
                for f in homs[(a, b)]:
                    for g in homs[(b, c)]:
                        gf = cc.compose(g, f)
                        for d in small:
                            for h in homs[(c, d)]:
                                good = cc.compose(h, gf) == cc.compose(cc.compose(h, g), f)
                                rec.tick("category", good, f=f, g=g, h=h)

    # pullback operations
    shorter = [y for y in objs if cc.length(y) <= depth - 1]
    cone_objs = [w for w in objs if cc.length(w) <= cone_depth]
    for x in objs:
        if cc.length(x) == 0:
            continue
        fx = cc.ft(x)
        if rec.skipped("grading") and cc.length(fx) != cc.length(x) - 1:
            continue
        px = cc.proj(x)
        for y in shorter:
            for f in cc.hom(y, fx):
                res, err = _safe(cc.pullback, x, f)
                if err is not None:
                    rec.tick("pb-typing", False, object=x, map=f, error=str(err))
                    continue
                fstar, q = res
                fs_ft, _ = _safe(cc.ft, fstar)
                typed = (
                    fs_ft == y
                    and cc.length(fstar) == cc.length(y) + 1
                    and cc.source(q) == fstar
                    and cc.target(q) == x
                )
                if not rec.tick("pb-typing", typed, object=x, map=f, pulled_back=fstar, q=q):
                    continue
                pf = cc.proj(fstar)
                comm, err = _safe(lambda: cc.compose(px, q) == cc.compose(f, pf))
                if not rec.tick("square-commutes", bool(comm), object=x, map=f, q=q, error=err and str(err)):
                    continue
                _, err = _safe(_check_cone, cc, rec, x, f, fstar, q, px, pf, cone_objs)
                if err is not None:
                    rec.tick("square-pullback", False, object=x, map=f, error=str(err))
                if y == fx and f == cc.identity(fx):
                    rec.tick("C2-object", fstar == x, object=x, pulled_back=fstar)
                    rec.tick("C2-morphism", q == cc.identity(x), object=x, q=q)
                for z in shorter:
                    for g in cc.hom(z, y):
                        _, err = _safe(_check_c3, cc, rec, x, f, g, fstar, q)
                        if err is not None:
                            rec.tick("C3-morphism", False, object=x, f=f, g=g, error=str(err))
    return rec.report


def _check_cone(cc, rec, x, f, fstar, q, px, pf, cone_objs):
    for w in cone_objs:
        factors: dict = {}
        for h in cc.hom(w, fstar):
            key = (cc.compose(pf, h), cc.compose(q, h))
            factors[key] = factors.get(key, 0) + 1
        by_image: dict = {}
        for b in cc.hom(w, x):
            by_image.setdefault(cc.compose(px, b), []).append(b)
        cones = 0
        for a in cc.hom(w, cc.source(f)):
            for b in by_image.get(cc.compose(f, a), ()):
                cones += 1
                n = factors.get((a, b), 0)
                if not rec.tick("square-pullback", n == 1, object=x, map=f, cone_source=w, factorizations=n):
                    return
        if cones != sum(factors.values()):
            rec.tick("square-pullback", False, object=x, map=f, cone_source=w, factorizations="not a cone")
            return


def _check_c3(cc, rec, x, f, g, fstar, q):
    fg = cc.compose(f, g)
    left, err1 = _safe(cc.pullback, x, fg)
    right, err2 = _safe(cc.pullback, fstar, g)
    if err1 is not None or err2 is not None:
        rec.tick("C3-object", False, object=x, f=f, g=g, error=str(err1 or err2))
        return
    good = left[0] == right[0]
    if not rec.tick("C3-object", good, object=x, f=f, g=g, composite_pullback=left[0], iterated_pullback=right[0]):
        return
    rec.tick("C3-morphism", left[1] == cc.compose(q, right[1]), object=x, f=f, g=g)


"""Acceptance suite: one test per criterion, each with its exact time limit."""

import time
from itertools import product
from math import comb

import pytest

from fixtures import (
    CC_MUTANTS,
    DEFEQ_CONTEXT,
    DEFEQ_CORPUS,
    LIBRARY_MUTANTS,
    base_maps,
    check_id,
    check_pi,
    check_sigma,
    fibration_catalogue,
    mutate_library,
)
from test_interpret import CONSTANTS, JUDGMENTS, PRELUDE, SUBSTITUTIONS
from univalent.cc.contextual import check_cc_axioms
from univalent.cc.iso import canonical_iso, composition_problems, preservation_problems, relabeled_universe
from univalent.cc.setmodel import MUTATIONS, alternate_model, derive_all, mutated_classifiers, set_model
from univalent.cc.structures import StructureError
from univalent.cc.universe_cc import build_cc
from univalent.fincat import finite_set_universe
from univalent.kernel.checker import Checker
from univalent.kernel.interpret import Interpreter
from univalent.kernel.library import library_source, load_library
from univalent.kernel.parser import KernelError
from univalent.kernel.syntax import instantiate
from univalent.sset.lifting import is_kan_fibration
from univalent.sset.simplex import sset_pullback, standard_simplex
from univalent.sset.universe import disjoint_copies_fibration, nerve_universe, univalence_check


class Clock:
    def __init__(self, criterion, limit):
        self.criterion, self.limit = criterion, limit
        self.start = time.perf_counter()

    def finish(self, ok, detail=""):
        elapsed = time.perf_counter() - self.start
        ok = ok and elapsed < self.limit
        status = "PASS" if ok else "FAIL"
        print(f"criterion {self.criterion}: {status} in {elapsed:.2f}s (limit {self.limit}s) {detail}".rstrip())
        assert ok, f"criterion {self.criterion} failed: {detail} after {elapsed:.2f}s"


def test_criterion_1_cc_axioms():
    clock = Clock(1, 60)
    report = check_cc_axioms(build_cc(finite_set_universe(2)), 3)
    caught = 0
    for mutant in CC_MUTANTS:
        r = check_cc_axioms(mutant(), 2)
        if not r.passed and mutant.breaks in r.failed and r.result(mutant.breaks).witness:
            caught += 1
    clock.finish(report.passed and caught == len(CC_MUTANTS) == 8, f"mutants caught {caught}/{len(CC_MUTANTS)}")


def test_criterion_2_canonical_iso():
    clock = Clock(2, 60)
    u = finite_set_universe(2)
    u2, w = relabeled_universe(
        u, code_label=lambda j, n: f"c{n}", point_label=lambda j, e: ("pt", e), pt_label="star"
    )
    u3, w2 = relabeled_universe(u2, code_label=lambda j, c: ("again", c))
    cc1, cc2, cc3 = build_cc(u), build_cc(u2), build_cc(u3)
    first = canonical_iso(cc1, cc2, w)
    second = canonical_iso(cc2, cc3, w2)
    direct = canonical_iso(cc1, cc3, w.then(w2))
    preserve = preservation_problems(first, 3)
    compose = composition_problems(first, second, direct, 3)
    clock.finish(preserve == [] and compose == [], f"problems {len(preserve)}+{len(compose)}")


def _two_point(model):
    cc = model.cc
    return cc.total(cc.tower(cc.pt, model.universe.constant(cc.total(cc.pt), 2)))


def test_criterion_3_structures():
    clock = Clock(3, 120)
    total, failures = 0, []
    for build in (set_model, alternate_model):
        model = build(4)
        # every family with fibers of size <= 3 over the point, and <= 2 over two points
        for window, gam in ((4, model.cc.total(model.cc.pt)), (3, _two_point(model))):
            for oracle in (check_pi, check_sigma, check_id):
                cases, bad = oracle(model, window, gam)
                total += cases
                failures += bad
    rejected = 0
    m = set_model(3)
    for kind in MUTATIONS:
        try:
            derive_all(m.universe, m.window, mutated_classifiers(m.window, kind))
        except StructureError as e:
            rejected += e.witness is not None
    ok = total > 0 and failures == [] and rejected == len(MUTATIONS)
    clock.finish(ok, f"{total} instances, mutations rejected {rejected}/{len(MUTATIONS)}")


def test_criterion_4_kernel():
    clock = Clock(4, 10)
    lib = load_library()
    rejected = 0
    for _, text, replacement in LIBRARY_MUTANTS:
        try:
            Checker().load(mutate_library(library_source(), text, replacement))
        except KernelError:
            rejected += 1
    ctx = lib.parse_context(DEFEQ_CONTEXT)
    names = [n for n, _ in ctx]
    decided = sum(
        lib.defeq(ctx, lib.parse(left, names), lib.parse(right, names), lib.parse(ty, names))
        for _, left, right, ty in DEFEQ_CORPUS
    )
    rules = {c[0] for c in DEFEQ_CORPUS}
    ok = rejected == len(LIBRARY_MUTANTS) == 10 and decided == len(DEFEQ_CORPUS) == 30 and len(rules) == 4
    clock.finish(ok, f"mutants {rejected}/10, defeq {decided}/30")


def test_criterion_5_interpretation():
    clock = Clock(5, 60)
    sound = pulled = 0
    for build in (set_model, alternate_model):
        checker = Checker()
        checker.load(PRELUDE)
        interp = Interpreter(checker, build(5), CONSTANTS)
        for ctx, term, ty in JUDGMENTS:
            binders = checker.parse_context(ctx) if ctx else []
            names = [n for n, _ in binders]
            t, a = checker.parse(term, names), checker.parse(ty, names)
            sound += interp.section(binders, t, a) == interp.section(binders, checker.normalize(binders, t), a)
        for ctx, dom, arg, term, ty in SUBSTITUTIONS:
            binders = checker.parse_context(ctx) if ctx else []
            names = [n for n, _ in binders]
            a_ty, a = checker.parse(dom, names), checker.parse(arg, names)
            t, b_ty = checker.parse(term, names + ["x"]), checker.parse(ty, names + ["x"])
            s_a = interp.section(binders, a, a_ty)
            s_t = interp.section(binders + [("x", a_ty)], t, b_ty)
            expected = interp.section(binders, instantiate(t, a), instantiate(b_ty, a))
            pulled += interp.cc.pullback_section(s_a, s_t) == expected
    ok = len(JUDGMENTS) == 20 and len(SUBSTITUTIONS) == 10 and sound == 40 and pulled == 20
    clock.finish(ok, f"judgments {sound}/40, substitutions {pulled}/20 over two models")


def test_criterion_6_universe_is_kan():
    clock = Clock(6, 300)
    _, p = nerve_universe(3, 3)
    report = is_kan_fibration(p, 3)
    clock.finish(report.passed)


def test_criterion_7_univalence():
    clock = Clock(7, 300)
    _, p = nerve_universe(3, 3)
    report = univalence_check(p)
    w = report.weq
    pi1 = {a: (m, n, good) for a, _, m, n, good in w.pi1}
    size_two = [v for v in pi1 if v[0] == 2]
    ok = (
        report.passed
        and w.pi0_matched == w.pi0_target == w.pi0_source == 3
        and all(good for _, _, good in pi1.values())
        and len(size_two) == 1
        and pi1[size_two[0]][:2] == (2, 2)
    )
    counter = univalence_check(disjoint_copies_fibration(3))
    ok = ok and not counter.passed and counter.witness() != []
    clock.finish(ok, f"pi0 {w.pi0_matched}/{w.pi0_target}, counterexample witness {len(counter.witness())}")


def test_criterion_8_pullback_closure():
    clock = Clock(8, 120)
    catalogue = fibration_catalogue(3)
    checked, failures = 0, []
    for name, q in catalogue:
        if not is_kan_fibration(q, 3).passed:
            continue
        bases = base_maps(q.target)
        assert len(bases) >= 3
        for base_name, f in bases:
            _, pulled, _ = sset_pullback(f, q)
            checked += 1
            if not is_kan_fibration(pulled, 3).passed:
                failures.append((name, base_name))
    ok = len(catalogue) >= 5 and checked >= 15 and failures == []
    clock.finish(ok, f"{checked} pullbacks, failures {failures}")


def _monotone(m, n):
    return [f for f in product(range(n + 1), repeat=m + 1) if all(a <= b for a, b in zip(f, f[1:]))]


def test_criterion_9_simplex_counts():
    clock = Clock(9, 5)
    bad = []
    for n in range(5):
        delta = standard_simplex(n, 4)
        for m in range(5):
            brute = _monotone(m, n)
            injective = [f for f in brute if len(set(f)) == len(f)]
            if len(delta.at[m]) != len(brute) or sorted(delta.at[m]) != brute:
                bad.append((n, m, "levels"))
            if not len(delta.nondegenerate(m)) == len(injective) == comb(n + 1, m + 1):
                bad.append((n, m, "nondegenerate"))
    clock.finish(bad == [], f"mismatches {bad}")


@pytest.fixture(autouse=True)
def _show(capsys):
    yield
    out = capsys.readouterr().out
    with capsys.disabled():
        print(out, end="")

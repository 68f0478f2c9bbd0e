import pytest

from fixtures import check_id, check_pi, check_sigma, classifiers, terms
from univalent.cc.setmodel import (
    MUTATIONS,
    alternate_model,
    derive_all,
    mutated_classifiers,
    set_model,
    universe_size,
)
from univalent.cc.structures import StructureError
from univalent.fincat import PresheafMap

MODELS = {"canonical": lambda: set_model(3), "alternate": lambda: alternate_model(3)}


def _two_point(model):
    cc = model.cc
    x = cc.tower(cc.pt, model.universe.constant(cc.total(cc.pt), 2))
    return cc.total(x)


@pytest.fixture(params=sorted(MODELS))
def model(request):
    return MODELS[request.param]()


def test_universe_size_closes_window():
    assert universe_size(3) == 5
    assert universe_size(4) == 28


@pytest.mark.parametrize("oracle", [check_pi, check_sigma, check_id], ids=["pi", "sigma", "id"])
def test_rules_hold_over_the_empty_context(model, oracle):
    cases, bad = oracle(model, 3, model.cc.total(model.cc.pt))
    assert cases > 0
    assert bad == []


@pytest.mark.parametrize("oracle", [check_pi, check_sigma, check_id], ids=["pi", "sigma", "id"])
def test_rules_hold_over_a_two_point_context(model, oracle):
    cases, bad = oracle(model, 2, _two_point(model))
    assert cases > 0
    assert bad == []


def test_product_of_constant_families_counts_functions(model):
    u = model.universe
    pt = model.cc.total(model.cc.pt)
    for a in range(3):
        F = u.constant(pt, a)
        ext = u.choose(F).obj
        for b in range(3):
            code = model.pi.code(F, u.constant(ext, b)).comp["*"][()]
            assert len(u.fiber("*", code)) == b**a


def test_sum_of_constant_families_counts_pairs(model):
    u = model.universe
    pt = model.cc.total(model.cc.pt)
    for a in range(3):
        F = u.constant(pt, a)
        ext = u.choose(F).obj
        for b in range(3):
            code = model.sigma.code(F, u.constant(ext, b)).comp["*"][()]
            assert len(u.fiber("*", code)) == a * b


def test_identity_type_is_a_proposition(model):
    u = model.universe
    pt = model.cc.total(model.cc.pt)
    T = u.constant(pt, 2)
    for a in terms(u, T):
        for b in terms(u, T):
            code = model.ident.code(T, a, b).comp["*"][()]
            assert len(u.fiber("*", code)) == (1 if a == b else 0)


@pytest.mark.parametrize("kind", MUTATIONS)
def test_mutated_classifiers_are_rejected(kind):
    m = set_model(3)
    with pytest.raises(StructureError) as info:
        derive_all(m.universe, m.window, mutated_classifiers(m.window, kind))
    assert info.value.witness is not None


def test_operations_outside_the_window_are_refused():
    m = set_model(3)
    pt = m.cc.total(m.cc.pt)
    F = m.universe.constant(pt, 4)
    with pytest.raises(StructureError):
        m.pi.code(F, m.universe.constant(m.universe.choose(F).obj, 1))


# -- stability under substitution -------------------------------------------------


def _lift(u, F, sigma):
    """``Del.F[sigma] -> Gam.F`` induced by ``sigma: Del -> Gam``."""
    Fs = F.compose(sigma)
    src, tgt = u.choose(Fs), u.choose(F)

    def at(j, z):
        w, x = src.split(j, z)
        return tgt.element(j, sigma.comp[j][w], x)

    return PresheafMap(src.obj, tgt.obj, at)


def _substitutions(model):
    gam = _two_point(model)
    pt = model.cc.total(model.cc.pt)
    (a, b) = gam.at["*"]
    yield PresheafMap(pt, gam, {"*": {(): a}})
    yield PresheafMap(pt, gam, {"*": {(): b}})
    yield PresheafMap(gam, gam, {"*": {a: b, b: a}})


def test_pi_is_stable_under_substitution(model):
    u, pi = model.universe, model.pi
    for sigma in _substitutions(model):
        gam = sigma.target
        for F in classifiers(u, gam, 3):
            lift = _lift(u, F, sigma)
            Fs = F.compose(sigma)
            for G in classifiers(u, u.choose(F).obj, 3):
                Gs = G.compose(lift)
                assert pi.code(Fs, Gs) == pi.code(F, G).compose(sigma)
                for body in terms(u, G):
                    assert pi.lam(Fs, Gs, body.compose(lift)) == pi.lam(F, G, body).compose(sigma)


def test_sigma_is_stable_under_substitution(model):
    u, sg = model.universe, model.sigma
    for sigma in _substitutions(model):
        for F in classifiers(u, sigma.target, 3):
            lift = _lift(u, F, sigma)
            for G in classifiers(u, u.choose(F).obj, 2):
                assert sg.code(F.compose(sigma), G.compose(lift)) == sg.code(F, G).compose(sigma)


def test_identity_is_stable_under_substitution(model):
    u, ident = model.universe, model.ident
    for sigma in _substitutions(model):
        for T in classifiers(u, sigma.target, 3):
            for a in terms(u, T):
                for b in terms(u, T):
                    left = ident.code(T.compose(sigma), a.compose(sigma), b.compose(sigma))
                    assert left == ident.code(T, a, b).compose(sigma)
                assert ident.refl(T.compose(sigma), a.compose(sigma)) == ident.refl(T, a).compose(sigma)

from artifact.errors import NotComposable
from artifact.fixtures import fix_a, fix_triv, fix_z2, fix_z2f
from artifact.groupoid import (
    Functor, check_action, check_category, check_functor, check_inner_realization, realize,
)
from artifact.linalg import QMatrix
from artifact.random_models import random_etale
from artifact.xv import (
    BvCategory, LinearAction, build_q, build_xv, build_xv_minus_g, build_xve,
    check_case_agreement, check_decomposition, check_partial_order, check_xv_structure,
    close_sample, extend_functor_bv, good_neighbourhoods, mor_hm_set, q_minima,
    xv_inner_action, xve_class_report,
)

import pytest


def test_fix_a_counts(fix_a):
    xv = build_xv(fix_a)
    assert len(xv.objects) == 7
    assert len(xv.morphisms) == 25
    assert len(realize(xv)) == 2


def test_fix_a_groupoid_laws(fix_a):
    xv = build_xv(fix_a)
    assert check_category(xv).ok
    assert check_xv_structure(xv).ok
    overlaps, bad = check_case_agreement(xv)
    assert overlaps > 0 and bad == []


def test_identities_and_inverses(fix_a):
    xv = build_xv(fix_a)
    for m in xv.morphisms:
        assert xv.compose(m, xv.inverse(m)) == xv.identity(xv.source(m))
        assert xv.compose(xv.identity(xv.source(m)), m) == m


def test_debug_mode_cross_checks_cases(fix_a):
    xv = build_xv(fix_a, debug=True)
    m1 = ((1,), (1, 2), "u", ("e",))
    m2 = ((1, 2), (1, 2), "u", ("e", "e"))
    assert xv.applicable_cases((1,), (1, 2), (1, 2)) == ["IKJ", "IJK"]
    assert xv.compose(m1, m2) == m1
    assert xv.compose_case("IKJ", m1, m2) == xv.compose_case("IJK", m1, m2)
    with pytest.raises(NotComposable):
        xv.compose(((1,), (1,), "a", ("e",)), ((2,), (2,), "p", ("e",)))


def test_small_fixtures():
    assert len(build_xv(fix_triv()).morphisms) == 1
    z2f = build_xv(fix_z2f())
    assert len(z2f.morphisms) == 2 and len(realize(z2f)) == 1
    z2 = build_xv(fix_z2())
    assert len(z2.objects) == 2 and len(realize(z2)) == 1


def test_q_poset_of_fix_a(fix_a):
    q = build_q(fix_a)
    assert len(q.morphisms) == 11
    assert check_partial_order(q) is None
    real, minima = q_minima(q)
    assert [set(x for _, x in c) for c in real.classes] == [{"a", "u"}, {"b", "v"}, {"p", "w", "x"}]
    assert sorted(m for ms in minima.values() for m in ms) == [
        ((1,), "a"), ((1,), "b"), ((2,), "p")]


def test_minus_g_of_fix_a(fix_a):
    xv = build_xv(fix_a)
    res = build_xv_minus_g(fix_a, xv)
    assert res.report.ok, res.report
    cert = res.report.get("classes / G biject with classes of X_V").witness
    assert cert == {"ok": True, "completion_classes": 3, "orbits": 2, "xv_classes": 2}
    hom = res.completion.hom(((1,), "a"), ((1, 2), "u")) + res.completion.hom(((1,), "a"), ((1, 2), "v"))
    assert len(hom) == 1
    explicit = mor_hm_set(xv)
    assert len([m for m in explicit if m[:2] == ((1,), (1, 2))]) == 2
    assert check_action(res.action).ok
    assert check_functor(res.iota).ok


def test_decomposition_and_inner_action(fix_a):
    xv = build_xv(fix_a)
    assert check_decomposition(xv, mor_hm_set(xv)).ok
    inner = xv_inner_action(xv)
    assert check_action(inner).ok
    assert check_inner_realization(inner).ok


def test_bv_extension_of_inclusion(fix_a):
    xv = build_xv(fix_a)
    bv = BvCategory(xv)
    assert len(bv.morphisms) == 19
    inclusion = Functor(bv, xv, lambda o: o, lambda m: m, "B_V into X_V")
    ext = extend_functor_bv(inclusion, xv)
    assert all(ext.mor(m) == m for m in xv.morphisms)


def test_xve_classes_and_composition_caveat(fix_a):
    xv = build_xv(fix_a)
    sign = LinearAction(xv.G.as_group(), 1, {("s", "e"): QMatrix.from_rows([[-1]])})
    assert close_sample(sign, [(1,)]) == ((-1,), (1,))
    xve, action = build_xve(xv, sign, [(1,)])
    assert check_action(action).ok
    assert xve_class_report(xve, xv) == {"classes": 3, "base_classes": 2, "sample_size": 2}
    # composition with the literal E-label is not source-consistent under a sign action
    assert not check_category(xve).ok
    trivial = LinearAction.trivial(xv.G.as_group(), 1)
    assert check_category(build_xve(xv, trivial, [(1,)])[0]).ok


def test_good_neighbourhoods(fix_a):
    system, rep = good_neighbourhoods(build_xv(fix_a))
    assert rep.ok and all(v == (k,) for k, v in system.items())


@pytest.mark.parametrize("seed", range(0, 40, 3))
def test_random_models_build(seed):
    d = random_etale(seed)
    xv = build_xv(d)
    assert check_category(xv).ok
    assert check_case_agreement(xv)[1] == []
    assert build_xv_minus_g(d, xv).report.ok

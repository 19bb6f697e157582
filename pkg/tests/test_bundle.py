from fractions import Fraction

import pytest

from artifact.bundle import (
    BundleCategory, GlobalSectionStructure, GroupoidBundle, Multisection, Section,
    assert_bundle, build_wv, check_multisection, class_weights, lift_inner_action, lift_section,
    multisection_from_structure, projection, pullback, push_along_fibers, push_multisection,
    section_compatibility, validate_bundle,
)
from artifact.errors import (
    IncompatibleSection, InputError, InvalidBundle, NotMorphismInvariant, StructureViolation,
)
from artifact.fixtures import fix_z2f, z2_translation
from artifact.groupoid import check_category, check_functor, identity_functor
from artifact.linalg import QMatrix, qvec
from artifact.xv import build_xv, xv_inner_action

HALF = Fraction(1, 2)


def sign_bundle(base):
    return GroupoidBundle.rank_one(base, lambda m: -1 if m[-1] == ("s",) or m[0] == "s" else 1)


def test_sign_bundle_on_translation_groupoid():
    b = sign_bundle(z2_translation())
    rep = validate_bundle(b)
    assert rep.ok, rep
    assert b.act(("s", "a"), qvec([3])) == qvec([-3])


def test_shape_mismatch_is_invalid():
    base = z2_translation()
    b = GroupoidBundle(base, {"a": 1, "b": 2}, lambda m: QMatrix.identity(1))
    assert not validate_bundle(b).ok
    with pytest.raises(InvalidBundle):
        assert_bundle(b)


def test_bundle_category_closure():
    b = sign_bundle(z2_translation())
    bcat = BundleCategory(b, [("a", (1,))])
    assert sorted(bcat.objects) == [("a", qvec([1])), ("b", qvec([-1]))]
    assert check_category(bcat).ok
    assert check_functor(projection(bcat)).ok


def test_sections_must_be_compatible():
    b = sign_bundle(z2_translation())
    f = Section(b, {"a": [1], "b": [-1]})
    assert section_compatibility(f) is None
    assert check_functor(lift_section(b, f)).ok
    g = Section.constant(b, [1])
    assert section_compatibility(g) is not None
    with pytest.raises(IncompatibleSection):
        lift_section(b, g)


def test_pullback_along_identity():
    base = z2_translation()
    b = sign_bundle(base)
    f = Section(b, {"a": [2], "b": [-2]})
    pb = pullback(b, identity_functor(base), f, verify_equivalence=True)
    assert pb.report.ok, pb.report
    assert pb.section("b") == qvec([-2])


def test_wv_over_identity_is_cocycle():
    base = z2_translation()
    wv = build_wv(base, identity_functor(base), sign_bundle(base))
    assert wv.report.ok


def test_lifted_inner_action_on_fix_z2f():
    xv = build_xv(fix_z2f())
    b = sign_bundle(xv)
    zero = Section.zero(b)
    action, rep = lift_inner_action(b, xv_inner_action(xv), sections=[zero])
    assert rep.ok, rep


def _two_sheeted(xv, b):
    sections = {0: {o: [1] for o in xv.objects}, 1: {o: [-1] for o in xv.objects}}

    def kappa(m):
        return {0: 1, 1: 0} if m[-1] == ("s",) else {0: 0, 1: 1}
    return GlobalSectionStructure([0, 1], sections, kappa)


def test_structured_multisection_on_fix_z2f():
    xv = build_xv(fix_z2f())
    b = sign_bundle(xv)
    lam, cert = multisection_from_structure(b, _two_sheeted(xv, b))
    obj = xv.objects[0]
    assert lam.fiber(obj) == {qvec([1]): HALF, qvec([-1]): HALF}
    assert cert.report.ok
    assert check_multisection(lam).ok
    assert cert.local_index[obj] == [(0,), (1,)]


def test_kappa_that_ignores_the_sign_is_rejected():
    xv = build_xv(fix_z2f())
    b = sign_bundle(xv)
    gs = GlobalSectionStructure([0, 1], {0: {o: [1] for o in xv.objects},
                                         1: {o: [-1] for o in xv.objects}},
                                lambda m: {0: 0, 1: 1})
    with pytest.raises(StructureViolation):
        multisection_from_structure(b, gs)


def test_multisection_weights():
    b = GroupoidBundle.trivial(z2_translation())
    with pytest.raises(InputError):
        Multisection(b, {("a", (0,)): -1})
    lam = Multisection(b, {("a", (0,)): HALF, ("b", (0,)): HALF})
    rep = check_multisection(lam)
    assert rep.get("constant along bundle morphisms").passed
    assert not rep.get("mass 1 on every fiber").passed


def test_push_along_fibers():
    base = z2_translation()
    b = GroupoidBundle.trivial(base)
    lam = Multisection(b, {(x, (v,)): HALF for x in base.objects for v in (1, 2)})
    pushed = push_multisection(lam, "fibers", fiber_map=lambda x, w: (0,), target_bundle=b)
    assert pushed.fiber("a") == {qvec([0]): 1}
    with pytest.raises(NotMorphismInvariant):
        push_along_fibers(lam, lambda x, w: w if x == "a" else (0,), b)
    with pytest.raises(InputError):
        push_multisection(lam, "sideways")


def test_class_weights_detect_inconsistency():
    base = z2_translation()
    assert class_weights(base, {"a": HALF, "b": HALF}) == ({"a": HALF}, None)
    assert class_weights(base, {"a": HALF})[1] == ("a", "b")

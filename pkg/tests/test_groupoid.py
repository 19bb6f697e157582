import pytest

from artifact.algebra import cyclic_group, z2
from artifact.errors import AlphaLawViolation, NoUniqueMinimum, NotNonsingular
from artifact.fixtures import (
    broken_associativity, identity_only, remark_four_objects, two_object_poset, z2_translation,
)
from artifact.groupoid import (
    Functor, GroupAction, PairGroupoid, Preuniformizer, check_action, check_category,
    check_equivalence, check_functor, check_inner_realization, check_preuniformizer,
    class_minima, complete_nonsingular, compose_functors, extend_poset_functor,
    identity_functor, inner_action, isotropy, isotropy_isomorphism, iota_times_G,
    orbits_of_classes, realize, tabulate, times_G, translation_groupoid,
)


def test_translation_groupoid_shape():
    gpd = z2_translation()
    assert len(gpd.objects) == 2 and len(gpd.morphisms) == 4
    rep = check_category(gpd)
    assert rep.ok, rep
    assert [c.name for c in rep.checks][-2:] == [
        "associativity over all composable triples", "inverse laws"]
    assert len(realize(gpd)) == 1


def test_tabulated_copy_is_equal():
    gpd = z2_translation()
    table = tabulate(gpd)
    assert check_category(table).ok
    assert sorted(table.morphisms, key=repr) == sorted(gpd.morphisms, key=repr)


def test_broken_associativity_has_witness():
    rep = check_category(broken_associativity())
    assert not rep.ok
    assert rep.failures()[0].witness is not None


def test_isotropy_of_translation_groupoid():
    gpd = translation_groupoid(cyclic_group(3), ["o"], lambda g, y: y)
    iso = isotropy(gpd, "o")
    assert iso.order == 3 and iso.is_group
    phi, ok = isotropy_isomorphism(gpd, gpd.morphisms[1])
    assert ok and len(phi) == 3


def test_completion_of_two_object_poset():
    poset = two_object_poset()
    completion, inclusion = complete_nonsingular(poset)
    assert len(completion.morphisms) == 4
    assert check_category(completion, nonsingular=True).ok
    assert check_functor(inclusion).ok
    assert realize(completion).classes == realize(poset).classes


def test_completion_rejects_singular_categories():
    fixed_point = translation_groupoid(z2(), ["o"], lambda g, y: y)
    with pytest.raises(NotNonsingular):
        complete_nonsingular(fixed_point)


def test_four_object_example_has_no_class_minimum():
    with pytest.raises(NoUniqueMinimum):
        class_minima(remark_four_objects())


def test_poset_functor_extends_to_completion():
    poset = two_object_poset()
    gpd = PairGroupoid(["a", "b"], {"a": "a", "b": "a"})
    f = Functor(poset, gpd, lambda x: x, lambda m: (poset.source(m), poset.target(m)))
    ext = extend_poset_functor(f)
    assert check_functor(ext).ok
    assert ext.mor(("b", "a")) == ("b", "a")


def test_identity_functor_is_equivalence():
    gpd = z2_translation()
    rep = check_equivalence(compose_functors(identity_functor(gpd), identity_functor(gpd)))
    assert [c.name for c in rep.checks] == [
        "Mor-set bijections", "realization injective", "realization surjective"]
    assert rep.ok


def test_collapse_is_not_an_equivalence():
    src = identity_only(["x", "y"])
    tgt = identity_only(["z"])
    f = Functor(src, tgt, lambda x: "z", lambda m: "id_z")
    rep = check_equivalence(f)
    assert not rep.get("realization injective").passed


def _swap_action():
    gpd = z2_translation()
    swap = {"a": "b", "b": "a"}

    def mor(g, m):
        h, y = m
        return (h, swap[y]) if g == "s" else m
    return GroupAction(z2(), gpd, lambda g, x: swap[x] if g == "s" else x, mor)


def test_action_and_times_g():
    act = _swap_action()
    assert check_action(act).ok
    assert orbits_of_classes(act) == [("a",)]
    tg = times_G(act.cat, act)
    assert check_category(tg).ok
    assert len(tg.morphisms) == 8


def test_inner_action_variants_agree():
    gpd = z2_translation()

    act = inner_action(gpd, z2(), lambda g, x: (g, {"a": "b", "b": "a"}[x]) if g == "s" else ("e", x))
    assert check_inner_realization(act).ok
    assert check_action(act).ok
    assert check_functor(iota_times_G(act)).ok
    bar = inner_action(gpd, z2(), lambda g, x: (g, x), variant="alphabar")
    assert all(bar.obj(g, x) == act.obj(g, x) for g in ("e", "s") for x in gpd.objects)


def test_inner_action_law_violation():
    gpd = z2_translation()
    with pytest.raises(AlphaLawViolation):
        inner_action(gpd, z2(), lambda g, x: ("e", x) if g == "e" else ("s", x))


def test_translation_chart_is_local_uniformizer():
    gpd = z2_translation()
    pu = Preuniformizer(gpd, ["a", "b"], z2(), lambda g, y: (g, y), 1)
    assert check_preuniformizer(pu, local=True).ok
    half = Preuniformizer(gpd, ["a"], z2(), lambda g, y: (g, y), 1)
    rep = check_preuniformizer(half)
    assert not rep.get("g*y stays in U").passed

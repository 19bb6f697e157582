import pytest

from artifact.algebra import cyclic_group, z2
from artifact.errors import InputError, InvalidEtaleData
from artifact.etale import EtaleDataV, assert_valid, full_orbit_check, h_min, validate
from artifact.fixtures import fix_a, fix_triv, fix_z2, fix_z2f
from artifact.random_models import random_etale


@pytest.mark.parametrize("make", [fix_triv, fix_a, fix_z2, fix_z2f])
def test_named_fixtures_are_valid(make):
    rep = validate(make())
    assert rep.ok, rep


def test_fix_a_overlaps_and_projections(fix_a):
    assert fix_a.overlap((1,), (1, 2)) == ("u", "v")
    assert fix_a.image((1,), (1, 2)) == ("a", "b")
    assert fix_a.rho((2,), (1, 2), "x") == "p"
    assert fix_a.act((1, 2), ("s", "e"), "w") == "x"
    assert fix_a.orbit((1, 2), (1,), "u") == ("u", "v")
    assert len(fix_a.objects()) == 7


def test_h_min_on_fix_a(fix_a):
    assert h_min(fix_a, (1, 2), "u") == (1,)
    assert h_min(fix_a, (1, 2), "x") == (2,)
    assert h_min(fix_a, (1,), "a") == (1,)
    assert full_orbit_check(fix_a) is None


def test_perturbed_overlap_reports_separation_witness():
    rep = validate(fix_a(tilde_2_12=("u", "x")))
    sep = next(c for c in rep.checks if c.name.startswith("separation-2"))
    assert not sep.passed
    assert sep.witness == {"H": (1,), "I": (2,), "J": (1, 2), "element": "u"}
    with pytest.raises(InvalidEtaleData):
        assert_valid(fix_a(tilde_2_12=("u", "x")))


def test_freeness_failure():
    # G_2 = Z/2 fixes the point of Tilde V_1,12, which must be a free orbit
    d = EtaleDataV([cyclic_group(1), z2()], {(1,): ["a"], (2,): ["p"], (1, 2): ["y"]},
                   overlaps={((1,), (1, 2)): ["y"]}, projections={((1,), (1, 2)): {"y": "a"}})
    rep = validate(d)
    assert not rep.get("freeness: G_(J-I) acts freely on Tilde V_IJ").passed


def test_non_permutation_action_is_rejected():
    d = EtaleDataV([z2()], {(1,): ["a", "b"]}, actions={(1,): {(1, "s"): {"a": "b"}}})
    assert not validate(d).checks[0].passed


def test_unknown_index_set_is_an_input_error():
    with pytest.raises(InputError):
        EtaleDataV([z2()], {(1, 2): ["a"]})


def test_empty_overlap_is_noted():
    d = EtaleDataV([z2(), z2()], {(1,): ["a"], (1, 2): ["c"]})
    rep = validate(d)
    assert rep.ok
    assert "empty overlaps" in [c.name for c in rep.checks]


@pytest.mark.parametrize("seed", range(25))
def test_random_models_are_valid(seed):
    d = random_etale(seed)
    assert d.N <= 3
    assert all(len(d.space(J)) <= 6 for J in d.index_sets)
    assert all(g.order <= 4 for g in d.groups)
    assert validate(d).ok
    assert full_orbit_check(d) is None

import pytest

from artifact.algebra import trivial_group
from artifact.ambient import (
    AmbientAtlas, ProximitySpace, assert_atlas, build_psi, build_ui, build_v_data, check_cover_reduction,
    check_rho, check_ui, check_v_footprints, cover_reduce, explicit_reduction,
    iteration_preimage, reduce_atlas, rho_ij, validate_atlas,
)
from artifact.errors import InputError, InvalidAtlas, NoAdmissibleShrinking
from artifact.fixtures import (
    FIX_A_AMB_REDUCTION, FIX_COVER_EXPECTED, fix_a_amb, fix_amb, fix_cover, translation_chart,
    z2_translation,
)
from artifact.random_models import random_atlas, random_cover, random_reduction
from artifact.xv import build_xv


def test_fix_amb_chart_domains():
    atlas = fix_amb()
    assert validate_atlas(atlas).ok
    U = build_ui(atlas, (1, 2))
    assert len(U.elements) == 4
    assert build_ui(atlas, (1, 2)) is U
    assert check_ui(atlas, (1, 2)).ok
    assert check_rho(atlas).ok
    rho = rho_ij(atlas, (1,), (1, 2))
    assert sorted(set(rho.values())) == [("x1",), ("x2",)]


def test_chart_that_misses_an_endomorphism_is_rejected():
    gpd = z2_translation()
    # the trivial group cannot account for the swap morphisms
    bad = translation_chart(gpd, ["a", "b"], trivial_group(), 1)
    with pytest.raises(InvalidAtlas):
        assert_atlas(AmbientAtlas(gpd, [bad]))


def test_fix_a_amb_reduces_to_fix_a():
    atlas = fix_a_amb()
    vdata = build_v_data(atlas, explicit_reduction(FIX_A_AMB_REDUCTION))
    d = vdata.data
    assert [len(d.space(J)) for J in d.index_sets] == [2, 1, 4]
    assert check_v_footprints(vdata).ok
    xv = build_xv(d)
    assert (len(xv.objects), len(xv.morphisms)) == (7, 25)
    res = build_psi(xv, vdata)
    assert res.report.ok, res.report
    assert res.witnesses == 19


def test_iteration_preimage_inverts_psi(fix_a_pipeline):
    pipe = fix_a_pipeline
    src, tgt = ((1,), "A"), ((1, 2), "A/(A,E)/E")
    amb = pipe.atlas.ambient
    for m in amb.hom(pipe.psi.obj(src), pipe.psi.obj(tgt)):
        pre = iteration_preimage(pipe.vdata, src, tgt, m)
        assert pipe.psi.mor(pre) == m


def test_fix_cover_partition():
    space, S, F = fix_cover()
    red = cover_reduce(space, S, F)
    assert red.report.ok
    expected = {I: frozenset(v) for I, v in FIX_COVER_EXPECTED.items()}
    assert red.sets == expected


def test_explicit_reduction_is_checked():
    space, S, F = fix_cover()
    with pytest.raises(NoAdmissibleShrinking):
        explicit_reduction({(1,): {1, 2, 3}, (2,): {3}}, space, S, F)


def test_cover_needs_indexed_footprints():
    space, S, F = fix_cover()
    with pytest.raises(InputError):
        cover_reduce(space, S, {2: F[2]})


def test_proximity_closure_and_interior():
    space = ProximitySpace(range(5), [(0, 1), (1, 2), (2, 3), (3, 4)])
    assert space.closure({2}) == {1, 2, 3}
    assert space.closure({2}, 2) == {0, 1, 2, 3, 4}
    assert space.interior({0, 1, 2, 3}) == {0, 1, 2}
    with pytest.raises(InputError):
        ProximitySpace([0], [(0, 9)])


def test_too_thin_footprints_fail_to_shrink():
    space = ProximitySpace(range(4), [(0, 1), (1, 2), (2, 3)])
    with pytest.raises(NoAdmissibleShrinking):
        cover_reduce(space, {0}, {1: {0, 1}, 2: {2, 3}})


def test_reduce_atlas_on_fix_amb():
    red = reduce_atlas(fix_amb())
    assert red.nonempty() == {(1, 2): frozenset({"x1"})}


@pytest.mark.parametrize("seed", range(0, 60, 4))
def test_random_atlases_reduce(seed):
    atlas = random_atlas(seed)
    assert validate_atlas(atlas).ok
    vdata = build_v_data(atlas, random_reduction(atlas, seed))
    assert check_v_footprints(vdata).ok
    assert build_psi(build_xv(vdata.data), vdata).report.ok


@pytest.mark.parametrize("seed", range(0, 40))
def test_random_covers(seed):
    space, S, F, C = random_cover(seed)
    try:
        red = cover_reduce(space, S, F, C)
    except NoAdmissibleShrinking:
        return
    assert check_cover_reduction(space, S, F, C, red.sets).ok

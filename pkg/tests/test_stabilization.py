from fractions import Fraction

import pytest

from artifact.ambient import explicit_reduction
from artifact.bundle import GroupoidBundle, Section, build_wv, check_multisection
from artifact.errors import InputError, StabilizationFailure
from artifact.fixtures import FIX_A_AMB_REDUCTION, fix_a_amb
from artifact.linalg import QMatrix, max_norm, qvec
from artifact.stabilization import (
    FredholmModel, LocalStabilization, Pipeline, build_tau, check_nu_regular, check_partition, count,
    lambda_ve, make_partition, orbit_multisection, partition_from_reduction, split_e, stabilize,
    theta, theta_through_psi, unit_vector, validate_fredholm, validate_local_stab,
)
from artifact.random_models import (
    random_atlas, random_bundle, random_local_stabs, random_reduction, random_section,
)

HALF = Fraction(1, 2)


def _ambient_model(atlas):
    b = GroupoidBundle.trivial(atlas.ambient)
    return FredholmModel(b, Section.zero(b))


def _sign_stab(atlas, values=None):
    chart = atlas.chart(1)
    values = values or {("A", 0): [1], ("B", 0): [-1], ("C", 0): [1], ("D", 0): [-1]}
    return LocalStabilization(1, chart, 1, values, {"s": QMatrix.from_rows([[-1]])})


def test_fredholm_model_checks():
    fm = _ambient_model(fix_a_amb())
    rep = validate_fredholm(fm)
    assert rep.ok, rep
    bad = FredholmModel(fm.bundle, fm.f, control_set=["A"])
    assert not validate_fredholm(bad).get("zero set inside the control set").passed


def test_norm_must_separate_zero():
    fm = _ambient_model(fix_a_amb())
    fm.norm = lambda w: Fraction(0)
    assert not validate_fredholm(fm).get("N(w) = 0 exactly when w = 0").passed


def test_local_stabilization_equivariance():
    atlas = fix_a_amb()
    fm = _ambient_model(atlas)
    assert validate_local_stab(_sign_stab(atlas), fm).ok
    broken = _sign_stab(atlas, {("A", 0): [1], ("B", 0): [1]})
    rep = validate_local_stab(broken, fm)
    assert rep.get("tau_i(g*x, g*e) = mu(Gamma_i(g, x)) tau_i(x, e)").witness == ("s", "A", 1)


def test_local_stabilization_norm_bound():
    atlas = fix_a_amb()
    big = _sign_stab(atlas, {("A", 0): [2], ("B", 0): [-2]})
    rep = validate_local_stab(big, _ambient_model(atlas))
    assert not rep.get("N(tau_i(x, e)) <= |e|").passed


def test_partitions(fix_a_pipeline):
    atlas = fix_a_pipeline.atlas
    red = fix_a_pipeline.reduction
    pu = partition_from_reduction(atlas, red)
    assert check_partition(pu, atlas, red).ok
    assert pu(1, "A") == 1 and pu(2, "A") == 0
    # C lies in F'_2, so chart 1 must not contribute there
    assert pu(1, "C") == 0 and pu(2, "F") == 1
    default = make_partition(atlas)
    assert check_partition(default, atlas).ok
    assert default(1, "A") == HALF


def _fix_a_tau(pipe, samples=()):
    fm = _ambient_model(pipe.atlas)
    pu = partition_from_reduction(pipe.atlas, pipe.reduction)
    return fm, stabilize(pipe, fm, {1: _sign_stab(pipe.atlas)}, pu, samples)


def test_tau_on_fix_a(fix_a_pipeline):
    fm, (wv, tau) = _fix_a_tau(fix_a_pipeline, samples=[[HALF]])
    assert tau.report.ok, tau.report
    assert tau.dims == [1, 0] and tau.dim == 1
    values = {o: tau(o, (1,)) for o in fix_a_pipeline.xv.objects}
    assert values[((1,), "A")] == (1,) and values[((1,), "B")] == (-1,)
    assert values[((1, 2), "B/(B,E)/E")] == (-1,)
    assert values[((2,), "F")] == (0,)
    assert unit_vector(tau, 1) == (1,)
    assert split_e(tau, (HALF,)) == {1: (HALF,), 2: ()}


def test_lambda_and_theta_on_fix_a(fix_a_pipeline):
    fm, (wv, tau) = _fix_a_tau(fix_a_pipeline)
    lam = lambda_ve(tau, (HALF,))
    assert lam.report.ok, lam.report
    assert check_multisection(lam.multisection).ok
    fm_v, _ = fix_a_pipeline.pull_fredholm(fm, wv)
    assert check_nu_regular(fm_v, lam.multisection).ok
    th_v, th, pushed, rep = theta_through_psi(fix_a_pipeline, fm, lam.multisection, wv)
    assert rep.ok, rep
    assert th.class_weights == {"A": 0, "C": 1}
    assert count(th) == count(th_v) == 1
    assert count(th, {"C": -1}) == -1
    with pytest.raises(InputError):
        count(th, {"C": 2})


def test_orbit_multisection_weights(fix_a_pipeline):
    _, (_, tau) = _fix_a_tau(fix_a_pipeline)
    weights = orbit_multisection(tau, (HALF,))
    obj = fix_a_pipeline.xv.objects[0]
    assert weights[obj, (HALF,)] == HALF and weights[obj, (-HALF,)] == HALF


def test_lambda_rejects_wrong_length(fix_a_pipeline):
    _, (_, tau) = _fix_a_tau(fix_a_pipeline)
    with pytest.raises(InputError):
        lambda_ve(tau, (1, 2))


def test_non_equivariant_stabilization_fails(fix_a_pipeline):
    pipe = fix_a_pipeline
    fm = _ambient_model(pipe.atlas)
    pu = partition_from_reduction(pipe.atlas, pipe.reduction)
    wv = build_wv(pipe.xv, pipe.psi, fm.bundle, fm.f)
    lopsided = _sign_stab(pipe.atlas, {("A", 0): [1], ("C", 0): [1]})
    with pytest.raises(StabilizationFailure):
        build_tau(pipe, wv, {1: lopsided}, pu, fm.bundle)


def test_max_norm_model():
    atlas = fix_a_amb()
    b = GroupoidBundle.trivial(atlas.ambient, 2)
    fm = FredholmModel(b, Section.zero(b), norm=max_norm)
    assert validate_fredholm(fm, [("A", qvec([1, -1]))]).ok


@pytest.mark.parametrize("seed", [0, 3, 5, 8])
def test_random_pipelines(seed):
    atlas = random_atlas(seed)
    red = random_reduction(atlas, seed)
    pipe = Pipeline(atlas, red)
    b = random_bundle(atlas, seed)
    fm = FredholmModel(b, random_section(b, seed))
    locs = random_local_stabs(atlas, b, seed)
    assert all(validate_local_stab(ls, fm).ok for ls in locs.values())
    pu = partition_from_reduction(atlas, red)
    wv, tau = stabilize(pipe, fm, locs, pu)
    e = tuple(Fraction((k % 3) - 1, 4 * max(1, tau.dim)) for k in range(tau.dim))
    lam = lambda_ve(tau, e)
    assert lam.report.ok
    assert theta_through_psi(pipe, fm, lam.multisection, wv)[3].ok


def test_theta_of_zero_multisection_is_constant():
    atlas = fix_a_amb()
    fm = _ambient_model(atlas)
    pipe = Pipeline(atlas, explicit_reduction(FIX_A_AMB_REDUCTION))
    _, (_, tau) = _fix_a_tau(pipe)
    lam = lambda_ve(tau, (0,))
    fm_v, _ = pipe.pull_fredholm(fm)
    th = theta(fm_v, lam.multisection)
    assert th.well_defined and set(th.class_weights.values()) == {1}

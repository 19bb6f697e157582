"""Acceptance criteria, one printed pass/fail line each.

Run with pytest (the lines are repeated in the terminal summary) or directly
as ``python3 tests/test_acceptance.py``.
"""

import os
import subprocess
import sys
import time
from fractions import Fraction
from functools import lru_cache

import pytest

from artifact.ambient import (
    build_psi, build_v_data, check_cover_reduction, cover_reduce, explicit_reduction,
)
from artifact.bundle import GroupoidBundle, Section
from artifact.errors import NoAdmissibleShrinking
from artifact.fixtures import (
    FIX_A_AMB_REDUCTION, FIX_COVER_EXPECTED, fix_a, fix_a_amb, fix_cover,
)
from artifact.groupoid import check_category, realize
from artifact.linalg import QMatrix, qvec
from artifact.qtower import DirectQTower, QTower, check_dual_iso, colim, dualize, lim, lim1
from artifact.random_models import (
    etale_corpus, random_atlas, random_bundle, random_cover, random_local_stabs,
    random_reduction, random_section,
)
from artifact.stabilization import (
    FredholmModel, LocalStabilization, Pipeline, count, lambda_ve, partition_from_reduction,
    stabilize, theta_through_psi,
)
from artifact.xv import (
    build_xv, build_xv_minus_g, check_case_agreement, check_xv_structure, mor_hm_set,
)

sys.path.insert(0, os.path.dirname(__file__))
from cli_cases import CASES, corpus_path, golden_path, golden_text, run_case  # noqa: E402

RESULTS = []


def record(name, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert passed, line


# ---------------------------------------------------------------------------
# shared corpora

@lru_cache(maxsize=None)
def xv_corpus():
    start = time.perf_counter()
    built = [(seed, d, build_xv(d)) for seed, d in etale_corpus(200)]
    return built, time.perf_counter() - start


def _sign_stabilization(atlas):
    chart = atlas.chart(1)
    values = {("A", 0): [1], ("B", 0): [-1], ("C", 0): [1], ("D", 0): [-1]}
    return LocalStabilization(1, chart, 1, values, {"s": QMatrix.from_rows([[-1]])})


def _fix_a_amb_case():
    atlas = fix_a_amb()
    red = explicit_reduction(FIX_A_AMB_REDUCTION)
    b = GroupoidBundle.trivial(atlas.ambient)
    fm = FredholmModel(b, Section.zero(b))
    return "FIX-A-AMB", Pipeline(atlas, red), fm, {1: _sign_stabilization(atlas)}, \
        [(Fraction(1, 2),), (Fraction(-1, 3),)]


def _random_case(seed):
    atlas = random_atlas(seed)
    red = random_reduction(atlas, seed)
    b = random_bundle(atlas, seed)
    fm = FredholmModel(b, random_section(b, seed))
    locs = random_local_stabs(atlas, b, seed)
    pipe = Pipeline(atlas, red)
    dim = sum(ls.dim for ls in locs.values())
    params = [tuple(Fraction((k % 3) - 1, 4 * max(1, dim)) for k in range(dim)),
              tuple(Fraction(1, 2 * max(1, dim)) if k == 0 else Fraction(0) for k in range(dim))]
    return f"atlas seed {seed}", pipe, fm, locs, params


@lru_cache(maxsize=None)
def stabilization_runs():
    """Every pipeline, its tau and the Lambda_(V,e) for each parameter."""
    runs = []
    for label, pipe, fm, locs, params in [_fix_a_amb_case()] + [_random_case(s) for s in range(16)]:
        pu = partition_from_reduction(pipe.atlas, pipe.reduction)
        wv, tau = stabilize(pipe, fm, locs, pu, samples=params)
        lams = [(e, lambda_ve(tau, e)) for e in params]
        runs.append((label, pipe, fm, wv, tau, lams))
    return runs


# ---------------------------------------------------------------------------
# criteria

def test_groupoid_laws():
    built, elapsed = xv_corpus()
    start = time.perf_counter()
    bad = []
    for seed, d, xv in built:
        rep = check_category(xv)
        if not (rep.ok and rep.get("inverse laws").passed and check_xv_structure(xv).ok):
            bad.append(seed)
    elapsed += time.perf_counter() - start
    record("groupoid-law suite", not bad and elapsed < 60,
           f"{len(built)} random instances, {len(bad)} failures, {elapsed:.1f}s")


def test_overlap_case_agreement():
    built, _ = xv_corpus()
    pairs = disagreements = 0
    for _, _, xv in built:
        n, bad = check_case_agreement(xv)
        pairs += n
        disagreements += len(bad)
    record("overlap-case agreement", disagreements == 0 and pairs > 0,
           f"{pairs} composable pairs with several cases, {disagreements} disagreements")


def test_fix_a_counts():
    d = fix_a()
    xv = build_xv(d)
    res = build_xv_minus_g(d, xv)
    cert = res.report.get("classes / G biject with classes of X_V").witness
    hom = [m for m in mor_hm_set(xv) if m[:2] == ((1,), (1, 2))]
    got = (len(xv.objects), len(xv.morphisms), len(realize(xv)),
           cert["completion_classes"], cert["orbits"], len(hom))
    record("FIX-A exact counts", got == (7, 25, 2, 3, 2, 2),
           "objects {}, morphisms {}, classes {}, minus-G classes {}, orbits {}, "
           "Mor(V_1, V_12) {}".format(*got))


def test_quotient_identification():
    built, _ = xv_corpus()
    bad = [seed for seed, d, xv in built
           if not build_xv_minus_g(d, xv, check=False).report.ok]
    record("quotient identification", not bad,
           f"{len(built)} instances, {len(bad)} mismatches")


def test_reduction_equivalence():
    failures = witnesses = 0
    seeds = range(60)
    for seed in seeds:
        atlas = random_atlas(seed)
        vdata = build_v_data(atlas, random_reduction(atlas, seed))
        res = build_psi(build_xv(vdata.data), vdata)
        failures += not res.report.ok
        witnesses += res.witnesses
    record("reduction equivalence", failures == 0,
           f"{len(seeds)} random atlases, {witnesses} iteration preimages, {failures} failures")


def test_cover_reduction():
    successes = failures = seed = 0
    while successes < 100:
        space, S, F, C = random_cover(seed)
        seed += 1
        try:
            red = cover_reduce(space, S, F, C)
        except NoAdmissibleShrinking:
            continue
        successes += 1
        failures += not check_cover_reduction(space, S, F, C, red.sets).ok
    space, S, F = fix_cover()
    exact = cover_reduce(space, S, F).sets == {I: frozenset(v)
                                               for I, v in FIX_COVER_EXPECTED.items()}
    record("cover reduction", failures == 0 and exact,
           f"{successes} successful covers out of {seed} seeds, {failures} failures, "
           f"FIX-COVER {'exact' if exact else 'differs'}")


def test_stabilization_laws():
    runs = stabilization_runs()
    bad = []
    for label, pipe, fm, wv, tau, lams in runs:
        if not tau.report.ok:
            bad.append(label)
            continue
        for e, lam in lams:
            rep = lam.report
            if not (rep.get("mass 1 on every fiber").passed
                    and rep.get("support is the union of the graphs of tau(., g*e)").passed
                    and all(fm.norm(tau(o, e)) <= tau.norm_e(e) for o in pipe.xv.objects)):
                bad.append(label)
    nontrivial = sum(any(any(tau(o, e)) for o in pipe.xv.objects for e, _ in lams)
                     for _, pipe, _, _, tau, lams in runs)
    record("stabilization laws", not bad,
           f"{len(runs)} pipelines ({nontrivial} with nonzero tau), {len(bad)} failures")


def test_multisection_structurability():
    runs = stabilization_runs()
    total = sum(len(lams) for *_, lams in runs)
    bad = [(label, e) for label, *_, lams in runs for e, lam in lams
           if not (lam.certificate.report.ok and lam.report.ok)]
    record("multisection structurability", not bad,
           f"{total} induced multisections certified, {len(bad)} failures")


def test_push_pull_consistency():
    runs = stabilization_runs()
    bad = []
    counts = set()
    for label, pipe, fm, wv, tau, lams in runs:
        for e, lam in lams:
            th_v, th, _, rep = theta_through_psi(pipe, fm, lam.multisection, wv)
            if not rep.ok or count(th_v) != count(th):
                bad.append(label)
            counts.add(count(th))
    record("push/pull consistency", not bad,
           f"{sum(len(r[-1]) for r in runs)} class tables compared, {len(bad)} failures, "
           f"{len(counts)} distinct counts")


def _random_tail(rng, n):
    return QMatrix.from_rows([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])


def test_tower_suite():
    import random
    rng = random.Random(20261015)
    bad = []
    trials = 150
    for k in range(trials):
        n = rng.randint(1, 5)
        direct = DirectQTower.constant(_random_tail(rng, n))
        dual = dualize(direct)
        derived = lim1(dual)
        if not (lim(dual).dim == colim(direct) and derived.dim == 0
                and derived.certificate <= n and check_dual_iso(direct).ok):
            bad.append(k)
    named = {"identity": [[1, 0], [0, 1]], "nilpotent": [[0, 1], [0, 0]],
             "projector": [[1, 0], [0, 0]]}
    dims = [lim(QTower.constant(QMatrix.from_rows(m))).dim for m in named.values()]
    record("tower suite", not bad and dims == [2, 0, 1],
           f"{trials} random tails, {len(bad)} failures, named tails give "
           + "/".join(map(str, dims)))


def test_cli_determinism():
    mismatched = [case for case in CASES
                  if golden_path(*case).read_text(encoding="utf-8")
                  != golden_text(*run_case(*case))]
    unstable = [case for case in CASES if run_case(*case) != run_case(*case)]
    outputs = set()
    for seed in ("1", "2", "3"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = subprocess.run([sys.executable, "-m", "artifact.cli", "perturb",
                               corpus_path("fix-a-amb"), "--trace"],
                              capture_output=True, env=env, check=False)
        outputs.add(proc.stdout)
    record("CLI determinism", not mismatched and not unstable and len(outputs) == 1,
           f"{len(CASES)} golden files, {len(mismatched)} mismatches, "
           f"{len(unstable)} unstable reruns, {len(outputs)} distinct outputs across hash seeds")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))

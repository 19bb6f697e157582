"""Command-line front end.

Every command reads one GSPEC document, prints one JSON report on standard
output and exits with 0 when all checks pass, 1 when a mathematical check
fails and 2 on bad input.  Output is canonical JSON, so identical inputs and
flags give byte-identical reports.
"""

import argparse
import sys

from .algebra import format_index
from .ambient import build_psi, build_v_data, check_v_footprints, name_of, validate_atlas
from .bundle import build_wv, check_multisection, section_compatibility, validate_bundle
from .errors import InputError, MathError
from .etale import validate as validate_etale
from .groupoid import check_action, check_category, check_functor, realize
from .gspec import dumps, etale_to_gspec, groupoid_to_gspec, parse, to_json
from .qtower import DirectQTower, check_dual_iso, colim, dualize, lim, lim1
from .random_models import random_etale
from .report import Report
from .stabilization import (check_nu_regular, check_partition, count, lambda_ve, stabilize,
                            theta, theta_through_psi, validate_fredholm, validate_local_stab)
from .xv import (build_q, build_xv, build_xv_minus_g, check_case_agreement,
                 check_partial_order, check_xv_structure, q_minima)

COMMANDS = ("validate", "build-xv", "build-q", "complete", "reduce", "build-wv",
            "perturb", "count", "tower")


class Outcome:
    """Reports plus command-specific results, rendered as one JSON object."""

    def __init__(self, command):
        self.command = command
        self.reports = []
        self.results = {}

    def add(self, report):
        self.reports.append(report)
        return report

    @property
    def ok(self):
        return all(r.ok for r in self.reports)

    def render(self, trace):
        out = {"command": self.command, "ok": self.ok,
               "reports": [r.as_dict(trace) for r in self.reports]}
        out.update(self.results)
        return out


def _labels(values):
    return sorted(name_of(v) for v in values)


def _class_table(weights):
    return {name_of(c): w for c, w in weights.items()}


def _etale_gate(out, d):
    rep = out.add(validate_etale(d))
    if not rep.ok:
        raise _Stop()


class _Stop(Exception):
    """A prerequisite failed; the reports gathered so far explain why."""


# ---------------------------------------------------------------------------
# commands

def cmd_validate(doc, args, out):
    if args.fuzz:
        rep = out.add(Report(f"fuzz: {args.count} random etale instances"))
        for k in range(args.count):
            seed = args.seed + k
            d = random_etale(seed)
            axioms = validate_etale(d)
            rep.add(f"seed {seed}: etale axioms", axioms.ok,
                    axioms.failures()[0].name if not axioms.ok else None)
            if not axioms.ok:
                continue
            xv = build_xv(d, check=False)
            cat = check_category(xv)
            rep.add(f"seed {seed}: X_V category axioms", cat.ok,
                    cat.failures()[0].name if not cat.ok else None)
            rep.add(f"seed {seed}: composition source/target", check_xv_structure(xv).ok)
            _, bad = check_case_agreement(xv)
            rep.add(f"seed {seed}: overlapping composition cases agree", not bad,
                    bad[0][:2] if bad else None)
        out.results["fuzz"] = {"seed": args.seed, "count": args.count}
        if doc is None:
            return
    if doc is None:
        raise InputError("validate needs a document unless --fuzz is given")
    out.results["sections"] = doc.sections
    if "groups" in doc:
        rep = out.add(Report("groups"))
        for name in sorted(doc.section("groups")):
            g = doc.group(name)
            rep.add(f"{name} is a group of order {g.order}", True)
    if "etale_data" in doc:
        out.add(validate_etale(doc.etale_data))
    if "groupoid" in doc:
        out.add(check_category(doc.groupoid))
    if "action" in doc:
        out.add(check_action(doc.action))
    if "functor" in doc:
        out.add(check_functor(doc.functor))
    if "ambient" in doc and "uniformizers" in doc:
        out.add(validate_atlas(doc.atlas))
    if "cover" in doc:
        red = doc.reduction
        if red.report is not None:
            out.add(red.report)
        expected = doc.expected_reduction()
        if expected is not None:
            rep = out.add(Report("expected reduction"))
            got = {I: red[I] for I in expected}
            rep.add("reduced family matches the expected one", got == expected,
                    next((I for I in expected if got[I] != expected[I]), None))
    if "bundle" in doc:
        out.add(validate_bundle(doc.bundle))
    if "section" in doc:
        rep = out.add(Report("section"))
        bad = section_compatibility(doc.section_f)
        rep.add("f(t(m)) = mu(m) f(s(m))", bad is None, bad)
    if "multisection" in doc:
        out.add(check_multisection(doc.multisection))
    if "fredholm" in doc:
        out.add(validate_fredholm(doc.fredholm))
    if "local_stab" in doc:
        for ls in doc.local_stabs.values():
            out.add(validate_local_stab(ls, doc.fredholm))
    if "partition" in doc:
        out.add(check_partition(doc.partition, doc.atlas, doc.reduction))
    if "tower" in doc:
        _tower_reports(doc.tower, out)


def cmd_build_xv(doc, args, out):
    d = doc.etale_data
    _etale_gate(out, d)
    xv = build_xv(d, check=False)
    out.add(check_xv_structure(xv))
    pairs, bad = check_case_agreement(xv)
    rep = out.add(Report("composition cases"))
    rep.add("overlapping composition cases agree", not bad, bad[0][:2] if bad else None,
            note=f"{pairs} composable pairs with two or more cases")
    out.add(check_category(xv))
    real = realize(xv)
    out.results["stats"] = {"objects": len(xv.objects), "morphisms": len(xv.morphisms),
                            "classes": len(real)}
    if not args.stats:
        out.results["classes"] = [list(c) for c in real.classes]
        out.results["groupoid"] = groupoid_to_gspec(xv)


def cmd_build_q(doc, args, out):
    d = doc.etale_data
    _etale_gate(out, d)
    q = build_q(d, check=False)
    rep = out.add(Report("poset Q"))
    bad = check_partial_order(q)
    rep.add("Q is a partial order", bad is None, bad)
    real, minima = q_minima(q)
    rep.check_all("each class has a unique minimum", sorted(minima),
                  lambda c: len(minima[c]) == 1)
    out.results["stats"] = {"objects": len(q.objects), "morphisms": len(q.morphisms),
                            "classes": len(real)}
    if not args.stats:
        out.results["minima"] = {name_of(c): [list(x) for x in m] for c, m in minima.items()}


def cmd_complete(doc, args, out):
    d = doc.etale_data
    _etale_gate(out, d)
    xv = build_xv(d, check=False)
    res = build_xv_minus_g(d, xv, check=False)
    out.add(res.report)
    comp = res.completion
    cert = res.report.get("classes / G biject with classes of X_V").witness
    hom = {}
    for s, t in comp.morphisms:
        if s[0] != t[0]:
            key = f"{format_index(s[0])}->{format_index(t[0])}"
            hom[key] = hom.get(key, 0) + 1
    out.results["stats"] = {"objects": len(comp.objects), "morphisms": len(comp.morphisms),
                            "classes": cert["completion_classes"], "orbits": cert["orbits"],
                            "xv_classes": cert["xv_classes"]}
    out.results["hom_counts"] = hom


def cmd_reduce(doc, args, out):
    red = doc.reduction
    if red.report is not None:
        out.add(red.report)
    out.results["reduced"] = {format_index(I): _labels(v) for I, v in sorted(red.sets.items())
                              if v}
    expected = doc.expected_reduction()
    if expected is not None:
        rep = out.add(Report("expected reduction"))
        rep.add("reduced family matches the expected one",
                all(red[I] == v for I, v in expected.items()))
    if "ambient" not in doc:
        return
    atlas = doc.atlas
    out.add(validate_atlas(atlas))
    vdata = build_v_data(atlas, red)
    out.add(check_v_footprints(vdata))
    _etale_gate(out, vdata.data)
    xv = build_xv(vdata.data, check=False)
    out.add(build_psi(xv, vdata).report)
    names = [u["group"] for u in sorted(doc.section("uniformizers"), key=lambda u: u["index"])]
    out.results["gspec"] = {"format_version": "gspec-1", **etale_to_gspec(vdata.data, names)}


def cmd_build_wv(doc, args, out):
    pipe = doc.pipeline
    out.add(pipe.psi_result.report)
    wv = build_wv(pipe.xv, pipe.psi, doc.bundle, doc.section_f)
    out.add(wv.report)
    base = wv.bundle.base
    out.results["stats"] = {"objects": len(base.objects), "morphisms": len(base.morphisms),
                            "total_fiber_dim": sum(wv.bundle.dim(o) for o in base.objects)}
    if not args.stats:
        out.results["fibers"] = {name_of(o): wv.bundle.dim(o) for o in base.objects}
        out.results["section"] = {name_of(o): wv.pullback.section(o) for o in base.objects}


def _perturb(doc, out):
    pipe = doc.pipeline
    fm = doc.fredholm
    out.add(validate_fredholm(fm))
    locals_ = doc.local_stabs
    for ls in locals_.values():
        out.add(validate_local_stab(ls, fm))
    pu = doc.partition
    out.add(check_partition(pu, doc.atlas, doc.reduction))
    if not out.ok:
        raise _Stop()
    e = doc.parameter()
    dim = sum(ls.dim for ls in locals_.values())
    if len(e) != dim:
        raise InputError(f"parameter has length {len(e)}, the stabilization space has "
                         f"dimension {dim}")
    wv, tau = stabilize(pipe, fm, locals_, pu, samples=[e])
    out.add(tau.report)
    lam = lambda_ve(tau, e)
    out.add(lam.report)
    fm_v, _ = pipe.pull_fredholm(fm, wv)
    out.add(check_nu_regular(fm_v, lam.multisection))
    th_v, th, _, rep = theta_through_psi(pipe, fm, lam.multisection, wv)
    out.add(rep)
    return th_v, th


def cmd_perturb(doc, args, out):
    th_v, th = _perturb(doc, out)
    out.results["theta_v"] = _class_table(th_v.class_weights)
    out.results["theta"] = _class_table(th.class_weights)
    out.results["count"] = count(th)


def cmd_count(doc, args, out):
    if "multisection" not in doc:
        _, th = _perturb(doc, out)
        out.results["class_weights"] = _class_table(th.class_weights)
        out.results["count"] = count(th)
        return
    lam = doc.multisection
    out.add(validate_bundle(doc.bundle))
    out.add(check_multisection(lam))
    th = theta(doc.fredholm, lam)
    rep = out.add(Report("Theta"))
    rep.add("Theta is constant on classes", th.well_defined)
    out.results["class_weights"] = _class_table(th.class_weights)
    out.results["count"] = count(th, doc.signs())


def _tower_reports(tower, out):
    if isinstance(tower, DirectQTower):
        direct, inverse = tower, dualize(tower)
    else:
        direct, inverse = dualize(tower), tower
    out.add(check_dual_iso(direct))
    return direct, inverse


def cmd_tower(doc, args, out):
    t = doc.tower
    direct, inverse = _tower_reports(t, out)
    limit, derived = lim(inverse), lim1(inverse)
    kind = "direct" if t is direct else "inverse"
    info = {"kind": kind, "dims": list(t.dims), "certificate": derived.certificate}
    if kind == "inverse":
        info.update({"lim": limit.dim, "lim1": derived.dim, "dual": {"colim": colim(direct)}})
    else:
        info.update({"colim": colim(direct), "dual": {"lim": limit.dim, "lim1": derived.dim}})
    out.results["tower"] = info
    if args.trace:
        out.results["tower"]["image_ranks"] = [list(r) for r in derived.image_ranks]
        out.results["tower"]["lim_basis_at_first"] = limit.as_dict()["basis_at_first"]


HANDLERS = {"validate": cmd_validate, "build-xv": cmd_build_xv, "build-q": cmd_build_q,
            "complete": cmd_complete, "reduce": cmd_reduce, "build-wv": cmd_build_wv,
            "perturb": cmd_perturb, "count": cmd_count, "tower": cmd_tower}


# ---------------------------------------------------------------------------
# entry point

def make_parser():
    parser = argparse.ArgumentParser(
        prog="artifact", description="Finite-model checks on GSPEC documents.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run {name}")
        p.add_argument("document", nargs="?" if name == "validate" else None,
                       help="GSPEC JSON file")
        p.add_argument("--trace", action="store_true", help="include witnesses in the report")
        p.add_argument("--stats", action="store_true", help="print counts only")
        p.add_argument("--seed", type=int, default=0, help="base seed for --fuzz (u64)")
        if name == "validate":
            p.add_argument("--fuzz", action="store_true",
                           help="also validate randomly generated etale data")
            p.add_argument("--count", type=int, default=20,
                           help="number of random instances for --fuzz")
    return parser


def run(argv, stdout):
    parser = make_parser()
    args = parser.parse_args(argv)
    out = Outcome(args.command)
    try:
        if not 0 <= args.seed < 2 ** 64:
            raise InputError("--seed must be an unsigned 64-bit integer")
        doc = parse(args.document) if args.document else None
        HANDLERS[args.command](doc, args, out)
    except _Stop:
        pass
    except InputError as exc:
        stdout.write(dumps({"command": args.command, "ok": False,
                            "error": _error(exc, args.trace, "input")}))
        return 2
    except MathError as exc:
        result = out.render(args.trace)
        result["ok"] = False
        result["error"] = _error(exc, args.trace, "check")
        stdout.write(dumps(result))
        return 1
    stdout.write(dumps(out.render(args.trace)))
    return 0 if out.ok else 1


def _error(exc, trace, kind):
    err = {"kind": kind, "type": type(exc).__name__, "message": str(exc)}
    if trace and exc.witness is not None:
        err["witness"] = to_json(exc.witness)
    return err


def main(argv=None):
    try:
        return run(sys.argv[1:] if argv is None else argv, sys.stdout)
    except SystemExit as exc:
        # argparse usage errors are input errors
        return 2 if exc.code not in (0, None) else 0


if __name__ == "__main__":
    sys.exit(main())

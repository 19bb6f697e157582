"""GSPEC: the JSON interchange format.

A document is one JSON object whose optional sections describe groups,
etale data, groupoids, ambient atlases, covers, bundles, multisections,
Fredholm data, local stabilizations, partitions and towers.  Labels are
strings; maps are lists of pairs so that keys need not be strings; morphisms
of built groupoids are nested arrays, decoded to tuples.  Rationals are
integers or ``"p/q"`` strings.
"""

import json
from fractions import Fraction
from functools import cached_property
from importlib import resources

import jsonschema

from . import algebra
from .algebra import FiniteGroup
from .ambient import (AmbientAtlas, ProximitySpace, cover_reduce, explicit_reduction,
                      reduce_atlas)
from .bundle import GroupoidBundle, Multisection, Section
from .errors import InputError, ParseError, SchemaError
from .etale import EtaleDataV
from .groupoid import Functor, GroupAction, PairGroupoid, Preuniformizer, TableCategory
from .linalg import QMatrix, format_q, l1_norm, max_norm, q, qvec
from .qtower import DirectQTower, QTower
from .stabilization import (FredholmModel, LocalStabilization, Pipeline, make_partition,
                            partition_from_reduction)

FORMAT_VERSION = "gspec-1"
SECTIONS = ("groups", "etale_data", "groupoid", "action", "functor", "ambient",
            "uniformizers", "proximity", "cover", "bundle", "section", "multisection",
            "fredholm", "local_stab", "partition", "tower")

BUILTIN_GROUPS = {
    "trivial": algebra.trivial_group,
    "Z2": algebra.z2,
    "Z3": lambda: algebra.cyclic_group(3),
    "Z4": lambda: algebra.cyclic_group(4),
    "V4": algebra.klein_group,
    "S3": algebra.symmetric_group3,
}

NORMS = {"l1": l1_norm, "max": max_norm}


def schema():
    text = resources.files("artifact").joinpath("schema/gspec-1.json").read_text("utf-8")
    return json.loads(text)


_VALIDATOR = None


def _validator():
    global _VALIDATOR
    if _VALIDATOR is None:
        _VALIDATOR = jsonschema.Draft202012Validator(schema())
    return _VALIDATOR


# ---------------------------------------------------------------------------
# reading and writing

def _reject_duplicates(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise SchemaError(f"duplicate key {key!r}", {"key": key})
        seen[key] = value
    return seen


def pointer(path):
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in path)


def loads(text, source="<input>"):
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}",
                         {"line": exc.lineno, "column": exc.colno}) from None
    errors = sorted(_validator().iter_errors(data),
                    key=lambda e: (pointer(e.absolute_path), e.message))
    if errors:
        err = errors[0]
        where = pointer(err.absolute_path)
        raise SchemaError(f"{source}: {where}: {err.message}", {"pointer": where})
    return GspecDocument(data, source)


def parse(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", {"path": str(path)}) from None
    return loads(text, str(path))


def to_json(value):
    """Plain JSON data with rationals as ``"p/q"`` strings and sets sorted."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (int, Fraction)):
        return format_q(value) if isinstance(value, Fraction) else value
    if isinstance(value, str):
        return value
    if isinstance(value, QMatrix):
        return value.to_json()
    if isinstance(value, dict):
        items = [(k if isinstance(k, str) else dumps_compact(to_json(k)), to_json(v))
                 for k, v in value.items()]
        return dict(sorted(items))
    if isinstance(value, (set, frozenset)):
        return sorted((to_json(v) for v in value), key=dumps_compact)
    if isinstance(value, (list, tuple)):
        return [to_json(v) for v in value]
    if hasattr(value, "as_dict"):
        return to_json(value.as_dict())
    return type(value).__name__


def dumps_compact(data):
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _has_object(data):
    if isinstance(data, dict):
        return True
    return isinstance(data, list) and any(_has_object(v) for v in data)


def _layout(data, depth):
    flat = dumps_compact(data).replace(",", ", ").replace(":", ": ") \
        if not isinstance(data, str) else dumps_compact(data)
    if not isinstance(data, (list, dict)) or (not _has_object(data) and len(flat) + 2 * depth <= 88):
        return dumps_compact(data) if isinstance(data, str) else flat
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(data, dict):
        if not data:
            return "{}"
        body = ",\n".join(f"{inner}{dumps_compact(k)}: {_layout(data[k], depth + 1)}"
                           for k in sorted(data))
        return "{\n" + body + "\n" + pad + "}"
    body = ",\n".join(inner + _layout(v, depth + 1) for v in data)
    return "[\n" + body + "\n" + pad + "]"


def dumps(data):
    """Canonical text: sorted keys, short arrays kept on one line, trailing newline."""
    return _layout(to_json(data), 0) + "\n"


def decode(value):
    """Nested arrays become tuples, so decoded values are hashable."""
    if isinstance(value, list):
        return tuple(decode(v) for v in value)
    return value


def _matrix(rows, n_rows=None, n_cols=None):
    rows = [[q(x) for x in r] for r in rows]
    if n_rows is None:
        n_rows = len(rows)
    if n_cols is None:
        n_cols = len(rows[0]) if rows else 0
    return QMatrix(n_rows, n_cols, rows)


# ---------------------------------------------------------------------------
# the document

class GspecDocument:
    def __init__(self, data, source="<input>"):
        self.data = data
        self.source = source

    def __contains__(self, name):
        return name in self.data

    def __eq__(self, other):
        return isinstance(other, GspecDocument) and self.data == other.data

    @property
    def sections(self):
        return sorted(k for k in self.data if k != "format_version")

    def section(self, name):
        try:
            return self.data[name]
        except KeyError:
            raise InputError(f"missing section {name!r}", {"section": name}) from None

    def dumps(self):
        return dumps(self.data)

    def _fail(self, section, message, witness=None):
        raise InputError(f"section {section!r}: {message}", witness)

    # groups -----------------------------------------------------------
    def group(self, name):
        entry = self.data.get("groups", {}).get(name)
        if entry is not None:
            return FiniteGroup(entry["elements"], entry["table"], name=name)
        if name in BUILTIN_GROUPS:
            return BUILTIN_GROUPS[name]()
        self._fail("groups", f"unknown group {name!r}", name)

    # etale data -------------------------------------------------------
    @cached_property
    def etale_data(self):
        sec = self.section("etale_data")
        groups = [self.group(g) for g in sec["groups"]]
        spaces = {}
        for J, pts in sec["spaces"]:
            spaces[tuple(J)] = pts
        actions = {}
        for a in sec.get("actions", ()):
            J = tuple(a["J"])
            actions.setdefault(J, {})[a["chart"], a["element"]] = dict(a["map"])
        overlaps, projections = {}, {}
        for o in sec.get("overlaps", ()):
            key = (tuple(o["I"]), tuple(o["J"]))
            overlaps[key] = o["points"]
            projections[key] = dict(o["projection"])
        return EtaleDataV(groups, spaces, actions, overlaps, projections)

    # groupoid, action, functor -----------------------------------------
    def _table_category(self, sec, where):
        ends = {decode(m): (decode(s), decode(t)) for m, s, t in sec["morphisms"]}
        ids = {decode(x): decode(m) for x, m in sec["identities"]}
        comp = {(decode(a), decode(b)): decode(c) for a, b, c in sec["composition"]}
        inverses = sec.get("inverses")
        inv = None if inverses is None else {decode(a): decode(b) for a, b in inverses}
        objects = [decode(x) for x in sec["objects"]]
        for x in objects:
            if x not in ids:
                self._fail(where, f"object {x!r} has no identity", x)
        for m, (s, t) in ends.items():
            if s not in ids or t not in ids:
                self._fail(where, f"morphism {m!r} has an unknown end", m)
        return TableCategory(objects, ends, ids, comp, inv)

    @cached_property
    def groupoid(self):
        return self._table_category(self.section("groupoid"), "groupoid")

    @cached_property
    def action(self):
        sec = self.section("action")
        group = self.group(sec["group"])
        on_obj = {(g, decode(x)): decode(y) for g, x, y in sec["objects"]}
        on_mor = {(g, decode(m)): decode(n) for g, m, n in sec["morphisms"]}
        return GroupAction(group, self.groupoid, lambda g, x: on_obj[g, x],
                           lambda g, m: on_mor[g, m])

    @cached_property
    def functor(self):
        sec = self.section("functor")
        target = self._table_category(sec["target"], "functor")
        on_obj = {decode(x): decode(y) for x, y in sec["objects"]}
        on_mor = {decode(m): decode(n) for m, n in sec["morphisms"]}
        return Functor(self.groupoid, target, on_obj.__getitem__, on_mor.__getitem__, "functor")

    # ambient atlas -----------------------------------------------------
    @cached_property
    def ambient_groupoid(self):
        sec = self.section("ambient")
        kind = sec["kind"]
        if kind == "pair":
            classes = dict(sec["classes"])
            return PairGroupoid(classes, classes)
        if kind == "translation":
            from .groupoid import translation_groupoid
            group = self.group(sec["group"])
            table = {(g, x): y for g, x, y in sec["action"]}
            return translation_groupoid(group, sec["points"],
                                        lambda g, y: table.get((g, y), y))
        return self.groupoid

    @cached_property
    def atlas(self):
        amb = self.ambient_groupoid
        sec = self.section("ambient")
        charts = sorted(self.section("uniformizers"), key=lambda u: u["index"])
        if [u["index"] for u in charts] != list(range(1, len(charts) + 1)):
            self._fail("uniformizers", "chart indices must be 1..N")
        unis = []
        for u in charts:
            group = self.group(u["group"])
            if "gamma" in u:
                table = {(g, y): decode(m) for g, y, m in u["gamma"]}
            else:
                if sec["kind"] != "pair":
                    self._fail("uniformizers", "the action shorthand needs a pair ambient",
                               u["index"])
                act = {(g, y): z for g, y, z in u["action"]}
                table = {(g, y): (y, act.get((g, y), y))
                         for g in group.elements for y in u["domain"]}
            unis.append(Preuniformizer(amb, u["domain"], group,
                                       lambda g, y, t=table: t[g, y], u["index"]))
        solution = None
        if "solution_set" in sec:
            from .groupoid import realize
            cls = realize(amb).class_of
            solution = {cls[x] for x in sec["solution_set"]}
        return AmbientAtlas(amb, unis, solution)

    # proximity and covers ----------------------------------------------
    @cached_property
    def proximity(self):
        sec = self.section("proximity")
        return ProximitySpace(sec["points"], [tuple(p) for p in sec["adjacency"]]
                              if "adjacency" in sec else ())

    def _chart_sets(self, entries):
        return {i: frozenset(v) for i, v in entries}

    @cached_property
    def reduction(self):
        """The shrunken family F'_I: explicit, eroded from footprints, or from the atlas."""
        sec = self.data.get("cover", {})
        control = self._chart_sets(sec.get("control", ()))
        space = self.proximity if "proximity" in self else None
        if "ambient" in self:
            atlas = self.atlas
            if "reduced" in sec:
                return explicit_reduction({tuple(I): v for I, v in sec["reduced"]},
                                          space, atlas.solution_set,
                                          dict(atlas.footprints), control)
            return reduce_atlas(atlas, space, control)
        footprints = self._chart_sets(self.section("cover").get("footprints", ()))
        if space is None:
            self._fail("cover", "a standalone cover needs a proximity section")
        S = frozenset(sec.get("solution_set", ()))
        if "reduced" in sec:
            return explicit_reduction({tuple(I): v for I, v in sec["reduced"]}, space, S,
                                      footprints, control)
        return cover_reduce(space, S, footprints, control)

    def expected_reduction(self):
        sec = self.data.get("cover", {})
        if "expected" not in sec:
            return None
        return {tuple(I): frozenset(v) for I, v in sec["expected"]}

    @cached_property
    def pipeline(self):
        return Pipeline(self.atlas, self.reduction)

    # bundles and sections ----------------------------------------------
    def bundle_base(self):
        base = self.section("bundle")["base"]
        if base == "ambient":
            return self.ambient_groupoid
        if base == "groupoid":
            return self.groupoid
        from .xv import build_xv
        return build_xv(self.etale_data)

    @cached_property
    def bundle(self):
        sec = self.section("bundle")
        base = self.bundle_base()
        if "dim" in sec:
            n = sec["dim"]
            dim = {x: n for x in base.objects}
        else:
            dim = {decode(x): int(n) for x, n in sec["dims"]}
            missing = [x for x in base.objects if x not in dim]
            if missing:
                self._fail("bundle", "no fiber dimension for an object", missing[0])
        mu = sec["mu"]
        kind = mu["kind"]
        if kind == "trivial":
            eye = {n: QMatrix.identity(n) for n in set(dim.values())}
            return GroupoidBundle(base, dim, lambda m: eye[dim[base.source(m)]],
                                  "trivial bundle")
        if kind == "translation":
            mats = {g: _matrix(rows) for g, rows in mu.get("matrices", ())}
            return GroupoidBundle(base, dim, lambda m: mats[m[0]], "bundle")
        table = {decode(e["morphism"]): _matrix(e["matrix"]) for e in mu.get("entries", ())}
        missing = [m for m in base.morphisms if m not in table]
        if missing:
            self._fail("bundle", "mu table misses a morphism", missing[0])
        return GroupoidBundle(base, dim, table, "bundle")

    @cached_property
    def section_f(self):
        b = self.bundle
        sec = self.data.get("section", {"zero": True})
        if sec.get("zero") or "values" not in sec:
            return Section.zero(b)
        values = {decode(x): qvec(v) for x, v in sec["values"]}
        missing = [x for x in b.base.objects if x not in values]
        if missing:
            self._fail("section", "no value at an object", missing[0])
        return Section(b, values, "f")

    @cached_property
    def multisection(self):
        sec = self.section("multisection")
        weights = {}
        for x, w, c in sec["weights"]:
            key = (decode(x), qvec(w))
            if key in weights:
                self._fail("multisection", "repeated (object, vector) entry", key)
            weights[key] = q(c)
        return Multisection(self.bundle, weights)

    def signs(self):
        sec = self.data.get("multisection", {})
        return {decode(c): int(s) for c, s in sec.get("signs", ())} or None

    @cached_property
    def fredholm(self):
        sec = self.data.get("fredholm", {})
        control = sec.get("control_set")
        if control is not None:
            control = [decode(x) for x in control]
        return FredholmModel(self.bundle, self.section_f, control,
                             NORMS[sec.get("norm", "l1")])

    @cached_property
    def local_stabs(self):
        sec = self.section("local_stab")
        atlas = self.atlas
        out = []
        for c in sorted(sec["charts"], key=lambda c: c["index"]):
            i = c["index"]
            if not 1 <= i <= atlas.N:
                self._fail("local_stab", f"chart {i} is not in the atlas", i)
            chart = atlas.chart(i)
            values = {}
            for x, k, v in c.get("values", ()):
                if not 1 <= k <= c["dim"]:
                    self._fail("local_stab", f"basis index {k} out of range", (i, x, k))
                values[x, k - 1] = v
            action = {g: _matrix(rows) for g, rows in c.get("action", ())}
            out.append(LocalStabilization(i, chart, c["dim"], values, action))
        return {ls.index: ls for ls in out}

    def parameter(self):
        return qvec(self.section("local_stab")["parameter"])

    @cached_property
    def partition(self):
        rule = self.data.get("partition", {"rule": "reduction"})["rule"]
        control = self.fredholm.control_set if "bundle" in self else None
        if rule == "reduction":
            return partition_from_reduction(self.atlas, self.reduction, control)
        return make_partition(self.atlas, control_set=control)

    # towers -------------------------------------------------------------
    @cached_property
    def tower(self):
        sec = self.section("tower")
        dims = sec["dims"]
        prefix = [_matrix(m) for m in sec.get("prefix", ())]
        n = dims[-1]
        tail = _matrix(sec["tail"], n, n) if n else QMatrix.zeros(0, 0)
        cls = QTower if sec["kind"] == "inverse" else DirectQTower
        return cls(dims, prefix, tail)


# ---------------------------------------------------------------------------
# export

def etale_to_gspec(d, group_names=None):
    """The ``groups`` and ``etale_data`` sections describing ``d``."""
    names = group_names or [f"G{i}" for i in range(1, d.N + 1)]
    groups = {name: {"elements": list(g.elements), "table": g.table_indices()}
              for name, g in zip(names, d.groups)}
    spaces = [[list(J), list(d.spaces[J])] for J in d.index_sets if d.spaces[J]]
    actions = []
    for J in d.index_sets:
        for (i, g), table in sorted(d.factor_actions[J].items()):
            moved = sorted((x, y) for x, y in table.items() if x in d.spaces[J])
            if any(x != y for x, y in moved):
                actions.append({"J": list(J), "chart": i, "element": g,
                                "map": [list(p) for p in moved]})
    overlaps = [{"I": list(I), "J": list(J), "points": list(ys),
                 "projection": [[y, d.projections[I, J][y]] for y in ys]}
                for (I, J), ys in sorted(d.overlaps.items()) if ys]
    return {"groups": groups,
            "etale_data": {"groups": names, "spaces": spaces, "actions": actions,
                           "overlaps": overlaps}}


def groupoid_to_gspec(cat):
    """A ``groupoid`` section; morphism payloads stay explicit nested arrays."""
    mors = list(cat.morphisms)
    comp = []
    for m1 in mors:
        for m2 in cat.out_of(cat.target(m1)):
            comp.append([m1, m2, cat.compose(m1, m2)])
    out = {"objects": list(cat.objects),
           "morphisms": [[m, cat.source(m), cat.target(m)] for m in mors],
           "identities": [[x, cat.identity(x)] for x in cat.objects],
           "composition": comp}
    if cat.is_groupoid:
        out["inverses"] = [[m, cat.inverse(m)] for m in mors]
    return to_json(out)

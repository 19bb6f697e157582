"""Finite categories and groupoids, functors, group actions and their checkers.

Composition is written in categorical order: ``compose(m, n)`` is "first m,
then n", defined when ``target(m) == source(n)``, with source ``source(m)``
and target ``target(n)``.  Group actions are left actions.
"""

from collections import defaultdict
from itertools import product

from scipy.cluster.hierarchy import DisjointSet

from .errors import (AlphaLawViolation, FunctorialityFailure, InputError, InvalidAction,
                     NoUniqueMinimum, NotComposable, NotNonsingular)
from .report import Report

DISCRETE_NOTE = "finite discrete model: holds automatically"


# ---------------------------------------------------------------------------
# categories

class FiniteCategory:
    """Base class.  Subclasses provide the object/morphism lists and the
    structure maps ``source``, ``target``, ``identity`` and ``_compose``."""

    is_groupoid = False

    def __init__(self):
        self._hom = None
        self._out = None
        self._in = None

    # subclass interface ----------------------------------------------------
    objects = ()
    morphisms = ()

    def source(self, m):
        raise NotImplementedError

    def target(self, m):
        raise NotImplementedError

    def identity(self, x):
        raise NotImplementedError

    def _compose(self, m1, m2):
        raise NotImplementedError

    # derived --------------------------------------------------------------
    def compose(self, m1, m2):
        if self.target(m1) != self.source(m2):
            raise NotComposable(f"target of {m1!r} is not the source of {m2!r}", (m1, m2))
        return self._compose(m1, m2)

    def compose_chain(self, *ms):
        out = ms[0]
        for m in ms[1:]:
            out = self.compose(out, m)
        return out

    def _index(self):
        if self._hom is None:
            hom = defaultdict(list)
            out = defaultdict(list)
            inn = defaultdict(list)
            for m in self.morphisms:
                s, t = self.source(m), self.target(m)
                hom[s, t].append(m)
                out[s].append(m)
                inn[t].append(m)
            self._hom, self._out, self._in = dict(hom), dict(out), dict(inn)

    def hom(self, x, y):
        self._index()
        return tuple(self._hom.get((x, y), ()))

    def out_of(self, x):
        self._index()
        return tuple(self._out.get(x, ()))

    def into(self, y):
        self._index()
        return tuple(self._in.get(y, ()))

    def stats(self):
        return {"objects": len(self.objects), "morphisms": len(self.morphisms),
                "classes": len(realize(self).classes)}


def sort_morphisms(cat, morphisms):
    return tuple(sorted(morphisms, key=lambda m: (cat.source(m), cat.target(m), m)))


class TableCategory(FiniteCategory):
    """A category given by explicit finite tables."""

    def __init__(self, objects, ends, identities, composition, inverses=None):
        super().__init__()
        self.objects = tuple(sorted(objects))
        self._ends = dict(ends)
        self._ids = dict(identities)
        self._comp = dict(composition)
        self._inv = None if inverses is None else dict(inverses)
        self.is_groupoid = inverses is not None
        self.morphisms = sort_morphisms(self, self._ends)

    def source(self, m):
        return self._ends[m][0]

    def target(self, m):
        return self._ends[m][1]

    def identity(self, x):
        return self._ids[x]

    def _compose(self, m1, m2):
        try:
            return self._comp[m1, m2]
        except KeyError:
            raise NotComposable(f"composition table has no entry for {(m1, m2)!r}",
                                (m1, m2)) from None

    def inverse(self, m):
        if self._inv is None:
            raise InputError("category has no inverse table")
        return self._inv[m]


def tabulate(cat):
    """Freeze any finite category into a :class:`TableCategory`."""
    ends = {m: (cat.source(m), cat.target(m)) for m in cat.morphisms}
    ids = {x: cat.identity(x) for x in cat.objects}
    comp = {}
    for m1 in cat.morphisms:
        for m2 in cat.out_of(cat.target(m1)):
            comp[m1, m2] = cat.compose(m1, m2)
    inv = {m: cat.inverse(m) for m in cat.morphisms} if cat.is_groupoid else None
    return TableCategory(cat.objects, ends, ids, comp, inv)


class FullSubcategory(FiniteCategory):
    """The full subcategory of ``parent`` on a set of objects."""

    def __init__(self, parent, objects):
        super().__init__()
        self.parent = parent
        keep = set(objects)
        self.objects = tuple(sorted(keep))
        self.is_groupoid = parent.is_groupoid
        self.morphisms = tuple(m for m in parent.morphisms
                               if parent.source(m) in keep and parent.target(m) in keep)

    def source(self, m):
        return self.parent.source(m)

    def target(self, m):
        return self.parent.target(m)

    def identity(self, x):
        return self.parent.identity(x)

    def _compose(self, m1, m2):
        return self.parent.compose(m1, m2)

    def inverse(self, m):
        return self.parent.inverse(m)


def full_subcategory(cat, objects):
    return FullSubcategory(cat, objects)


def translation_groupoid(group, points, act):
    """The groupoid ``(U, G x U)``; morphism ``(g, y)`` goes from y to g*y.

    ``act(g, y)`` is a left action.  Composition follows the uniformizer rule
    ``Gamma(hg, y) = Gamma(g, y) o Gamma(h, g*y)``.
    """
    points = tuple(sorted(points))
    ends, comp, inv, ids = {}, {}, {}, {}
    for y in points:
        ids[y] = (group.identity, y)
        for g in group.elements:
            ends[g, y] = (y, act(g, y))
            inv[g, y] = (group.inv(g), act(g, y))
    for (g, y), (_, gy) in ends.items():
        for h in group.elements:
            comp[(g, y), (h, gy)] = (group.mul(h, g), y)
    return TableCategory(points, ends, ids, comp, inv)


# ---------------------------------------------------------------------------
# axiom checks

class _Indexed:
    """Integer-indexed copy of a category, used by the exhaustive checkers."""

    def __init__(self, cat):
        self.cat = cat
        self.mors = list(cat.morphisms)
        self.num = {m: k for k, m in enumerate(self.mors)}
        self.src = [cat.source(m) for m in self.mors]
        self.tgt = [cat.target(m) for m in self.mors]
        self.out = defaultdict(list)
        for k, s in enumerate(self.src):
            self.out[s].append(k)


def check_category(cat, nonsingular=False):
    """Exhaustively check the category axioms; report-only."""
    rep = Report("category axioms")
    idx = _Indexed(cat)
    num, src, tgt, out = idx.num, idx.src, idx.tgt, idx.out
    objs = set(cat.objects)

    rep.check_all("objects of morphisms exist", range(len(idx.mors)),
                  lambda k: src[k] in objs and tgt[k] in objs)

    def id_ok(x):
        i = cat.identity(x)
        return i in num and src[num[i]] == x and tgt[num[i]] == x
    rep.check_all("identity source/target", cat.objects, id_ok)

    # composition table over all composable pairs
    comp = [dict() for _ in idx.mors]
    bad_pair = None
    for a in range(len(idx.mors)):
        for b in out[tgt[a]]:
            try:
                c = cat.compose(idx.mors[a], idx.mors[b])
            except Exception:  # noqa: BLE001 - any failure is a witness
                c = None
            k = num.get(c) if c is not None else None
            if k is None or src[k] != src[a] or tgt[k] != tgt[b]:
                if bad_pair is None:
                    bad_pair = (idx.mors[a], idx.mors[b])
                continue
            comp[a][b] = k
    rep.add("composition closed with source/target consistency", bad_pair is None, bad_pair)

    ids = {x: num.get(cat.identity(x)) for x in cat.objects}

    def unit_ok(a):
        return (comp[ids[src[a]]].get(a) == a if ids.get(src[a]) is not None else False) and \
               (comp[a].get(ids[tgt[a]]) == a if ids.get(tgt[a]) is not None else False)
    rep.check_all("identity laws", range(len(idx.mors)), unit_ok)

    witness = None
    for a in range(len(idx.mors)):
        ca = comp[a]
        for b, ab in ca.items():
            cb = comp[b]
            cab = comp[ab]
            for c, bc in cb.items():
                if cab.get(c) != ca.get(bc):
                    witness = (idx.mors[a], idx.mors[b], idx.mors[c])
                    break
            if witness:
                break
        if witness:
            break
    rep.add("associativity over all composable triples", witness is None, witness)

    if cat.is_groupoid:
        def inv_ok(a):
            try:
                ia = num[cat.inverse(idx.mors[a])]
            except Exception:  # noqa: BLE001
                return False
            return comp[a].get(ia) == ids[src[a]] and comp[ia].get(a) == ids[tgt[a]]
        rep.check_all("inverse laws", range(len(idx.mors)), inv_ok)

    if nonsingular:
        seen = {}
        clash = None
        for m in idx.mors:
            key = (cat.source(m), cat.target(m))
            if key in seen:
                clash = (seen[key], m)
                break
            seen[key] = m
        rep.add("nonsingular: at most one morphism per pair", clash is None, clash)
    return rep


# ---------------------------------------------------------------------------
# realization and isotropy

class Realization:
    def __init__(self, classes, class_of):
        self.classes = classes          # tuple of sorted tuples, ordered by label
        self.class_of = class_of        # object -> label (smallest member)

    @property
    def labels(self):
        return tuple(c[0] for c in self.classes)

    def members(self, label):
        for c in self.classes:
            if c[0] == label:
                return c
        raise KeyError(label)

    def __len__(self):
        return len(self.classes)


def realize(cat):
    """Partition of the objects generated by the morphisms (union-find)."""
    ds = DisjointSet(cat.objects)
    for m in cat.morphisms:
        ds.merge(cat.source(m), cat.target(m))
    classes = sorted(tuple(sorted(s)) for s in ds.subsets())
    class_of = {x: c[0] for c in classes for x in c}
    return Realization(tuple(classes), class_of)


class Isotropy:
    def __init__(self, obj, elements, table, is_group, identity):
        self.obj = obj
        self.elements = elements
        self.table = table
        self.is_group = is_group
        self.identity = identity

    @property
    def order(self):
        return len(self.elements)


def isotropy(cat, x):
    """The semigroup Mor(x, x) with its induced composition."""
    elems = cat.hom(x, x)
    table = {(a, b): cat.compose(a, b) for a in elems for b in elems}
    ident = cat.identity(x)
    is_group = all(any(table[a, b] == ident and table[b, a] == ident for b in elems)
                   for a in elems)
    return Isotropy(x, elems, table, is_group, ident)


def isotropy_isomorphism(gpd, m):
    """phi_m: G_s(m) -> G_t(m), alpha -> m^-1 o alpha o m; checked to be an isomorphism."""
    x, y = gpd.source(m), gpd.target(m)
    minv = gpd.inverse(m)
    phi = {a: gpd.compose_chain(minv, a, m) for a in gpd.hom(x, x)}
    gx = gpd.hom(x, x)
    ok = (sorted(phi.values()) == sorted(gpd.hom(y, y))
          and all(phi[gpd.compose(a, b)] == gpd.compose(phi[a], phi[b]) for a in gx for b in gx))
    return phi, ok


# ---------------------------------------------------------------------------
# functors

class Functor:
    def __init__(self, source, target, on_object, on_morphism, name="functor"):
        self.source = source
        self.target = target
        self._obj = on_object
        self._mor = on_morphism
        self.name = name

    def obj(self, x):
        return self._obj(x)

    def mor(self, m):
        return self._mor(m)

    def table(self):
        return ({x: self.obj(x) for x in self.source.objects},
                {m: self.mor(m) for m in self.source.morphisms})


def identity_functor(cat):
    return Functor(cat, cat, lambda x: x, lambda m: m, "identity")


def compose_functors(f, g):
    """First f, then g."""
    return Functor(f.source, g.target, lambda x: g.obj(f.obj(x)),
                   lambda m: g.mor(f.mor(m)), f"{g.name}.{f.name}")


def check_functor(f, morphisms=None):
    """Preservation of source, target, identities, composition (and inverses)."""
    src, tgt = f.source, f.target
    rep = Report(f"functor {f.name}")
    mors = src.morphisms if morphisms is None else morphisms
    mor_table = {m: f.mor(m) for m in mors}
    tmors = set(tgt.morphisms)
    rep.check_all("morphisms land in the target", mors, lambda m: mor_table[m] in tmors)
    rep.check_all("source/target preserved", mors,
                  lambda m: tgt.source(mor_table[m]) == f.obj(src.source(m))
                  and tgt.target(mor_table[m]) == f.obj(src.target(m)))
    rep.check_all("identities preserved", src.objects,
                  lambda x: f.mor(src.identity(x)) == tgt.identity(f.obj(x)))
    witness = None
    mset = set(mors)
    for m1 in mors:
        for m2 in src.out_of(src.target(m1)):
            if m2 not in mset:
                continue
            c = src.compose(m1, m2)
            if c not in mset:
                continue
            if mor_table[c] != tgt.compose(mor_table[m1], mor_table[m2]):
                witness = (m1, m2)
                break
        if witness:
            break
    rep.add("composition preserved", witness is None, witness)
    if src.is_groupoid and tgt.is_groupoid:
        rep.check_all("inverses preserved", mors,
                      lambda m: src.inverse(m) not in mset
                      or mor_table[src.inverse(m)] == tgt.inverse(mor_table[m]))
    return rep


def assert_functor(f):
    rep = check_functor(f)
    if not rep.ok:
        bad = rep.failures()[0]
        raise FunctorialityFailure(f"{f.name}: {bad.name}", bad.witness)
    return rep


def check_equivalence(f):
    """Fully faithful on every Mor-set and bijective on realizations."""
    src, tgt = f.source, f.target
    rep = Report(f"equivalence {f.name}")
    bad = None
    for x in src.objects:
        fx = f.obj(x)
        for y in src.objects:
            fy = f.obj(y)
            images = [f.mor(m) for m in src.hom(x, y)]
            if len(set(images)) != len(images) or set(images) != set(tgt.hom(fx, fy)):
                bad = (x, y)
                break
        if bad:
            break
    rep.add("Mor-set bijections", bad is None, bad)
    rs, rt = realize(src), realize(tgt)
    image = {}
    clash = None
    for c in rs.classes:
        lab = rt.class_of[f.obj(c[0])]
        if lab in image:
            clash = (image[lab], c[0])
            break
        image[lab] = c[0]
    rep.add("realization injective", clash is None, clash)
    missing = [lab for lab in rt.labels if lab not in image]
    rep.add("realization surjective", not missing, missing[0] if missing else None)
    return rep


# ---------------------------------------------------------------------------
# completion of nonsingular categories

class PairGroupoid(FiniteCategory):
    """Morphisms are pairs (x, y) of objects in the same class."""

    is_groupoid = True

    def __init__(self, objects, class_of):
        super().__init__()
        self.objects = tuple(sorted(objects))
        self.class_of = dict(class_of)
        members = defaultdict(list)
        for x in self.objects:
            members[self.class_of[x]].append(x)
        self.morphisms = tuple(sorted(((x, y) for ms in members.values()
                                       for x in ms for y in ms)))

    def source(self, m):
        return m[0]

    def target(self, m):
        return m[1]

    def identity(self, x):
        return (x, x)

    def _compose(self, m1, m2):
        return (m1[0], m2[1])

    def inverse(self, m):
        return (m[1], m[0])


def complete_nonsingular(cat):
    """The groupoid completion of a nonsingular category plus the inclusion."""
    seen = {}
    for m in cat.morphisms:
        key = (cat.source(m), cat.target(m))
        if key in seen:
            raise NotNonsingular("two morphisms between the same objects", (seen[key], m))
        seen[key] = m
    real = realize(cat)
    completion = PairGroupoid(cat.objects, real.class_of)
    inclusion = Functor(cat, completion, lambda x: x,
                        lambda m: (cat.source(m), cat.target(m)), "completion inclusion")
    return completion, inclusion


def class_minima(cat):
    """For a poset-like category: the unique root of each class, or raise."""
    real = realize(cat)
    roots = {}
    for c in real.classes:
        cands = [r for r in c if all(cat.hom(r, y) for y in c)]
        if len(cands) != 1:
            raise NoUniqueMinimum("class without a unique minimum", c)
        roots[c[0]] = cands[0]
    return real, roots


def extend_poset_functor(f, completion=None):
    """Extend ``f`` from a poset to its completion via f(m_x)^-1 o f(m_y)."""
    poset, target = f.source, f.target
    if completion is None:
        completion, _ = complete_nonsingular(poset)
    real, roots = class_minima(poset)

    def root_mor(x):
        return poset.hom(roots[real.class_of[x]], x)[0]

    cache = {}

    def on_mor(pair):
        hit = cache.get(pair)
        if hit is None:
            x, y = completion.source(pair), completion.target(pair)
            hit = target.compose(target.inverse(f.mor(root_mor(x))), f.mor(root_mor(y)))
            cache[pair] = hit
        return hit

    ext = Functor(completion, target, f.obj, on_mor, f"{f.name} extended")
    for m in poset.morphisms:
        if on_mor((poset.source(m), poset.target(m))) != f.mor(m):
            raise FunctorialityFailure("extension disagrees with the original functor", m)
    return ext


# ---------------------------------------------------------------------------
# group actions

class GroupAction:
    """A left action of a finite group on a category, by tables or callables."""

    def __init__(self, group, cat, on_object, on_morphism):
        self.group = group
        self.cat = cat
        self._obj = on_object
        self._mor = on_morphism

    def obj(self, g, x):
        return self._obj(g, x)

    def mor(self, g, m):
        return self._mor(g, m)


def check_action(act):
    grp, cat = act.group, act.cat
    rep = Report("group action")
    objs, mors = set(cat.objects), set(cat.morphisms)
    G = grp.elements
    rep.check_all("objects mapped to objects", product(G, cat.objects),
                  lambda p: act.obj(*p) in objs)
    rep.check_all("morphisms mapped to morphisms", product(G, cat.morphisms),
                  lambda p: act.mor(*p) in mors)
    rep.check_all("identity element acts trivially", cat.objects,
                  lambda x: act.obj(grp.identity, x) == x)
    rep.check_all("identity element acts trivially on morphisms", cat.morphisms,
                  lambda m: act.mor(grp.identity, m) == m)
    rep.check_all("action law on objects", product(G, G, cat.objects),
                  lambda p: act.obj(grp.mul(p[1], p[0]), p[2]) == act.obj(p[1], act.obj(p[0], p[2])))
    rep.check_all("action law on morphisms", product(G, G, cat.morphisms),
                  lambda p: act.mor(grp.mul(p[1], p[0]), p[2]) == act.mor(p[1], act.mor(p[0], p[2])))
    rep.check_all("g*id_x = id_(g*x)", product(G, cat.objects),
                  lambda p: act.mor(p[0], cat.identity(p[1])) == cat.identity(act.obj(*p)))
    rep.check_all("source/target equivariant", product(G, cat.morphisms),
                  lambda p: cat.source(act.mor(*p)) == act.obj(p[0], cat.source(p[1]))
                  and cat.target(act.mor(*p)) == act.obj(p[0], cat.target(p[1])))

    def comp_ok(trip):
        g, m1 = trip
        for m2 in cat.out_of(cat.target(m1)):
            if act.mor(g, cat.compose(m1, m2)) != cat.compose(act.mor(g, m1), act.mor(g, m2)):
                return False
        return True
    rep.check_all("g*(m o m') = (g*m) o (g*m')", product(G, cat.morphisms), comp_ok)
    return rep


def orbits_of_classes(act, real=None):
    """G-orbits on the realization, as sorted tuples of class labels."""
    real = realize(act.cat) if real is None else real
    ds = DisjointSet(real.labels)
    for g in act.group.elements:
        for lab in real.labels:
            ds.merge(lab, real.class_of[act.obj(g, lab)])
    return sorted(tuple(sorted(s)) for s in ds.subsets())


class TimesG(FiniteCategory):
    """The category with morphisms (m, g): g^-1*s(m) -> t(m)."""

    def __init__(self, cat, act):
        super().__init__()
        self.base = cat
        self.act = act
        self.group = act.group
        self.is_groupoid = cat.is_groupoid
        self.objects = cat.objects
        self.morphisms = sort_morphisms(self, [(m, g) for m in cat.morphisms
                                               for g in self.group.elements])

    def source(self, mg):
        m, g = mg
        return self.act.obj(self.group.inv(g), self.base.source(m))

    def target(self, mg):
        return self.base.target(mg[0])

    def identity(self, x):
        return (self.base.identity(x), self.group.identity)

    def _compose(self, a, b):
        (m, g), (m2, h) = a, b
        return (self.base.compose(self.act.mor(h, m), m2), self.group.mul(h, g))

    def inverse(self, mg):
        m, g = mg
        gi = self.group.inv(g)
        return (self.act.mor(gi, self.base.inverse(m)), gi)


def times_G(cat, act, check=True):
    if check:
        rep = check_action(act)
        if not rep.ok:
            bad = rep.failures()[0]
            raise InvalidAction(bad.name, bad.witness)
    return TimesG(cat, act)


class InnerAction(GroupAction):
    """Action induced by designated morphisms alpha(g, x) with target x."""

    def __init__(self, group, gpd, alpha):
        self.alpha = alpha
        super().__init__(group, gpd, self._act_obj, self._act_mor)

    def _act_obj(self, g, x):
        return self.cat.source(self.alpha(self.group.inv(g), x))

    def _act_mor(self, g, m):
        cat, a = self.cat, self.alpha
        gi = self.group.inv(g)
        return cat.compose_chain(a(gi, cat.source(m)), m, a(g, self._act_obj(g, cat.target(m))))


def inner_action(gpd, group, alpha, variant="alpha"):
    """Build the inner action from alpha (target x) or alpha-bar (source x)."""
    G = group.elements
    if variant == "alphabar":
        bar = alpha
        for g, x in product(G, gpd.objects):
            if gpd.source(bar(g, x)) != x:
                raise AlphaLawViolation("s(alphabar(g,x)) != x", (g, x))
        for x in gpd.objects:
            if bar(group.identity, x) != gpd.identity(x):
                raise AlphaLawViolation("alphabar(id,x) != id_x", (group.identity, x))
        for g, h, x in product(G, G, gpd.objects):
            a = bar(g, x)
            if bar(group.mul(h, g), x) != gpd.compose(a, bar(h, gpd.target(a))):
                raise AlphaLawViolation("alphabar composition law", (g, h, x))

        def alpha(g, x):
            return gpd.inverse(bar(group.inv(g), x))
    elif variant != "alpha":
        raise InputError(f"unknown variant {variant!r}")
    for g, x in product(G, gpd.objects):
        if gpd.target(alpha(g, x)) != x:
            raise AlphaLawViolation("t(alpha(g,x)) != x", (g, x))
    for x in gpd.objects:
        if alpha(group.identity, x) != gpd.identity(x):
            raise AlphaLawViolation("alpha(id,x) != id_x", (group.identity, x))
    for g, h, x in product(G, G, gpd.objects):
        a = alpha(h, x)
        if alpha(group.mul(h, g), x) != gpd.compose(alpha(g, gpd.source(a)), a):
            raise AlphaLawViolation("alpha composition law", (g, h, x))
    return InnerAction(group, gpd, alpha)


def check_inner_realization(act):
    real = realize(act.cat)
    rep = Report("inner action is trivial on the realization")
    rep.check_all("class(g*x) = class(x)", product(act.group.elements, act.cat.objects),
                  lambda p: real.class_of[act.obj(*p)] == real.class_of[p[1]])
    return rep


def iota_times_G(inner):
    """The functor (m, g) -> alpha(g, s(m)) o m from the x G category."""
    gpd = inner.cat
    tg = TimesG(gpd, inner)
    return Functor(tg, gpd, lambda x: x,
                   lambda mg: gpd.compose(inner.alpha(mg[1], gpd.source(mg[0])), mg[0]),
                   "iota x G")


# ---------------------------------------------------------------------------
# preuniformizers

class Preuniformizer:
    """Chart (U, G, Gamma): Gamma(g, y) is a morphism y -> g*y."""

    def __init__(self, cat, domain, group, gamma, index=None):
        self.cat = cat
        self.domain = tuple(sorted(domain))
        self.group = group
        self._gamma = gamma
        self.index = index
        self._act = {}
        self._inverse = None

    def gamma(self, g, y):
        return self._gamma(g, y)

    def act(self, g, y):
        key = (g, y)
        hit = self._act.get(key)
        if hit is None:
            hit = self.cat.target(self.gamma(g, y))
            self._act[key] = hit
        return hit

    def solve(self, m):
        """The pair (g, y) with Gamma(g, y) = m."""
        if self._inverse is None:
            self._inverse = {self.gamma(g, y): (g, y)
                             for g in self.group.elements for y in self.domain}
        return self._inverse[m]

    def morphisms_within(self):
        dom = set(self.domain)
        return [m for m in self.cat.morphisms
                if self.cat.source(m) in dom and self.cat.target(m) in dom]


def check_preuniformizer(pu, local=False):
    cat, grp = pu.cat, pu.group
    rep = Report("preuniformizer" if not local else "local uniformizer")
    dom = set(pu.domain)
    pairs = list(product(grp.elements, pu.domain))
    rep.check_all("s(Gamma(g,y)) = y", pairs, lambda p: cat.source(pu.gamma(*p)) == p[1])
    rep.check_all("g*y stays in U", pairs, lambda p: pu.act(*p) in dom)
    rep.check_all("Gamma(hg,y) = Gamma(g,y) o Gamma(h,g*y)",
                  product(grp.elements, grp.elements, pu.domain),
                  lambda p: pu.gamma(grp.mul(p[1], p[0]), p[2])
                  == cat.compose(pu.gamma(p[0], p[2]), pu.gamma(p[1], pu.act(p[0], p[2]))))
    images = [pu.gamma(*p) for p in pairs]
    rep.add("Gamma injective", len(set(images)) == len(images))
    image = set(images)
    loops = [m for m in pu.morphisms_within() if cat.source(m) == cat.target(m)]
    missing = [m for m in loops if m not in image]
    rep.add("image contains every endomorphism over U", not missing,
            missing[0] if missing else None)
    rep.add("footprint locally injective", True, note=DISCRETE_NOTE)
    if local:
        missing = [m for m in pu.morphisms_within() if m not in image]
        rep.add("Gamma surjective onto Mor(U,U)", not missing, missing[0] if missing else None)
        real = realize(cat)
        seen = {}
        clash = None
        for y in pu.domain:
            orbit = min(pu.act(g, y) for g in grp.elements)
            lab = real.class_of[y]
            if seen.setdefault(lab, orbit) != orbit:
                clash = (seen[lab], orbit)
                break
        rep.add("footprint U/G -> |X| injective", clash is None, clash)
    return rep

"""Finite-rank Q-bundles over finite groupoids, sections, multisections.

A bundle assigns a dimension to every object and a matrix mu(m) to every
morphism, mapping the fiber over s(m) to the fiber over t(m).  Composition is
diagrammatic, so mu(m o m') = mu(m') @ mu(m).  Fiber vectors are tuples of
Fractions.

The bundle category has objects (x, w) and morphisms (m, w) with w over
s(m).  It is infinite, so :class:`BundleCategory` works with the finite
closure of a seed set under all morphisms of the base.
"""

from collections import defaultdict
from fractions import Fraction

from .errors import (CocycleFailure, IncompatibleSection, InputError, NotMorphismInvariant,
                     NotWellDefined, StructureViolation)
from .groupoid import FiniteCategory, Functor, GroupAction, check_action, check_functor, realize
from .linalg import QMatrix, qvec, zero_vec
from .report import Report

DISCRETE_GERM_NOTE = "germs at x are values at x: neighbourhoods are singletons"
LOCALLY_CONSTANT_NOTE = "local constancy of kappa is vacuous in the discrete model"
SMOOTHNESS_NOTE = "smoothness of local sections has no finite content"


class GroupoidBundle:
    def __init__(self, base, fiber_dim, mu, name="bundle"):
        """
        base       a finite groupoid
        fiber_dim  {object: n} or a callable
        mu         {morphism: QMatrix} or a callable
        """
        self.base = base
        self.name = name
        self._dim = fiber_dim if callable(fiber_dim) else dict(fiber_dim).__getitem__
        self._mu_src = mu if callable(mu) else dict(mu).__getitem__
        self._mu = {}

    @classmethod
    def trivial(cls, base, dim=1, name="trivial bundle"):
        one = QMatrix.identity(dim)
        return cls(base, lambda x: dim, lambda m: one, name)

    @classmethod
    def rank_one(cls, base, sign, name="rank-1 bundle"):
        """mu(m) = [sign(m)] for a multiplicative sign function on morphisms."""
        return cls(base, lambda x: 1, lambda m: QMatrix(1, 1, [[sign(m)]]), name)

    def dim(self, x):
        return self._dim(x)

    def mu(self, m):
        hit = self._mu.get(m)
        if hit is None:
            hit = self._mu_src(m)
            self._mu[m] = hit
        return hit

    def act(self, m, w):
        return self.mu(m).apply(w)

    def zero(self, x):
        return zero_vec(self.dim(x))

    def restrict(self, base):
        """The same data over a full subcategory."""
        return GroupoidBundle(base, self._dim, self.mu, self.name)


def validate_bundle(b):
    base = b.base
    rep = Report(f"bundle {b.name}")
    rep.check_all("mu(m) maps the fiber over s(m) to the fiber over t(m)", base.morphisms,
                  lambda m: (b.mu(m).rows, b.mu(m).cols)
                  == (b.dim(base.target(m)), b.dim(base.source(m))))
    if not rep.ok:
        return rep
    rep.check_all("mu(id_x) is the identity", base.objects,
                  lambda x: b.mu(base.identity(x)).is_identity())

    bad = None
    for m1 in base.morphisms:
        for m2 in base.out_of(base.target(m1)):
            if b.mu(base.compose(m1, m2)) != b.mu(m2) @ b.mu(m1):
                bad = (m1, m2)
                break
        if bad:
            break
    rep.add("mu(m o m') = mu(m') mu(m)", bad is None, bad)
    if base.is_groupoid:
        rep.check_all("mu(m^-1) mu(m) = identity", base.morphisms,
                      lambda m: (b.mu(base.inverse(m)) @ b.mu(m)).is_identity())
    return rep


def assert_bundle(b):
    from .errors import InvalidBundle
    rep = validate_bundle(b)
    if not rep.ok:
        bad = rep.failures()[0]
        raise InvalidBundle(bad.name, bad.witness)
    return rep


# ---------------------------------------------------------------------------
# the bundle category

class BundleCategory(FiniteCategory):
    """Objects (x, w) and morphisms (m, w), closed under the base morphisms."""

    def __init__(self, bundle, seeds):
        super().__init__()
        self.bundle = bundle
        self.is_groupoid = bundle.base.is_groupoid
        base = bundle.base
        seen = set()
        pending = [(x, qvec(w)) for x, w in seeds]
        while pending:
            x, w = pending.pop()
            if (x, w) in seen:
                continue
            seen.add((x, w))
            for m in base.out_of(x):
                pending.append((base.target(m), bundle.act(m, w)))
        self.objects = tuple(sorted(seen, key=repr))
        self.morphisms = tuple((m, w) for x, w in self.objects for m in base.out_of(x))

    def source(self, mw):
        m, w = mw
        return (self.bundle.base.source(m), w)

    def target(self, mw):
        m, w = mw
        return (self.bundle.base.target(m), self.bundle.act(m, w))

    def identity(self, xw):
        x, w = xw
        return (self.bundle.base.identity(x), w)

    def _compose(self, a, b):
        return (self.bundle.base.compose(a[0], b[0]), a[1])

    def inverse(self, mw):
        m, w = mw
        return (self.bundle.base.inverse(m), self.bundle.act(m, w))


def projection(bcat):
    """P: (x, w) -> x and (m, w) -> m."""
    return Functor(bcat, bcat.bundle.base, lambda xw: xw[0], lambda mw: mw[0], "P")


# ---------------------------------------------------------------------------
# sections

class Section:
    def __init__(self, bundle, values, name="section"):
        self.bundle = bundle
        self.name = name
        self.values = {x: qvec(v) for x, v in values.items()}

    @classmethod
    def zero(cls, bundle):
        return cls(bundle, {x: bundle.zero(x) for x in bundle.base.objects}, "zero section")

    @classmethod
    def constant(cls, bundle, value):
        return cls(bundle, {x: value for x in bundle.base.objects}, "constant section")

    def __call__(self, x):
        return self.values[x]

    def graph(self):
        return [(x, self.values[x]) for x in self.bundle.base.objects]

    def zero_set(self):
        return [x for x in self.bundle.base.objects if not any(self.values[x])]


def section_compatibility(f):
    """The first morphism with f(t(m)) != mu(m) f(s(m)), or None."""
    b = f.bundle
    base = b.base
    for m in base.morphisms:
        if f(base.target(m)) != b.act(m, f(base.source(m))):
            return m
    return None


def lift_section(b, f):
    """The functor x -> (x, f(x)), m -> (m, f(s(m))) into the bundle category."""
    bad = section_compatibility(f)
    if bad is not None:
        raise IncompatibleSection("f(t(m)) != mu(m) f(s(m))", bad)
    bcat = BundleCategory(b, f.graph())
    base = b.base
    lift = Functor(base, bcat, lambda x: (x, f(x)), lambda m: (m, f(base.source(m))),
                   f"lift of {f.name}")
    rep = check_functor(lift)
    if not rep.ok:
        bad = rep.failures()[0]
        raise IncompatibleSection(bad.name, bad.witness)
    return lift


def zero_set_classes(f):
    real = realize(f.bundle.base)
    return sorted({real.class_of[x] for x in f.zero_set()}, key=repr)


# ---------------------------------------------------------------------------
# pullback

class Pullback:
    def __init__(self, bundle, psi, lift, section, report):
        self.bundle = bundle
        self.psi = psi
        self.lift = lift
        self.section = section
        self.report = report


def pullback(b, psi, f=None, seeds=None, verify_equivalence=False):
    """Pull b back along psi: fibers W_psi(y), mu(m) := mu(psi(m)).

    ``seeds`` are (x, w) pairs of the target bundle used to build the finite
    bundle categories on which the lift Psi is checked.
    """
    pulled = GroupoidBundle(psi.source, lambda y: b.dim(psi.obj(y)),
                            lambda m: b.mu(psi.mor(m)), f"pullback of {b.name}")
    rep = Report(f"pullback along {psi.name}")
    section = None
    if f is not None:
        section = Section(pulled, {y: f(psi.obj(y)) for y in psi.source.objects},
                          f"pullback of {f.name}")
        bad = section_compatibility(section)
        rep.add("pulled section is compatible", bad is None, bad)
        rep.add("Psi o psi*f = f o psi", all(section(y) == f(psi.obj(y))
                                            for y in psi.source.objects))
    if seeds is None:
        seeds = [(x, w) for x in psi.target.objects for w in _unit_vectors(b.dim(x))]
    source_seeds = [(y, w) for y in psi.source.objects for x, w in seeds if x == psi.obj(y)]
    top = BundleCategory(b.restrict(psi.target), seeds)
    bottom = BundleCategory(pulled, source_seeds)
    lift = Functor(bottom, top, lambda yw: (psi.obj(yw[0]), yw[1]),
                   lambda mw: (psi.mor(mw[0]), mw[1]), "Psi")
    rep.extend(check_functor(lift), prefix="Psi: ")
    if verify_equivalence:
        from .groupoid import check_equivalence
        rep.extend(check_equivalence(lift), prefix="Psi: ")
        if f is not None:
            real_x = realize(psi.target)
            image = sorted({real_x.class_of[psi.obj(y)] for y in section.zero_set()}, key=repr)
            down = zero_set_classes(section)
            up = [c for c in zero_set_classes(Section(b.restrict(psi.target),
                                                      {x: f(x) for x in psi.target.objects}))]
            rep.add("zero-set classes correspond", len(down) == len(up) and image == up,
                    {"pulled": len(down), "ambient": len(up)})
    return Pullback(pulled, psi, lift, section, rep)


def _unit_vectors(n):
    out = [zero_vec(n)]
    for k in range(n):
        out.append(tuple(Fraction(1) if j == k else Fraction(0) for j in range(n)))
    return out


# ---------------------------------------------------------------------------
# the reduced bundle W_V

class WvResult:
    def __init__(self, bundle, hatrho, report, pullback):
        self.bundle = bundle
        self.hatrho = hatrho
        self.report = report
        self.pullback = pullback


def build_wv(xv, psi, ambient_bundle, f=None):
    """W_V = psi^* W with rho-hat(I, J, x, g) := mu(psi(I, J, x, g))."""
    pb = pullback(ambient_bundle.restrict(psi.target), psi, f)
    hatrho = {m: ambient_bundle.mu(psi.mor(m)) for m in xv.morphisms}
    rep = Report("W_V")
    rep.extend(pb.report)

    bad = None
    for m1 in xv.morphisms:
        for m2 in xv.out_of(xv.target(m1)):
            if hatrho[m2] @ hatrho[m1] != hatrho[xv.compose(m1, m2)]:
                bad = (m1, m2)
                break
        if bad:
            break
    rep.add("rho-hat cocycle over all composable pairs", bad is None, bad)
    if bad:
        raise CocycleFailure("rho-hat cocycle", bad)

    bad = next((m for m in xv.morphisms
                if hatrho[xv.inverse(m)] != hatrho[m].inverse()), None)
    rep.add("rho-hat of the inverse is the inverse", bad is None, bad)
    if bad:
        raise CocycleFailure("rho-hat inverse law", bad)
    return WvResult(pb.bundle, hatrho, rep, pb)


# ---------------------------------------------------------------------------
# lifted inner actions

def lift_inner_action(b, inner, seeds=None, sections=()):
    """g*w = mu(alphabar(g, P(w))) w with alphabar(g, x) = alpha(g^-1, x)^-1 : x -> g*x."""
    base = b.base
    group = inner.group

    def bar(g, x):
        return base.inverse(inner.alpha(group.inv(g), x))

    def on_obj(g, xw):
        x, w = xw
        return (inner.obj(g, x), b.act(bar(g, x), w))

    def on_mor(g, mw):
        m, w = mw
        return (inner.mor(g, m), b.act(bar(g, base.source(m)), w))

    if seeds is None:
        seeds = [(x, w) for x in base.objects for w in _unit_vectors(b.dim(x))]
    seeds = list(seeds) + [pt for f in sections for pt in f.graph()]
    bcat = BundleCategory(b, seeds)
    action = GroupAction(group, bcat, on_obj, on_mor)
    rep = Report("lifted inner action")
    rep.extend(check_action(action))
    rep.check_all("P is equivariant", [(g, xw) for g in group.elements for xw in bcat.objects],
                  lambda p: on_obj(*p)[0] == inner.obj(p[0], p[1][0]))
    for f in sections:
        rep.check_all(f"{f.name} is equivariant",
                      [(g, x) for g in group.elements for x in base.objects],
                      lambda p, f=f: on_obj(p[0], (p[1], f(p[1]))) == (inner.obj(*p),
                                                                        f(inner.obj(*p))))
    return action, rep


# ---------------------------------------------------------------------------
# multisections

class Multisection:
    """Sparse weights on (object, vector) pairs; everything else has weight 0."""

    def __init__(self, bundle, weights):
        self.bundle = bundle
        self.weights = {}
        for (x, w), c in weights.items():
            c = Fraction(c)
            if c < 0:
                raise InputError("negative multisection weight", (x, w))
            if c:
                self.weights[x, qvec(w)] = c

    def __call__(self, x, w):
        return self.weights.get((x, qvec(w)), Fraction(0))

    def support(self):
        return sorted(self.weights, key=repr)

    def fiber(self, x):
        return {w: c for (y, w), c in self.weights.items() if y == x}

    def mass(self, x):
        return sum(self.fiber(x).values(), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, Multisection) and self.weights == other.weights

    def table(self):
        return {(x, w): c for (x, w), c in sorted(self.weights.items(), key=repr)}


def functoriality_witness(lam):
    """A pair (m, w) with Lambda(mu(m) w) != Lambda(w), or None."""
    b = lam.bundle
    base = b.base
    for (x, w), c in sorted(lam.weights.items(), key=repr):
        for m in base.out_of(x):
            if lam(base.target(m), b.act(m, w)) != c:
                return (m, w)
    return None


def check_multisection(lam, unit_mass=True):
    rep = Report("multisection")
    bad = functoriality_witness(lam)
    rep.add("constant along bundle morphisms", bad is None, bad)
    if unit_mass:
        rep.check_all("mass 1 on every fiber", lam.bundle.base.objects,
                      lambda x: lam.mass(x) == 1)
    return rep


class GlobalSectionStructure:
    def __init__(self, index, sections, kappa):
        """
        index     a finite sequence of index labels
        sections  {i: {object: vector}} or a callable (i, x) -> vector
        kappa     callable morphism -> {i: kappa(m)(i)}
        """
        self.index = tuple(index)
        if callable(sections):
            self._section = sections
        else:
            table = {i: {x: qvec(v) for x, v in s.items()} for i, s in sections.items()}
            self._section = lambda i, x: table[i][x]
        self._kappa = kappa
        self._cache = {}

    def section(self, i, x):
        key = (i, x)
        hit = self._cache.get(key)
        if hit is None:
            hit = qvec(self._section(i, x))
            self._cache[key] = hit
        return hit

    def kappa(self, m):
        return self._kappa(m)


class StructureCertificate:
    def __init__(self, report, local_index, descended, correspondences):
        self.report = report
        self.local_index = local_index
        self.descended = descended
        self.correspondences = correspondences


def local_index_sets(gs, x):
    """I_x: the index set modulo equality of section values at x."""
    classes = defaultdict(list)
    for i in gs.index:
        classes[gs.section(i, x)].append(i)
    return sorted((tuple(v) for v in classes.values()), key=lambda c: gs.index.index(c[0]))


def multisection_from_structure(b, gs, verify=True):
    """Lambda(w) = #{i : s_i(P(w)) = w} / |I| plus the structurability certificate."""
    base = b.base
    n = len(gs.index)
    if n == 0:
        raise InputError("empty index set")
    rep = Report("global section structure")

    bad = None
    for m in base.morphisms:
        k = gs.kappa(m)
        if sorted(k, key=repr) != sorted(gs.index, key=repr) or \
                sorted(k.values(), key=repr) != sorted(gs.index, key=repr):
            bad = ("kappa(m) is not a bijection of the index set", m)
            break
        s, t = base.source(m), base.target(m)
        for i in gs.index:
            if gs.section(k[i], t) != b.act(m, gs.section(i, s)):
                bad = ("s_kappa(m)(i)(t(m)) = mu(m) s_i(s(m))", (m, i))
                break
        if bad:
            break
    rep.add("sections are carried along morphisms by kappa", bad is None,
            bad[1] if bad else None)
    if bad:
        raise StructureViolation(bad[0], bad[1])
    rep.add("kappa is locally constant", True, note=LOCALLY_CONSTANT_NOTE)
    rep.add("local sections are smooth", True, note=SMOOTHNESS_NOTE)

    weights = defaultdict(Fraction)
    for x in base.objects:
        for i in gs.index:
            weights[x, gs.section(i, x)] += Fraction(1, n)
    lam = Multisection(b, weights)
    if not verify:
        return lam, None
    rep.extend(check_multisection(lam))
    cert = structurability(b, gs, lam, rep)
    if not rep.ok:
        bad = rep.failures()[0]
        raise StructureViolation(bad.name, bad.witness)
    return lam, cert


def structurability(b, gs, lam, rep):
    base = b.base
    n = len(gs.index)
    local, pr, rep_of = {}, {}, {}
    for x in base.objects:
        classes = local_index_sets(gs, x)
        local[x] = classes
        for c in classes:
            rep_of[x, c] = c[0]
            for i in c:
                pr[x, i] = c

    rep.check_all("Lambda(w) = |class of w in I_x| / |I|",
                  [(x, c) for x in base.objects for c in local[x]],
                  lambda p: lam(p[0], gs.section(p[1][0], p[0])) == Fraction(len(p[1]), n),
                  note=DISCRETE_GERM_NOTE)

    bad = None
    for m1 in base.morphisms:
        k1 = gs.kappa(m1)
        for m2 in base.out_of(base.target(m1)):
            k2 = gs.kappa(m2)
            k12 = gs.kappa(base.compose(m1, m2))
            t = base.target(m2)
            for i in gs.index:
                if gs.section(k12[i], t) != gs.section(k2[k1[i]], t):
                    bad = (m1, m2, i)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("kappa(m o m')(i) ~ kappa(m')(kappa(m)(i))", bad is None, bad,
            note="compared at t(m o m')")

    def tau(m, cls):
        """pr_t(m) o kappa(m) on a class, for every choice of representative."""
        k = gs.kappa(m)
        t = base.target(m)
        return {pr[t, k[i]] for i in cls}

    descended = {}
    bad = None
    for m in base.morphisms:
        s = base.source(m)
        for c in local[s]:
            images = tau(m, c)
            if len(images) != 1:
                bad = (m, c)
                break
            descended[m, c] = images.pop()
        if bad:
            break
    rep.add("tau(m) = pr o kappa(m) o r is independent of the representative", bad is None, bad)
    if bad:
        return StructureCertificate(rep, local, descended, {})

    loops = [m for m in base.morphisms if base.source(m) == base.target(m)]
    rep.check_all("G_x action on I_x: identity acts trivially", base.objects,
                  lambda x: all(descended[base.identity(x), c] == c for c in local[x]))
    rep.check_all("G_x action on I_x: composition law",
                  [(g, h) for g in loops for h in base.out_of(base.target(g))
                   if base.target(h) == base.source(g)],
                  lambda p: all(descended[base.compose(p[0], p[1]), c]
                                == descended[p[1], descended[p[0], c]]
                                for c in local[base.source(p[0])]))
    rep.check_all("pr_x is G_x-equivariant",
                  [(g, i) for g in loops for i in gs.index],
                  lambda p: pr[base.target(p[0]), gs.kappa(p[0])[p[1]]]
                  == descended[p[0], pr[base.source(p[0]), p[1]]])
    rep.check_all("symmetric sections: s_(g*c)(x) = mu(g) s_c(x)",
                  [(g, c) for g in loops for c in local[base.source(g)]],
                  lambda p: gs.section(descended[p][0], base.source(p[0]))
                  == b.act(p[0], gs.section(p[1][0], base.source(p[0]))))

    rep.check_all("tau(m) is a bijection I_s(m) -> I_t(m)", base.morphisms,
                  lambda m: sorted((descended[m, c] for c in local[base.source(m)]), key=repr)
                  == sorted(local[base.target(m)], key=repr))
    rep.check_all("s_tau(m)(c)(t(m)) = mu(m) s_c(s(m))",
                  [(m, c) for m in base.morphisms for c in local[base.source(m)]],
                  lambda p: gs.section(descended[p][0], base.target(p[0]))
                  == b.act(p[0], gs.section(p[1][0], base.source(p[0]))))

    def conj_ok(triple):
        g, m, h = triple
        whole = base.compose_chain(g, m, h)
        return all(descended[whole, c] == descended[h, descended[m, descended[g, c]]]
                   for c in local[base.source(g)])
    triples = [(g, m, h) for m in base.morphisms
               for g in base.hom(base.source(m), base.source(m))
               for h in base.hom(base.target(m), base.target(m))]
    rep.check_all("tau(g o m o h) = h* tau(m) g*", triples, conj_ok)
    def g_star(g, c):
        """g*c through the canonical representative r_x(c) = c[0]."""
        return pr[base.target(g), gs.kappa(g)[c[0]]]
    rep.check_all("tau_(x,x)(g)(c) = g*c", loops,
                  lambda g: all(descended[g, c] == g_star(g, c) for c in local[base.source(g)]))
    if base.is_groupoid:
        rep.check_all("tau_(x',x)(m^-1) = tau_(x,x')(m)^-1", base.morphisms,
                      lambda m: all(descended[base.inverse(m), descended[m, c]] == c
                                    for c in local[base.source(m)]))
    return StructureCertificate(rep, local, descended, descended)


# ---------------------------------------------------------------------------
# pushing multisections

def push_along_equivalence(lam, psi, target_bundle):
    """psi_* Lambda'(w) = Lambda'(w') for any w' with w ~ Psi(w').

    ``lam`` lives on the pullback of ``target_bundle`` along ``psi``.
    Every candidate representative is compared; conflicts raise NotWellDefined.
    """
    b = target_bundle
    base = b.base
    src = psi.source
    weights = {}
    for (y, w), c in lam.weights.items():
        x = psi.obj(y)
        for m in base.out_of(x):
            key = (base.target(m), b.act(m, w))
            weights.setdefault(key, (c, (y, w)))
            if weights[key][0] != c:
                raise NotWellDefined("two representatives with different weights",
                                     (weights[key][1], (y, w)))
    # representatives outside the support must carry weight 0 as well
    for (x, w), (c, origin) in weights.items():
        for y in src.objects:
            for n in base.hom(x, psi.obj(y)):
                wy = b.act(n, w)
                if lam(y, wy) != c:
                    raise NotWellDefined("two representatives with different weights",
                                         (origin, (y, wy)))
    return Multisection(b, {k: v[0] for k, v in weights.items()})


def push_along_fibers(lam, fiber_map, target_bundle):
    """Psi_* Lambda'(w) = sum of Lambda'(w') over w' with Psi(w') = w.

    ``fiber_map(x, w')`` returns the vector over the same object x.
    """
    weights = defaultdict(Fraction)
    for (x, w), c in lam.weights.items():
        weights[x, qvec(fiber_map(x, w))] += c
    out = Multisection(target_bundle, weights)
    bad = functoriality_witness(out)
    if bad is not None:
        raise NotMorphismInvariant("pushed weights are not constant along morphisms", bad)
    return out


def push_multisection(lam, variant, psi=None, fiber_map=None, target_bundle=None):
    if variant in ("equivalence", "i"):
        return push_along_equivalence(lam, psi, target_bundle)
    if variant in ("fibers", "ii"):
        return push_along_fibers(lam, fiber_map, target_bundle)
    raise InputError(f"unknown push variant {variant!r}")


def class_weights(base, values):
    """{class label: weight} for an object-indexed weight map constant on classes."""
    real = realize(base)
    out = {}
    bad = None
    for x in base.objects:
        lab = real.class_of[x]
        c = values.get(x, Fraction(0))
        if out.setdefault(lab, c) != c:
            bad = (lab, x)
    return out, bad

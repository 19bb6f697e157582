"""Fredholm data, local stabilizations and the global stabilization tau.

Everything is exact: fiber vectors and E-vectors are tuples of Fractions and
norms are l1 norms in the chosen bases.  The pipeline object bundles the
reduction from an ambient atlas (V-data, X_V, X_V minus G, psi, W_V) so the
stabilization steps can share it.
"""

from collections import defaultdict
from fractions import Fraction

from .ambient import build_psi, build_v_data
from .bundle import (GlobalSectionStructure, Section, build_wv, class_weights,
                     multisection_from_structure, push_along_equivalence)
from .errors import InputError, StabilizationFailure
from .etale import h_min
from .linalg import QMatrix, l1_norm, qvec, vec_add, vec_scale, zero_vec
from .report import Report
from .xv import build_xv, build_xv_minus_g, xv_object_action

TRANSVERSALITY_NOTE = "transversality needs tangent data; out of scope in the finite model"
NORM_LIMIT_NOTE = "the convergence axiom for N is topological; only N(w) = 0 iff w = 0 is checked"


# ---------------------------------------------------------------------------
# Fredholm data

class FredholmModel:
    def __init__(self, bundle, section, control_set=None, norm=l1_norm):
        self.bundle = bundle
        self.f = section
        self.norm = norm
        objects = bundle.base.objects
        self.control_set = frozenset(objects if control_set is None else control_set)

    def zero_set(self):
        return self.f.zero_set()


def validate_fredholm(fm, vectors=()):
    """Checks on f, N and the control set; N is tested on f, units and ``vectors``."""
    b, base = fm.bundle, fm.bundle.base
    rep = Report("Fredholm model")
    bad = next((m for m in base.morphisms
                if fm.f(base.target(m)) != b.act(m, fm.f(base.source(m)))), None)
    rep.add("f is a section", bad is None, bad)
    sample = [(x, fm.f(x)) for x in base.objects]
    for x in base.objects:
        n = b.dim(x)
        for k in range(n):
            unit = tuple(Fraction(int(j == k)) for j in range(n))
            sample += [(x, unit), (x, vec_scale(-1, unit))]
        sample.append((x, zero_vec(n)))
    sample += list(vectors)
    rep.check_all("N(w) = 0 exactly when w = 0", sample,
                  lambda p: (fm.norm(p[1]) == 0) == (not any(p[1])) and fm.norm(p[1]) >= 0,
                  note=NORM_LIMIT_NOTE)
    rep.check_all("N(mu(m) w) = N(w)",
                  [(m, w) for x, w in sample for m in base.out_of(x)],
                  lambda p: fm.norm(b.act(*p)) == fm.norm(p[1]))
    outside = [x for x in fm.zero_set() if x not in fm.control_set]
    rep.add("zero set inside the control set", not outside, outside[0] if outside else None)
    rep.check_all("control set is saturated",
                  [m for m in base.morphisms if base.source(m) in fm.control_set],
                  lambda m: base.target(m) in fm.control_set)
    return rep


# ---------------------------------------------------------------------------
# local stabilizations

class LocalStabilization:
    def __init__(self, index, chart, dim, values=None, action=None):
        """
        index   chart index i
        chart   the Preuniformizer (U_i, G_i, Gamma_i)
        dim     dimension of E_i
        values  {(object, k): fiber vector} for basis vectors k = 0..dim-1;
                missing entries are zero
        action  {g: QMatrix} linear G_i action on E_i (identity if omitted)
        """
        self.index = index
        self.chart = chart
        self.dim = dim
        self.values = {key: qvec(v) for key, v in (values or {}).items()}
        ident = QMatrix.identity(dim)
        self.action = {g: (action or {}).get(g, ident) for g in chart.group.elements}

    def act(self, g, e):
        return self.action[g].apply(e)

    def basis(self):
        return [tuple(Fraction(int(j == k)) for j in range(self.dim)) for k in range(self.dim)]

    def tau(self, bundle, x, e):
        out = bundle.zero(x)
        for k, c in enumerate(e):
            if c:
                v = self.values.get((x, k))
                if v is not None:
                    out = vec_add(out, vec_scale(c, v))
        return out

    def norm(self, e):
        return l1_norm(e)


def validate_local_stab(ls, fm, chart=None):
    """Linearity, P o tau = id, G_i-equivariance, norm bound and support."""
    chart = chart or ls.chart
    b = fm.bundle
    base = b.base
    group = chart.group
    rep = Report(f"local stabilization {ls.index}")
    rep.add("tau_i is linear in E_i", True, note="tau_i is stored on a basis and extended linearly")
    rep.check_all("tau_i(x, e) lies over x", sorted(ls.values, key=repr),
                  lambda key: key[0] in set(base.objects) and len(ls.values[key]) == b.dim(key[0]))
    rep.check_all("E_i action is linear and invertible", group.elements,
                  lambda g: ls.action[g].rows == ls.dim == ls.action[g].cols)
    rep.check_all("E_i action law", [(g, h) for g in group.elements for h in group.elements],
                  lambda p: ls.action[group.mul(p[1], p[0])] == ls.action[p[1]] @ ls.action[p[0]])
    rep.check_all("norm on E_i is G_i-invariant", group.elements,
                  lambda g: ls.action[g].is_signed_permutation() or ls.dim == 0)

    witness = None
    for x in chart.domain:
        for k, unit in enumerate(ls.basis()):
            for g in group.elements:
                left = ls.tau(b, chart.act(g, x), ls.act(g, unit))
                right = b.act(chart.gamma(g, x), ls.tau(b, x, unit))
                if left != right:
                    witness = (g, x, k + 1)
                    break
            if witness:
                break
        if witness:
            break
    rep.add("tau_i(g*x, g*e) = mu(Gamma_i(g, x)) tau_i(x, e)", witness is None, witness)

    pairs = [(x, k) for x in base.objects for k in range(ls.dim)]
    rep.check_all("N(tau_i(x, e)) <= |e|", pairs,
                  lambda p: fm.norm(ls.tau(b, p[0], ls.basis()[p[1]])) <= 1,
                  note="checked on basis vectors; N is subadditive and homogeneous")
    rep.check_all("support of tau_i inside the control set", pairs,
                  lambda p: not any(ls.tau(b, p[0], ls.basis()[p[1]]))
                  or p[0] in fm.control_set)
    rep.add("linearization of f - tau_i is onto", True, note=TRANSVERSALITY_NOTE)
    return rep


# ---------------------------------------------------------------------------
# partitions of unity

class PartitionOfUnity:
    def __init__(self, beta, beta_u):
        """beta: {i: {object: weight}}; beta_u: {object: 0 or 1}."""
        self.beta = {i: {x: Fraction(v) for x, v in t.items()} for i, t in beta.items()}
        self.beta_u = {x: Fraction(v) for x, v in beta_u.items()}

    def __call__(self, i, x):
        return self.beta.get(i, {}).get(x, Fraction(0))

    def bump(self, x):
        return self.beta_u.get(x, Fraction(0))

    def supports(self, atlas):
        """C_i = |supp beta_i| as a set of class labels."""
        return {i: frozenset(atlas.class_of[x] for x, v in t.items() if v)
                for i, t in self.beta.items()}


def _partition_from_weights(atlas, weight_of_class, control_set):
    beta = {i: {} for i in range(1, atlas.N + 1)}
    for x in atlas.ambient.objects:
        for i, w in weight_of_class(atlas.class_of[x]).items():
            beta[i][x] = w
    objects = atlas.ambient.objects if control_set is None else control_set
    beta_u = {x: int(x in set(objects)) for x in atlas.ambient.objects}
    return PartitionOfUnity(beta, beta_u)


def make_partition(atlas, supports=None, control_set=None):
    """beta_i(x) = 1 / #{j : |x| in C_j} for |x| in C_i, with C_j = F_j by default."""
    supports = dict(atlas.footprints if supports is None else supports)

    def weights(c):
        owners = [i for i in sorted(supports) if c in supports[i]]
        return {i: Fraction(1, len(owners)) for i in owners}
    return _partition_from_weights(atlas, weights, control_set)


def partition_from_reduction(atlas, reduction, control_set=None):
    """beta_j(c) = 1/|H_c| for j in H_c, the smallest I with c in F'_I.

    Outside the reduced region the default footprint rule is used.  The
    result vanishes on F'_I for every j outside I.
    """
    def weights(c):
        holders = [I for I, v in reduction.sets.items() if c in v]
        if not holders:
            owners = [i for i in sorted(atlas.footprints) if c in atlas.footprints[i]]
            return {i: Fraction(1, len(owners)) for i in owners}
        H = min(holders, key=len)
        return {i: Fraction(1, len(H)) for i in H}
    return _partition_from_weights(atlas, weights, control_set)


def check_partition(pu, atlas, reduction=None):
    amb = atlas.ambient
    rep = Report("partition of unity")
    rep.check_all("0 <= beta_i <= 1", [(i, x) for i in pu.beta for x in amb.objects],
                  lambda p: 0 <= pu(*p) <= 1)
    rep.check_all("beta_i constant along morphisms", [(i, m) for i in pu.beta for m in amb.morphisms],
                  lambda p: pu(p[0], amb.source(p[1])) == pu(p[0], amb.target(p[1])))
    rep.check_all("supp beta_i inside the footprint F_i",
                  [(i, x) for i in pu.beta for x in amb.objects],
                  lambda p: pu(*p) == 0 or atlas.class_of[p[1]] in atlas.footprints[p[0]])
    covered = frozenset().union(*pu.supports(atlas).values()) if pu.beta else frozenset()
    rep.check_all("sum of beta_i is 1 on the covered region",
                  [x for x in amb.objects if atlas.class_of[x] in covered],
                  lambda x: sum((pu(i, x) for i in pu.beta), Fraction(0)) == 1)
    rep.check_all("beta_U is an indicator constant along morphisms", amb.morphisms,
                  lambda m: pu.bump(amb.source(m)) == pu.bump(amb.target(m))
                  and pu.bump(amb.source(m)) in (0, 1))
    if reduction is not None:
        rep.check_all("beta_j vanishes on F'_I for j outside I",
                      [(I, j, x) for I, v in reduction.sets.items()
                       for j in pu.beta if j not in I
                       for x in amb.objects if atlas.class_of[x] in v],
                      lambda p: pu(p[1], p[2]) == 0)
    return rep


# ---------------------------------------------------------------------------
# the reduction pipeline

class Pipeline:
    """Ambient atlas + cover reduction -> V-data, X_V, X_V minus G, psi."""

    def __init__(self, atlas, reduction, verify=True):
        self.atlas = atlas
        self.reduction = reduction
        self.vdata = build_v_data(atlas, reduction)
        self.d = self.vdata.data
        self.xv = build_xv(self.d, check=verify)
        self.minus_g = build_xv_minus_g(self.d, self.xv, check=False)
        self.psi_result = build_psi(self.xv, self.vdata, verify=verify)
        self.psi = self.psi_result.functor
        self.G = self.xv.G

    def pull_fredholm(self, fm, wv=None):
        """(W_V, f_V, N, psi^-1(U)) from an ambient Fredholm model."""
        wv = wv or build_wv(self.xv, self.psi, fm.bundle, fm.f)
        f_v = wv.pullback.section
        control = [o for o in self.xv.objects if self.psi.obj(o) in fm.control_set]
        return FredholmModel(wv.bundle, f_v, control, fm.norm), wv


class Tau:
    """tau: X_V minus G x E -> W_V, with E = E_1 x ... x E_N."""

    def __init__(self, pipe, wv, locals_, pu, amb_bundle):
        self.pipe = pipe
        self.wv = wv
        self.bundle = wv.bundle
        self.amb_bundle = amb_bundle
        self.locals = locals_
        self.pu = pu
        self.dims = [locals_[i].dim if i in locals_ else 0 for i in range(1, pipe.atlas.N + 1)]
        self.offsets = [sum(self.dims[:k]) for k in range(len(self.dims))]
        self.dim = sum(self.dims)
        self._cache = {}

    def block(self, e, i):
        a = self.offsets[i - 1]
        return tuple(e[a:a + self.dims[i - 1]])

    def basis(self):
        out = []
        for i in range(1, len(self.dims) + 1):
            for k in range(self.dims[i - 1]):
                v = [Fraction(0)] * self.dim
                v[self.offsets[i - 1] + k] = Fraction(1)
                out.append(((i, k), tuple(v)))
        return out

    def act_e(self, g, e):
        """Diagonal action of g in the full group on E."""
        out = []
        for i, gi in enumerate(g, start=1):
            blk = self.block(e, i)
            out.extend(self.locals[i].act(gi, blk) if i in self.locals else blk)
        return tuple(out)

    def norm_e(self, e):
        return l1_norm(e)

    def __call__(self, obj, e):
        e = qvec(e)
        key = (obj, e)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._evaluate(obj, e)
            self._cache[key] = hit
        return hit

    def _evaluate(self, obj, e):
        atlas, pu = self.pipe.atlas, self.pu
        amb = atlas.ambient
        b = self.amb_bundle
        t = self.pipe.vdata.chart_of[obj]
        xs = atlas.objects_of(t)
        I = obj[0]
        out = b.zero(xs[0])
        if pu.bump(xs[0]) == 0:
            return out
        for n, i in enumerate(I):
            if i not in self.locals:
                continue
            w = vec_scale(pu(i, xs[n]), self.locals[i].tau(b, xs[n], self.block(e, i)))
            if n:
                w = b.act(amb.inverse(atlas.chain(t, 0, n)), w)
            out = vec_add(out, w)
        return vec_scale(pu.bump(xs[0]), out)

    def morphism(self, pair, e):
        """tau on a morphism of X_V minus G: (iota(pair), tau(s(pair), e))."""
        return (self.pipe.minus_g.iota.mor(pair), self(pair[0], e))


def build_tau(pipe, wv, locals_, pu, amb_bundle, norm=l1_norm, samples=()):
    """Assemble tau and verify it exhaustively; any failure raises StabilizationFailure."""
    tau = Tau(pipe, wv, locals_, pu, amb_bundle)
    xv, mg = pipe.xv, pipe.minus_g
    W = wv.bundle
    basis = tau.basis()
    rep = Report("global stabilization tau")

    rep.check_all("tau(o, e) lies in the fiber over o",
                  [(o, v) for o in xv.objects for _, v in basis],
                  lambda p: len(tau(*p)) == W.dim(p[0]))

    def q_ok(m):
        s, t = mg.q.source(m), mg.q.target(m)
        mor = mg.iota.mor((s, t))
        return all(tau(t, v) == W.act(mor, tau(s, v)) for _, v in basis)
    rep.check_all("tau compatible with every morphism of Q", mg.q.morphisms, q_ok)

    def ext_ok(pair):
        mor = mg.iota.mor(pair)
        return all(tau(pair[1], v) == W.act(mor, tau(pair[0], v)) for _, v in basis)
    rep.check_all("extension to X_V minus G is a functor", mg.completion.morphisms, ext_ok)

    act_obj = xv_object_action(xv)
    G = pipe.G
    witness = None
    for g in G.elements():
        for o in xv.objects:
            go = act_obj(g, o)
            alpha = xv.alpha(g, go)
            for label, v in basis:
                if tau(go, tau.act_e(g, v)) != W.act(alpha, tau(o, v)):
                    witness = (g, o, label)
                    break
            if witness:
                break
        if witness:
            break
    rep.add("tau(g*o, g*e) = mu(alpha(g, g*o)) tau(o, e)", witness is None, witness)

    def kernel_ok(o):
        H = h_min(pipe.d, o[0], o[1])
        return all(not any(tau(o, v)) for (i, _), v in basis if i not in H)
    rep.check_all("tau(o, e) = tau(o, e restricted to H_o)", xv.objects, kernel_ok)

    vectors = [v for _, v in basis] + [qvec(s) for s in samples]
    rep.check_all("N(tau(o, e)) <= sum of |e_i|",
                  [(o, v) for o in xv.objects for v in vectors],
                  lambda p: norm(tau(*p)) <= tau.norm_e(p[1]))

    if samples:
        def linear_ok(p):
            o, a, b = p
            combo = vec_add(vec_scale(2, a), vec_scale(Fraction(-1, 3), b))
            return tau(o, combo) == vec_add(vec_scale(2, tau(o, a)),
                                            vec_scale(Fraction(-1, 3), tau(o, b)))
        pairs = [(o, qvec(a), qvec(b)) for o in xv.objects for a in samples for b in samples]
        rep.check_all("tau is linear in e", pairs, linear_ok)
    tau.report = rep
    if not rep.ok:
        bad = rep.failures()[0]
        raise StabilizationFailure(bad.name, bad.witness)
    return tau


# ---------------------------------------------------------------------------
# induced multisections

class LambdaResult:
    def __init__(self, multisection, structure, certificate, report):
        self.multisection = multisection
        self.structure = structure
        self.certificate = certificate
        self.report = report


def lambda_ve(tau, e):
    """Lambda_(V,e)(w) = #{h in G : tau(P(w), h*e) = w} / |G|, with its structure."""
    e = qvec(e)
    if len(e) != tau.dim:
        raise InputError(f"E-vector of length {len(e)}, expected {tau.dim}")
    xv = tau.pipe.xv
    G = tau.pipe.G
    full = G.full_index
    elements = G.elements()

    def kappa(m):
        I, J, y, g = m
        lo = I if len(I) <= len(J) else J
        gf = G.embed(g, lo)
        return {h: G.mul(full, gf, h) for h in elements}

    gs = GlobalSectionStructure(elements, lambda h, o: tau(o, tau.act_e(h, e)), kappa)
    lam, cert = multisection_from_structure(tau.bundle, gs)
    rep = Report("Lambda_(V,e)")
    rep.extend(cert.report)
    n = len(elements)
    direct = defaultdict(Fraction)
    for o in xv.objects:
        for h in elements:
            direct[o, tau(o, tau.act_e(h, e))] += Fraction(1, n)
    rep.add("weights equal the direct count over G", dict(direct) == lam.weights)
    graphs = {(o, gs.section(h, o)) for o in xv.objects for h in elements}
    rep.add("support is the union of the graphs of tau(., g*e)", graphs == set(lam.weights))
    rep.check_all("mass 1 on every fiber", xv.objects, lambda o: lam.mass(o) == 1)
    return LambdaResult(lam, gs, cert, rep)


def orbit_multisection(tau, e):
    """The multisection on X_V minus G x E: weight #{h : h*e = e'} / |G| at (o, e')."""
    G = tau.pipe.G
    n = G.order()
    out = defaultdict(Fraction)
    for o in tau.pipe.xv.objects:
        for h in G.elements():
            out[o, tau.act_e(h, qvec(e))] += Fraction(1, n)
    return dict(out)


# ---------------------------------------------------------------------------
# perturbed solution sets and counts

class Theta:
    def __init__(self, base, values, weights, well_defined):
        self.base = base
        self.values = values
        self.class_weights = weights
        self.well_defined = well_defined

    def support(self):
        return [x for x in self.base.objects if self.values.get(x, 0) > 0]

    def support_classes(self):
        return {c: w for c, w in self.class_weights.items() if w > 0}


def theta(fm, lam):
    """Theta(x) = Lambda(f(x)) with class-indexed weights."""
    base = fm.bundle.base
    values = {x: lam(x, fm.f(x)) for x in base.objects}
    weights, bad = class_weights(base, values)
    return Theta(base, values, weights, bad is None)


def count(th, signs=None):
    """Sum over realization classes of sign * weight (signs default to +1)."""
    total = Fraction(0)
    for c, w in sorted(th.class_weights.items(), key=repr):
        s = 1 if signs is None else signs.get(c, 1)
        if s not in (1, -1):
            raise InputError("signs must be +1 or -1", c)
        total += s * w
    return total


def check_nu_regular(fm, lam):
    rep = Report("(N, U)-regularity")
    nonzero = [(x, w) for (x, w) in lam.support() if any(w)]
    rep.check_all("N(w) < 1 on the support", nonzero, lambda p: fm.norm(p[1]) < 1)
    rep.check_all("nonzero support lies over the control set", nonzero,
                  lambda p: p[0] in fm.control_set)
    rep.add("transversality of the perturbation", True, note=TRANSVERSALITY_NOTE)
    return rep


def theta_through_psi(pipe, fm, lam_v, wv):
    """Theta_V on X_V and Theta on X|_V from the pushed multisection, compared by class."""
    fm_v, _ = pipe.pull_fredholm(fm, wv)
    th_v = theta(fm_v, lam_v)
    pushed = push_along_equivalence(lam_v, pipe.psi, fm.bundle.restrict(pipe.psi.target))
    sub = pipe.psi.target
    f_sub = Section(fm.bundle.restrict(sub), {x: fm.f(x) for x in sub.objects}, fm.f.name)
    th = theta(FredholmModel(f_sub.bundle, f_sub, [x for x in sub.objects
                                                   if x in fm.control_set], fm.norm), pushed)
    rep = Report("Theta through psi")
    rep.add("Theta_V is constant on classes", th_v.well_defined)
    rep.add("Theta is constant on classes", th.well_defined)
    from .groupoid import realize
    rv, rx = realize(pipe.xv), realize(sub)
    mapped = {}
    for c, w in th_v.class_weights.items():
        mapped[rx.class_of[pipe.psi.obj(rv.members(c)[0])]] = w
    rep.add("class weight tables agree through psi", mapped == th.class_weights,
            {"V": {str(k): str(v) for k, v in sorted(mapped.items(), key=repr)},
             "X": {str(k): str(v) for k, v in sorted(th.class_weights.items(), key=repr)}})
    rep.add("counts agree", count(th_v) == count(th), (str(count(th_v)), str(count(th))))
    return th_v, th, pushed, rep


def stabilize(pipe, fm, locals_, pu, samples=()):
    """W_V, tau and the checks that feed it, in one call."""
    wv = build_wv(pipe.xv, pipe.psi, fm.bundle, fm.f)
    tau = build_tau(pipe, wv, locals_, pu, fm.bundle, fm.norm, samples)
    return wv, tau


def unit_vector(tau, i, k=0, scale=1):
    e = [Fraction(0)] * tau.dim
    e[tau.offsets[i - 1] + k] = Fraction(scale)
    return tuple(e)


def split_e(tau, e):
    return {i: tau.block(e, i) for i in range(1, len(tau.dims) + 1)}


"""The groupoid X_V built from etale data, the poset Q, the pruned completion
X_V minus G, functor extension from B_V, the bundle X_V^E, and the good
neighbourhood system.

A morphism of X_V is a tuple ``(I, J, y, g)`` with I, J nested, y in
Tilde V_(I meet J)(I join J) and g in G_(I meet J).
"""

from .algebra import difference, is_subset, meet_join
from .errors import CompositionFailure, FunctorialityFailure, InputError
from .etale import assert_valid, h_min
from .groupoid import (FiniteCategory, Functor, GroupAction, InnerAction, PairGroupoid,
                       check_functor, complete_nonsingular, extend_poset_functor,
                       orbits_of_classes, realize, sort_morphisms)
from .linalg import QMatrix
from .report import Report

CASE_ORDER = ("IKJ", "KIJ", "IJK", "JIK", "KJI", "JKI")


class XvGroupoid(FiniteCategory):
    is_groupoid = True

    def __init__(self, d, debug=False):
        super().__init__()
        self.d = d
        self.G = d.G
        self.debug = debug
        self.objects = d.objects()
        mors = []
        for I in d.index_sets:
            for J in d.index_sets:
                nested, lo, hi = meet_join(I, J)
                if not nested:
                    continue
                for y in d.overlap(lo, hi):
                    for g in self.G.elements(lo):
                        mors.append((I, J, y, g))
        self.morphisms = sort_morphisms(self, mors)
        self.full = self.G.full_index
        self.case_log = None

    # helpers -----------------------------------------------------------
    def rho_to(self, A, top, y):
        """rho_A applied to y in V_top (the inclusion when A == top)."""
        return y if A == top else self.d.rho(A, top, y)

    def _full(self, g, idx):
        return self.G.embed(g, idx, self.full)

    def _mul(self, *elements):
        out = self.G.identity()
        for e in elements:
            out = self.G.mul(self.full, out, e)
        return out

    def _inv(self, g):
        return self.G.inv(self.full, g)

    def _act_full(self, J, g_full, x):
        return self.d.act(J, self.G.restrict(g_full, self.full, J), x)

    # structure maps ----------------------------------------------------
    def source(self, m):
        I, J, y, g = m
        _, lo, hi = meet_join(I, J)
        return (I, self.d.act_sub(I, lo, self.G.inv(lo, g), self.rho_to(I, hi, y)))

    def target(self, m):
        I, J, y, _ = m
        _, lo, hi = meet_join(I, J)
        return (J, self.rho_to(J, hi, y))

    def identity(self, obj):
        I, x = obj
        return (I, I, x, self.G.identity(I))

    def inverse(self, m):
        I, J, y, g = m
        _, lo, hi = meet_join(I, J)
        gi = self.G.inv(lo, g)
        return (J, I, self.d.act_sub(hi, lo, gi, y), gi)

    def alpha(self, g, obj):
        """Inner action morphism (I, I, x, g|_I) for g in the full group."""
        I, x = obj
        return (I, I, x, self.G.restrict(g, self.full, I))

    # composition -------------------------------------------------------
    def applicable_cases(self, I, J, K):
        sub = is_subset
        tests = {
            "IKJ": sub(I, K) and sub(K, J),
            "KIJ": sub(K, I) and sub(I, J),
            "IJK": sub(I, J) and sub(J, K),
            "JIK": sub(J, I) and sub(I, K),
            "KJI": sub(K, J) and sub(J, I),
            "JKI": sub(J, K) and sub(K, I),
        }
        return [c for c in CASE_ORDER if tests[c]]

    def _case(self, case, m1, m2):
        """Return (v, top, k_full) for one of the six cases."""
        I, J, x, g = m1
        _, K, y, h = m2
        d, G = self.d, self.G
        ident = G.identity()
        if case == "IKJ":
            return y, J, ident
        if case == "KIJ":
            gik = G.inv(difference(I, K), G.restrict(g, I, difference(I, K)))
            return d.act_sub(J, difference(I, K), gik, y), J, ident
        if case == "IJK":
            return y, K, ident
        if case == "JIK":
            rest = difference(I, J)
            if I != K and not d.in_overlap(I, K, y):
                raise CompositionFailure("case J<I<K: y is not in Tilde V_IK", (m1, m2))
            goal = self.rho_to(I, K, y)
            hits = [k for k in G.elements(rest)
                    if d.act(I, G.mul(I, G.embed(h, J, I), G.embed(k, rest, I)), x) == goal]
            if len(hits) != 1:
                raise CompositionFailure(f"case J<I<K: {len(hits)} solutions for k", (m1, m2))
            return y, K, self._full(hits[0], rest)
        if case == "KJI":
            rest = difference(J, K)
            gjk = G.embed(G.inv(rest, G.restrict(g, J, rest)), rest, I)
            return d.act(I, G.mul(I, gjk, G.embed(h, K, I)), x), I, ident
        if case == "JKI":
            rest = difference(K, J)
            if not d.in_overlap(K, I, x):
                raise CompositionFailure("case J<K<I: x is not in Tilde V_KI", (m1, m2))
            rx = d.rho(K, I, x) if K != I else x
            hits = [k for k in G.elements(rest)
                    if d.act(K, G.mul(K, G.embed(h, J, K), G.embed(k, rest, K)), rx) == y]
            if len(hits) != 1:
                raise CompositionFailure(f"case J<K<I: {len(hits)} solutions for k", (m1, m2))
            k = hits[0]
            v = d.act(I, G.mul(I, G.embed(k, rest, I), G.embed(h, J, I)), x)
            return v, I, self._full(k, rest)
        raise InputError(f"unknown case {case}")

    def _finish(self, m1, m2, v, top, k_full):
        I, J, _, g = m1
        _, K, _, h = m2
        _, lo, hi = meet_join(I, K)
        prod = self._mul(k_full, self._full(h, meet_join(J, K)[1]), self._full(g, meet_join(I, J)[1]))
        if hi != top and not self.d.in_overlap(hi, top, v):
            raise CompositionFailure("composite payload outside the overlap", (m1, m2))
        payload = self.rho_to(hi, top, v)
        return (I, K, payload, self.G.restrict(prod, self.full, lo))

    def compose_case(self, case, m1, m2):
        v, top, k = self._case(case, m1, m2)
        return self._finish(m1, m2, v, top, k)

    def _compose(self, m1, m2):
        I, J, K = m1[0], m1[1], m2[1]
        cases = self.applicable_cases(I, J, K)
        if not cases:
            raise CompositionFailure("index sets of a composable pair are not nested", (m1, m2))
        result = self.compose_case(cases[0], m1, m2)
        if self.debug and len(cases) > 1:
            for c in cases[1:]:
                other = self.compose_case(c, m1, m2)
                if other != result:
                    raise CompositionFailure(f"cases {cases[0]} and {c} disagree", (m1, m2))
        return result


def build_xv(d, debug=False, check=True):
    if check:
        assert_valid(d)
    return XvGroupoid(d, debug=debug)


def compose_xv(xv, m1, m2):
    return xv.compose(m1, m2)


def xv_inner_action(xv):
    """The inner action g*(I,x) = (I, g|_I * x) defined by alpha."""
    return InnerAction(xv.G.as_group(), xv, xv.alpha)


def check_case_agreement(xv):
    """Evaluate every applicable case on every composable pair.

    Returns (number of pairs with overlapping cases, list of disagreements).
    """
    overlaps, bad = 0, []
    for m1 in xv.morphisms:
        for m2 in xv.out_of(xv.target(m1)):
            cases = xv.applicable_cases(m1[0], m1[1], m2[1])
            if len(cases) < 2:
                continue
            overlaps += 1
            results = {c: xv.compose_case(c, m1, m2) for c in cases}
            if len(set(results.values())) != 1:
                bad.append((m1, m2, results))
    return overlaps, bad


def check_xv_structure(xv):
    """Source/target consistency of each composite, computed case by case."""
    rep = Report("composition rule source/target")
    bad = None
    for m1 in xv.morphisms:
        for m2 in xv.out_of(xv.target(m1)):
            try:
                c = xv.compose(m1, m2)
            except CompositionFailure:
                bad = (m1, m2)
                break
            I, K, z, k = c
            _, lo, hi = meet_join(I, K)
            if (not xv.d.in_overlap(lo, hi, z) or xv.source(c) != xv.source(m1)
                    or xv.target(c) != xv.target(m2)):
                bad = (m1, m2)
                break
        if bad:
            break
    rep.add("composite is a morphism with source s(m1) and target t(m2)", bad is None, bad)
    return rep


# ---------------------------------------------------------------------------
# the poset Q

class QPoset(FiniteCategory):
    """Objects (I, x); a morphism (I, J, y) for I in J and y in Tilde V_IJ."""

    def __init__(self, d):
        super().__init__()
        self.d = d
        self.objects = d.objects()
        mors = [(I, J, y) for I in d.index_sets for J in d.index_sets
                if is_subset(I, J) for y in d.overlap(I, J)]
        self.morphisms = sort_morphisms(self, mors)

    def source(self, m):
        I, J, y = m
        return (I, self.d.rho(I, J, y))

    def target(self, m):
        return (m[1], m[2])

    def identity(self, obj):
        return (obj[0], obj[0], obj[1])

    def _compose(self, m1, m2):
        return (m1[0], m2[1], m2[2])


def build_q(d, check=True):
    if check:
        assert_valid(d)
    return QPoset(d)


def check_partial_order(q):
    """Antisymmetry: no pair of distinct objects with morphisms both ways."""
    bad = None
    for m in q.morphisms:
        s, t = q.source(m), q.target(m)
        if s != t and q.hom(t, s):
            bad = m
            break
    return bad


def q_minima(q):
    real = realize(q)
    out = {}
    for c in real.classes:
        out[c[0]] = [r for r in c if all(q.hom(r, y) for y in c)]
    return real, out


# ---------------------------------------------------------------------------
# X_V minus G

class XvMinusG(PairGroupoid):
    """Completion of Q; morphisms are pairs of objects in one Q-class."""

    def __init__(self, q):
        super().__init__(q.objects, realize(q).class_of)
        self.q = q


class XvMinusGResult:
    def __init__(self, xv, q, completion, action, iota, report):
        self.xv = xv
        self.q = q
        self.completion = completion
        self.action = action
        self.iota = iota
        self.report = report


def xv_object_action(xv):
    G = xv.G

    def obj(g, o):
        I, x = o
        return (I, xv.d.act(I, G.restrict(g, G.full_index, I), x))
    return obj


def xv_morphism_action(xv):
    """g*(I,J,y,h) = (I, J, g|_(I join J) y, g|_(I meet J) h g|_(I meet J)^-1)."""
    G = xv.G

    def mor(g, m):
        I, J, y, h = m
        _, lo, hi = meet_join(I, J)
        gl = G.restrict(g, G.full_index, lo)
        return (I, J, xv.d.act(hi, G.restrict(g, G.full_index, hi), y),
                G.mul(lo, G.mul(lo, gl, h), G.inv(lo, gl)))
    return mor


def mor_hm_set(xv):
    """The explicit morphism set {(I,J,y,g): y in Tilde V_IJ, g in G_(I - H_y)} plus inverses."""
    d, G = xv.d, xv.G
    out = set()
    for I in d.index_sets:
        for J in d.index_sets:
            if not is_subset(I, J):
                continue
            for y in d.overlap(I, J):
                H = h_min(d, J, y)
                rest = difference(I, H)
                for g in G.elements(rest):
                    m = (I, J, y, G.embed(g, rest, I))
                    out.add(m)
                    out.add(xv.inverse(m))
    return out


def build_xv_minus_g(d, xv=None, check=True):
    if check:
        assert_valid(d)
    xv = xv or XvGroupoid(d)
    q = QPoset(d)
    completion = XvMinusG(q)
    inclusion = Functor(q, xv, lambda o: o, lambda m: (m[0], m[1], m[2], xv.G.identity(m[0])),
                        "Q into X_V")
    iota = extend_poset_functor(inclusion, completion)
    iota.name = "iota"
    obj_act = xv_object_action(xv)
    action = GroupAction(xv.G.as_group(), completion, obj_act,
                         lambda g, p: (obj_act(g, p[0]), obj_act(g, p[1])))

    rep = Report("X_V minus G")
    images = {p: iota.mor(p) for p in completion.morphisms}
    rep.add("iota injective on morphisms", len(set(images.values())) == len(images))
    rep.add("iota image equals the explicit morphism set",
            set(images.values()) == mor_hm_set(xv))
    mor_act = xv_morphism_action(xv)
    bad = None
    for g in xv.G.elements():
        for p in completion.morphisms:
            if images[action.mor(g, p)] != mor_act(g, images[p]):
                bad = (g, p)
                break
        if bad:
            break
    rep.add("iota is G-equivariant", bad is None, bad)
    cert = quotient_certificate(xv, completion, action)
    rep.add("classes / G biject with classes of X_V", cert["ok"], cert)
    return XvMinusGResult(xv, q, completion, action, iota, rep)


def quotient_certificate(xv, completion, action):
    rc, rx = realize(completion), realize(xv)
    orbits = orbits_of_classes(action, rc)
    images = []
    consistent = True
    for orb in orbits:
        labs = {rx.class_of[lab] for lab in orb}
        consistent &= len(labs) == 1
        images.append(min(labs))
    ok = consistent and len(set(images)) == len(images) and set(images) == set(rx.labels)
    return {"ok": ok, "completion_classes": len(rc), "orbits": len(orbits),
            "xv_classes": len(rx)}


# ---------------------------------------------------------------------------
# factorisations inside X_V

def check_decomposition(xv, minus_g_morphisms):
    """Every morphism equals alpha_I(g|_H, .) o m with m in X_V minus G."""
    d, G = xv.d, xv.G
    rep = Report("decomposition and conjugation")
    bad = None
    for mor in xv.morphisms:
        I, K, x, g = mor
        _, lo, hi = meet_join(I, K)
        H = h_min(d, hi, x)
        rest = difference(lo, H)
        g_h = G.restrict(g, lo, H)
        g_rest = G.restrict(g, lo, rest)
        m = (I, K, x, G.embed(g_rest, rest, lo))
        src = xv.rho_to(I, hi, x)
        src = d.act_sub(I, rest, G.inv(rest, g_rest), src)
        lead = (I, I, src, G.embed(g_h, H, I))
        if m not in minus_g_morphisms or xv.compose(lead, m) != mor:
            bad = mor
            break
    rep.add("decomposition (I,K,x,g) = g|_H o m", bad is None, bad)

    bad = None
    for mor in sorted(minus_g_morphisms):
        I, J, x, g = mor
        _, lo, hi = meet_join(I, J)
        H = h_min(d, hi, x)
        for ell in G.elements(H):
            li = G.inv(H, ell)
            conj = (I, J, d.act_sub(hi, H, li, x),
                    G.mul(lo, G.mul(lo, G.embed(li, H, lo), g), G.embed(ell, H, lo)))
            left = xv.compose(xv.alpha(G.embed(ell, H), xv.source(mor)), mor)
            right = _right_mult(xv, conj, G.embed(ell, H))
            if conj not in minus_g_morphisms or left != right:
                bad = (mor, ell)
                break
        if bad:
            break
    rep.add("conjugation m^l stays in X_V minus G and l o m = m^l o l", bad is None, bad)
    return rep


def _right_mult(xv, m, g_full):
    """m o g := m o alpha_J(g, g*t(m))."""
    J, y = xv.target(m)
    gy = xv.d.act(J, xv.G.restrict(g_full, xv.full, J), y)
    return xv.compose(m, xv.alpha(g_full, (J, gy)))


# ---------------------------------------------------------------------------
# B_V and functor extension

class BvCategory(FiniteCategory):
    """Subcategory of X_V with the morphisms (I, J, y, g) for I in J."""

    def __init__(self, xv):
        super().__init__()
        self.xv = xv
        self.objects = xv.objects
        self.morphisms = tuple(m for m in xv.morphisms if is_subset(m[0], m[1]))

    def source(self, m):
        return self.xv.source(m)

    def target(self, m):
        return self.xv.target(m)

    def identity(self, x):
        return self.xv.identity(x)

    def _compose(self, m1, m2):
        return self.xv.compose(m1, m2)


def extend_functor_bv(phi, xv, verify=True):
    """Extend a functor on B_V to X_V by phi(m) := phi(m^-1)^-1 for I > J."""
    target = phi.target

    def on_mor(m):
        if is_subset(m[0], m[1]):
            return phi.mor(m)
        return target.inverse(phi.mor(xv.inverse(m)))

    ext = Functor(xv, target, phi.obj, on_mor, f"{phi.name} extended")
    if verify:
        rep = check_functor(ext)
        if not rep.ok:
            bad = rep.failures()[0]
            raise FunctorialityFailure(f"extension: {bad.name}", bad.witness)
    return ext


# ---------------------------------------------------------------------------
# the bundle X_V^E on a finite sample of E

class LinearAction:
    """Linear action of the full group G on E = Q^dim by matrices."""

    def __init__(self, group, dim, matrices):
        self.group = group
        self.dim = dim
        self.matrices = {g: matrices.get(g, QMatrix.identity(dim)) for g in group.elements}

    def act(self, g_full, e):
        return self.matrices[g_full].apply(e)

    @classmethod
    def trivial(cls, group, dim):
        return cls(group, dim, {})


def close_sample(lin, sample):
    out = set(tuple(v) for v in sample)
    frontier = list(out)
    while frontier:
        nxt = []
        for e in frontier:
            for g in lin.group.elements:
                ge = lin.act(g, e)
                if ge not in out:
                    out.add(ge)
                    nxt.append(ge)
        frontier = nxt
    return tuple(sorted(out))


class XvE(FiniteCategory):
    """Objects (I, x, e); morphisms (I, J, y, g, e) for e in a G-closed sample."""

    def __init__(self, xv, lin, sample):
        super().__init__()
        self.xv = xv
        self.lin = lin
        self.sample = close_sample(lin, sample)
        self.is_groupoid = True
        self.objects = tuple(sorted((I, x, e) for (I, x) in xv.objects for e in self.sample))
        self.morphisms = sort_morphisms(self, [m + (e,) for m in xv.morphisms for e in self.sample])

    def _g_full(self, m):
        I, J, _, g = m[:4]
        return self.xv.G.embed(g, meet_join(I, J)[1])

    def source(self, m):
        I, x = self.xv.source(m[:4])
        return (I, x, self.lin.act(self.xv.G.inv(self.xv.full, self._g_full(m)), m[4]))

    def target(self, m):
        J, y = self.xv.target(m[:4])
        return (J, y, m[4])

    def identity(self, obj):
        I, x, e = obj
        return self.xv.identity((I, x)) + (e,)

    def _compose(self, m1, m2):
        return self.xv.compose(m1[:4], m2[:4]) + (m2[4],)

    def inverse(self, m):
        gi = self.xv.G.inv(self.xv.full, self._g_full(m))
        return self.xv.inverse(m[:4]) + (self.lin.act(gi, m[4]),)


def build_xve(xv, lin, sample):
    """X_V^E on a sample, its G-action, and iota_E from (X_V minus G) x E."""
    xve = XvE(xv, lin, sample)
    mor_act = xv_morphism_action(xv)
    obj_act = xv_object_action(xv)
    action = GroupAction(xv.G.as_group(), xve,
                         lambda g, o: obj_act(g, o[:2]) + (lin.act(g, o[2]),),
                         lambda g, m: mor_act(g, m[:4]) + (lin.act(g, m[4]),))
    return xve, action


def xve_class_report(xve, xv):
    real_e = realize(xve)
    real_x = realize(xv)
    return {"classes": len(real_e), "base_classes": len(real_x),
            "sample_size": len(xve.sample)}


# ---------------------------------------------------------------------------
# good neighbourhoods

def good_neighbourhoods(xv):
    """U(x) = {x}; checks invariance under the isotropy and the three bullets."""
    system = {x: (x,) for x in xv.objects}
    rep = Report("good neighbourhood system")
    rep.add("properness", True, note="finite discrete model: holds automatically")
    rep.check_all("U(x) invariant under G_x", xv.objects,
                  lambda x: all(xv.target(m) in system[x] for m in xv.hom(x, x)))
    rep.add("s, t injective on morphism components", True,
            note="morphism-set components are singletons")
    return system, rep


def intersect_systems(a, b):
    return {x: tuple(sorted(set(a[x]) & set(b[x]))) for x in a}


"""Reduction from an ambient groupoid with local uniformizers.

An element of U_I for I = (i_1 < ... < i_k) is a chart tuple
``(x_1, m_12, x_2, ..., x_k)`` with x_l in U_(i_l) and m a morphism of the
ambient groupoid from x_l to x_(l+1).  Tuples are kept as Python tuples and
exposed to :class:`EtaleDataV` through deterministic string labels.
"""

from itertools import product

from .algebra import ProductGroup, difference, is_subset, nonempty_subsets
from .errors import EquivalenceFailure, InputError, InvalidAtlas, NoAdmissibleShrinking
from .etale import EtaleDataV
from .groupoid import (Functor, check_equivalence, check_preuniformizer, full_subcategory,
                       realize)
from .report import Report
from .xv import BvCategory, extend_functor_bv


def name_of(value):
    """Deterministic short text for objects and morphisms."""
    if isinstance(value, str):
        return value
    if isinstance(value, tuple):
        return "(" + ",".join(name_of(v) for v in value) + ")"
    return str(value)


def tuple_label(chart_tuple):
    return "/".join(name_of(v) for v in chart_tuple)


class AmbientAtlas:
    """An ambient groupoid, local uniformizers (index i at position i-1) and S."""

    def __init__(self, ambient, uniformizers, solution_set=None):
        self.ambient = ambient
        self.uniformizers = tuple(uniformizers)
        self.N = len(self.uniformizers)
        self.G = ProductGroup([u.group for u in self.uniformizers])
        self.realization = realize(ambient)
        self.class_of = self.realization.class_of
        self.footprints = {i + 1: frozenset(self.class_of[x] for x in u.domain)
                           for i, u in enumerate(self.uniformizers)}
        covered = frozenset().union(*self.footprints.values()) if self.footprints else frozenset()
        self.solution_set = covered if solution_set is None else frozenset(solution_set)
        self._ui = {}

    def chart(self, i):
        return self.uniformizers[i - 1]

    def footprint(self, I):
        out = None
        for i in I:
            out = self.footprints[i] if out is None else out & self.footprints[i]
        return out if out is not None else frozenset()

    # chart tuples ---------------------------------------------------------
    def psi_I(self, chart_tuple):
        return self.class_of[chart_tuple[0]]

    def objects_of(self, chart_tuple):
        return chart_tuple[0::2]

    def morphisms_of(self, chart_tuple):
        return chart_tuple[1::2]

    def act_tuple(self, I, g, chart_tuple):
        """g*(x_1, m_12, ...) with g over I: x_l -> g_l x_l and
        m_(l,l+1) -> Gamma(g_l^-1, g_l x_l) o m o Gamma(g_(l+1), x_(l+1))."""
        amb = self.ambient
        xs = self.objects_of(chart_tuple)
        ms = self.morphisms_of(chart_tuple)
        charts = [self.chart(i) for i in I]
        new_x = [c.act(gl, x) for c, gl, x in zip(charts, g, xs)]
        out = [new_x[0]]
        for ell, m in enumerate(ms):
            c0, c1 = charts[ell], charts[ell + 1]
            g0, g1 = g[ell], g[ell + 1]
            left = c0.gamma(c0.group.inv(g0), new_x[ell])
            right = c1.gamma(g1, xs[ell + 1])
            out.extend([amb.compose(amb.compose(left, m), right), new_x[ell + 1]])
        return tuple(out)

    def forget(self, I, J, chart_tuple):
        """rho_IJ: keep the objects at positions of I, compose the morphisms between them."""
        amb = self.ambient
        xs = self.objects_of(chart_tuple)
        ms = self.morphisms_of(chart_tuple)
        keep = [k for k, j in enumerate(J) if j in I]
        out = [xs[keep[0]]]
        for a, b in zip(keep, keep[1:]):
            m = ms[a]
            for k in range(a + 1, b):
                m = amb.compose(m, ms[k])
            out.extend([m, xs[b]])
        return tuple(out)

    def chain(self, chart_tuple, a, b):
        """Composite of the morphisms from position a to position b (identity if a == b)."""
        xs = self.objects_of(chart_tuple)
        ms = self.morphisms_of(chart_tuple)
        m = self.ambient.identity(xs[a])
        for k in range(a, b):
            m = self.ambient.compose(m, ms[k])
        return m


def validate_atlas(atlas):
    rep = Report("ambient atlas")
    for i, u in enumerate(atlas.uniformizers, start=1):
        rep.extend(check_preuniformizer(u, local=True), prefix=f"chart {i}: ")
    covered = frozenset().union(*atlas.footprints.values()) if atlas.footprints else frozenset()
    missing = sorted(atlas.solution_set - covered)
    rep.add("S is covered by the footprints", not missing, missing[0] if missing else None)
    return rep


def assert_atlas(atlas):
    rep = validate_atlas(atlas)
    if not rep.ok:
        bad = rep.failures()[0]
        raise InvalidAtlas(bad.name, bad.witness)
    return rep


class ChartDomain:
    """U_I with its G_I-action and footprint map."""

    def __init__(self, atlas, I):
        self.atlas = atlas
        self.I = tuple(I)
        self.elements = tuple(sorted(_build_tuples(atlas, self.I), key=tuple_label))
        self.labels = {t: tuple_label(t) for t in self.elements}
        self.group = atlas.G

    def act(self, g, t):
        return self.atlas.act_tuple(self.I, g, t)

    def psi(self, t):
        return self.atlas.psi_I(t)


def _build_tuples(atlas, I):
    amb = atlas.ambient
    F = atlas.footprint(I)
    first = atlas.chart(I[0])
    tuples = [(x,) for x in first.domain if atlas.class_of[x] in F]
    for i in I[1:]:
        dom = set(atlas.chart(i).domain)
        tuples = [t + (m, amb.target(m)) for t in tuples
                  for m in amb.out_of(t[-1]) if amb.target(m) in dom]
    return tuples


def build_ui(atlas, I):
    """U_I with its action; the cached result is shared by later calls."""
    I = tuple(I)
    hit = atlas._ui.get(I)
    if hit is None:
        hit = ChartDomain(atlas, I)
        atlas._ui[I] = hit
    return hit


def rho_ij(atlas, I, J):
    """The map U_J -> U_I as a dict."""
    UJ = build_ui(atlas, J)
    return {t: atlas.forget(tuple(I), tuple(J), t) for t in UJ.elements}


def check_ui(atlas, I):
    """Action laws, freeness of G_(I - i), and U_I/G_I = F_I."""
    U = build_ui(atlas, I)
    G = atlas.G
    rep = Report(f"U_{''.join(map(str, I))}")
    elems = set(U.elements)
    rep.check_all("G_I maps U_I to itself", product(G.elements(I), U.elements),
                  lambda p: U.act(*p) in elems)
    rep.check_all("(hg)*x = h*(g*x)", product(G.elements(I), G.elements(I), U.elements),
                  lambda p: U.act(G.mul(I, p[1], p[0]), p[2]) == U.act(p[1], U.act(p[0], p[2])))

    def free_ok(pair):
        i, t = pair
        rest = difference(I, (i,))
        return all(U.act(G.embed(g, rest, I), t) != t
                   for g in G.elements(rest) if g != G.identity(rest))
    rep.check_all("G_(I - i) acts freely", product(I, U.elements), free_ok)
    orbits = {}
    for t in U.elements:
        orbit = frozenset(U.act(g, t) for g in G.elements(I))
        orbits[orbit] = U.psi(t)
    images = list(orbits.values())
    rep.add("U_I / G_I -> F_I is a bijection",
            len(set(images)) == len(images) and set(images) == set(atlas.footprint(I)))
    return rep


def check_rho(atlas):
    """Identity, psi compatibility, cocycle and factorisation of every rho_IJ."""
    idx = nonempty_subsets(atlas.N)
    G = atlas.G
    rep = Report("rho_IJ")
    pairs = [(I, J) for I in idx for J in idx if is_subset(I, J)]
    rep.check_all("rho_II = id", [I for I in idx],
                  lambda I: all(atlas.forget(I, I, t) == t for t in build_ui(atlas, I).elements))
    rep.check_all("psi_J = psi_I o rho_IJ", pairs,
                  lambda p: all(atlas.psi_I(atlas.forget(*p, t)) == atlas.psi_I(t)
                                for t in build_ui(atlas, p[1]).elements))
    triples = [(H, I, J) for H, I in pairs for J in idx if is_subset(I, J)]
    rep.check_all("rho_HJ = rho_HI o rho_IJ", triples,
                  lambda k: all(atlas.forget(k[0], k[2], t)
                                == atlas.forget(k[0], k[1], atlas.forget(k[1], k[2], t))
                                for t in build_ui(atlas, k[2]).elements))

    def equi_ok(p):
        I, J = p
        U = build_ui(atlas, J)
        return all(atlas.forget(I, J, U.act(g, t))
                   == atlas.act_tuple(I, G.restrict(g, J, I), atlas.forget(I, J, t))
                   for g in G.elements(J) for t in U.elements)
    rep.check_all("rho_IJ is equivariant along G_J -> G_I", pairs, equi_ok)

    def fibre_ok(p):
        I, J = p
        U = build_ui(atlas, J)
        rest = difference(J, I)
        for t in U.elements:
            orbit = {U.act(G.embed(g, rest, J), t) for g in G.elements(rest)}
            fibre = {u for u in U.elements if atlas.forget(I, J, u) == atlas.forget(I, J, t)}
            if orbit != fibre:
                return False
        return True
    rep.check_all("fibres of rho_IJ are G_(J - I)-orbits", pairs, fibre_ok)
    return rep


# ---------------------------------------------------------------------------
# cover reduction on a proximity space

class ProximitySpace:
    """Finite points with a reflexive symmetric adjacency; cl(A) = A u nbrs(A)."""

    def __init__(self, points, adjacency=()):
        self.points = tuple(sorted(points))
        nb = {p: {p} for p in self.points}
        for a, b in adjacency:
            if a not in nb or b not in nb:
                raise InputError("adjacency mentions an unknown point", (a, b))
            nb[a].add(b)
            nb[b].add(a)
        self.neighbours = {p: frozenset(v) for p, v in nb.items()}

    @classmethod
    def discrete(cls, points):
        return cls(points)

    def closure(self, A, times=1):
        out = frozenset(A)
        for _ in range(times):
            out = frozenset().union(*(self.neighbours[p] for p in out)) if out else out
        return out

    def interior(self, A, times=1):
        out = frozenset(A)
        for _ in range(times):
            out = frozenset(p for p in out if self.neighbours[p] <= out)
        return out


class CoverReduction:
    def __init__(self, space, S, F, C, shrunk, reduced, report):
        self.space = space
        self.S = S
        self.F = F
        self.C = C
        self.shrunk = shrunk
        self.sets = reduced
        self.report = report

    def __getitem__(self, I):
        return self.sets.get(tuple(I), frozenset())

    def nonempty(self):
        return {I: v for I, v in self.sets.items() if v}


def check_cover_reduction(space, S, F, C, reduced):
    idx = list(reduced)
    N = max((max(I) for I in idx), default=0)
    rep = Report("cover reduction")

    def inside(I):
        need = frozenset(space.points)
        for i in I:
            need &= F[i]
        return space.closure(reduced[I]) <= need
    rep.check_all("(i) cl(F'_I) inside F_I", idx, inside)
    sep = [(I, J) for I in idx for J in idx
           if I < J and not (is_subset(I, J) or is_subset(J, I))]
    rep.check_all("(ii) closures meet only for nested I, J", sep,
                  lambda p: not (space.closure(reduced[p[0]]) & space.closure(reduced[p[1]])))
    union = frozenset().union(*reduced.values()) if reduced else frozenset()
    missing = sorted(S - union)
    rep.add("(iii) S covered by the F'_I", not missing, missing[0] if missing else None)
    rep.check_all("(iv) F'_I misses C_j for j outside I",
                  [(I, j) for I in idx for j in range(1, N + 1) if j not in I],
                  lambda p: not (reduced[p[0]] & C.get(p[1], frozenset())))
    return rep


def cover_reduce(space, S, F, C=None):
    """Shrunken multi-intersections F'_I.

    F_i^0 is the largest set with cl^(2N)(F_i^0) inside F_i, namely the
    2N-fold interior; then G_i^k = cl^(2k-1)(F_i^0), F_i^k = cl^(2k)(F_i^0) and
    F'_I = (meet of G_i^|I| over I) minus the closures of F_j^|I| for j not in I.
    """
    F = {i: frozenset(v) for i, v in F.items()}
    C = {i: frozenset(v) for i, v in (C or {}).items()}
    S = frozenset(S)
    N = max(F, default=0)
    if sorted(F) != list(range(1, N + 1)):
        raise InputError("footprints must be indexed 1..N", sorted(F))
    union = frozenset().union(*F.values()) if F else frozenset()
    outside = sorted(S - union)
    if outside:
        raise InputError("S is not covered by the footprints", outside[0])
    for i, c in C.items():
        if not c <= F.get(i, frozenset()):
            raise InputError(f"C_{i} is not inside F_{i}", i)

    shrunk = {i: space.interior(F[i], 2 * N) for i in F}
    for i, c in C.items():
        lost = sorted(c - shrunk[i])
        if lost:
            raise NoAdmissibleShrinking(f"C_{i} does not fit inside any admissible F_{i}^0",
                                        {"chart": i, "point": lost[0]})
    cover0 = frozenset().union(*shrunk.values()) if shrunk else frozenset()
    lost = sorted(S - cover0)
    if lost:
        raise NoAdmissibleShrinking("no admissible shrinking still covers S",
                                    {"point": lost[0]})
    reduced = {}
    for I in nonempty_subsets(N):
        k = len(I)
        inner = frozenset(space.points)
        for i in I:
            inner &= space.closure(shrunk[i], 2 * k - 1)
        for j in F:
            if j not in I:
                inner -= space.closure(space.closure(shrunk[j], 2 * k))
        reduced[I] = inner
    rep = check_cover_reduction(space, S, F, C, reduced)
    if not rep.ok:
        bad = rep.failures()[0]
        raise NoAdmissibleShrinking(f"post-hoc check failed: {bad.name}", bad.witness)
    return CoverReduction(space, S, F, C, shrunk, reduced, rep)


def explicit_reduction(reduced, space=None, S=frozenset(), F=None, C=None):
    """Wrap a hand-chosen family {I: F'_I}, checking (i)-(iv) when F is known."""
    reduced = {tuple(I): frozenset(v) for I, v in reduced.items()}
    if space is None:
        pts = frozenset().union(*reduced.values()) if reduced else frozenset()
        if F:
            pts = pts.union(*F.values())
        space = ProximitySpace.discrete(pts)
    rep = None
    if F is not None:
        N = max(F, default=0)
        for I in nonempty_subsets(N):
            reduced.setdefault(I, frozenset())
        rep = check_cover_reduction(space, frozenset(S), F, C or {}, reduced)
        if not rep.ok:
            bad = rep.failures()[0]
            raise NoAdmissibleShrinking(f"explicit family fails: {bad.name}", bad.witness)
    return CoverReduction(space, frozenset(S), F, C or {}, None, reduced, rep)


def reduce_atlas(atlas, space=None, C=None):
    """Cover reduction of the footprints on |X| (discrete closure by default)."""
    space = space or ProximitySpace.discrete(atlas.realization.labels)
    return cover_reduce(space, atlas.solution_set, dict(atlas.footprints), C)


# ---------------------------------------------------------------------------
# V-data and the functor psi

class VData:
    """Etale data of type V built from an atlas, plus the provenance of labels."""

    def __init__(self, atlas, reduction, data, chart_of, label_of):
        self.atlas = atlas
        self.reduction = reduction
        self.data = data
        self.chart_of = chart_of
        self.label_of = label_of

    def tuple_of(self, obj):
        return self.chart_of[obj]


def build_v_data(atlas, reduction):
    idx = nonempty_subsets(atlas.N)
    G = atlas.G
    spaces, actions, overlaps, projections = {}, {}, {}, {}
    chart_of, label_of = {}, {}
    members = {}
    for I in idx:
        U = build_ui(atlas, I)
        keep = [t for t in U.elements if U.psi(t) in reduction[I]]
        members[I] = keep
        spaces[I] = [U.labels[t] for t in keep]
        for t in keep:
            chart_of[I, U.labels[t]] = t
            label_of[I, t] = U.labels[t]
        table = {}
        for i in I:
            for gi in atlas.chart(i).group.elements:
                g = G.embed((gi,), (i,), I)
                table[i, gi] = {U.labels[t]: U.labels[U.act(g, t)] for t in keep}
        actions[I] = table
    for I in idx:
        for J in idx:
            if I == J or not is_subset(I, J):
                continue
            both = reduction[I] & reduction[J]
            ys = [t for t in members[J] if atlas.psi_I(t) in both]
            overlaps[I, J] = [label_of[J, t] for t in ys]
            projections[I, J] = {label_of[J, t]: label_of[I, atlas.forget(I, J, t)] for t in ys}
    data = EtaleDataV([u.group for u in atlas.uniformizers], spaces, actions,
                      overlaps, projections)
    return VData(atlas, reduction, data, chart_of, label_of)


def check_v_footprints(vdata):
    """|psi_I| : V_I / G_I = F'_I and psi_J = psi_I o rho_IJ on Tilde V_IJ."""
    d, atlas = vdata.data, vdata.atlas
    rep = Report("footprint compatibility")

    def bij(I):
        seen = {}
        for x in d.space(I):
            orbit = frozenset(d.act(I, g, x) for g in d.G.elements(I))
            seen[orbit] = atlas.psi_I(vdata.chart_of[I, x])
        images = list(seen.values())
        return len(set(images)) == len(images) and set(images) == set(vdata.reduction[I])
    rep.check_all("V_I / G_I -> F'_I bijective", d.index_sets, bij)
    pairs = [(I, J) for I in d.index_sets for J in d.index_sets if I != J and is_subset(I, J)]
    rep.check_all("psi_J = psi_I o rho_IJ on Tilde V_IJ", pairs,
                  lambda p: all(atlas.psi_I(vdata.chart_of[p[1], y])
                                == atlas.psi_I(vdata.chart_of[p[0], d.rho(*p, y)])
                                for y in d.overlap(*p)))
    return rep


def restricted_ambient(vdata):
    """X|_V: the full subcategory on objects whose class lies in some F'_I."""
    atlas = vdata.atlas
    classes = frozenset().union(*vdata.reduction.sets.values()) if vdata.reduction.sets else frozenset()
    objs = [x for x in atlas.ambient.objects if atlas.class_of[x] in classes]
    return full_subcategory(atlas.ambient, objs)


class PsiResult:
    def __init__(self, functor, target, report, witnesses):
        self.functor = functor
        self.target = target
        self.report = report
        self.witnesses = witnesses


def _psi_on_bv(vdata, xv, target):
    atlas = vdata.atlas
    amb = atlas.ambient
    G = atlas.G

    def on_obj(obj):
        I, x = obj
        return vdata.chart_of[I, x][0]

    def on_mor(m):
        I, J, y, g = m
        t = vdata.chart_of[J, y]
        i1 = I[0]
        pos = J.index(i1)
        chart = atlas.chart(i1)
        g1 = G.restrict(g, I, (i1,))[0]
        y_pos = atlas.objects_of(t)[pos]
        lead = chart.gamma(g1, chart.act(chart.group.inv(g1), y_pos))
        if pos == 0:
            return lead
        return amb.compose(lead, amb.inverse(atlas.chain(t, 0, pos)))

    return Functor(BvCategory(xv), target, on_obj, on_mor, "psi on B_V")


def iteration_preimage(vdata, source, target_obj, m):
    """Solve for g in G_I with psi(I, K, y, g) = m, entry by entry.

    Returns the morphism of X_V or None when some step has no solution.
    """
    atlas = vdata.atlas
    amb = atlas.ambient
    I, x_label = source
    K, y_label = target_obj
    x = vdata.chart_of[I, x_label]
    y = vdata.chart_of[K, y_label]
    xs, ms = atlas.objects_of(x), atlas.morphisms_of(x)
    positions = [K.index(i) for i in I]
    entries = []
    prev = None
    for s, i in enumerate(I):
        chart = atlas.chart(i)
        if s == 0:
            want = amb.compose(m, atlas.chain(y, 0, positions[0]))
        else:
            step = atlas.chain(y, positions[s - 1], positions[s])
            want = amb.compose_chain(amb.inverse(ms[s - 1]), prev, step)
        try:
            g, base = chart.solve(want)
        except KeyError:
            return None
        if base != xs[s]:
            return None
        entries.append(g)
        prev = want
    return (I, K, y_label, tuple(entries))


def build_psi(xv, vdata, verify=True):
    """psi: X_V -> X|_V, built on B_V and extended; plus its certificates."""
    target = restricted_ambient(vdata)
    phi = _psi_on_bv(vdata, xv, target)
    psi = extend_functor_bv(phi, xv, verify=verify)
    psi.name = "psi"
    rep = Report("psi: X_V -> X|_V")
    if verify:
        rep.add("psi is a functor", True, note="verified exhaustively by the extension")
    rep.extend(check_equivalence(psi))

    amb = vdata.atlas.ambient
    witnesses = 0
    bad = None
    for src in xv.objects:
        for tgt in xv.objects:
            if not is_subset(src[0], tgt[0]):
                continue
            fx, fy = psi.obj(src), psi.obj(tgt)
            b_mors = [mm for mm in xv.hom(src, tgt)]
            ambient_mors = amb.hom(fx, fy)
            if len(b_mors) != len(ambient_mors):
                bad = (src, tgt, "size")
                break
            for m in ambient_mors:
                pre = iteration_preimage(vdata, src, tgt, m)
                witnesses += 1
                if pre is None or pre not in b_mors or psi.mor(pre) != m:
                    bad = (src, tgt, m)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("iteration bijections Mor_B(x, y) -> Mor_X(psi x, psi y)", bad is None, bad,
            note=f"{witnesses} preimages solved")

    G = xv.G
    eq_bad = None
    for (I, x) in xv.objects:
        i1 = I[0]
        chart = vdata.atlas.chart(i1)
        for g in G.elements():
            gx = xv.d.act(I, G.restrict(g, G.full_index, I), x)
            if psi.obj((I, gx)) != chart.act(G.restrict(g, G.full_index, (i1,))[0],
                                             psi.obj((I, x))):
                eq_bad = (I, x, g)
                break
        if eq_bad:
            break
    rep.add("psi on V_I is equivariant along G -> G_(i_1)", eq_bad is None, eq_bad)
    return PsiResult(psi, target, rep, witnesses)


def assert_psi(xv, vdata):
    res = build_psi(xv, vdata)
    if not res.report.ok:
        bad = res.report.failures()[0]
        raise EquivalenceFailure(bad.name, bad.witness)
    return res

"""Etale data of type V: chart groups, spaces V_J, overlaps and projections.

Index sets are sorted tuples; elements of ``V_J`` are string labels.  The
action of ``G_J`` on ``V_J`` is specified one factor ``G_i`` (i in J) at a
time; the validator checks that the factor actions commute.
"""

from itertools import product

from .algebra import ProductGroup, difference, is_nested, is_subset, nonempty_subsets
from .errors import InputError, InvalidEtaleData, NotNested
from .report import Report

CLOSURE_NOTE = "closure is the identity in the finite discrete model"


class EtaleDataV:
    def __init__(self, groups, spaces, actions=None, overlaps=None, projections=None):
        """
        groups       list of FiniteGroup, chart i at position i-1
        spaces       {J: iterable of labels}; missing J means V_J is empty
        actions      {J: {(i, g): {x: g*x}}}; missing entries act trivially
        overlaps     {(I, J): iterable of labels} for I a proper subset of J
        projections  {(I, J): {y: rho_IJ(y)}}
        """
        self.groups = tuple(groups)
        self.N = len(self.groups)
        self.G = ProductGroup(self.groups)
        self.index_sets = tuple(nonempty_subsets(self.N))
        known = set(self.index_sets)
        self.spaces = {}
        for J in self.index_sets:
            self.spaces[J] = tuple(sorted(spaces.get(J, ())))
        for J in spaces:
            if J not in known:
                raise InputError(f"index set {J} outside 1..{self.N}", J)
        self.factor_actions = {J: dict((actions or {}).get(J, {})) for J in self.index_sets}
        self.overlaps = {}
        self.projections = {}
        for (I, J), ys in (overlaps or {}).items():
            if I == J:
                continue
            if not is_subset(I, J) or I not in known or J not in known:
                raise InputError(f"overlap index pair {(I, J)} is not I in J", (I, J))
            self.overlaps[I, J] = tuple(sorted(ys))
            self.projections[I, J] = dict((projections or {}).get((I, J), {}))
        self._act = {}
        self._build_action_tables()
        self._over_sets = {k: frozenset(v) for k, v in self.overlaps.items()}
        self._space_sets = {J: frozenset(v) for J, v in self.spaces.items()}

    # ------------------------------------------------------------------
    def _factor(self, J, i, g, x):
        return self.factor_actions[J].get((i, g), {}).get(x, x)

    def _build_action_tables(self):
        for J in self.index_sets:
            table = {}
            for g in self.G.elements(J):
                row = {}
                for x in self.spaces[J]:
                    y = x
                    for i, gi in zip(J, g):
                        y = self._factor(J, i, gi, y)
                    row[x] = y
                table[g] = row
            self._act[J] = table

    def act(self, J, g, x):
        """``g * x`` for g in G_J and x in V_J."""
        return self._act[J][g][x]

    def act_sub(self, J, K, g, x):
        """Action on V_J of an element g of a subgroup G_K, K inside J."""
        return self._act[J][self.G.embed(g, K, J)][x]

    def space(self, J):
        return self.spaces.get(tuple(J), ())

    def in_space(self, J, x):
        return x in self._space_sets.get(tuple(J), frozenset())

    def overlap(self, I, J):
        """Tilde V_IJ as a sorted tuple; Tilde V_II = V_I."""
        if I == J:
            return self.spaces[J]
        return self.overlaps.get((I, J), ())

    def in_overlap(self, I, J, y):
        if I == J:
            return y in self._space_sets[J]
        return y in self._over_sets.get((I, J), frozenset())

    def rho(self, I, J, y):
        """rho_IJ(y); the identity when I == J."""
        if I == J:
            return y
        return self.projections[I, J][y]

    def image(self, I, J):
        """V_IJ := rho_IJ(Tilde V_IJ) inside V_I."""
        return tuple(sorted({self.rho(I, J, y) for y in self.overlap(I, J)}))

    def orbit(self, J, sub, x):
        """Orbit of x in V_J under the subgroup G_sub."""
        return tuple(sorted({self.act_sub(J, sub, g, x) for g in self.G.elements(sub)}))

    def objects(self):
        return tuple((J, x) for J in self.index_sets for x in self.spaces[J])

    def nonempty_index_sets(self):
        return tuple(J for J in self.index_sets if self.spaces[J])


# ---------------------------------------------------------------------------

def _pairs_in(index_sets):
    return [(I, J) for I in index_sets for J in index_sets if is_subset(I, J)]


def validate(d):
    """Exhaustive check of the axioms of etale data of type V."""
    rep = Report("etale data of type V")
    G = d.G
    idx = d.index_sets

    # action: permutations, commuting factors, action law
    def perm_ok(key):
        J, i, g = key
        images = [d._factor(J, i, g, x) for x in d.spaces[J]]
        return sorted(images) == list(d.spaces[J])
    keys = [(J, i, g) for J in idx for i in J for g in d.groups[i - 1].elements]
    rep.check_all("action: factor maps are permutations of V_J", keys, perm_ok)

    def commute_ok(key):
        J, i, a, j, b, x = key
        return d._factor(J, j, b, d._factor(J, i, a, x)) == d._factor(J, i, a, d._factor(J, j, b, x))
    ckeys = [(J, i, a, j, b, x) for J in idx for i in J for j in J if i < j
             for a in d.groups[i - 1].elements for b in d.groups[j - 1].elements
             for x in d.spaces[J]]
    rep.check_all("action: factor actions commute", ckeys, commute_ok)

    def law_ok(key):
        J, g, h, x = key
        return d.act(J, G.mul(J, h, g), x) == d.act(J, h, d.act(J, g, x))
    lkeys = [(J, g, h, x) for J in idx for g in G.elements(J) for h in G.elements(J)
             for x in d.spaces[J]]
    rep.check_all("action: (hg)*x = h*(g*x)", lkeys, law_ok)

    pairs = [(I, J) for I, J in _pairs_in(idx) if I != J]

    # well-formedness of overlaps and projections
    rep.check_all("overlaps lie in V_J", pairs,
                  lambda p: all(d.in_space(p[1], y) for y in d.overlap(*p)))
    rep.check_all("projections defined on overlaps with values in V_I", pairs,
                  lambda p: set(d.projections.get(p, {})) == set(d.overlap(*p))
                  and all(d.in_space(p[0], d.rho(p[0], p[1], y)) for y in d.overlap(*p)))
    if not rep.ok:
        return rep

    rep.add("identity: Tilde V_II = V_I and rho_II = id", True,
            note="enforced by the representation")

    rep.check_all("invariance: Tilde V_IJ is G_J-invariant",
                  [(I, J, g, y) for I, J in pairs for g in G.elements(J) for y in d.overlap(I, J)],
                  lambda k: d.in_overlap(k[0], k[1], d.act(k[1], k[2], k[3])))

    def free_ok(key):
        I, J, y = key
        rest = difference(J, I)
        fixed = [g for g in G.elements(rest) if d.act_sub(J, rest, g, y) == y]
        return len(fixed) == 1
    rep.check_all("freeness: G_(J-I) acts freely on Tilde V_IJ",
                  [(I, J, y) for I, J in pairs for y in d.overlap(I, J)], free_ok)

    def quotient_ok(pair):
        I, J = pair
        rest = difference(J, I)
        seen = {}
        for y in d.overlap(I, J):
            orbit = d.orbit(J, rest, y)
            if not all(d.in_overlap(I, J, z) for z in orbit):
                return False
            if len({d.rho(I, J, z) for z in orbit}) != 1:
                return False
            img = d.rho(I, J, y)
            if seen.setdefault(img, orbit) != orbit:
                return False
        return True
    rep.check_all("quotient-injection: rho_IJ factors through an injection of the orbit space",
                  pairs, quotient_ok)

    def sep1_ok(key):
        H, I, J = key
        return not (set(d.image(H, I)) & set(d.image(H, J)))
    s1 = [(H, I, J) for H in idx for I in idx for J in idx
          if I < J and is_subset(H, I) and is_subset(H, J) and not is_nested(I, J)]
    rep.check_all("separation-1: V_HI and V_HJ disjoint unless I, J nested", s1, sep1_ok,
                  note=CLOSURE_NOTE)

    def sep2_ok(key):
        H, I, J = key
        return not (set(d.overlap(I, J)) & set(d.overlap(H, J)))
    s2 = [(H, I, J) for H in idx for I in idx for J in idx
          if H < I and is_subset(H, J) and is_subset(I, J) and not is_nested(H, I)]
    witness = None
    for key in s2:
        common = sorted(set(d.overlap(key[1], key[2])) & set(d.overlap(key[0], key[2])))
        if common:
            witness = {"H": key[0], "I": key[1], "J": key[2], "element": common[0]}
            break
    rep.add("separation-2: Tilde V_IJ and Tilde V_HJ disjoint unless H, I nested",
            witness is None, witness, note=CLOSURE_NOTE)

    def comp_ok(key):
        H, I, J = key
        left = set(d.overlap(H, J)) & set(d.overlap(I, J))
        target = set(d.overlap(H, I)) & set(d.image(I, J))
        right = {y for y in d.overlap(I, J) if d.rho(I, J, y) in target}
        if left != right:
            return False
        return all(d.rho(H, J, y) == d.rho(H, I, d.rho(I, J, y)) for y in left)
    triples = [(H, I, J) for H in idx for I in idx for J in idx
               if is_subset(H, I) and is_subset(I, J) and len({H, I, J}) == 3]
    rep.check_all("composition: Tilde V_HJ meets Tilde V_IJ along rho_IJ^-1(Tilde V_HI), "
                  "rho_HJ = rho_HI o rho_IJ", triples, comp_ok)

    def equi_ok(key):
        I, J, g, y = key
        gy = d.act(J, g, y)
        if not d.in_overlap(I, J, gy):
            return False
        return d.rho(I, J, gy) == d.act(I, G.restrict(g, J, I), d.rho(I, J, y))
    rep.check_all("equivariance: rho_IJ(g*y) = g|_I * rho_IJ(y)",
                  [(I, J, g, y) for I, J in pairs for g in G.elements(J) for y in d.overlap(I, J)],
                  equi_ok)

    rep.add("closed graph", True, note=CLOSURE_NOTE)

    empty = [(I, J) for I, J in pairs if d.space(I) and d.space(J) and not d.overlap(I, J)]
    if empty:
        rep.add("empty overlaps", True, empty,
                note="Tilde V_IJ empty although V_I and V_J are not: "
                     + "; ".join(f"({','.join(map(str, I))} | {','.join(map(str, J))})"
                                 for I, J in empty))
    return rep


def assert_valid(d):
    rep = validate(d)
    if not rep.ok:
        bad = rep.failures()[0]
        raise InvalidEtaleData(bad.name, bad.witness)
    return rep


def h_min(d, J, y):
    """The minimal H with y in Tilde V_HJ."""
    cands = [H for H in d.index_sets if is_subset(H, J) and d.in_overlap(H, J, y)]
    for a in cands:
        for b in cands:
            if not is_nested(a, b):
                raise NotNested("index sets containing y are not a chain", (a, b))
    return min(cands, key=len)


def full_orbit_check(d):
    """For valid data: h_min is G_J-invariant."""
    bad = None
    for J in d.index_sets:
        for y, g in product(d.spaces[J], d.G.elements(J)):
            if h_min(d, J, d.act(J, g, y)) != h_min(d, J, y):
                bad = (J, y, g)
    return bad

"""Seeded generators of valid random inputs for the property suites.

Random etale data is assembled from "points".  A point carries a chain of
nested index sets H = C_0 < C_1 < ... and a subgroup K of G_H; in each V_C it
contributes the coset space G_C / K, and rho_(C_a C_b) sends gK to g|_(C_a) K.
Every axiom then holds by construction, which the validator re-checks.
"""

import random
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .algebra import (FiniteGroup, ProductGroup, cyclic_group, generated_subgroup, klein_group,
                      nonempty_subsets, subgroups, symmetric_group3, trivial_group)
from .ambient import AmbientAtlas, ProximitySpace, build_ui, explicit_reduction
from .bundle import GroupoidBundle, Section
from .etale import EtaleDataV
from .groupoid import Preuniformizer, TableCategory, realize
from .linalg import QMatrix, vec_add, vec_scale, zero_vec
from .stabilization import LocalStabilization

GROUP_MAKERS = (trivial_group, lambda: cyclic_group(2), lambda: cyclic_group(3),
                lambda: cyclic_group(4), klein_group)


@lru_cache(maxsize=None)
def _subgroups_of(groups, H):
    return subgroups(ProductGroup(groups).as_group(H))


def _random_chain(rng, n):
    """A random chain of nested nonempty index sets inside 1..n."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    prefixes = [tuple(sorted(order[:k])) for k in range(1, n + 1)]
    start = rng.randrange(len(prefixes)) if rng.random() < 0.5 else 0
    return [p for k, p in enumerate(prefixes) if k >= start and (k == start or rng.random() < 0.7)]


def _cosets(G, C, K):
    """Left cosets gK of K (a subgroup of G_H, H inside C) in G_C, in canonical order."""
    H_embed = [G.embed(k, K[0], C) for k in K[1]]
    seen, reps = set(), []
    for g in G.elements(C):
        coset = frozenset(G.mul(C, g, k) for k in H_embed)
        if coset not in seen:
            seen.add(coset)
            reps.append(coset)
    return reps


def random_etale(seed, max_charts=3, max_space=6, max_points=5):
    """Valid random etale data: N <= max_charts, |V_J| <= max_space, |G_i| <= 4."""
    rng = random.Random(seed)
    n = rng.choices(range(1, max_charts + 1), weights=range(1, max_charts + 1))[0]
    groups = tuple(rng.choice(GROUP_MAKERS)() for _ in range(n))
    G = ProductGroup(groups)
    spaces = {J: [] for J in nonempty_subsets(n)}
    actions = {J: {} for J in spaces}
    overlaps, projections = {}, {}
    coset_of = {}  # (J, label) -> coset, per point

    for p in range(rng.randint(1, max_points)):
        chain = _random_chain(rng, n)
        H = chain[0]
        sub = rng.choice(_subgroups_of(groups, H))
        K = (H, sub)
        blocks = {C: _cosets(G, C, K) for C in chain}
        if any(len(spaces[C]) + len(b) > max_space for C, b in blocks.items()):
            continue
        labels = {}
        for C, cos in blocks.items():
            for k, c in enumerate(cos):
                lab = f"p{p}.{k}" if len(chain) == 1 else f"p{p}c{''.join(map(str, C))}.{k}"
                labels[C, c] = lab
                spaces[C].append(lab)
                coset_of[C, lab] = c
        for C, cos in blocks.items():
            index = {c: labels[C, c] for c in cos}
            member = {}
            for c in cos:
                for g in c:
                    member[g] = c
            for i in C:
                for gi in groups[i - 1].elements:
                    ge = G.embed((gi,), (i,), C)
                    table = actions[C].setdefault((i, gi), {})
                    for c in cos:
                        rep = next(iter(c))
                        table[index[c]] = index[member[G.mul(C, ge, rep)]]
        for a, I in enumerate(chain):
            for J in chain[a + 1:]:
                ov = overlaps.setdefault((I, J), [])
                proj = projections.setdefault((I, J), {})
                lower = {}
                for c in blocks[I]:
                    for g in c:
                        lower[g] = labels[I, c]
                for c in blocks[J]:
                    lab = labels[J, c]
                    ov.append(lab)
                    proj[lab] = lower[G.restrict(next(iter(c)), J, I)]
    return EtaleDataV(groups, spaces, actions, overlaps, projections)


def etale_corpus(count=200, base_seed=0):
    return [(base_seed + k, random_etale(base_seed + k)) for k in range(count)]



# ---------------------------------------------------------------------------
# ambient atlases on thickened translation groupoids

AMBIENT_GROUPS = (lambda: cyclic_group(2), lambda: cyclic_group(3), lambda: cyclic_group(4),
                  klein_group, symmetric_group3)


def thickened_translation(group, points, act, copies):
    """Objects "x.c"; a morphism (g, a, b) goes from a = x.c to b = (g x).c'."""
    objs = [f"{x}.{c}" for x in points for c in range(copies)]
    base = {o: o.rsplit(".", 1)[0] for o in objs}
    ends, ids, comp, inv = {}, {}, {}, {}
    by_base = {}
    for o in objs:
        by_base.setdefault(base[o], []).append(o)
    for a in objs:
        ids[a] = (group.identity, a, a)
        for g in group.elements:
            for b in by_base[act(g, base[a])]:
                ends[g, a, b] = (a, b)
                inv[g, a, b] = (group.inv(g), b, a)
    for (g, a, b) in ends:
        for h in group.elements:
            for c in by_base[act(h, base[b])]:
                comp[(g, a, b), (h, b, c)] = (group.mul(h, g), a, c)
    cat = TableCategory(objs, ends, ids, comp, inv)
    cat.group = group
    return cat


def _coset_space(group, sub):
    """Points of group/sub as labels "k" with the left action table."""
    sub = set(sub)
    cosets = []
    for g in group.elements:
        c = frozenset(group.mul(g, k) for k in sub)
        if c not in cosets:
            cosets.append(c)
    index = {}
    for k, c in enumerate(cosets):
        for g in c:
            index[g] = k
    reps = [next(iter(sorted(c, key=group.elements.index))) for c in cosets]
    act = {(h, k): index[group.mul(h, reps[k])] for h in group.elements for k in range(len(cosets))}
    stab = [frozenset(h for h in group.elements if act[h, k] == k) for k in range(len(cosets))]
    return len(cosets), act, stab


def random_atlas(seed, max_charts=3, max_orbits=3, copies=2, max_tuples=36):
    """A valid ambient atlas with random group, orbits, charts and solution set."""
    rng = random.Random(seed)
    while True:
        group = rng.choice(AMBIENT_GROUPS)()
        subs = subgroups(group)
        points, act, stab = [], {}, {}
        for o in range(rng.randint(1, max_orbits)):
            n_pts, table, stabs = _coset_space(group, rng.choice(subs))
            for k in range(n_pts):
                p = f"o{o}p{k}"
                points.append(p)
                stab[p] = stabs[k]
                for h in group.elements:
                    act[h, p] = f"o{o}p{table[h, k]}"
        orbits = sorted({frozenset(act[h, p] for h in group.elements) for p in points},
                        key=sorted)
        gpd = thickened_translation(group, points, lambda h, p: act[h, p], copies)
        charts = []
        for i in range(1, rng.choices(range(1, max_charts + 1), weights=(1, 3, 3)[:max_charts])[0] + 1):
            anchor = rng.choice(points)
            sub_i = rng.choice([h for h in subs if stab[anchor] <= set(h)])
            sub_set = set(sub_i)
            domain = []
            for orb in orbits:
                ok = [p for p in sorted(orb) if stab[p] <= sub_set]
                if not ok or (anchor not in orb and rng.random() < 0.3):
                    continue
                x = rng.choice(ok)
                c = rng.randrange(copies)
                domain.extend(f"{act[h, x]}.{c}" for h in sub_i)
            domain = sorted(set(domain))
            if not domain:
                continue
            chart_group = FiniteGroup.from_function(sub_i, group.mul, name=f"H{i}")
            charts.append(Preuniformizer(
                gpd, domain, chart_group,
                lambda g, y, group=group, act=act: (
                    g, y, f"{act[g, y.rsplit('.', 1)[0]]}.{y.rsplit('.', 1)[1]}"),
                len(charts) + 1))
        if not charts:
            continue
        atlas = AmbientAtlas(gpd, charts)
        if sum(len(build_ui(atlas, I).elements) for I in nonempty_subsets(atlas.N)) > max_tuples:
            continue
        covered = sorted(frozenset().union(*atlas.footprints.values()))
        S = [c for c in covered if rng.random() < 0.7] or covered[:1]
        atlas.solution_set = frozenset(S)
        return atlas


# ---------------------------------------------------------------------------
# proximity covers

def random_cover(seed, max_points=12, max_charts=3):
    """(space, S, F, C) on a random graph; the erosion search may fail."""
    rng = random.Random(seed)
    n = rng.randint(4, max_points)
    pts = list(range(n))
    edges = [(a, a + 1) for a in range(n - 1) if rng.random() < 0.5]
    edges += [(a, b) for a in pts for b in pts if a + 1 < b and rng.random() < 0.04]
    space = ProximitySpace(pts, edges)
    N = rng.randint(1, max_charts)
    F = {}
    for i in range(1, N + 1):
        lo = rng.randrange(n)
        hi = rng.randint(lo, min(n - 1, lo + rng.randint(1, n)))
        F[i] = frozenset(p for p in pts if lo <= p <= hi or rng.random() < 0.1)
    union = sorted(frozenset().union(*F.values()))
    S = frozenset(p for p in union if rng.random() < 0.5)
    C = {}
    if rng.random() < 0.5:
        for i in F:
            core = sorted(space.interior(F[i], 2 * N))
            C[i] = frozenset(p for p in core if rng.random() < 0.5)
    return space, S, F, C


def random_reduction(atlas, seed):
    """A discrete cover reduction placing each class of S on a random chain of I's."""
    rng = random.Random(seed)
    sets = {}
    for c in sorted(atlas.solution_set):
        charts = [i for i in range(1, atlas.N + 1) if c in atlas.footprints[i]]
        chain = _random_chain(rng, len(charts))
        if len(chain) == 1 and len(chain[0]) < len(charts) and rng.random() < 0.7:
            chain.append(tuple(range(1, len(charts) + 1)))
        for idx in chain:
            I = tuple(sorted(charts[k - 1] for k in idx))
            sets.setdefault(I, set()).add(c)
    return explicit_reduction(sets, S=atlas.solution_set, F=dict(atlas.footprints))


# ---------------------------------------------------------------------------
# bundles, sections and local stabilizations over random atlases

SIGNED_2x2 = tuple(QMatrix.from_rows(r) for r in (
    [[1, 0], [0, 1]], [[-1, 0], [0, 1]], [[1, 0], [0, -1]], [[-1, 0], [0, -1]],
    [[0, 1], [1, 0]], [[0, -1], [1, 0]], [[0, 1], [-1, 0]], [[0, -1], [-1, 0]]))


@lru_cache(maxsize=None)
def _representations(group, rank):
    """All homomorphisms group -> signed permutation matrices of the given rank (1 or 2)."""
    targets = (QMatrix.from_rows([[1]]), QMatrix.from_rows([[-1]])) if rank == 1 else SIGNED_2x2
    n = len(targets)
    prod = [[targets.index(a @ b) for b in targets] for a in targets]
    elems = group.elements
    gens, reached = [], {group.identity}
    for g in elems:
        if g not in reached:
            gens.append(g)
            reached = set(generated_subgroup(group, gens))
    out = []
    for images in product(range(n), repeat=len(gens)):
        phi = {group.identity: 0}
        pending = [group.identity]
        ok = True
        while pending and ok:
            g = pending.pop()
            for gen, img in zip(gens, images):
                h = group.mul(gen, g)
                val = prod[img][phi[g]]
                if h not in phi:
                    phi[h] = val
                    pending.append(h)
                elif phi[h] != val:
                    ok = False
                    break
        if ok and all(phi[group.mul(a, b)] == prod[phi[a]][phi[b]] for a in elems for b in elems):
            out.append({g: targets[phi[g]] for g in elems})
    return out


def random_bundle(atlas, seed):
    """mu(g, a, b) = rep(g) for a random signed-permutation representation of rank 1 or 2."""
    rng = random.Random(seed)
    amb = atlas.ambient
    group = amb.group
    rank = rng.choice((1, 1, 2))
    rep = rng.choice(_representations(group, rank))
    return GroupoidBundle(amb, lambda x: rank, lambda m: rep[m[0]], f"random rank-{rank} bundle")


def random_section(bundle, seed, zero_prob=0.5):
    """A compatible section: isotropy-averaged values transported along each class."""
    rng = random.Random(seed)
    base = bundle.base
    real = realize(base)
    values = {}
    for cls in real.classes:
        root = cls[0]
        n = bundle.dim(root)
        if rng.random() < zero_prob:
            w = zero_vec(n)
        else:
            w = tuple(Fraction(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(n))
        loops = base.hom(root, root)
        avg = zero_vec(n)
        for g in loops:
            avg = vec_add(avg, bundle.act(g, w))
        avg = vec_scale(Fraction(1, len(loops)), avg)
        for y in cls:
            values[y] = bundle.act(base.hom(root, y)[0], avg)
    return Section(bundle, values, "random section")


def random_local_stabs(atlas, bundle, seed, control_set=None):
    """E_i = Q[G_i] with g*(h) = gh and tau_i(y, h) = mu(Gamma_i(h, h^-1 y)) s_i(h^-1 y).

    s_i is a random vector field on U_i with l1 norm at most 1, zero outside
    the control set, so the required conditions hold by construction.
    """
    rng = random.Random(seed)
    control = set(bundle.base.objects if control_set is None else control_set)
    out = {}
    for i in range(1, atlas.N + 1):
        if rng.random() < 0.2:
            continue
        chart = atlas.chart(i)
        grp = chart.group
        elems = list(grp.elements)
        field = {}
        for y in chart.domain:
            n = bundle.dim(y)
            if y not in control or rng.random() < 0.3:
                field[y] = zero_vec(n)
                continue
            v = [Fraction(rng.randint(-2, 2)) for _ in range(n)]
            total = sum(abs(c) for c in v)
            field[y] = tuple(c / total for c in v) if total > 1 else tuple(v)
        values = {}
        for k, h in enumerate(elems):
            hi = grp.inv(h)
            for y in chart.domain:
                base_pt = chart.act(hi, y)
                values[y, k] = bundle.act(chart.gamma(h, base_pt), field[base_pt])
        action = {}
        for g in elems:
            cols = []
            for h in elems:
                col = [0] * len(elems)
                col[elems.index(grp.mul(g, h))] = 1
                cols.append(col)
            action[g] = QMatrix.from_columns(cols, len(elems))
        out[i] = LocalStabilization(i, chart, len(elems), values, action)
    return out

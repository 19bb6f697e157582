"""Named fixtures.

FIX-TRIV   one chart, trivial group, V_1 = {a}
FIX-A      two charts, G_1 = Z/2, G_2 trivial, the running example
FIX-Z2F    one chart, Z/2 acting trivially on V_1 = {a}
FIX-Z2     one chart, Z/2 swapping V_1 = {a, b}
FIX-AMB    Z/2 translation groupoid on {x1, x2} with two identical charts
FIX-A-AMB  an ambient atlas whose reduction reproduces FIX-A
FIX-COVER  a six-point proximity space with three footprints
"""

from .algebra import trivial_group, z2
from .ambient import AmbientAtlas, ProximitySpace
from .etale import EtaleDataV
from .groupoid import PairGroupoid, Preuniformizer, TableCategory, translation_groupoid

SWAP = {"a": "b", "b": "a"}


def fix_triv():
    return EtaleDataV([trivial_group()], {(1,): ["a"]})


def fix_a(tilde_2_12=("w", "x")):
    """The running two-chart example.

    V_1 = {a, b} swapped by s, V_2 = {p}, V_12 = {u, v, w, x} with s swapping
    u<->v and w<->x; Tilde V_1,12 = {u, v} over a, b and Tilde V_2,12 = {w, x}
    over p.  ``tilde_2_12`` lets tests perturb the second overlap.
    """
    return EtaleDataV(
        [z2(), trivial_group()],
        {(1,): ["a", "b"], (2,): ["p"], (1, 2): ["u", "v", "w", "x"]},
        actions={
            (1,): {(1, "s"): SWAP},
            (1, 2): {(1, "s"): {"u": "v", "v": "u", "w": "x", "x": "w"}},
        },
        overlaps={((1,), (1, 2)): ["u", "v"], ((2,), (1, 2)): list(tilde_2_12)},
        projections={((1,), (1, 2)): {"u": "a", "v": "b"},
                     ((2,), (1, 2)): {y: "p" for y in tilde_2_12}},
    )


def fix_z2f():
    return EtaleDataV([z2()], {(1,): ["a"]})


def fix_z2():
    return EtaleDataV([z2()], {(1,): ["a", "b"]}, actions={(1,): {(1, "s"): SWAP}})


def z2_translation():
    """Z/2 swapping {a, b}: two objects, four morphisms."""
    g = z2()
    return translation_groupoid(g, ["a", "b"], lambda h, y: SWAP[y] if h == "s" else y)


def broken_associativity():
    """One object, two morphisms {e, f} with a table that is not associative."""
    # f o f = e is fine, but declare e o f = e to break the unit/associativity
    ends = {"e": ("o", "o"), "f": ("o", "o")}
    comp = {("e", "e"): "e", ("e", "f"): "f", ("f", "e"): "f", ("f", "f"): "f"}
    comp[("f", "f")] = "e"
    comp[("e", "f")] = "e"
    return TableCategory(["o"], ends, {"o": "e"}, comp)


def remark_four_objects():
    """Four objects, morphisms x1->x3, x1->x4, x2->x3, x2->x4: no class minimum."""
    ends = {"id1": ("x1", "x1"), "id2": ("x2", "x2"), "id3": ("x3", "x3"),
            "id4": ("x4", "x4"), "m13": ("x1", "x3"), "m14": ("x1", "x4"),
            "m23": ("x2", "x3"), "m24": ("x2", "x4")}
    ids = {f"x{i}": f"id{i}" for i in range(1, 5)}
    comp = {}
    for m, (s, t) in ends.items():
        comp[ids[s], m] = m
        comp[m, ids[t]] = m
    return TableCategory(list(ids), ends, ids, comp)


def two_object_poset():
    ends = {"ia": ("a", "a"), "ib": ("b", "b"), "m": ("a", "b")}
    comp = {("ia", "ia"): "ia", ("ib", "ib"): "ib", ("ia", "m"): "m", ("m", "ib"): "m"}
    return TableCategory(["a", "b"], ends, {"a": "ia", "b": "ib"}, comp)


def identity_only(objects):
    ends = {f"id_{x}": (x, x) for x in objects}
    ids = {x: f"id_{x}" for x in objects}
    comp = {(ids[x], ids[x]): ids[x] for x in objects}
    return TableCategory(objects, ends, ids, comp)


# ---------------------------------------------------------------------------
# ambient atlases

def translation_chart(gpd, domain, group, index):
    """Uniformizer of a translation groupoid: Gamma(g, y) is the morphism (g, y)."""
    return Preuniformizer(gpd, domain, group, lambda g, y: (g, y), index)


def fix_amb():
    """Z/2 swapping {x1, x2}; two identical charts covering the single class."""
    g = z2()
    gpd = translation_groupoid(g, ["x1", "x2"],
                               lambda h, y: {"x1": "x2", "x2": "x1"}[y] if h == "s" else y)
    charts = [translation_chart(gpd, ["x1", "x2"], g, i) for i in (1, 2)]
    return AmbientAtlas(gpd, charts)


FIX_A_AMB_CLASSES = {"A": "P", "B": "P", "E": "P", "C": "Q", "D": "Q", "F": "Q"}


def fix_a_amb():
    """Two classes P = {A, B, E}, Q = {C, D, F}, one morphism per pair of objects.

    Chart 1 is U_1 = {A, B, C, D} with Z/2 swapping A<->B and C<->D; chart 2 is
    U_2 = {E, F} with the trivial group.  The reduction F'_1 = {P},
    F'_2 = {Q}, F'_12 = {P, Q} reproduces FIX-A.  Classes are labelled by
    their smallest member, so P is "A" and Q is "C".
    """
    gpd = PairGroupoid(FIX_A_AMB_CLASSES, FIX_A_AMB_CLASSES)
    swap = {"A": "B", "B": "A", "C": "D", "D": "C"}
    g1, g2 = z2(), trivial_group()
    u1 = Preuniformizer(gpd, ["A", "B", "C", "D"], g1,
                        lambda g, y: (y, swap[y] if g == "s" else y), 1)
    u2 = Preuniformizer(gpd, ["E", "F"], g2, lambda g, y: (y, y), 2)
    return AmbientAtlas(gpd, [u1, u2])


FIX_A_AMB_REDUCTION = {(1,): {"A"}, (2,): {"C"}, (1, 2): {"A", "C"}}


def fix_cover():
    """Six points with the identity closure and three footprints."""
    space = ProximitySpace.discrete(range(1, 7))
    S = {2, 3, 5}
    F = {1: {1, 2, 3}, 2: {3, 4, 5}, 3: {5, 6}}
    return space, S, F


FIX_COVER_EXPECTED = {(1,): {1, 2}, (2,): {4}, (3,): {6}, (1, 2): {3}, (2, 3): {5},
                      (1, 3): set(), (1, 2, 3): set()}

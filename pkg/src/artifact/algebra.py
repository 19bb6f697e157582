"""Finite groups, product groups over index sets, and index-set helpers.

Group elements are opaque hashable labels; the multiplication table is the
ground truth.  Index sets are sorted tuples of positive chart numbers.
"""

from itertools import combinations, product

from .errors import IndexNotContained, InvalidGroup


# ---------------------------------------------------------------------------
# index sets

def index_set(items):
    """Canonical sorted-tuple form of a set of chart indices."""
    return tuple(sorted(set(int(i) for i in items)))


def is_subset(small, big):
    return set(small) <= set(big)


def is_nested(a, b):
    return is_subset(a, b) or is_subset(b, a)


def meet_join(a, b):
    """Return ``(nested, meet, join)``; meet/join are empty when not nested."""
    if is_subset(a, b):
        return True, tuple(a), tuple(b)
    if is_subset(b, a):
        return True, tuple(b), tuple(a)
    return False, (), ()


def difference(a, b):
    bs = set(b)
    return tuple(i for i in a if i not in bs)


def nonempty_subsets(n):
    """All nonempty subsets of {1..n}, ordered by size then lexicographically."""
    out = []
    for k in range(1, n + 1):
        out.extend(combinations(range(1, n + 1), k))
    return out


def format_index(idx):
    return ",".join(str(i) for i in idx)


def parse_index(text):
    text = text.strip()
    if not text:
        return ()
    return index_set(int(t) for t in text.split(","))


# ---------------------------------------------------------------------------
# finite groups

class FiniteGroup:
    """A finite group given by its multiplication table."""

    def __init__(self, elements, table, name=None):
        self.elements = tuple(elements)
        self.name = name
        n = len(self.elements)
        if n == 0:
            raise InvalidGroup("a group needs at least one element")
        if len(set(self.elements)) != n:
            raise InvalidGroup("duplicate element labels", self.elements)
        self._pos = {g: k for k, g in enumerate(self.elements)}
        if len(table) != n or any(len(row) != n for row in table):
            raise InvalidGroup("multiplication table must be n x n")
        self._table = tuple(tuple(int(v) for v in row) for row in table)
        if any(not 0 <= v < n for row in self._table for v in row):
            raise InvalidGroup("table entry out of range")
        ids = [e for e in range(n)
               if all(self._table[e][k] == k and self._table[k][e] == k for k in range(n))]
        if len(ids) != 1:
            raise InvalidGroup("no two-sided identity")
        self._id = ids[0]
        inv = []
        for a in range(n):
            cands = [b for b in range(n) if self._table[a][b] == self._id]
            if len(cands) != 1 or self._table[cands[0]][a] != self._id:
                raise InvalidGroup("element without inverse", self.elements[a])
            inv.append(cands[0])
        self._inv = tuple(inv)
        for a, b, c in product(range(n), repeat=3):
            t = self._table
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise InvalidGroup("associativity fails",
                                   (self.elements[a], self.elements[b], self.elements[c]))

    @classmethod
    def from_function(cls, elements, mul, name=None):
        elements = tuple(elements)
        pos = {g: k for k, g in enumerate(elements)}
        table = [[pos[mul(a, b)] for b in elements] for a in elements]
        return cls(elements, table, name)

    @property
    def identity(self):
        return self.elements[self._id]

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g):
        return g in self._pos

    def mul(self, a, b):
        return self.elements[self._table[self._pos[a]][self._pos[b]]]

    def inv(self, a):
        return self.elements[self._inv[self._pos[a]]]

    def table_indices(self):
        return [list(row) for row in self._table]

    def __eq__(self, other):
        return (isinstance(other, FiniteGroup) and self.elements == other.elements
                and self._table == other._table)

    def __hash__(self):
        return hash((self.elements, self._table))

    def __repr__(self):
        return f"FiniteGroup({self.name or self.order})"


def trivial_group():
    return FiniteGroup(["e"], [[0]], name="1")


def cyclic_group(n):
    labels = ["e"] + [f"r{k}" for k in range(1, n)]
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return FiniteGroup(labels, table, name=f"Z{n}")


def klein_group():
    labels = ["e", "a", "b", "c"]
    table = [[a ^ b for b in range(4)] for a in range(4)]
    return FiniteGroup(labels, table, name="V4")


def z2():
    """Z/2 with the generator labelled ``s`` (the swap)."""
    return FiniteGroup(["e", "s"], [[0, 1], [1, 0]], name="Z2")


def symmetric_group3():
    perms = [(0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)]
    labels = ["e", "t01", "t12", "t02", "c1", "c2"]
    names = dict(zip(perms, labels))
    by_label = dict(zip(labels, perms))

    def mul(a, b):
        p, q = by_label[a], by_label[b]
        return names[tuple(p[q[i]] for i in range(3))]

    return FiniteGroup.from_function(labels, mul, name="S3")


def subgroups(group):
    """Subgroups generated by at most two elements.

    For the groups of order at most six used here this is every subgroup.
    """
    elems = group.elements
    found = {generated_subgroup(group, ())}
    for a, b in combinations(elems, 2):
        found.add(generated_subgroup(group, (a, b)))
    for a in elems:
        found.add(generated_subgroup(group, (a,)))
    return sorted(found, key=lambda s: (len(s), s))


def generated_subgroup(group, gens):
    pos = {g: k for k, g in enumerate(group.elements)}
    current = {group.identity}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = group.mul(a, g)
                if b not in current:
                    current.add(b)
                    nxt.append(b)
        frontier = nxt
    return tuple(sorted(current, key=pos.__getitem__))


# ---------------------------------------------------------------------------
# product groups G_I

class ProductGroup:
    """The product of the chart groups ``G_1 x ... x G_N``.

    An element over the index set ``I`` is a tuple aligned with the sorted
    indices of ``I``; the full group is the one over ``(1..N)``.
    """

    def __init__(self, factors):
        self.factors = tuple(factors)
        self.n = len(self.factors)
        self.full_index = tuple(range(1, self.n + 1))
        self._cache = {}

    def factor(self, i):
        return self.factors[i - 1]

    def _check(self, idx):
        for i in idx:
            if not 1 <= i <= self.n:
                raise IndexNotContained(f"chart index {i} out of range", idx)

    def elements(self, idx=None):
        idx = self.full_index if idx is None else tuple(idx)
        hit = self._cache.get(idx)
        if hit is None:
            self._check(idx)
            hit = tuple(product(*(self.factor(i).elements for i in idx)))
            self._cache[idx] = hit
        return hit

    def order(self, idx=None):
        idx = self.full_index if idx is None else idx
        out = 1
        for i in idx:
            out *= self.factor(i).order
        return out

    def identity(self, idx=None):
        idx = self.full_index if idx is None else idx
        return tuple(self.factor(i).identity for i in idx)

    def mul(self, idx, a, b):
        return tuple(self.factor(i).mul(x, y) for i, x, y in zip(idx, a, b))

    def inv(self, idx, a):
        return tuple(self.factor(i).inv(x) for i, x in zip(idx, a))

    def restrict(self, g, source_idx, target_idx):
        """Project ``g`` over ``source_idx`` to ``target_idx``."""
        if not is_subset(target_idx, source_idx):
            raise IndexNotContained(f"{target_idx} is not contained in {source_idx}",
                                    (tuple(target_idx), tuple(source_idx)))
        where = {i: k for k, i in enumerate(source_idx)}
        return tuple(g[where[i]] for i in target_idx)

    def embed(self, g, source_idx, target_idx=None):
        """Extend ``g`` over ``source_idx`` by identities to ``target_idx``."""
        target_idx = self.full_index if target_idx is None else target_idx
        if not is_subset(source_idx, target_idx):
            raise IndexNotContained(f"{source_idx} is not contained in {target_idx}",
                                    (tuple(source_idx), tuple(target_idx)))
        where = {i: k for k, i in enumerate(source_idx)}
        return tuple(g[where[i]] if i in where else self.factor(i).identity
                     for i in target_idx)

    def as_group(self, idx=None):
        """The product over ``idx`` as a stand-alone FiniteGroup."""
        idx = self.full_index if idx is None else tuple(idx)
        elems = self.elements(idx)
        return FiniteGroup.from_function(elems, lambda a, b: self.mul(idx, a, b),
                                         name="G" + format_index(idx))


def restrict(group, g, source_idx, target_idx):
    """Module-level form of :meth:`ProductGroup.restrict`."""
    return group.restrict(g, source_idx, target_idx)

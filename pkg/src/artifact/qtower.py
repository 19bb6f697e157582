"""Towers of finite-dimensional rational vector spaces.

A tower is finitely presented: a prefix of explicit maps followed by one
square matrix repeated forever.  Inverse towers run downwards,
``W_{j+1} -> W_j``; direct towers run upwards, ``V_j -> V_{j+1}``.

For the periodic part everything reduces to the eventual image of the tail
matrix ``T``: the chain ``im T >= im T^2 >= ...`` settles by step ``dim``, and
``T`` restricted to that eventual image is invertible.  Coherent sequences
are therefore determined by their entry at the head of the tail.
"""

from dataclasses import dataclass

from .errors import InputError
from .linalg import QMatrix, span_dim
from .report import Report


def _check_chain(dims, prefix, tail, downward):
    if len(dims) != len(prefix) + 1:
        raise InputError("need one dimension per space in the prefix plus the tail space")
    for j, m in enumerate(prefix):
        lo, hi = dims[j], dims[j + 1]
        rows, cols = (lo, hi) if downward else (hi, lo)
        if (m.rows, m.cols) != (rows, cols):
            raise InputError(f"prefix map {j + 1} has shape {m.rows}x{m.cols}, "
                             f"expected {rows}x{cols}", j + 1)
    if tail.rows != tail.cols:
        raise InputError("tail map must be square")
    if tail.rows != dims[-1]:
        raise InputError("tail map does not act on the last space")


class QTower:
    """Inverse system ``W_1 <- W_2 <- ... <- W_n <- W_n <- ...``.

    ``prefix[j]`` maps ``W_{j+2} -> W_{j+1}`` (0-based list), so it is a
    ``dims[j] x dims[j+1]`` matrix; ``tail`` maps ``W_n -> W_n``.
    """

    def __init__(self, dims, prefix, tail):
        self.dims = tuple(int(d) for d in dims)
        self.prefix = tuple(prefix)
        self.tail = tail
        _check_chain(self.dims, self.prefix, tail, downward=True)

    @classmethod
    def constant(cls, tail):
        return cls([tail.rows], [], tail)

    @property
    def head(self):
        """Dimension of the repeated space."""
        return self.dims[-1]

    def map(self, j):
        """The map ``W_{j+1} -> W_j`` (1-based j)."""
        return self.prefix[j - 1] if j <= len(self.prefix) else self.tail

    def composite(self, j, k):
        """``W_k -> W_j`` for ``j <= k``."""
        out = QMatrix.identity(self.space_dim(k))
        for i in range(k - 1, j - 1, -1):
            out = self.map(i) @ out
        return out

    def space_dim(self, j):
        return self.dims[j - 1] if j <= len(self.dims) else self.head

    def __eq__(self, other):
        return (isinstance(other, QTower) and self.dims == other.dims
                and self.prefix == other.prefix and self.tail == other.tail)

    def __repr__(self):
        return f"QTower(dims={list(self.dims)}, tail={self.tail!r})"


class DirectQTower:
    """Direct system ``V_1 -> V_2 -> ... -> V_n -> V_n -> ...``.

    ``prefix[j]`` maps ``V_{j+1} -> V_{j+2}`` and is ``dims[j+1] x dims[j]``.
    """

    def __init__(self, dims, prefix, tail):
        self.dims = tuple(int(d) for d in dims)
        self.prefix = tuple(prefix)
        self.tail = tail
        _check_chain(self.dims, self.prefix, tail, downward=False)

    @classmethod
    def constant(cls, tail):
        return cls([tail.rows], [], tail)

    @property
    def head(self):
        return self.dims[-1]

    def __eq__(self, other):
        return (isinstance(other, DirectQTower) and self.dims == other.dims
                and self.prefix == other.prefix and self.tail == other.tail)

    def __repr__(self):
        return f"DirectQTower(dims={list(self.dims)}, tail={self.tail!r})"


def dualize(tower):
    """Transpose every map; inverse and direct towers swap roles."""
    prefix = [m.transpose() for m in tower.prefix]
    if isinstance(tower, DirectQTower):
        return QTower(tower.dims, prefix, tower.tail.transpose())
    if isinstance(tower, QTower):
        return DirectQTower(tower.dims, prefix, tower.tail.transpose())
    raise InputError(f"not a tower: {tower!r}")


def eventual_image(tail):
    """Basis of ``im T^n`` for ``n = dim``, where the image chain has settled."""
    n = tail.rows
    if n == 0:
        return []
    return tail.power(n).image()


def settling_index(tail):
    """Smallest ``k >= 1`` with ``rank T^k = rank T^(k+1)``."""
    k, power = 1, tail
    rank = power.rank()
    while True:
        nxt = power @ tail
        nrank = nxt.rank()
        if nrank == rank:
            return k
        k, power, rank = k + 1, nxt, nrank


@dataclass(frozen=True)
class LimResult:
    """``dim`` counts coherent sequences; bases are their entries at ``W_n`` and ``W_1``."""

    dim: int
    head_basis: tuple
    first_basis: tuple

    def as_dict(self):
        from .linalg import format_vec
        return {"dim": self.dim,
                "basis_at_first": [format_vec(v) for v in self.first_basis]}


def lim(tower):
    """Inverse limit, evaluated at the first space.

    A coherent sequence is fixed by its entry at the head ``W_n``, which must
    lie in the eventual image of the tail; earlier entries follow by applying
    the prefix maps.  ``first_basis`` spans the entries at ``W_1``; when the
    prefix is not injective on the eventual image it can be shorter than
    ``dim``.
    """
    head = tuple(eventual_image(tower.tail))
    down = tower.composite(1, len(tower.dims))
    first = tuple(QMatrix.from_columns([down.apply(v) for v in head], tower.dims[0]).image()) \
        if head else ()
    return LimResult(len(head), head, first)


@dataclass(frozen=True)
class Lim1Result:
    dim: int
    certificate: int
    image_ranks: tuple

    def as_dict(self):
        return {"dim": self.dim, "certificate": self.certificate,
                "image_ranks": [list(r) for r in self.image_ranks]}


def lim1(tower):
    """First derived limit, which vanishes for finite-dimensional towers.

    The certificate is the smallest ``k`` such that, at every level ``j``, the
    image of ``W_{j+m} -> W_j`` no longer shrinks once ``m >= k``.  Beyond the
    prefix every level behaves like the tail, so only the first ``n`` levels
    need inspection.  ``image_ranks[j-1]`` lists the ranks for ``m = 0, 1, ...``.
    """
    n = len(tower.dims)
    tail_k = settling_index(tower.tail) if tower.head else 1
    certificate = tail_k
    all_ranks = []
    for j in range(1, n + 1):
        horizon = n - j + tail_k
        ranks = [tower.composite(j, j + m).rank() for m in range(horizon + 1)]
        settled = next(m for m in range(len(ranks))
                       if all(r == ranks[m] for r in ranks[m:]))
        certificate = max(certificate, settled)
        all_ranks.append(tuple(ranks))
    return Lim1Result(0, certificate, tuple(all_ranks))


def colim(tower):
    """Dimension of the direct limit: the rank of ``S^dim`` for the tail ``S``."""
    if not isinstance(tower, DirectQTower):
        raise InputError("colim expects a direct tower")
    return len(eventual_image(tower.tail))


def check_dual_iso(tower):
    """Compare the inverse limit of the dual tower with the dual of the colimit."""
    rep = Report("dual tower isomorphism")
    dual = dualize(tower)
    lim_dual = lim(dual)
    c = colim(tower)
    rep.add("dim lim of dual = dim colim", lim_dual.dim == c, (lim_dual.dim, c))
    l1 = lim1(dual)
    rep.add("lim1 of dual vanishes", l1.dim == 0, l1.dim)
    bound = tower.head + len(tower.prefix)
    rep.add("settling certificate within dim plus prefix length",
            l1.certificate <= max(bound, 1), (l1.certificate, bound))
    head = list(lim_dual.head_basis)
    images = [dual.tail.apply(v) for v in head]
    rep.add("tail is invertible on its eventual image",
            span_dim(images, dual.head) == len(head)
            and span_dim(head + images, dual.head) == len(head), len(head))
    rep.add("dualize is an involution", dualize(dual) == tower)
    return rep

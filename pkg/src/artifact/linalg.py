"""Exact linear algebra over the rationals.

Matrices are immutable grids of :class:`fractions.Fraction`; vectors are
tuples of Fractions.  Elimination is plain Gauss-Jordan over exact rationals,
so no rounding ever occurs.
"""

from fractions import Fraction

from .errors import InputError, NoSolution


def q(value):
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {value!r}") from exc
    raise InputError(f"not a rational: {value!r} (floats are not accepted)")


def qvec(values):
    return tuple(q(v) for v in values)


def format_q(x):
    x = q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_vec(v):
    return [format_q(x) for x in v]


def zero_vec(n):
    return (Fraction(0),) * n


def vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vec_scale(c, a):
    return tuple(c * x for x in a)


def l1_norm(v):
    return sum((abs(x) for x in v), Fraction(0))


def max_norm(v):
    return max((abs(x) for x in v), default=Fraction(0))


class QMatrix:
    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries):
        entries = tuple(tuple(q(x) for x in row) for row in entries)
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise InputError(f"matrix shape mismatch: expected {rows}x{cols}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("QMatrix is immutable")

    # construction
    @classmethod
    def from_rows(cls, rows, cols=None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    @classmethod
    def from_columns(cls, columns, rows):
        columns = list(columns)
        return cls(rows, len(columns), [[columns[j][i] for j in range(len(columns))]
                                        for i in range(rows)])

    # arithmetic
    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            if self.cols != other.rows:
                raise InputError("matrix product shape mismatch")
            oc = other.columns()
            return QMatrix(self.rows, other.cols,
                           [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in oc]
                            for row in self.entries])
        return self.apply(other)

    def apply(self, v):
        if len(v) != self.cols:
            raise InputError("vector length does not match matrix")
        return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.entries)

    def __add__(self, other):
        return QMatrix(self.rows, self.cols,
                       [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def scale(self, c):
        c = q(c)
        return QMatrix(self.rows, self.cols, [[c * a for a in r] for r in self.entries])

    def transpose(self):
        return QMatrix(self.cols, self.rows, self.columns())

    def columns(self):
        return [tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)]

    def power(self, k):
        if self.rows != self.cols:
            raise InputError("power of a non-square matrix")
        out = QMatrix.identity(self.rows)
        for _ in range(k):
            out = out @ self
        return out

    def __eq__(self, other):
        return (isinstance(other, QMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(" ".join(format_q(x) for x in r) for r in self.entries)
        return f"QMatrix({self.rows}x{self.cols}: {body})"

    def to_json(self):
        return [[format_q(x) for x in r] for r in self.entries]

    def is_identity(self):
        return self.rows == self.cols and self == QMatrix.identity(self.rows)

    def is_signed_permutation(self):
        if self.rows != self.cols:
            return False
        for line in list(self.entries) + self.columns():
            nz = [x for x in line if x != 0]
            if len(nz) != 1 or abs(nz[0]) != 1:
                return False
        return True

    # elimination
    def rref(self):
        """Reduced row echelon form and the pivot columns."""
        m = [list(r) for r in self.entries]
        pivots = []
        r = 0
        for c in range(self.cols):
            p = next((i for i in range(r, self.rows) if m[i][c] != 0), None)
            if p is None:
                continue
            m[r], m[p] = m[p], m[r]
            lead = m[r][c]
            m[r] = [x / lead for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return QMatrix(self.rows, self.cols, m), tuple(pivots)

    def rank(self):
        return len(self.rref()[1])

    def kernel(self):
        """Basis of the null space, one vector per free column."""
        red, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for row, pc in enumerate(pivots):
                v[pc] = -red.entries[row][f]
            basis.append(tuple(v))
        return basis

    def image(self):
        """Basis of the column space: the pivot columns of the matrix."""
        _, pivots = self.rref()
        cols = self.columns()
        return [cols[c] for c in pivots]

    def solve(self, b):
        """One solution of ``A x = b``; raises NoSolution when b is not in the image."""
        b = qvec(b)
        if len(b) != self.rows:
            raise InputError("right-hand side has the wrong length")
        aug = QMatrix(self.rows, self.cols + 1,
                      [list(r) + [bi] for r, bi in zip(self.entries, b)])
        red, pivots = aug.rref()
        if self.cols in pivots:
            raise NoSolution("right-hand side is not in the image", b)
        x = [Fraction(0)] * self.cols
        for row, pc in enumerate(pivots):
            x[pc] = red.entries[row][self.cols]
        return tuple(x)

    def inverse(self):
        if self.rows != self.cols:
            raise NoSolution("non-square matrix has no inverse")
        n = self.rows
        aug = QMatrix(n, 2 * n, [list(r) + [1 if i == j else 0 for j in range(n)]
                                 for i, r in enumerate(self.entries)])
        red, pivots = aug.rref()
        if pivots[:n] != tuple(range(n)):
            raise NoSolution("matrix is singular", self)
        return QMatrix(n, n, [r[n:] for r in red.entries])


def qsolve(matrix, mode, b=None):
    """Kernel basis, image basis, or a solution of ``matrix @ x = b``."""
    if mode == "kernel":
        return matrix.kernel()
    if mode == "image":
        return matrix.image()
    if mode == "solve":
        return matrix.solve(b)
    raise InputError(f"unknown mode {mode!r}")


def span_dim(vectors, n):
    vectors = list(vectors)
    if not vectors:
        return 0
    return QMatrix.from_columns(vectors, n).rank()

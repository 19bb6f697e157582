from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from artifact.algebra import (
    ProductGroup, FiniteGroup, cyclic_group, difference, format_index, generated_subgroup,
    index_set, is_nested, is_subset, klein_group, meet_join, nonempty_subsets, parse_index,
    subgroups, symmetric_group3, trivial_group, z2,
)
from artifact.errors import IndexNotContained, InputError, InvalidGroup, NoSolution
from artifact.linalg import QMatrix, l1_norm, max_norm, q, qsolve, qvec, span_dim


def test_index_sets_are_sorted_tuples():
    assert index_set([3, 1, 1]) == (1, 3)
    assert parse_index(" 2,1 ") == (1, 2)
    assert parse_index("") == ()
    assert format_index((1, 2)) == "1,2"
    assert nonempty_subsets(3) == [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3)]


def test_meet_join_and_difference():
    assert meet_join((1,), (1, 2)) == (True, (1,), (1, 2))
    assert meet_join((1, 2), (2,)) == (True, (2,), (1, 2))
    assert meet_join((1,), (2,)) == (False, (), ())
    assert is_nested((2,), (1, 2)) and not is_nested((1,), (2, 3))
    assert is_subset((), (1,))
    assert difference((1, 2, 3), (2,)) == (1, 3)


@pytest.mark.parametrize("group, order", [
    (trivial_group(), 1), (z2(), 2), (cyclic_group(3), 3), (cyclic_group(4), 4),
    (klein_group(), 4), (symmetric_group3(), 6),
])
def test_builtin_groups(group, order):
    assert group.order == order
    e = group.identity
    for a in group:
        assert group.mul(a, group.inv(a)) == e
        assert group.mul(e, a) == a


def test_s3_is_not_abelian():
    g = symmetric_group3()
    assert any(g.mul(a, b) != g.mul(b, a) for a in g for b in g)
    assert len(subgroups(g)) == 6


def test_cyclic_subgroup_generation():
    g = cyclic_group(4)
    assert generated_subgroup(g, ("r2",)) == ("e", "r2")
    assert generated_subgroup(g, ("r1",)) == g.elements


@pytest.mark.parametrize("table, message", [
    ([[0, 1], [1, 1]], "inverse"),
    ([[0, 0], [0, 0]], "identity"),
    ([[0, 1], [1, 0], [0, 0]], "n x n"),
])
def test_invalid_tables_are_rejected(table, message):
    with pytest.raises(InvalidGroup, match=message):
        FiniteGroup(["e", "s"], table)


def test_product_group_restrict_and_embed():
    G = ProductGroup([z2(), cyclic_group(3)])
    assert G.order() == 6 and G.order((1,)) == 2
    g = ("s", "r1")
    assert G.restrict(g, (1, 2), (2,)) == ("r1",)
    assert G.embed(("r2",), (2,)) == ("e", "r2")
    assert G.mul((1, 2), g, g) == ("e", "r2")
    with pytest.raises(IndexNotContained):
        G.restrict(("s",), (1,), (1, 2))
    with pytest.raises(IndexNotContained):
        G.elements((3,))
    assert G.as_group().order == 6


def test_rationals_reject_floats_and_bools():
    assert q("3/6") == Fraction(1, 2)
    assert qvec([1, "-2/4"]) == (Fraction(1), Fraction(-1, 2))
    for bad in (0.5, True, "x", "1/0"):
        with pytest.raises(InputError):
            q(bad)


def test_kernel_of_rank_one_matrix():
    m = QMatrix.from_rows([[1, 2], [2, 4]])
    assert m.rank() == 1
    (v,) = m.kernel()
    assert v == (Fraction(-2), Fraction(1))
    assert m.apply(v) == (0, 0)


def test_solve_outside_image_raises():
    m = QMatrix.from_rows([[1, 0], [0, 0]])
    with pytest.raises(NoSolution):
        m.solve((0, 1))
    assert qsolve(m, "solve", (3, 0)) == (3, 0)


def test_inverse_and_powers():
    m = QMatrix.from_rows([[2, 1], [1, 1]])
    assert (m @ m.inverse()).is_identity()
    assert m.power(0).is_identity()
    assert m.power(3) == m @ m @ m
    with pytest.raises(NoSolution):
        QMatrix.from_rows([[1, 1], [1, 1]]).inverse()


def test_norms():
    v = qvec([1, "-3/2", 0])
    assert l1_norm(v) == Fraction(5, 2)
    assert max_norm(v) == Fraction(3, 2)
    assert max_norm(()) == 0


small_entries = st.integers(min_value=-3, max_value=3)


@st.composite
def matrices(draw, max_dim=4):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    rows = draw(st.lists(st.lists(small_entries, min_size=c, max_size=c), min_size=r, max_size=r))
    return QMatrix.from_rows(rows)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    kernel = m.kernel()
    assert m.rank() + len(kernel) == m.cols
    for v in kernel:
        assert not any(m.apply(v))
    assert span_dim(m.image(), m.rows) == m.rank()


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_solve_recovers_image_points(m, data):
    x = data.draw(st.lists(small_entries, min_size=m.cols, max_size=m.cols))
    b = m.apply(qvec(x))
    assert m.apply(m.solve(b)) == b


@settings(max_examples=40, deadline=None)
@given(matrices())
def test_transpose_preserves_rank(m):
    assert m.transpose().rank() == m.rank()
    assert m.transpose().transpose() == m

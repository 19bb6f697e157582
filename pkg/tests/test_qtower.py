from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from artifact.errors import InputError
from artifact.linalg import QMatrix
from artifact.qtower import (
    DirectQTower, QTower, check_dual_iso, colim, dualize, eventual_image, lim, lim1,
    settling_index,
)

IDENTITY = QMatrix.from_rows([[1, 0], [0, 1]])
NILPOTENT = QMatrix.from_rows([[0, 1], [0, 0]])
PROJECTOR = QMatrix.from_rows([[1, 0], [0, 0]])


@pytest.mark.parametrize("tail, expected", [(IDENTITY, 2), (NILPOTENT, 0), (PROJECTOR, 1)])
def test_named_tails(tail, expected):
    inverse = QTower.constant(tail)
    direct = DirectQTower.constant(tail)
    assert lim(inverse).dim == expected
    assert colim(direct) == expected
    assert lim1(inverse).dim == 0
    assert check_dual_iso(direct).ok


def test_settling_index():
    assert settling_index(IDENTITY) == 1
    assert settling_index(NILPOTENT) == 2
    shift = QMatrix.from_rows([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert settling_index(shift) == 3
    assert eventual_image(shift) == []


def test_lim_basis_through_prefix():
    # W_1 = Q <- W_2 = Q^2 by the first coordinate, then the projector forever
    tower = QTower([1, 2], [QMatrix.from_rows([[1, 0]])], PROJECTOR)
    res = lim(tower)
    assert res.dim == 1
    assert res.first_basis == ((Fraction(1),),)
    assert res.as_dict() == {"dim": 1, "basis_at_first": [["1"]]}


def test_prefix_can_kill_the_entry_at_first():
    tower = QTower([1, 2], [QMatrix.from_rows([[0, 1]])], PROJECTOR)
    res = lim(tower)
    assert res.dim == 1 and res.first_basis == ()


def test_lim1_certificate_with_prefix():
    tower = QTower([2, 2], [NILPOTENT], IDENTITY)
    res = lim1(tower)
    assert res.dim == 0
    assert res.image_ranks == ((2, 1, 1), (2, 2))
    assert res.certificate == 1


def test_composite_and_maps():
    tower = QTower([1, 2], [QMatrix.from_rows([[1, 1]])], NILPOTENT)
    assert tower.map(1) == QMatrix.from_rows([[1, 1]])
    assert tower.map(5) == NILPOTENT
    assert tower.composite(1, 3) == QMatrix.from_rows([[0, 1]])
    assert tower.space_dim(9) == 2


def test_shape_errors():
    with pytest.raises(InputError):
        QTower([1, 2], [QMatrix.from_rows([[1], [0]])], IDENTITY)
    with pytest.raises(InputError):
        QTower([2], [], QMatrix.from_rows([[1, 0]]))
    with pytest.raises(InputError):
        QTower([2, 2], [], IDENTITY)
    with pytest.raises(InputError):
        colim(QTower.constant(IDENTITY))


def test_dualize_swaps_kinds():
    direct = DirectQTower([1, 2], [QMatrix.from_rows([[1], [2]])], NILPOTENT)
    dual = dualize(direct)
    assert isinstance(dual, QTower)
    assert dual.prefix[0] == QMatrix.from_rows([[1, 2]])
    assert dualize(dual) == direct


entries = st.integers(min_value=-2, max_value=2)


@st.composite
def square(draw):
    n = draw(st.integers(1, 5))
    return QMatrix.from_rows(draw(st.lists(st.lists(entries, min_size=n, max_size=n),
                                           min_size=n, max_size=n)))


@settings(max_examples=80, deadline=None)
@given(square())
def test_dual_tower_identity(tail):
    direct = DirectQTower.constant(tail)
    dual = dualize(direct)
    assert lim(dual).dim == colim(direct)
    res = lim1(dual)
    assert res.dim == 0 and res.certificate <= tail.rows
    assert check_dual_iso(direct).ok


@settings(max_examples=40, deadline=None)
@given(square())
def test_eventual_image_is_stable(tail):
    basis = eventual_image(tail)
    n = tail.rows
    images = [tail.apply(v) for v in basis]
    both = QMatrix.from_columns(basis + images, n) if basis else None
    assert both is None or both.rank() == len(basis)

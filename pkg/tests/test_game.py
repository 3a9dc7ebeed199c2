import pytest
from hypothesis import given
from hypothesis import strategies as st

from staghunt import C, U, UNKNOWN, JointOutcome, PayoffMatrix, payoff, validate_payoffs


Q1_MATRIX = PayoffMatrix(40, 30, 20, 0)


def test_payoff_table_q1_values():
    assert payoff(Q1_MATRIX, C, C) == 40
    assert payoff(Q1_MATRIX, U, C) == 30
    assert payoff(Q1_MATRIX, U, U) == 20
    assert payoff(Q1_MATRIX, C, U) == 0


def test_payoff_cooperator_against_defector_gets_g():
    m = PayoffMatrix(10.0, 7.5, 3.0, -1.0)
    assert payoff(m, C, U) == m.g


def test_payoff_rejects_unknown_labels():
    with pytest.raises(ValueError):
        payoff(Q1_MATRIX, UNKNOWN, C)
    with pytest.raises(ValueError):
        payoff(Q1_MATRIX, C, UNKNOWN)


@pytest.mark.parametrize("values", [(5, 4, 2, 1), (40, 30, 20, 0), (4.0, 3.0, 2.0, 0.0)])
def test_validate_payoffs_accepts_strict_orderings(values):
    m = validate_payoffs(*values)
    assert (m.h, m.c, m.m, m.g) == values


@pytest.mark.parametrize(
    "values", [(4, 4, 2, 1), (5, 4, 4, 1), (5, 4, 2, 2), (1, 2, 3, 4), (5, 6, 2, 1)]
)
def test_validate_payoffs_rejects_violations(values):
    with pytest.raises(ValueError):
        validate_payoffs(*values)


def test_ordering_error_names_the_offending_pair():
    with pytest.raises(ValueError, match="c > m"):
        validate_payoffs(5, 4, 4, 1)


@st.composite
def matrices(draw):
    g = draw(st.floats(-100, 100, allow_nan=False))
    steps = [draw(st.floats(0.01, 100)) for _ in range(3)]
    m = g + steps[0]
    mid = m + steps[1]
    h = mid + steps[2]
    return PayoffMatrix(h=h, c=mid, m=m, g=g)


@given(matrices())
def test_payoff_total_and_symmetric(matrix):
    """Swapping arguments turns the row player's payoff into the column player's."""
    for own in (C, U):
        for other in (C, U):
            mine = matrix.payoff(own, other)
            theirs = matrix.payoff(other, own)
            assert matrix.payoff_pair(own, other) == (mine, theirs)
    assert matrix.payoff(C, C) == matrix.h
    assert matrix.payoff(U, U) == matrix.m


def test_joint_outcome_rejects_unknown():
    JointOutcome(C, U)
    with pytest.raises(ValueError):
        JointOutcome(UNKNOWN, C)

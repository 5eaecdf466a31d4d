from fractions import Fraction

import pytest

from fiberbb.monomials import (
    GAMMA,
    GAMMA_DAG,
    LINEAR,
    PI,
    PI1,
    SET_A,
    SET_B,
    SET_C,
    SWAP,
    Monomial,
    PhaseShifter,
    classify,
    matrix_check,
)
from fiberbb.search import search_sequences


def test_empty_targets():
    res = search_sequences([], [PI])
    assert res.length == 0 and len(res.sequences[0]) == 0


def test_parity_pair_is_minimal_for_linear():
    res = search_sequences(LINEAR, [PI])
    assert res.length == 2
    assert [str(s) for s in res.sequences] == ["[2,Pi,1,Pi]"]


def test_linear_plus_a_needs_four():
    res = search_sequences(LINEAR + SET_A, [PI, GAMMA, GAMMA_DAG], max_steps=6)
    assert res.length == 4
    for s in res.sequences:
        assert classify(s, LINEAR + SET_A).all_eliminated and s.is_cyclic()


def test_no_solution_reported():
    res = search_sequences(SET_C, [PI, PI1, GAMMA], max_steps=4)
    assert not res.found
    assert res.notes


def test_general_monomial():
    m = Monomial(2, 0, 0, 2)
    res = search_sequences([m], [PhaseShifter(Fraction(-1, 2), 0), PhaseShifter(Fraction(1, 2), 0)])
    assert res.length == 2
    assert all(matrix_check(s, m) < 1e-12 for s in res.sequences)


def test_beam_splitter_alphabet_uses_float_path():
    # a swap never removes b1^dag b1, it only turns it into n1 + n2
    n1 = [Monomial(1, 1, 0, 0)]
    assert not search_sequences(n1, [SWAP, PI], max_steps=4, require_cyclic=False).found
    res = search_sequences(n1, [SWAP, PI], max_steps=4, require_cyclic=False, total_number_harmless=True)
    assert res.length == 2
    assert str(res.sequences[0]) == "[2,BS,1,BS]"


def test_max_steps_limit():
    with pytest.raises(ValueError):
        search_sequences(LINEAR, [PI], max_steps=21)


def test_deterministic_order():
    a = search_sequences(LINEAR + SET_A, [PI, GAMMA, GAMMA_DAG], max_steps=5)
    b = search_sequences(LINEAR + SET_A, [PI, GAMMA, GAMMA_DAG], max_steps=5)
    assert [str(s) for s in a.sequences] == [str(s) for s in b.sequences]

import numpy as np
import pytest

from src.hamiltonian import (
    DiagonalVector,
    PauliZTerm,
    ZHamiltonian,
    add_flag_penalty,
    diagonal_to_pauli,
    expectation,
    pauli_to_diagonal,
    permute_qubits,
    qubo_to_ising,
    spectrum_extrema,
)
from src.problem import QuadraticObjective
from src.statevector import StateVector
from src.utils import basis_bits


def test_three_qubit_label_diagonal_is_single_term():
    d = DiagonalVector(3, [1, -1, -1, 1, -1, 1, 1, -1])
    h = diagonal_to_pauli(d)
    assert h.as_dict() == pytest.approx({0b111: 1.0})


def test_overlap_label_diagonal_four_terms():
    d = DiagonalVector(
        5,
        [1, 1, 1, -1, 1, 1, -1, 1,
         1, -1, 1, 1, -1, 1, 1, 1,
         -1, 1, 1, 1, 1, -1, 1, 1,
         1, 1, -1, 1, 1, 1, 1, -1],
    )
    h = diagonal_to_pauli(d)
    expected = {0: 0.5, 0b01011: 0.5, 0b10101: 0.5, 0b11110: -0.5}
    assert set(h.as_dict()) == set(expected)
    for mask, coeff in expected.items():
        assert abs(h.coeff(mask) - coeff) < 1e-10


def test_single_qubit_z_convention():
    # Z0 is +1 on |0> and -1 on |1>
    h = diagonal_to_pauli(DiagonalVector(1, [1, -1]))
    assert h.as_dict() == pytest.approx({1: 1.0})
    # qubit 0 is the most significant bit of the basis index
    d = pauli_to_diagonal(ZHamiltonian(2, [PauliZTerm(1, 1.0)]))
    assert list(d.values) == [1, 1, -1, -1]


def test_decomposition_roundtrip_random():
    rng = np.random.default_rng(11)
    for _ in range(200):
        m = int(rng.integers(1, 7))
        values = rng.normal(size=2**m)
        back = pauli_to_diagonal(diagonal_to_pauli(DiagonalVector(m, values))).values
        assert np.allclose(back, values, atol=1e-10)


def test_qubo_to_ising_pair_objective():
    obj = QuadraticObjective.from_terms(2, [(0, 0, 3), (1, 1, 4), (0, 1, 1)])
    h = qubo_to_ising(obj)
    assert h.as_dict() == pytest.approx({0: 15 / 4, 0b01: -7 / 4, 0b10: -9 / 4, 0b11: 1 / 4})
    hp = add_flag_penalty(h, 10.0, 1)
    assert hp.m == 3
    assert hp.as_dict() == pytest.approx({0: 35 / 4, 0b001: -7 / 4, 0b010: -9 / 4, 0b011: 1 / 4, 0b100: -5.0})


def test_qubo_to_ising_overlap_objective():
    obj = QuadraticObjective.from_terms(
        3, [(0, 0, 3), (0, 1, -1), (0, 2, 4), (1, 1, -2), (1, 2, -5), (2, 2, 1)]
    )
    h = qubo_to_ising(obj)
    expected = {0: 0.5, 0b001: -9 / 4, 0b010: 5 / 2, 0b100: -1 / 4, 0b011: -1 / 4, 0b101: 1.0, 0b110: -5 / 4}
    assert h.as_dict() == pytest.approx(expected)
    hp = add_flag_penalty(h, 10.0, 2)
    assert hp.identity_coeff() == pytest.approx(10.5)
    assert hp.coeff(1 << 3) == pytest.approx(-5.0) and hp.coeff(1 << 4) == pytest.approx(-5.0)


def test_qubo_to_ising_matches_objective_exhaustively():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        q = np.triu(rng.integers(-5, 6, size=(n, n))).astype(float)
        obj = QuadraticObjective(q)
        d = pauli_to_diagonal(qubo_to_ising(obj)).values
        assert np.allclose(d, obj.evaluate_many(basis_bits(n)), atol=1e-9)


def test_flag_penalty_preserves_minimum_and_penalizes_flags():
    obj = QuadraticObjective.from_terms(2, [(0, 0, 3), (1, 1, 4), (0, 1, 1)])
    hp = add_flag_penalty(qubo_to_ising(obj), 10.0, 1)
    lo, hi, argmin = spectrum_extrema(hp)
    assert lo == pytest.approx(0.0)
    assert argmin == [0]
    assert hi == pytest.approx(18.0)


def test_add_flag_penalty_rejects_negative_delta():
    with pytest.raises(ValueError):
        add_flag_penalty(ZHamiltonian(1, [PauliZTerm(1, 1.0)]), -1.0, 1)


def test_terms_are_sorted_merged_and_pruned():
    h = ZHamiltonian(3, [PauliZTerm(4, 1.0), PauliZTerm(1, 2.0), PauliZTerm(4, -1.0), PauliZTerm(0, 1e-14)])
    assert [t.mask for t in h.terms] == [1]
    with pytest.raises(ValueError):
        ZHamiltonian(2, [PauliZTerm(4, 1.0)])


def test_expectation_on_basis_state():
    h = ZHamiltonian(2, [PauliZTerm(0, 1.0), PauliZTerm(1, 2.0)])
    assert expectation(h, StateVector.basis(2, 0)) == pytest.approx(3.0)
    assert expectation(h, StateVector.basis(2, 2)) == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        expectation(h, StateVector.basis(3, 0))


def test_permute_qubits_moves_masks():
    h = ZHamiltonian(3, [PauliZTerm(0b011, 1.0), PauliZTerm(0b100, 2.0)])
    moved = permute_qubits(h, [2, 0, 1])
    assert moved.as_dict() == {0b101: 1.0, 0b010: 2.0}

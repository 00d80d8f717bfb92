"""
Diagonal Hamiltonians as sparse Pauli-Z polynomials.

A term's mask uses bit j for qubit j; the empty mask is the identity. Diagonal
vectors are indexed by basis state with qubit 0 as the most significant bit,
so masks are translated into index bit positions before any transform.
"""
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .config import MAX_QUBITS, PRUNE_EPS
from .problem import QuadraticObjective
from .utils import fwht, index_bits_to_mask, mask_qubits, mask_to_index_bits


@dataclass(frozen=True)
class PauliZTerm:
    mask: int
    coeff: float

    def label(self) -> str:
        qubits = mask_qubits(self.mask)
        return "".join(f"Z{q}" for q in qubits) if qubits else "I"


@dataclass(frozen=True, eq=False)
class DiagonalVector:
    m: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (2**self.m,):
            raise ValueError(f"Diagonal for {self.m} qubits needs {2**self.m} entries, got shape {values.shape}")
        object.__setattr__(self, "values", values)


class ZHamiltonian:
    """Immutable sum of Pauli-Z products; terms kept sorted by ascending mask."""

    def __init__(self, m: int, terms: Iterable[PauliZTerm] = ()):
        if m < 0:
            raise ValueError(f"Qubit count must be non-negative, got {m}")
        merged: Dict[int, float] = {}
        for term in terms:
            if term.mask < 0 or term.mask >> m:
                raise ValueError(f"Term {term.label()} acts outside a {m}-qubit register")
            merged[term.mask] = merged.get(term.mask, 0.0) + float(term.coeff)
        self._m = m
        self._terms: Tuple[PauliZTerm, ...] = tuple(
            PauliZTerm(mask, coeff) for mask, coeff in sorted(merged.items()) if abs(coeff) >= PRUNE_EPS
        )

    @classmethod
    def from_dict(cls, m: int, coeffs: Dict[int, float]) -> "ZHamiltonian":
        return cls(m, (PauliZTerm(mask, c) for mask, c in coeffs.items()))

    @property
    def m(self) -> int:
        return self._m

    @property
    def terms(self) -> Tuple[PauliZTerm, ...]:
        return self._terms

    def as_dict(self) -> Dict[int, float]:
        return {t.mask: t.coeff for t in self._terms}

    def coeff(self, mask: int) -> float:
        return self.as_dict().get(mask, 0.0)

    def identity_coeff(self) -> float:
        return self.coeff(0)

    def non_identity_terms(self) -> Tuple[PauliZTerm, ...]:
        return tuple(t for t in self._terms if t.mask != 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZHamiltonian):
            return NotImplemented
        return self._m == other._m and self._terms == other._terms

    def allclose(self, other: "ZHamiltonian", atol: float = 1e-10) -> bool:
        if self._m != other.m:
            return False
        a, b = self.as_dict(), other.as_dict()
        return all(abs(a.get(k, 0.0) - b.get(k, 0.0)) <= atol for k in set(a) | set(b))

    def __repr__(self) -> str:
        body = " + ".join(f"{t.coeff:g}*{t.label()}" for t in self._terms) or "0"
        return f"ZHamiltonian(m={self._m}: {body})"

    def to_dict(self) -> Dict:
        return {"m": self._m, "terms": [{"mask": t.mask, "coeff": t.coeff} for t in self._terms]}


def qubo_to_ising(obj: QuadraticObjective) -> ZHamiltonian:
    """x_i -> (I - Z_i)/2 applied to every monomial of the objective."""
    coeffs: Dict[int, float] = {}

    def add(mask: int, value: float) -> None:
        coeffs[mask] = coeffs.get(mask, 0.0) + value

    for i, j, q in obj.terms():
        if i == j:
            add(0, q / 2)
            add(1 << i, -q / 2)
        else:
            add(0, q / 4)
            add(1 << i, -q / 4)
            add(1 << j, -q / 4)
            add((1 << i) | (1 << j), q / 4)
    return ZHamiltonian.from_dict(obj.n, coeffs)


def diagonal_to_pauli(d: DiagonalVector) -> ZHamiltonian:
    """c_S = 2^-m sum_x d(x) (-1)^popcount(x & S), via one fast Walsh-Hadamard transform."""
    spectrum = fwht(d.values) / float(2**d.m)
    coeffs = {}
    for index_mask in np.nonzero(np.abs(spectrum) >= PRUNE_EPS)[0]:
        coeffs[index_bits_to_mask(int(index_mask), d.m)] = float(spectrum[index_mask])
    return ZHamiltonian.from_dict(d.m, coeffs)


def pauli_to_diagonal(h: ZHamiltonian) -> DiagonalVector:
    spectrum = np.zeros(2**h.m)
    for t in h.terms:
        spectrum[mask_to_index_bits(t.mask, h.m)] = t.coeff
    return DiagonalVector(h.m, fwht(spectrum))


def add_flag_penalty(hf: ZHamiltonian, delta: float, flag_count: int) -> ZHamiltonian:
    """H_f (x) I + sum_v (delta/2)(I - Z_v), flags appended after the variable qubits."""
    if delta < 0:
        raise ValueError(f"Penalty delta must be non-negative, got {delta}")
    if flag_count < 0:
        raise ValueError(f"Flag count must be non-negative, got {flag_count}")
    coeffs = hf.as_dict()
    for v in range(hf.m, hf.m + flag_count):
        coeffs[0] = coeffs.get(0, 0.0) + delta / 2
        coeffs[1 << v] = coeffs.get(1 << v, 0.0) - delta / 2
    return ZHamiltonian.from_dict(hf.m + flag_count, coeffs)


def expectation(h: ZHamiltonian, psi) -> float:
    """sum_x d(x) |psi_x|^2 for a StateVector (or raw amplitude array)."""
    amps = getattr(psi, "amps", psi)
    amps = np.asarray(amps)
    if amps.shape != (2**h.m,):
        raise ValueError(f"State of length {amps.shape[0]} does not match a {h.m}-qubit Hamiltonian")
    return float(np.dot(pauli_to_diagonal(h).values, np.abs(amps) ** 2))


def spectrum_extrema(h: ZHamiltonian, atol: float = 1e-9) -> Tuple[float, float, List[int]]:
    """(min eigenvalue, max eigenvalue, basis indices attaining the min)."""
    if h.m > MAX_QUBITS:
        raise ValueError(f"Spectrum enumeration is limited to {MAX_QUBITS} qubits, got {h.m}")
    values = pauli_to_diagonal(h).values
    lo = float(values.min())
    hi = float(values.max())
    argmin = [int(i) for i in np.nonzero(values <= lo + atol)[0]]
    return lo, hi, argmin


def permute_qubits(h: ZHamiltonian, mapping: Sequence[int], m: int = None) -> ZHamiltonian:
    """Move qubit j of h onto qubit mapping[j] of an m-qubit register."""
    m = h.m if m is None else m
    if len(mapping) != h.m:
        raise ValueError(f"Qubit mapping of length {len(mapping)} does not cover {h.m} qubits")
    coeffs = {}
    for t in h.terms:
        new_mask = 0
        for q in mask_qubits(t.mask):
            new_mask |= 1 << mapping[q]
        coeffs[new_mask] = t.coeff
    return ZHamiltonian.from_dict(m, coeffs)

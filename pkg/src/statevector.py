"""
Dense statevector simulator with the gate set used by gadget circuits and GM-QAOA.

Basis index of |b_0 b_1 ... b_{m-1}> is sum_j b_j 2^(m-1-j), so qubit 0 is the
most significant bit. Gates mutate the state in place and return it so calls
can be chained.
"""
from typing import Dict

import numpy as np

from .config import MAX_QUBITS, NORM_TOL
from .utils import fwht, ket_string, parity_signs


class StateVector:
    def __init__(self, m: int, amps: np.ndarray, check: bool = True):
        if not (0 <= m <= MAX_QUBITS):
            raise ValueError(f"Qubit count must be in [0, {MAX_QUBITS}], got {m}")
        amps = np.asarray(amps, dtype=complex)
        if amps.shape != (2**m,):
            raise ValueError(f"{m}-qubit state needs {2**m} amplitudes, got shape {amps.shape}")
        self.m = m
        self.amps = amps.copy()
        if check:
            self._check_norm("init")

    @classmethod
    def init_zero(cls, m: int) -> "StateVector":
        if not (1 <= m <= MAX_QUBITS):
            raise ValueError(f"Qubit count must be in [1, {MAX_QUBITS}], got {m}")
        amps = np.zeros(2**m, dtype=complex)
        amps[0] = 1.0
        return cls(m, amps)

    @classmethod
    def basis(cls, m: int, index: int) -> "StateVector":
        amps = np.zeros(2**m, dtype=complex)
        amps[index] = 1.0
        return cls(m, amps)

    @classmethod
    def uniform(cls, m: int) -> "StateVector":
        return cls(m, np.full(2**m, 2.0 ** (-m / 2), dtype=complex))

    def copy(self) -> "StateVector":
        return StateVector(self.m, self.amps, check=False)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def _check_norm(self, gate: str) -> None:
        norm = self.norm()
        if abs(norm - 1.0) > NORM_TOL:
            raise RuntimeError(f"State norm drifted to {norm:.12f} after {gate}")

    def _check_dim(self, size: int, what: str) -> None:
        if size != 2**self.m:
            raise ValueError(f"{what} of length {size} does not match a {self.m}-qubit state")

    # gates

    def apply_h_all(self) -> "StateVector":
        self.amps = fwht(self.amps) * 2.0 ** (-self.m / 2)
        self._check_norm("H^m")
        return self

    def apply_h(self, qubit: int) -> "StateVector":
        if not (0 <= qubit < self.m):
            raise ValueError(f"Qubit {qubit} outside a {self.m}-qubit register")
        view = self.amps.reshape(2**qubit, 2, -1)
        zero = view[:, 0, :].copy()
        one = view[:, 1, :].copy()
        view[:, 0, :] = (zero + one) / np.sqrt(2)
        view[:, 1, :] = (zero - one) / np.sqrt(2)
        self._check_norm("H")
        return self

    def apply_diagonal_phase(self, d, gamma: float) -> "StateVector":
        """amp_x <- amp_x * exp(-i gamma d(x)); d is a DiagonalVector or raw array."""
        values = np.asarray(getattr(d, "values", d), dtype=float)
        self._check_dim(values.shape[0], "Diagonal")
        self.amps *= np.exp(-1j * gamma * values)
        self._check_norm("diagonal phase")
        return self

    def apply_z_term_phase(self, term, angle: float) -> "StateVector":
        """amp_x <- amp_x * exp(-i angle coeff (-1)^popcount(x & mask))."""
        signs = parity_signs(term.mask, self.m)
        self.amps *= np.exp(-1j * angle * term.coeff * signs)
        self._check_norm("Z-term phase")
        return self

    def apply_rx(self, qubit: int, beta: float) -> "StateVector":
        """exp(-i beta X) on one qubit."""
        if not (0 <= qubit < self.m):
            raise ValueError(f"Qubit {qubit} outside a {self.m}-qubit register")
        view = self.amps.reshape(2**qubit, 2, -1)
        zero = view[:, 0, :].copy()
        one = view[:, 1, :].copy()
        c, s = np.cos(beta), np.sin(beta)
        view[:, 0, :] = c * zero - 1j * s * one
        view[:, 1, :] = c * one - 1j * s * zero
        self._check_norm("RX")
        return self

    def apply_projector_phase(self, s: "StateVector", beta: float) -> "StateVector":
        """exp(-i beta |s><s|): psi <- psi + (e^{-i beta} - 1) <s|psi> s."""
        self._check_dim(s.amps.shape[0], "Mixer state")
        if abs(s.norm() - 1.0) > NORM_TOL:
            raise ValueError(f"Mixer state must be normalized, got norm {s.norm():.12f}")
        overlap = np.vdot(s.amps, self.amps)
        self.amps = self.amps + (np.exp(-1j * beta) - 1.0) * overlap * s.amps
        self._check_norm("projector phase")
        return self

    # readout

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def fidelity(self, other: "StateVector") -> float:
        self._check_dim(other.amps.shape[0], "State")
        return float(abs(np.vdot(self.amps, other.amps)))

    def mass(self, mask: np.ndarray) -> float:
        """Total probability on the basis indices selected by a boolean mask."""
        return float(self.probabilities()[np.asarray(mask, dtype=bool)].sum())

    def sample_counts(self, shots: int, seed: int) -> Dict[str, int]:
        if shots < 1:
            raise ValueError(f"Shot count must be positive, got {shots}")
        probs = self.probabilities()
        rng = np.random.default_rng(seed)
        draws = rng.multinomial(shots, probs / probs.sum())
        return {ket_string(int(i), self.m): int(draws[i]) for i in np.nonzero(draws)[0]}

    def __repr__(self) -> str:
        return f"StateVector(m={self.m})"


def init_zero(m: int) -> StateVector:
    return StateVector.init_zero(m)


def fidelity(psi: StateVector, phi: StateVector) -> float:
    return psi.fidelity(phi)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """|a> (x) |b>, with a's qubits first."""
    return StateVector(a.m + b.m, np.kron(a.amps, b.amps))

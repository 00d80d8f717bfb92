import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import BRUTE_FORCE_MAX_VARS, COEFF_RANGE, SELF_CHECK_MAX_VARS
from .utils import basis_bits

Assignment = Tuple[int, ...]

_CHUNK_BITS = 16


class Sense(str, Enum):
    EQ = "EQ"
    LE = "LE"
    GE = "GE"

    @property
    def symbol(self) -> str:
        return {"EQ": "=", "LE": "<=", "GE": ">="}[self.value]


@dataclass(frozen=True, eq=False)
class QuadraticObjective:
    """f(x) = sum_{i<=j} q[i][j] x_i x_j with q upper triangular."""

    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError(f"Objective matrix must be square, got shape {q.shape}")
        if np.any(np.tril(q, k=-1) != 0):
            raise ValueError("Objective matrix must be upper triangular (q[i][j] = 0 for i > j)")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return int(self.q.shape[0])

    @classmethod
    def zeros(cls, n: int) -> "QuadraticObjective":
        return cls(np.zeros((n, n)))

    @classmethod
    def from_terms(cls, n: int, terms: Sequence[Tuple[int, int, float]]) -> "QuadraticObjective":
        """Build from (i, j, coeff) triples; (j, i) is folded onto the upper triangle."""
        q = np.zeros((n, n))
        for i, j, coeff in terms:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"Term ({i}, {j}) out of range for n={n}")
            a, b = min(i, j), max(i, j)
            q[a, b] += coeff
        return cls(q)

    def terms(self) -> List[Tuple[int, int, float]]:
        rows, cols = np.nonzero(self.q)
        return [(int(i), int(j), float(self.q[i, j])) for i, j in zip(rows, cols)]

    def evaluate(self, x: Sequence[int]) -> float:
        if len(x) != self.n:
            raise ValueError(f"Assignment length {len(x)} does not match n={self.n}")
        total = 0.0
        for i in range(self.n):
            if not x[i]:
                continue
            for j in range(i, self.n):
                if x[j]:
                    total += self.q[i, j]
        return total

    def evaluate_many(self, bits: np.ndarray) -> np.ndarray:
        """Vectorized evaluate over rows of a (k, n) 0/1 matrix."""
        b = bits.astype(float)
        return np.einsum("ki,ij,kj->k", b, self.q, b)


@dataclass(frozen=True)
class LinearConstraint:
    coeffs: Tuple[int, ...]
    sense: Sense
    rhs: int

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "sense", Sense(self.sense))
        object.__setattr__(self, "rhs", int(self.rhs))
        if not any(coeffs):
            raise ValueError("Constraint has an empty support (all coefficients are zero)")

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_indices(cls, n: int, indices: Sequence[int], sense: Sense, rhs: int) -> "LinearConstraint":
        """sum_{i in indices} x_i (sense) rhs over n variables."""
        coeffs = [0] * n
        for i in indices:
            coeffs[i] += 1
        return cls(tuple(coeffs), sense, rhs)

    def describe(self) -> str:
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            term = f"x{i}" if abs(c) == 1 else f"{abs(c)}*x{i}"
            if not parts:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(("+ " if c > 0 else "- ") + term)
        return f"{' '.join(parts)} {self.sense.symbol} {self.rhs}"

    def restrict(self, variables: Sequence[int]) -> "LinearConstraint":
        """Re-index onto the given variable list (local index i <-> variables[i])."""
        outside = set(support(self)) - set(variables)
        if outside:
            raise ValueError(f"Support variables {sorted(outside)} missing from restriction")
        return LinearConstraint(tuple(self.coeffs[v] for v in variables), self.sense, self.rhs)

    def satisfied_many(self, bits: np.ndarray) -> np.ndarray:
        lhs = bits.astype(np.int64) @ np.asarray(self.coeffs, dtype=np.int64)
        if self.sense is Sense.EQ:
            return lhs == self.rhs
        if self.sense is Sense.LE:
            return lhs <= self.rhs
        return lhs >= self.rhs


@dataclass(frozen=True, eq=False)
class QcboInstance:
    objective: QuadraticObjective
    constraints: Tuple[LinearConstraint, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for c in self.constraints:
            if c.n != self.objective.n:
                raise ValueError(
                    f"Constraint '{c.describe()}' has {c.n} coefficients but the objective has n={self.objective.n}"
                )

    @property
    def n(self) -> int:
        return self.objective.n


@dataclass(frozen=True)
class BruteForceResult:
    f_star: Optional[float]
    optimal: Tuple[Assignment, ...]
    f_min: float
    f_max: float
    feasible_count: int

    @property
    def feasible(self) -> bool:
        return self.f_star is not None


def support(c: LinearConstraint) -> Tuple[int, ...]:
    return tuple(i for i, coeff in enumerate(c.coeffs) if coeff != 0)


def is_feasible(c: LinearConstraint, x: Sequence[int]) -> bool:
    if len(x) != c.n:
        raise ValueError(f"Assignment length {len(x)} does not match constraint length {c.n}")
    lhs = sum(coeff * int(xi) for coeff, xi in zip(c.coeffs, x))
    if c.sense is Sense.EQ:
        return lhs == c.rhs
    if c.sense is Sense.LE:
        return lhs <= c.rhs
    return lhs >= c.rhs


def is_feasible_all(constraints: Sequence[LinearConstraint], x: Sequence[int]) -> bool:
    return all(is_feasible(c, x) for c in constraints)


def _chunks(n: int):
    """Yield (offset, bits) blocks covering all 2^n assignments in basis order."""
    if n <= _CHUNK_BITS:
        yield 0, basis_bits(n)
        return
    low = basis_bits(_CHUNK_BITS)
    high_bits = n - _CHUNK_BITS
    for hi in range(2**high_bits):
        prefix = np.array([(hi >> (high_bits - 1 - j)) & 1 for j in range(high_bits)], dtype=np.int8)
        block = np.hstack([np.broadcast_to(prefix, (low.shape[0], high_bits)), low])
        yield hi << _CHUNK_BITS, block


def brute_force_solve(inst: QcboInstance) -> BruteForceResult:
    n = inst.n
    if n > BRUTE_FORCE_MAX_VARS:
        raise ValueError(f"Exhaustive enumeration is limited to {BRUTE_FORCE_MAX_VARS} variables, got {n}")
    f_min = np.inf
    f_max = -np.inf
    f_star = np.inf
    feasible_count = 0
    best: List[int] = []
    for offset, bits in _chunks(n):
        values = inst.objective.evaluate_many(bits)
        f_min = min(f_min, float(values.min()))
        f_max = max(f_max, float(values.max()))
        mask = np.ones(values.shape[0], dtype=bool)
        for c in inst.constraints:
            mask &= c.satisfied_many(bits)
        if not mask.any():
            continue
        feasible_count += int(mask.sum())
        local = values[mask]
        local_best = float(local.min())
        idx = np.nonzero(mask)[0][np.abs(local - local_best) <= 1e-9]
        if local_best < f_star - 1e-9:
            f_star = local_best
            best = [offset + int(i) for i in idx]
        elif abs(local_best - f_star) <= 1e-9:
            best.extend(offset + int(i) for i in idx)

    if feasible_count == 0:
        return BruteForceResult(None, (), f_min, f_max, 0)

    optimal = tuple(tuple((i >> (n - 1 - j)) & 1 for j in range(n)) for i in sorted(best))
    result = BruteForceResult(float(f_star), optimal, f_min, f_max, feasible_count)
    _self_check(inst, result)
    return result


def _self_check(inst: QcboInstance, result: BruteForceResult) -> None:
    """Independent scalar pass over the enumeration (small n only)."""
    for x in result.optimal:
        if not is_feasible_all(inst.constraints, x):
            raise RuntimeError(f"Oracle returned an infeasible optimum {x}")
        if abs(inst.objective.evaluate(x) - result.f_star) > 1e-9:
            raise RuntimeError(f"Oracle optimum {x} does not evaluate to f*={result.f_star}")
    if inst.n > SELF_CHECK_MAX_VARS:
        return
    values = [
        inst.objective.evaluate(x)
        for x in itertools.product((0, 1), repeat=inst.n)
        if is_feasible_all(inst.constraints, x)
    ]
    if abs(min(values) - result.f_star) > 1e-9:
        raise RuntimeError(f"Oracle self-check failed: f*={result.f_star} but second pass found {min(values)}")


def random_qcbo(
    constraints: Sequence[LinearConstraint],
    seed: int,
    coeff_range: Tuple[int, int] = COEFF_RANGE,
    n: Optional[int] = None,
) -> QcboInstance:
    """Integer coefficients drawn i.i.d. uniform from coeff_range on the upper triangle (diagonal included)."""
    lo, hi = coeff_range
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        raise ValueError(f"Invalid coefficient range {coeff_range}")
    if n is None:
        if not constraints:
            raise ValueError("random_qcbo needs n when no constraints are given")
        n = constraints[0].n
    rng = np.random.default_rng(seed)
    q = np.triu(rng.integers(int(lo), int(hi) + 1, size=(n, n))).astype(float)
    return QcboInstance(QuadraticObjective(q), tuple(constraints))


def instance_to_dict(inst: QcboInstance) -> Dict:
    return {
        "n": inst.n,
        "q": [[i, j, coeff] for i, j, coeff in inst.objective.terms()],
        "constraints": [
            {"coeffs": list(c.coeffs), "sense": c.sense.value, "rhs": c.rhs} for c in inst.constraints
        ],
    }

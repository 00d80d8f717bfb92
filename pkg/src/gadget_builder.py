"""
Constraint gadgets: label states, build H_C, and train a (ma-)QAOA circuit that
prepares the equal superposition of properly labeled kets.

Register layout is the union-of-supports variables in ascending original index,
followed by the flag qubits in constraint order.
"""
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import (
    DEFAULT_FATOL,
    DEFAULT_MAX_EVALS,
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    EVALS_PER_PARAM,
    GROUND_TOL,
    LABEL_MAX_VARS,
    TRAIN_MAX_QUBITS,
)
from .hamiltonian import DiagonalVector, ZHamiltonian, diagonal_to_pauli, expectation, permute_qubits
from .metrics import log_event, time_block
from .optimize import RestartResult, multi_start_minimize, nelder_mead, uniform_starts
from .problem import LinearConstraint, support
from .statevector import StateVector
from .utils import basis_bits, mask_qubits, parity_signs, qubits_to_mask
from .validate import validate_trained_gadget


class FlagMode(str, Enum):
    SINGLE = "single"
    PER_CONSTRAINT = "per-constraint"


class AnsatzMode(str, Enum):
    SHARED = "qaoa"
    MULTI = "ma-qaoa"


@dataclass(frozen=True)
class AnsatzConfig:
    layers: int = 1
    mode: AnsatzMode = AnsatzMode.MULTI

    def __post_init__(self):
        object.__setattr__(self, "mode", AnsatzMode(self.mode))
        if self.layers < 1:
            raise ValueError(f"Ansatz needs at least one layer, got {self.layers}")


@dataclass(frozen=True)
class GadgetSpec:
    constraints: Tuple[LinearConstraint, ...]
    variables: Tuple[int, ...]
    flag_mode: FlagMode = FlagMode.PER_CONSTRAINT

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "variables", tuple(int(v) for v in self.variables))
        object.__setattr__(self, "flag_mode", FlagMode(self.flag_mode))
        if not self.constraints:
            raise ValueError("A gadget needs at least one constraint")
        for c in self.constraints:
            if c.n != len(self.variables):
                raise ValueError(
                    f"Restricted constraint '{c.describe()}' has {c.n} coefficients for {len(self.variables)} variables"
                )

    @classmethod
    def from_constraints(
        cls, constraints: Sequence[LinearConstraint], flag_mode: FlagMode = FlagMode.PER_CONSTRAINT
    ) -> "GadgetSpec":
        """Restrict full-width constraints to the sorted union of their supports."""
        if not constraints:
            raise ValueError("A gadget needs at least one constraint")
        widths = {c.n for c in constraints}
        if len(widths) != 1:
            raise ValueError(f"Constraints disagree on the variable count: {sorted(widths)}")
        variables = sorted(set().union(*(support(c) for c in constraints)))
        return cls(tuple(c.restrict(variables) for c in constraints), tuple(variables), flag_mode)

    @property
    def k(self) -> int:
        return len(self.variables)

    @property
    def flag_count(self) -> int:
        return 1 if self.flag_mode is FlagMode.SINGLE else len(self.constraints)

    @property
    def m(self) -> int:
        return self.k + self.flag_count

    def describe(self) -> str:
        names = ", ".join(_describe_restricted(c, self.variables) for c in self.constraints)
        return f"{{{names}}} [{self.flag_mode.value}]"


def _describe_restricted(c: LinearConstraint, variables: Sequence[int]) -> str:
    """Render a restricted constraint with the original variable names."""
    full = [0] * (max(variables) + 1)
    for local, v in enumerate(variables):
        full[v] = c.coeffs[local]
    return LinearConstraint(tuple(full), c.sense, c.rhs).describe()


@dataclass(frozen=True, eq=False)
class LabeledDiagonal:
    """c_v: -1 on properly labeled kets, +1 on improperly labeled ones."""

    c_v: DiagonalVector
    k: int
    flag_count: int

    @property
    def m(self) -> int:
        return self.c_v.m

    @property
    def proper(self) -> np.ndarray:
        return self.c_v.values < 0

    def proper_count(self) -> int:
        return int(self.proper.sum())


def label_states(spec: GadgetSpec) -> LabeledDiagonal:
    if spec.k > LABEL_MAX_VARS:
        raise ValueError(f"Labeling is limited to {LABEL_MAX_VARS} support variables, got {spec.k}")
    bits = basis_bits(spec.m)
    var_bits = bits[:, : spec.k]
    flag_bits = bits[:, spec.k :].astype(bool)
    satisfied = [c.satisfied_many(var_bits) for c in spec.constraints]
    if spec.flag_mode is FlagMode.SINGLE:
        proper = flag_bits[:, 0] == ~np.logical_and.reduce(satisfied)
    else:
        proper = np.ones(bits.shape[0], dtype=bool)
        for i, sat in enumerate(satisfied):
            proper &= flag_bits[:, i] == ~sat
    return LabeledDiagonal(DiagonalVector(spec.m, np.where(proper, -1.0, 1.0)), spec.k, spec.flag_count)


def build_gadget_hamiltonian(labels: LabeledDiagonal) -> ZHamiltonian:
    return diagonal_to_pauli(labels.c_v)


def ideal_feasible_state(labels: LabeledDiagonal) -> StateVector:
    proper = labels.proper
    return StateVector(labels.m, proper.astype(complex) / np.sqrt(proper.sum()))


class GadgetCircuit:
    """
    H on every gadget qubit, then per layer the cost phases and one RX per qubit.
    `mapping[j]` places gadget qubit j on a qubit of a `register`-qubit state.
    """

    def __init__(
        self,
        h: ZHamiltonian,
        config: AnsatzConfig,
        mapping: Optional[Sequence[int]] = None,
        register: Optional[int] = None,
    ):
        self.h = h
        self.config = config
        self.register = h.m if register is None else register
        self.mapping = tuple(range(h.m)) if mapping is None else tuple(int(q) for q in mapping)
        if len(self.mapping) != h.m or len(set(self.mapping)) != h.m:
            raise ValueError(f"Qubit mapping {self.mapping} is not an injective map of {h.m} qubits")
        if max(self.mapping, default=-1) >= self.register:
            raise ValueError(f"Qubit mapping {self.mapping} exceeds a {self.register}-qubit register")
        self.terms = h.non_identity_terms()
        rows = []
        for t in self.terms:
            mask = qubits_to_mask(self.mapping[q] for q in mask_qubits(t.mask))
            rows.append(t.coeff * parity_signs(mask, self.register))
        self._signs = np.array(rows).reshape(len(self.terms), 2**self.register)
        self._shared = self._signs.sum(axis=0)

    @property
    def n_gammas(self) -> int:
        per_layer = 1 if self.config.mode is AnsatzMode.SHARED else len(self.terms)
        return per_layer * self.config.layers

    @property
    def n_betas(self) -> int:
        per_layer = 1 if self.config.mode is AnsatzMode.SHARED else self.h.m
        return per_layer * self.config.layers

    @property
    def n_params(self) -> int:
        return self.n_gammas + self.n_betas

    def split(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_params,):
            raise ValueError(f"Expected {self.n_params} angles, got {x.shape[0] if x.ndim else 0}")
        return x[: self.n_gammas], x[self.n_gammas :]

    def apply(self, psi: StateVector, gammas: Sequence[float], betas: Sequence[float]) -> StateVector:
        gammas = np.asarray(gammas, dtype=float)
        betas = np.asarray(betas, dtype=float)
        if gammas.shape != (self.n_gammas,) or betas.shape != (self.n_betas,):
            raise ValueError(
                f"{self.config.mode.value} with {self.config.layers} layer(s) needs {self.n_gammas} gammas and "
                f"{self.n_betas} betas, got {gammas.shape[0]} and {betas.shape[0]}"
            )
        if psi.m != self.register:
            raise ValueError(f"Circuit acts on {self.register} qubits, state has {psi.m}")
        for q in self.mapping:
            psi.apply_h(q)
        shared = self.config.mode is AnsatzMode.SHARED
        g_step = 1 if shared else len(self.terms)
        b_step = 1 if shared else self.h.m
        for layer in range(self.config.layers):
            g = gammas[layer * g_step : (layer + 1) * g_step]
            b = betas[layer * b_step : (layer + 1) * b_step]
            if shared:
                psi.apply_diagonal_phase(self._shared, g[0])
            else:
                psi.apply_diagonal_phase(g @ self._signs, 1.0)
            for j, q in enumerate(self.mapping):
                psi.apply_rx(q, b[0] if shared else b[j])
        return psi

    def state(self, x: np.ndarray) -> StateVector:
        gammas, betas = self.split(x)
        psi = StateVector.basis(self.register, 0)
        return self.apply(psi, gammas, betas)


def ansatz_state(h: ZHamiltonian, config: AnsatzConfig, gammas, betas) -> StateVector:
    circuit = GadgetCircuit(h, config)
    return circuit.apply(StateVector.basis(h.m, 0), gammas, betas)


@dataclass(frozen=True)
class TrainOptions:
    seed: int = DEFAULT_SEED
    restarts: int = DEFAULT_RESTARTS
    max_evals: int = DEFAULT_MAX_EVALS
    fatol: float = DEFAULT_FATOL
    evals_per_param: int = EVALS_PER_PARAM
    ground_tol: float = GROUND_TOL
    polish: bool = True

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError(f"Training needs at least one restart, got {self.restarts}")
        if self.max_evals < 1:
            raise ValueError(f"max_evals must be positive, got {self.max_evals}")


@dataclass(eq=False)
class TrainedGadget:
    spec: GadgetSpec
    hamiltonian: ZHamiltonian
    config: AnsatzConfig
    gammas: np.ndarray
    betas: np.ndarray
    expectation: float
    gadget_ar: float
    fidelity: float
    seed: int
    restarts: int = 0
    evaluations: int = 0
    converged: bool = True

    def labels(self) -> LabeledDiagonal:
        return label_states(self.spec)

    def circuit(self, mapping=None, register=None) -> GadgetCircuit:
        return GadgetCircuit(self.hamiltonian, self.config, mapping, register)

    def state(self) -> StateVector:
        return self.circuit().apply(StateVector.basis(self.spec.m, 0), self.gammas, self.betas)


def proper_mass(psi: StateVector, labels: LabeledDiagonal) -> float:
    if psi.m != labels.m:
        raise ValueError(f"State has {psi.m} qubits, labeling covers {labels.m}")
    return psi.mass(labels.proper)


def improper_mass(psi: StateVector, labels: LabeledDiagonal) -> float:
    return 1.0 - proper_mass(psi, labels)


def pick_restart(runs: Sequence[RestartResult], fidelity: Callable[[np.ndarray], float], tol: float) -> RestartResult:
    """
    Among restarts within tol of the lowest energy, the one closest to the ideal
    state; ties go to the lowest restart index.
    """
    best_fun = min(r.fun for r in runs)
    chosen, chosen_fid = None, -1.0
    for r in runs:
        if r.fun > best_fun + tol:
            continue
        fid = fidelity(r.x)
        if fid > chosen_fid + 1e-12:
            chosen, chosen_fid = r, fid
    return chosen


def train_gadget(
    spec: GadgetSpec,
    config: AnsatzConfig = AnsatzConfig(),
    options: TrainOptions = TrainOptions(),
    metrics_path: Optional[str] = None,
) -> TrainedGadget:
    """
    Minimize <H_C> from `options.restarts` random starts. The ground space of H_C is
    every state on properly labeled kets, so near-ground restarts are ranked by
    fidelity to the equal superposition.
    """
    if spec.m > TRAIN_MAX_QUBITS:
        raise ValueError(f"Gadget training is limited to {TRAIN_MAX_QUBITS} qubits, got {spec.m}")
    labels = label_states(spec)
    h = build_gadget_hamiltonian(labels)
    circuit = GadgetCircuit(h, config)
    diag = labels.c_v.values
    ideal = ideal_feasible_state(labels)

    def objective(x: np.ndarray) -> float:
        return float(np.dot(diag, circuit.state(x).probabilities()))

    def fidelity(x: np.ndarray) -> float:
        return circuit.state(x).fidelity(ideal)

    def exact(x: np.ndarray, fun: float) -> bool:
        return fun <= -1.0 + options.ground_tol and fidelity(x) >= 1.0 - options.ground_tol

    rng = np.random.default_rng(options.seed)
    starts = uniform_starts(rng, options.restarts, circuit.n_params)
    budget = max(options.max_evals, options.evals_per_param * circuit.n_params)
    name = spec.describe()
    with time_block("gadget_training", metrics_path, gadget=name, mode=config.mode.value, layers=config.layers):
        outcome = multi_start_minimize(objective, starts, max_evals=budget, fatol=options.fatol, stop=exact)
    chosen = pick_restart(outcome.runs, fidelity, options.ground_tol)
    x, evaluations = chosen.x, outcome.evaluations
    if options.polish and chosen.fun <= -1.0 + options.ground_tol and fidelity(x) < 1.0 - options.ground_tol:
        # stay in the ground space while closing the relative phases
        res = nelder_mead(lambda y: objective(y) + 1.0 - fidelity(y), x, max_evals=budget, fatol=options.fatol)
        evaluations += int(res.nfev)
        y = np.asarray(res.x, dtype=float)
        if objective(y) <= -1.0 + options.ground_tol and fidelity(y) > fidelity(x):
            x = y

    gammas, betas = circuit.split(x)
    psi = circuit.state(x)
    energy = expectation(h, psi)
    gadget = TrainedGadget(
        spec=spec,
        hamiltonian=h,
        config=config,
        gammas=gammas.copy(),
        betas=betas.copy(),
        expectation=energy,
        gadget_ar=(1.0 - energy) / 2.0,
        fidelity=psi.fidelity(ideal),
        seed=options.seed,
        restarts=outcome.restarts,
        evaluations=evaluations,
        converged=chosen.converged,
    )
    ok, msg = validate_trained_gadget(gadget)
    if not ok:
        raise RuntimeError(f"Trained gadget {name} violates the proper-mass identity: {msg}")
    log_event(
        metrics_path,
        {
            "type": "gadget_trained",
            "gadget": name,
            "gadget_ar": gadget.gadget_ar,
            "fidelity": gadget.fidelity,
            "restarts": outcome.restarts,
            "best_restart": chosen.index,
            "evaluations": evaluations,
            "budget": budget,
            "converged": chosen.converged,
        },
    )
    return gadget


def apply_gadget_circuit(psi: StateVector, gadget: TrainedGadget, mapping: Sequence[int]) -> StateVector:
    """Run a trained gadget's circuit on chosen qubits of a larger register (in place)."""
    return gadget.circuit(mapping, psi.m).apply(psi, gadget.gammas, gadget.betas)


def sequential_gadget_state(
    gadgets: Sequence[TrainedGadget], mappings: Sequence[Sequence[int]], m: int
) -> StateVector:
    if len(gadgets) != len(mappings):
        raise ValueError(f"{len(gadgets)} gadgets but {len(mappings)} qubit mappings")
    psi = StateVector.basis(m, 0)
    for gadget, mapping in zip(gadgets, mappings):
        apply_gadget_circuit(psi, gadget, mapping)
    return psi


def replicate_overlapping_variables(
    constraints: Sequence[LinearConstraint],
) -> Tuple[Tuple[LinearConstraint, ...], Dict[int, int]]:
    """
    Give every constraint its own copy of any variable an earlier constraint already uses.
    Returns the rewritten constraints over n + copies variables and a copy -> original map.
    """
    if not constraints:
        return (), {}
    n = constraints[0].n
    seen = set()
    copies: Dict[int, int] = {}
    rewritten: List[Dict[int, int]] = []
    for c in constraints:
        if c.n != n:
            raise ValueError(f"Constraints disagree on the variable count: {c.n} vs {n}")
        coeffs: Dict[int, int] = {}
        for v in support(c):
            target = v
            if v in seen:
                target = n + len(copies)
                copies[target] = v
            coeffs[target] = c.coeffs[v]
        seen.update(support(c))
        rewritten.append(coeffs)
    width = n + len(copies)
    out = []
    for c, coeffs in zip(constraints, rewritten):
        full = [0] * width
        for v, a in coeffs.items():
            full[v] = a
        out.append(LinearConstraint(tuple(full), c.sense, c.rhs))
    return tuple(out), copies


def relabel_gadget(gadget: TrainedGadget, local_perm: Sequence[int], target: GadgetSpec) -> TrainedGadget:
    """
    Move gadget variable qubit i onto local qubit local_perm[i] of `target`; flags stay put.
    Hamiltonian masks, per-term gammas and per-qubit betas are permuted consistently.
    """
    k = gadget.spec.k
    if sorted(local_perm) != list(range(k)) or target.k != k or target.flag_count != gadget.spec.flag_count:
        raise ValueError(f"Permutation {tuple(local_perm)} does not relabel {gadget.spec.describe()} onto {target.describe()}")
    mapping = list(local_perm) + list(range(k, gadget.spec.m))
    h = permute_qubits(gadget.hamiltonian, mapping)
    gammas = np.asarray(gadget.gammas, dtype=float)
    betas = np.asarray(gadget.betas, dtype=float)
    if gadget.config.mode is AnsatzMode.MULTI:
        old_terms = gadget.hamiltonian.non_identity_terms()
        new_masks = [qubits_to_mask(mapping[q] for q in mask_qubits(t.mask)) for t in old_terms]
        order = np.argsort(new_masks, kind="stable")
        T = len(old_terms)
        gammas = np.concatenate([gammas[l * T : (l + 1) * T][order] for l in range(gadget.config.layers)]) if T else gammas
        m = gadget.spec.m
        new_betas = np.empty_like(betas)
        for l in range(gadget.config.layers):
            for q in range(m):
                new_betas[l * m + mapping[q]] = betas[l * m + q]
        betas = new_betas
    return replace(gadget, spec=target, hamiltonian=h, gammas=gammas.copy(), betas=betas.copy())

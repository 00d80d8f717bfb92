"""
GM-QAOA with a trained constraint gadget as initial state and Grover-mixer axis.

Cost is the flag-penalized Ising form of the objective. Angles come from a coarse
(gamma, beta) grid that seeds Nelder-Mead refinement.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_GRID, DEFAULT_MAX_EVALS, DEFAULT_SEED, DEFAULT_SOLVE_RESTARTS, NORM_TOL
from .gadget_builder import TrainedGadget
from .hamiltonian import DiagonalVector, add_flag_penalty, pauli_to_diagonal, qubo_to_ising, spectrum_extrema
from .metrics import log_event, time_block
from .optimize import multi_start_minimize, uniform_starts
from .problem import Assignment, BruteForceResult, QcboInstance, brute_force_solve
from .statevector import StateVector
from .utils import basis_bits, ket_index, ket_string


class InfeasibleInstanceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolveConfig:
    layers: int = 1
    delta: Optional[float] = None
    seed: int = DEFAULT_SEED
    restarts: int = DEFAULT_SOLVE_RESTARTS
    grid: int = DEFAULT_GRID
    max_evals: int = DEFAULT_MAX_EVALS

    def __post_init__(self):
        if self.layers < 0:
            raise ValueError(f"Layer count must be non-negative, got {self.layers}")
        if self.grid < 1:
            raise ValueError(f"Grid density must be positive, got {self.grid}")
        if self.restarts < 1:
            raise ValueError(f"Need at least one restart, got {self.restarts}")
        if self.delta is not None and self.delta < 0:
            raise ValueError(f"Penalty delta must be non-negative, got {self.delta}")


@dataclass(eq=False)
class SolveReport:
    ar: float
    p_opt: float
    distribution: DiagonalVector
    gammas: np.ndarray
    betas: np.ndarray
    expectation: float
    f_star: float
    h_max: float
    delta: float
    n: int
    flag_count: int
    optimal: Tuple[Assignment, ...]
    proper: np.ndarray
    seed: int
    gadgets: List[str] = field(default_factory=list)
    state: Optional[StateVector] = None

    @property
    def layers(self) -> int:
        return int(len(self.gammas))

    def optimal_indices(self) -> List[int]:
        return [ket_index(x) << self.flag_count for x in self.optimal]

    def ranked(self) -> List[Tuple[str, float]]:
        probs = self.distribution.values
        m = self.distribution.m
        order = sorted(range(probs.shape[0]), key=lambda i: (-probs[i], i))
        return [(ket_string(i, m), float(probs[i])) for i in order]

    def modal_ket(self) -> str:
        return self.ranked()[0][0]

    def improper_mass(self) -> float:
        return float(self.distribution.values[~self.proper].sum())

    def to_document(self, threshold: float = 1e-6) -> Dict:
        probs = self.distribution.values
        m = self.distribution.m
        optimal = set(self.optimal_indices())
        entries = [
            {
                "ket": ket_string(i, m),
                "p": float(probs[i]),
                "label": "proper" if self.proper[i] else "improper",
                "optimal": i in optimal,
            }
            for i in range(probs.shape[0])
            if probs[i] >= threshold
        ]
        return {
            "ar": self.ar,
            "p_opt": self.p_opt,
            "expectation": self.expectation,
            "f_star": self.f_star,
            "h_max": self.h_max,
            "delta": self.delta,
            "layers": self.layers,
            "n": self.n,
            "flag_count": self.flag_count,
            "gammas": [float(g) for g in self.gammas],
            "betas": [float(b) for b in self.betas],
            "seed": self.seed,
            "gadgets": list(self.gadgets),
            "optimal": ["".join(str(b) for b in x) for x in self.optimal],
            "distribution": entries,
        }


GadgetArg = Union[TrainedGadget, Sequence[TrainedGadget]]


def _as_list(gadgets: GadgetArg) -> List[TrainedGadget]:
    if isinstance(gadgets, TrainedGadget):
        return [gadgets]
    out = list(gadgets)
    if not out:
        raise ValueError("At least one gadget is required")
    return out


def _source_axes(gadgets: List[TrainedGadget], n: int) -> Tuple[List[int], int]:
    """Axis permutation from the (gadget blocks, free variables) product to the global ket order."""
    used: Dict[int, int] = {}
    flag_axes: List[int] = []
    offset = 0
    for g in gadgets:
        for v in g.spec.variables:
            if not (0 <= v < n):
                raise ValueError(f"Gadget variable x{v} out of range for n={n}")
            if v in used:
                raise ValueError(f"Gadgets overlap on variable x{v}; replicate shared variables first")
            used[v] = offset
            offset += 1
        flag_axes.extend(range(offset, offset + g.spec.flag_count))
        offset += g.spec.flag_count
    free = [v for v in range(n) if v not in used]
    for i, v in enumerate(free):
        used[v] = offset + i
    return [used[v] for v in range(n)] + flag_axes, len(free)


def embed_gadget_states(gadgets: GadgetArg, n: int) -> StateVector:
    """
    Tensor gadget states over disjoint supports with |+> on every other variable.
    Global order is |x_0 ... x_{n-1} v_0 ...> with flags concatenated in gadget order.
    """
    gadgets = _as_list(gadgets)
    axes, free = _source_axes(gadgets, n)
    amps = np.ones(1, dtype=complex)
    for g in gadgets:
        amps = np.kron(amps, g.state().amps)
    amps = np.kron(amps, np.full(2**free, 2.0 ** (-free / 2)))
    total = len(axes)
    amps = amps.reshape([2] * total).transpose(axes).reshape(-1)
    return StateVector(total, amps)


def embed_gadget_state(gadget: GadgetArg, n: int) -> StateVector:
    return embed_gadget_states(gadget, n)


def embedded_proper_mask(gadgets: GadgetArg, n: int) -> np.ndarray:
    """Properly labeled kets of the embedded register: every gadget's own labeling holds."""
    gadgets = _as_list(gadgets)
    flags = sum(g.spec.flag_count for g in gadgets)
    bits = basis_bits(n + flags).astype(np.int64)
    proper = np.ones(bits.shape[0], dtype=bool)
    flag_offset = n
    for g in gadgets:
        cols = list(g.spec.variables) + list(range(flag_offset, flag_offset + g.spec.flag_count))
        flag_offset += g.spec.flag_count
        weights = 1 << np.arange(len(cols) - 1, -1, -1, dtype=np.int64)
        local = bits[:, cols] @ weights
        proper &= g.labels().proper[local]
    return proper


def delta_rule(inst: QcboInstance, oracle: Optional[BruteForceResult] = None) -> float:
    """5 + 2|f_min| with f_min the unconstrained minimum."""
    oracle = oracle or brute_force_solve(inst)
    return 5.0 + 2.0 * abs(oracle.f_min)


def random_guess_baseline(inst: QcboInstance, oracle: Optional[BruteForceResult] = None) -> float:
    oracle = oracle or brute_force_solve(inst)
    return len(oracle.optimal) / float(2**inst.n)


class _GroverEvolution:
    def __init__(self, s: StateVector, cost: np.ndarray, layers: int):
        self.s = s
        self.cost = cost
        self.layers = layers

    def state(self, x: np.ndarray) -> StateVector:
        gammas, betas = x[: self.layers], x[self.layers :]
        psi = self.s.copy()
        for gamma, beta in zip(gammas, betas):
            psi.apply_diagonal_phase(self.cost, gamma)
            psi.apply_projector_phase(self.s, beta)
        return psi

    def energy(self, x: np.ndarray) -> float:
        return float(np.dot(self.cost, self.state(np.asarray(x, dtype=float)).probabilities()))

    def grid_seed(self, density: int) -> np.ndarray:
        """Best one-layer (gamma, beta) on a density x density grid over [0, 2pi)^2."""
        angles = 2 * np.pi * np.arange(density) / density
        one_layer = _GroverEvolution(self.s, self.cost, 1)
        best, best_e = None, np.inf
        for gamma in angles:
            for beta in angles:
                e = one_layer.energy(np.array([gamma, beta]))
                if e < best_e - 1e-12:
                    best, best_e = (gamma, beta), e
        return np.array(best)


def run_gm_qaoa(
    inst: QcboInstance,
    gadgets: GadgetArg,
    cfg: SolveConfig = SolveConfig(),
    metrics_path: Optional[str] = None,
) -> SolveReport:
    gadgets = _as_list(gadgets)
    oracle = brute_force_solve(inst)
    if not oracle.feasible:
        raise InfeasibleInstanceError(
            f"No assignment of the {inst.n} variables satisfies all {len(inst.constraints)} constraints"
        )
    delta = cfg.delta if cfg.delta is not None else delta_rule(inst, oracle)
    flag_count = sum(g.spec.flag_count for g in gadgets)
    s = embed_gadget_states(gadgets, inst.n)

    hf = qubo_to_ising(inst.objective)
    cost = pauli_to_diagonal(add_flag_penalty(hf, delta, flag_count)).values
    _, h_max, _ = spectrum_extrema(hf)
    evolution = _GroverEvolution(s, cost, cfg.layers)

    names = [g.spec.describe() for g in gadgets]
    with time_block("gm_qaoa_solve", metrics_path, n=inst.n, layers=cfg.layers, gadgets=names):
        if cfg.layers == 0:
            x = np.zeros(0)
        else:
            seed_angles = evolution.grid_seed(cfg.grid)
            rng = np.random.default_rng(cfg.seed)
            starts = [np.concatenate([np.full(cfg.layers, seed_angles[0]), np.full(cfg.layers, seed_angles[1])])]
            starts += uniform_starts(rng, cfg.restarts - 1, 2 * cfg.layers)
            outcome = multi_start_minimize(evolution.energy, starts, max_evals=cfg.max_evals)
            x = outcome.x

    psi = evolution.state(x)
    probs = psi.probabilities()
    if abs(probs.sum() - 1.0) > NORM_TOL:
        raise RuntimeError(f"Output distribution sums to {probs.sum():.12f}")
    energy = float(np.dot(cost, probs))
    f_star = float(oracle.f_star)
    denom = f_star - h_max
    # a constant objective makes every assignment optimal
    ar = (energy - h_max) / denom if abs(denom) > 1e-12 else 1.0
    optimal_idx = [ket_index(xs) << flag_count for xs in oracle.optimal]
    p_opt = float(probs[optimal_idx].sum())

    report = SolveReport(
        ar=float(ar),
        p_opt=p_opt,
        distribution=DiagonalVector(psi.m, probs),
        gammas=x[: cfg.layers].copy(),
        betas=x[cfg.layers :].copy(),
        expectation=energy,
        f_star=f_star,
        h_max=float(h_max),
        delta=float(delta),
        n=inst.n,
        flag_count=flag_count,
        optimal=oracle.optimal,
        proper=embedded_proper_mask(gadgets, inst.n),
        seed=cfg.seed,
        gadgets=names,
        state=psi,
    )
    log_event(
        metrics_path,
        {"type": "gm_qaoa_solved", "n": inst.n, "ar": report.ar, "p_opt": report.p_opt, "delta": report.delta},
    )
    return report

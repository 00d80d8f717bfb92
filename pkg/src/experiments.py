"""
Sweep harness for single-constraint and two-constraint gadget experiments.

All randomness derives from one base seed through numpy SeedSequence (PCG64
generators), keyed by the cell coordinates, so results do not depend on worker
count or execution order.
"""
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from .config import DEFAULT_GRID, DEFAULT_MAX_EVALS, DEFAULT_RESTARTS, DEFAULT_SOLVE_RESTARTS
from .gadget_builder import AnsatzConfig, AnsatzMode, FlagMode, GadgetSpec, TrainOptions, train_gadget
from .gm_qaoa import SolveConfig, random_guess_baseline, run_gm_qaoa
from .metrics import time_block
from .problem import LinearConstraint, Sense, random_qcbo
from .utils import basis_bits

CSV_VERSION = 1

# Sweep sense tokens; strict forms map onto integer bounds.
SENSE_TOKENS: Dict[str, Tuple[Sense, int]] = {
    "EQ": (Sense.EQ, 0),
    "LE": (Sense.LE, 0),
    "GE": (Sense.GE, 0),
    "LT": (Sense.LE, -1),
    "GT": (Sense.GE, 1),
}
DEFAULT_SENSES = ("EQ", "LE", "GE")

CASE_SUPPORTS: Dict[int, Tuple[Tuple[int, ...], Tuple[int, ...]]] = {
    1: ((0, 1, 2), (0, 3, 4)),
    2: ((0, 1, 2, 3), (0, 3, 4)),
    3: ((0, 1, 2, 3), (0, 2, 3, 4)),
}
CASE_N = 5
SAMPLING_CAP = 1000

SINGLE_COLUMNS = [
    "row_type", "n", "sense", "b", "status", "gadget_ar", "gadget_fidelity",
    "instance", "delta", "ar", "p_opt", "baseline",
]
TWO_COLUMNS = [
    "row_type", "case", "set", "flag_mode", "sense0", "b0", "sense1", "b1", "gadget_ar",
    "gadget_fidelity", "instance", "delta", "ar", "p_opt", "baseline",
]


class SamplingExhaustedError(RuntimeError):
    pass


def derive_seed(seed: int, *parts: int) -> int:
    return int(np.random.SeedSequence([int(seed), *[int(p) for p in parts]]).generate_state(1)[0])


def sense_constraint(n: int, token: str, b: int) -> LinearConstraint:
    """sum_{i<n} x_i (token) b over n variables."""
    if token not in SENSE_TOKENS:
        raise ValueError(f"Unknown sense {token!r}; expected one of {sorted(SENSE_TOKENS)}")
    sense, shift = SENSE_TOKENS[token]
    return LinearConstraint.from_indices(n, range(n), sense, b + shift)


def satisfiability(constraints: Sequence[LinearConstraint]) -> str:
    """'vacuous' if every assignment is feasible, 'unsatisfiable' if none is, else 'satisfiable'."""
    bits = basis_bits(constraints[0].n)
    mask = np.logical_and.reduce([c.satisfied_many(bits) for c in constraints])
    if mask.all():
        return "vacuous"
    if not mask.any():
        return "unsatisfiable"
    return "satisfiable"


@dataclass(frozen=True)
class SweepSettings:
    seed: int
    layers: int = 1
    mode: AnsatzMode = AnsatzMode.MULTI
    restarts: int = DEFAULT_RESTARTS
    max_evals: int = DEFAULT_MAX_EVALS
    instances: int = 10
    solve_layers: int = 1
    grid: int = DEFAULT_GRID
    solve_restarts: int = DEFAULT_SOLVE_RESTARTS
    metrics_path: Optional[str] = None

    def ansatz(self) -> AnsatzConfig:
        return AnsatzConfig(self.layers, self.mode)

    def train_options(self, seed: int) -> TrainOptions:
        return TrainOptions(seed=seed, restarts=self.restarts, max_evals=self.max_evals)

    def solve_config(self, seed: int) -> SolveConfig:
        return SolveConfig(layers=self.solve_layers, seed=seed, restarts=self.solve_restarts, grid=self.grid)


def _solve_rows(
    base: Dict, gadget, constraints: Sequence[LinearConstraint], settings: SweepSettings, seed_parts: Tuple[int, ...]
) -> List[Dict]:
    rows = []
    for i in range(settings.instances):
        inst = random_qcbo(constraints, seed=derive_seed(settings.seed, *seed_parts, i))
        report = run_gm_qaoa(
            inst, gadget, settings.solve_config(derive_seed(settings.seed, *seed_parts, i, 1)), settings.metrics_path
        )
        rows.append(
            {
                **base,
                "row_type": "qcbo",
                "instance": i,
                "delta": report.delta,
                "ar": report.ar,
                "p_opt": report.p_opt,
                "baseline": random_guess_baseline(inst),
            }
        )
    return rows


def single_cell(args: Tuple[int, str, int, SweepSettings]) -> List[Dict]:
    n, token, b, settings = args
    constraint = sense_constraint(n, token, b)
    status = satisfiability([constraint])
    sense_idx = list(SENSE_TOKENS).index(token)
    spec = GadgetSpec.from_constraints([constraint], FlagMode.PER_CONSTRAINT)
    with time_block("sweep_cell", settings.metrics_path, sweep="single", n=n, sense=token, b=b):
        gadget = train_gadget(
            spec, settings.ansatz(), settings.train_options(derive_seed(settings.seed, 0, n, sense_idx, b)),
            settings.metrics_path,
        )
        base = {
            "n": n, "sense": token, "b": b, "status": status,
            "gadget_ar": gadget.gadget_ar, "gadget_fidelity": gadget.fidelity,
        }
        rows = [{**base, "row_type": "gadget", "instance": -1}]
        if status != "unsatisfiable":
            rows += _solve_rows(base, gadget, [constraint], settings, (1, n, sense_idx, b))
    return rows


def sample_constraint_sets(
    case: int,
    count: int,
    rng: np.random.Generator,
    senses: Sequence[str] = DEFAULT_SENSES,
    max_tries: int = SAMPLING_CAP,
) -> List[Tuple[LinearConstraint, LinearConstraint]]:
    """Distinct (sense, b) pairs for the case supports with at least one joint feasible assignment."""
    if case not in CASE_SUPPORTS:
        raise ValueError(f"Unknown overlap case {case}; expected one of {sorted(CASE_SUPPORTS)}")
    supports = CASE_SUPPORTS[case]
    seen = set()
    out = []
    tries = 0
    while len(out) < count:
        if tries >= max_tries:
            raise SamplingExhaustedError(
                f"Only {len(out)} of {count} satisfiable constraint sets for case {case} after {max_tries} draws"
            )
        tries += 1
        draw = tuple(
            (senses[int(rng.integers(len(senses)))], int(rng.integers(0, len(supp) + 2))) for supp in supports
        )
        if draw in seen:
            continue
        cons = tuple(
            LinearConstraint.from_indices(CASE_N, supp, *_sense_rhs(token, b))
            for supp, (token, b) in zip(supports, draw)
        )
        if satisfiability(cons) == "unsatisfiable":
            continue
        seen.add(draw)
        out.append(cons)
    return out


def _sense_rhs(token: str, b: int) -> Tuple[Sense, int]:
    sense, shift = SENSE_TOKENS[token]
    return sense, b + shift


def two_constraint_cell(args: Tuple[int, int, Tuple[LinearConstraint, ...], Tuple[str, int, str, int], SweepSettings]) -> List[Dict]:
    case, set_idx, cons, labels, settings = args
    sense0, b0, sense1, b1 = labels
    rows = []
    for mode_idx, mode in enumerate((FlagMode.SINGLE, FlagMode.PER_CONSTRAINT)):
        spec = GadgetSpec.from_constraints(cons, mode)
        with time_block("sweep_cell", settings.metrics_path, sweep="two", case=case, set=set_idx, flag_mode=mode.value):
            gadget = train_gadget(
                spec, settings.ansatz(), settings.train_options(derive_seed(settings.seed, 2, case, set_idx, mode_idx)),
                settings.metrics_path,
            )
            base = {
                "case": case, "set": set_idx, "flag_mode": mode.value,
                "sense0": sense0, "b0": b0, "sense1": sense1, "b1": b1,
                "gadget_ar": gadget.gadget_ar, "gadget_fidelity": gadget.fidelity,
            }
            rows.append({**base, "row_type": "gadget", "instance": -1})
            # identical instances for both flag modes
            rows += _solve_rows(base, gadget, cons, settings, (3, case, set_idx))
    return rows


def run_cells(cell_fn: Callable[[Tuple], List[Dict]], cells: Sequence[Tuple], workers: int = 1, desc: str = "Cells") -> List[Dict]:
    rows: List[Dict] = []
    if workers <= 1:
        for cell in tqdm(cells, desc=desc):
            rows.extend(cell_fn(cell))
        return rows
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for cell_rows in tqdm(pool.map(cell_fn, cells), total=len(cells), desc=desc):
            rows.extend(cell_rows)
    return rows


def sweep_single(
    n_max: int, b_max: int, senses: Sequence[str], settings: SweepSettings, workers: int = 1
) -> pd.DataFrame:
    for token in senses:
        if token not in SENSE_TOKENS:
            raise ValueError(f"Unknown sense {token!r}; expected one of {sorted(SENSE_TOKENS)}")
    cells = [(n, token, b, settings) for n in range(1, n_max + 1) for token in senses for b in range(0, b_max + 1)]
    rows = run_cells(single_cell, cells, workers, desc="Single-constraint cells")
    return _frame(rows, SINGLE_COLUMNS, ["row_type", "n", "sense", "b", "instance"])


def sweep_two_constraint(
    case: int, sets: int, settings: SweepSettings, workers: int = 1, senses: Sequence[str] = DEFAULT_SENSES
) -> pd.DataFrame:
    rng = np.random.default_rng(derive_seed(settings.seed, 4, case))
    constraint_sets = sample_constraint_sets(case, sets, rng, senses)
    cells = []
    for set_idx, cons in enumerate(constraint_sets):
        labels = (_token(cons[0]), cons[0].rhs, _token(cons[1]), cons[1].rhs)
        cells.append((case, set_idx, cons, labels, settings))
    rows = run_cells(two_constraint_cell, cells, workers, desc=f"Case {case} sets")
    return _frame(rows, TWO_COLUMNS, ["row_type", "case", "set", "flag_mode", "instance"])


def _token(c: LinearConstraint) -> str:
    return c.sense.value


def _frame(rows: List[Dict], columns: List[str], order: List[str]) -> pd.DataFrame:
    df = pd.DataFrame(rows, columns=columns)
    if df.empty:
        return df
    return df.sort_values(by=order, kind="mergesort").reset_index(drop=True)


def write_csv(df: pd.DataFrame, path: str, name: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# {name} v{CSV_VERSION}\n")
        df.to_csv(f, index=False, float_format="%.12g", na_rep="", lineterminator="\n")


def read_csv(path: str) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def summarize_single(df: pd.DataFrame) -> Dict[str, float]:
    gadgets = df[df["row_type"] == "gadget"]
    qcbo = df[df["row_type"] == "qcbo"]
    sat = gadgets[gadgets["status"] == "satisfiable"]
    trivial = gadgets[gadgets["status"] != "satisfiable"]
    return {
        "gadgets": int(len(gadgets)),
        "min_gadget_ar_satisfiable": float(sat["gadget_ar"].min()) if len(sat) else float("nan"),
        "min_gadget_ar_trivial": float(trivial["gadget_ar"].min()) if len(trivial) else float("nan"),
        "instances": int(len(qcbo)),
        "share_ar_ge_0_8": float((qcbo["ar"] >= 0.8).mean()) if len(qcbo) else float("nan"),
        "share_beats_baseline": float((qcbo["p_opt"] > qcbo["baseline"]).mean()) if len(qcbo) else float("nan"),
    }


def summarize_two(df: pd.DataFrame) -> Dict[str, float]:
    gadgets = df[df["row_type"] == "gadget"]
    qcbo = df[df["row_type"] == "qcbo"]
    by_mode = gadgets.groupby("flag_mode")["gadget_ar"].mean().to_dict()
    return {
        "gadgets": int(len(gadgets)),
        "min_gadget_ar": float(gadgets["gadget_ar"].min()) if len(gadgets) else float("nan"),
        "mean_gadget_ar_single": float(by_mode.get("single", float("nan"))),
        "mean_gadget_ar_per_constraint": float(by_mode.get("per-constraint", float("nan"))),
        "instances": int(len(qcbo)),
        "share_ar_gt_1": float((qcbo["ar"] > 1.0).mean()) if len(qcbo) else float("nan"),
    }

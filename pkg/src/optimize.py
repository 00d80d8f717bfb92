from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .config import DEFAULT_FATOL, DEFAULT_MAX_EVALS


@dataclass
class RestartResult:
    index: int
    x: np.ndarray
    fun: float
    converged: bool
    evaluations: int


@dataclass
class MultiStartOutcome:
    x: np.ndarray
    fun: float
    best_restart: int
    restarts: int
    evaluations: int
    converged: bool
    runs: List[RestartResult] = field(default_factory=list)


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0: np.ndarray,
    max_evals: int = DEFAULT_MAX_EVALS,
    fatol: float = DEFAULT_FATOL,
):
    """
    Adaptive Nelder-Mead, re-seeded from its own result while the budget lasts
    and each pass still improves by more than fatol.
    """
    x = np.asarray(x0, dtype=float)
    used = 0
    best = None
    while used < max_evals:
        res = minimize(
            objective,
            x,
            method="Nelder-Mead",
            options={"maxfev": max_evals - used, "fatol": fatol, "xatol": 1e-8, "adaptive": True},
        )
        used += int(res.nfev)
        improved = best is None or res.fun < best.fun - fatol
        if best is None or res.fun < best.fun:
            best = res
        if not improved:
            break
        x = np.asarray(res.x, dtype=float)
    best.nfev = used
    return best


def multi_start_minimize(
    objective: Callable[[np.ndarray], float],
    starts: Sequence[np.ndarray],
    max_evals: int = DEFAULT_MAX_EVALS,
    fatol: float = DEFAULT_FATOL,
    stop: Optional[Callable[[np.ndarray, float], bool]] = None,
) -> MultiStartOutcome:
    """
    Run Nelder-Mead from every start; best value wins, ties go to the lowest index.
    `stop(x, fun)` returning True after a restart skips the remaining starts.
    """
    if len(starts) == 0:
        raise ValueError("multi_start_minimize needs at least one starting point")
    runs: List[RestartResult] = []
    best: Optional[RestartResult] = None
    for run, x0 in enumerate(starts):
        x0 = np.asarray(x0, dtype=float)
        if x0.size == 0:
            # nothing to optimize: evaluate once
            result = RestartResult(run, x0, float(objective(x0)), True, 1)
        else:
            res = nelder_mead(objective, x0, max_evals=max_evals, fatol=fatol)
            result = RestartResult(run, np.asarray(res.x, dtype=float), float(res.fun), bool(res.success), int(res.nfev))
        runs.append(result)
        if best is None or result.fun < best.fun - 1e-15:
            best = result
        if stop is not None and stop(result.x, result.fun):
            break
    return MultiStartOutcome(
        x=best.x,
        fun=best.fun,
        best_restart=best.index,
        restarts=len(runs),
        evaluations=sum(r.evaluations for r in runs),
        converged=best.converged,
        runs=runs,
    )


def uniform_starts(rng: np.random.Generator, count: int, dim: int) -> List[np.ndarray]:
    """Angles drawn uniformly from [0, 2*pi)."""
    return [rng.uniform(0.0, 2 * np.pi, size=dim) for _ in range(count)]

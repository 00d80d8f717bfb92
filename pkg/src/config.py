import os

from dotenv import load_dotenv

load_dotenv(".env.local")


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"Environment variable {name} must be an integer, got {raw!r}")


# Hard limits
MAX_QUBITS = 24
BRUTE_FORCE_MAX_VARS = 24
LABEL_MAX_VARS = 12
TRAIN_MAX_QUBITS = 12
SELF_CHECK_MAX_VARS = 12

PRUNE_EPS = 1e-12
NORM_TOL = 1e-9
GROUND_TOL = 1e-7

# Tunables (env overridable)
DEFAULT_SEED = _env_int("GADGET_SEED", 0)
DEFAULT_RESTARTS = _env_int("GADGET_RESTARTS", 20)
DEFAULT_MAX_EVALS = _env_int("GADGET_MAX_EVALS", 2000)
# Gadget training budget per restart is at least this many evaluations per angle.
EVALS_PER_PARAM = _env_int("GADGET_EVALS_PER_PARAM", 500)
DEFAULT_FATOL = 1e-10
DEFAULT_GRID = _env_int("GM_QAOA_GRID", 32)
DEFAULT_SOLVE_RESTARTS = _env_int("GM_QAOA_RESTARTS", 4)
DEFAULT_WORKERS = _env_int("SWEEP_WORKERS", 1)

OUT_DIR = os.getenv("OUT_DIR", "out")
STORE_PATH = os.getenv("GADGET_STORE", os.path.join(OUT_DIR, "gadget_store.json"))
METRICS_PATH = os.getenv("METRICS_PATH", os.path.join(OUT_DIR, "metrics.jsonl"))

# Random objective coefficients are integers drawn uniformly from this range.
COEFF_RANGE = (-5, 5)

import argparse
import os
from typing import List, Optional

from .config import DEFAULT_GRID, DEFAULT_MAX_EVALS, DEFAULT_RESTARTS, DEFAULT_SEED, DEFAULT_WORKERS, METRICS_PATH, OUT_DIR
from .experiments import (
    CASE_SUPPORTS,
    SamplingExhaustedError,
    SweepSettings,
    summarize_two,
    sweep_two_constraint,
    write_csv,
)
from .gadget_builder import AnsatzMode
from .metrics import summarize_metrics


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        description="Two overlapping constraints: compare single-flag and per-constraint-flag gadgets"
    )
    parser.add_argument("--case", type=int, choices=sorted(CASE_SUPPORTS), required=True,
                        help="Overlap case: supports share one, two or three variables")
    parser.add_argument("--sets", type=int, default=10, help="Satisfiable constraint sets to sample")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--layers", type=int, default=1, help="Gadget ansatz layers")
    parser.add_argument("--ansatz", choices=[m.value for m in AnsatzMode], default=AnsatzMode.MULTI.value)
    parser.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    parser.add_argument("--max-evals", type=int, default=DEFAULT_MAX_EVALS)
    parser.add_argument("--instances", type=int, default=10, help="Random QCBOs per set and flag mode")
    parser.add_argument("--grid", type=int, default=DEFAULT_GRID)
    parser.add_argument("--workers", type=int, default=DEFAULT_WORKERS)
    parser.add_argument("--out", default=None, help="CSV path (default: <OUT_DIR>/sweep_two_case<N>.csv)")
    parser.add_argument("--metrics", default=METRICS_PATH, help="JSONL metrics path ('' disables)")
    args = parser.parse_args(argv)

    if args.sets < 1 or args.instances < 0 or args.layers < 1:
        raise SystemExit("--sets and --layers must be >= 1; --instances must be >= 0")
    out = args.out or os.path.join(OUT_DIR, f"sweep_two_case{args.case}.csv")
    settings = SweepSettings(
        seed=args.seed,
        layers=args.layers,
        mode=AnsatzMode(args.ansatz),
        restarts=args.restarts,
        max_evals=args.max_evals,
        instances=args.instances,
        grid=args.grid,
        metrics_path=args.metrics or None,
    )
    print(f"Two-constraint sweep, case {args.case}: supports {CASE_SUPPORTS[args.case]}, {args.sets} set(s)")
    try:
        df = sweep_two_constraint(args.case, args.sets, settings, workers=args.workers)
    except SamplingExhaustedError as e:
        raise SystemExit(str(e))
    write_csv(df, out, f"sweep_two_case{args.case}")
    print(f"Wrote {out} ({len(df)} rows)")
    for name, value in summarize_two(df).items():
        print(f"- {name}: {value:.6g}")
    if args.metrics:
        print(summarize_metrics(args.metrics))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

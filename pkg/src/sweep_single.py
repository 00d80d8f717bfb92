import argparse
import os
from typing import List, Optional

from .config import DEFAULT_GRID, DEFAULT_MAX_EVALS, DEFAULT_RESTARTS, DEFAULT_SEED, DEFAULT_WORKERS, METRICS_PATH, OUT_DIR
from .experiments import DEFAULT_SENSES, SENSE_TOKENS, SweepSettings, summarize_single, sweep_single, write_csv
from .gadget_builder import AnsatzMode
from .metrics import summarize_metrics


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        description="Train a gadget for every sum(x_i) <sense> b cell and solve random QCBOs with each"
    )
    parser.add_argument("--n-max", type=int, default=5, help="Largest constraint size n (grid is 1..n_max)")
    parser.add_argument("--b-max", type=int, default=5, help="Largest right-hand side b (grid is 0..b_max)")
    parser.add_argument(
        "--senses", default=",".join(DEFAULT_SENSES),
        help=f"Comma-separated senses from {','.join(SENSE_TOKENS)} (LT/GT give the five-sense grid)",
    )
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--layers", type=int, default=1, help="Gadget ansatz layers")
    parser.add_argument("--ansatz", choices=[m.value for m in AnsatzMode], default=AnsatzMode.MULTI.value)
    parser.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    parser.add_argument("--max-evals", type=int, default=DEFAULT_MAX_EVALS)
    parser.add_argument("--instances", type=int, default=10, help="Random QCBOs per satisfiable cell")
    parser.add_argument("--grid", type=int, default=DEFAULT_GRID)
    parser.add_argument("--workers", type=int, default=DEFAULT_WORKERS)
    parser.add_argument("--out", default=os.path.join(OUT_DIR, "sweep_single.csv"))
    parser.add_argument("--metrics", default=METRICS_PATH, help="JSONL metrics path ('' disables)")
    args = parser.parse_args(argv)

    senses = [s.strip().upper() for s in args.senses.split(",") if s.strip()]
    unknown = [s for s in senses if s not in SENSE_TOKENS]
    if unknown or not senses:
        raise SystemExit(f"Unknown sense(s) {unknown}; choose from {','.join(SENSE_TOKENS)}")
    if args.n_max < 1 or args.b_max < 0 or args.instances < 0 or args.layers < 1:
        raise SystemExit("--n-max and --layers must be >= 1; --b-max and --instances must be >= 0")

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
    cells = args.n_max * len(senses) * (args.b_max + 1)
    print(f"Single-constraint sweep: {cells} gadget cell(s), {args.instances} instance(s) per satisfiable cell")
    df = sweep_single(args.n_max, args.b_max, senses, settings, workers=args.workers)
    write_csv(df, args.out, "sweep_single")
    print(f"Wrote {args.out} ({len(df)} rows)")
    for name, value in summarize_single(df).items():
        print(f"- {name}: {value:.6g}")
    if args.metrics:
        print(summarize_metrics(args.metrics))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

import argparse
import json
from typing import List, Optional

from .cli_common import (
    add_gadget_args,
    add_store_args,
    ansatz_from_args,
    open_store,
    train_options_from_args,
    write_json,
)
from .config import DEFAULT_GRID, DEFAULT_SOLVE_RESTARTS, MAX_QUBITS, TRAIN_MAX_QUBITS
from .gadget_builder import FlagMode, GadgetSpec
from .gadget_store import obtain_gadget
from .gm_qaoa import InfeasibleInstanceError, SolveConfig, run_gm_qaoa
from .metrics import summarize_metrics
from .models import QcboInstanceModel, SolveReportDocument
from .problem import support
from .validate import validate_instance_document, validate_solve_report


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Solve a QCBO instance with GM-QAOA and a constraint gadget")
    parser.add_argument("instance", help="QCBO instance JSON: {n, q: [[i, j, coeff]...], constraints: [...]}")
    parser.add_argument("--layers", type=int, default=1, help="GM-QAOA layers (0 reports the gadget state itself)")
    add_gadget_args(parser, layers_flag="--gadget-layers")
    add_store_args(parser)
    parser.add_argument("--delta", type=float, default=None, help="Flag penalty (default: 5 + 2|f_min|)")
    parser.add_argument("--grid", type=int, default=DEFAULT_GRID, help="Angle grid density for the first layer")
    parser.add_argument("--solve-restarts", type=int, default=DEFAULT_SOLVE_RESTARTS, help="Angle refinement restarts")
    parser.add_argument(
        "--gadgets", choices=["combined", "separate"], default="combined",
        help="One gadget for all constraints, or one per constraint (supports must be disjoint)",
    )
    parser.add_argument("--shots", type=int, default=0, help="Also sample this many seeded measurement shots")
    parser.add_argument("--threshold", type=float, default=1e-6, help="Omit kets below this probability")
    parser.add_argument("--out", default=None, help="Write the report JSON here")
    args = parser.parse_args(argv)

    try:
        with open(args.instance, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise SystemExit(f"Cannot read instance {args.instance}: {e}")
    ok, msg = validate_instance_document(doc)
    if not ok:
        raise SystemExit(msg)
    inst = QcboInstanceModel.model_validate(doc).to_instance()
    if not inst.constraints:
        raise SystemExit("Instance has no constraints; a gadget needs at least one")
    if args.layers < 0:
        raise SystemExit(f"--layers must be non-negative, got {args.layers}")

    flag_mode = FlagMode(args.flag_mode)
    if args.gadgets == "separate":
        supports = [set(support(c)) for c in inst.constraints]
        for i in range(len(supports)):
            for j in range(i + 1, len(supports)):
                if supports[i] & supports[j]:
                    raise SystemExit(f"Constraints {i} and {j} share variables; use --gadgets combined")
        specs = [GadgetSpec.from_constraints([c], flag_mode) for c in inst.constraints]
    else:
        specs = [GadgetSpec.from_constraints(list(inst.constraints), flag_mode)]
    for spec in specs:
        if spec.m > TRAIN_MAX_QUBITS:
            raise SystemExit(f"{spec.describe()} needs {spec.m} qubits; gadget training is limited to {TRAIN_MAX_QUBITS}")
    total = inst.n + sum(spec.flag_count for spec in specs)
    if total > MAX_QUBITS:
        raise SystemExit(f"Instance needs {total} qubits with flags; simulation is limited to {MAX_QUBITS}")

    config = ansatz_from_args(args)
    options = train_options_from_args(args)
    store = open_store(args)
    metrics_path = args.metrics or None
    gadgets, keys = [], []
    for spec in specs:
        gadget, key, from_store = obtain_gadget(spec, config, options, store, metrics_path)
        print(f"Gadget {spec.describe()}: gadget_ar={gadget.gadget_ar:.9f}{' (library)' if from_store else ''}")
        gadgets.append(gadget)
        keys.append(key)
    if store is not None:
        store.save()

    cfg = SolveConfig(
        layers=args.layers, delta=args.delta, seed=args.seed, restarts=args.solve_restarts, grid=args.grid
    )
    try:
        report = run_gm_qaoa(inst, gadgets, cfg, metrics_path)
    except InfeasibleInstanceError as e:
        raise SystemExit(f"Refusing to solve: {e}")
    ok, msg = validate_solve_report(report)
    if not ok:
        raise SystemExit(f"Solve report failed validation: {msg}")

    out = report.to_document(threshold=args.threshold)
    out["key"] = " | ".join(keys)
    if args.shots > 0:
        out["counts"] = report.state.sample_counts(args.shots, args.seed)
    write_json(args.out, SolveReportDocument.model_validate(out).model_dump(exclude_none=True))
    print(f"AR={report.ar:.6f} p_opt={report.p_opt:.6f} modal ket {report.modal_ket()} (delta={report.delta:g})")
    if metrics_path:
        print(summarize_metrics(metrics_path))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

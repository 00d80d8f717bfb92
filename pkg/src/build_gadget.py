import argparse
from typing import List, Optional

from .cli_common import (
    add_gadget_args,
    add_store_args,
    ansatz_from_args,
    open_store,
    train_options_from_args,
    write_json,
)
from .config import TRAIN_MAX_QUBITS
from .constraint_parser import ConstraintParseError, parse_constraints, split_constraints
from .gadget_builder import FlagMode, GadgetSpec
from .gadget_store import obtain_gadget
from .metrics import summarize_metrics
from .models import GadgetBuildSummary, HamiltonianModel


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Train (or fetch) a constraint gadget and add it to the library")
    parser.add_argument(
        "constraints", nargs="+",
        help="Constraints such as 'x0 + x1 = 1'; separate several with ';' or pass them as separate arguments",
    )
    add_gadget_args(parser)
    add_store_args(parser)
    parser.add_argument("--out", default=None, help="Write the build summary JSON here")
    args = parser.parse_args(argv)

    texts = [t for raw in args.constraints for t in split_constraints(raw)]
    try:
        constraints = parse_constraints(texts)
    except ConstraintParseError as e:
        raise SystemExit(f"Parse error: {e}")

    spec = GadgetSpec.from_constraints(constraints, FlagMode(args.flag_mode))
    if spec.m > TRAIN_MAX_QUBITS:
        raise SystemExit(f"{spec.describe()} needs {spec.m} qubits; gadget training is limited to {TRAIN_MAX_QUBITS}")
    config = ansatz_from_args(args)
    store = open_store(args)
    metrics_path = args.metrics or None

    print(f"Gadget {spec.describe()}: {spec.k} variable(s), {spec.flag_count} flag(s), {config.mode.value} p={config.layers}")
    gadget, key, from_store = obtain_gadget(spec, config, train_options_from_args(args), store, metrics_path)
    if store is not None:
        store.save()
        print(f"Library {args.store}: {len(store)} gadget(s){' (hit)' if from_store else ''}")

    summary = GadgetBuildSummary(
        key=key,
        gadget=spec.describe(),
        mode=config.mode.value,
        layers=config.layers,
        qubits=spec.m,
        gadget_ar=gadget.gadget_ar,
        fidelity=gadget.fidelity,
        expectation=gadget.expectation,
        converged=gadget.converged,
        from_store=from_store,
        hamiltonian=HamiltonianModel.model_validate(gadget.hamiltonian.to_dict()),
    )
    write_json(args.out, summary.model_dump())
    print(f"gadget_ar={gadget.gadget_ar:.9f} fidelity={gadget.fidelity:.9f}")
    if metrics_path:
        print(summarize_metrics(metrics_path))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

import argparse
import json
import os
from typing import Dict, Optional

from .config import DEFAULT_MAX_EVALS, DEFAULT_RESTARTS, DEFAULT_SEED, METRICS_PATH, STORE_PATH
from .gadget_builder import AnsatzConfig, AnsatzMode, FlagMode, TrainOptions
from .gadget_store import GadgetStore, GadgetStoreError


def add_gadget_args(parser: argparse.ArgumentParser, layers_flag: str = "--layers") -> None:
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Base seed for every random choice")
    parser.add_argument(layers_flag, dest="gadget_layers", type=int, default=1, help="Ansatz layers for gadget training")
    parser.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS, help="Nelder-Mead restarts per gadget")
    parser.add_argument(
        "--max-evals", type=int, default=DEFAULT_MAX_EVALS,
        help="Evaluation budget per restart (gadget training uses at least GADGET_EVALS_PER_PARAM per angle)",
    )
    parser.add_argument(
        "--ansatz", choices=[m.value for m in AnsatzMode], default=AnsatzMode.MULTI.value,
        help="qaoa: one angle pair per layer; ma-qaoa: one angle per term and per qubit",
    )
    parser.add_argument(
        "--flag-mode", choices=[m.value for m in FlagMode], default=FlagMode.PER_CONSTRAINT.value,
        help="One flag qubit per constraint or a single shared flag",
    )
    parser.add_argument("--metrics", default=METRICS_PATH, help="JSONL metrics path ('' disables)")


def add_store_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--store", default=STORE_PATH, help="Gadget library JSON file")
    parser.add_argument("--no-store", action="store_true", help="Train without reading or writing the gadget library")


def ansatz_from_args(args) -> AnsatzConfig:
    if args.gadget_layers < 1:
        raise SystemExit(f"Gadget layers must be at least 1, got {args.gadget_layers}")
    return AnsatzConfig(args.gadget_layers, AnsatzMode(args.ansatz))


def train_options_from_args(args) -> TrainOptions:
    if args.restarts < 1 or args.max_evals < 1:
        raise SystemExit("--restarts and --max-evals must be positive")
    return TrainOptions(seed=args.seed, restarts=args.restarts, max_evals=args.max_evals)


def open_store(args) -> Optional[GadgetStore]:
    if args.no_store or not args.store:
        return None
    try:
        return GadgetStore(args.store, metrics_path=args.metrics or None)
    except GadgetStoreError as e:
        raise SystemExit(str(e))


def write_json(path: Optional[str], doc: Dict) -> None:
    text = json.dumps(doc, indent=2)
    print(text)
    if path:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        print(f"Wrote {path}")

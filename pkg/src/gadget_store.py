"""
Constraint gadget library: trained gadgets keyed by a relabeling-invariant form
of their constraints, persisted as one JSON file.
"""
import json
import os
import tempfile
from typing import Dict, List, Optional, Tuple

import numpy as np
from jsonschema import ValidationError, validate

from .gadget_builder import (
    AnsatzConfig,
    GadgetSpec,
    TrainedGadget,
    TrainOptions,
    relabel_gadget,
    train_gadget,
)
from .metrics import log_event, time_block
from .models import HamiltonianModel
from .problem import LinearConstraint, Sense
from .schemas import gadget_store_schema

STORE_VERSION = 1


class GadgetStoreError(RuntimeError):
    pass


def _canonical_order(spec: GadgetSpec) -> List[int]:
    """Local variables sorted by their coefficient profile across the constraints."""
    profiles = [tuple(c.coeffs[j] for c in spec.constraints) for j in range(spec.k)]
    return sorted(range(spec.k), key=lambda j: (profiles[j], j))


def canonical_spec(spec: GadgetSpec) -> GadgetSpec:
    order = _canonical_order(spec)
    constraints = tuple(
        LinearConstraint(tuple(c.coeffs[j] for j in order), c.sense, c.rhs) for c in spec.constraints
    )
    return GadgetSpec(constraints, tuple(range(spec.k)), spec.flag_mode)


def canonicalize(spec: GadgetSpec, config: AnsatzConfig) -> Tuple[str, Tuple[int, ...]]:
    """
    Returns (key, permutation) where permutation[i] is the caller's variable index
    for canonical variable i.
    """
    order = _canonical_order(spec)
    body = {
        "constraints": [[[c.coeffs[j] for j in order], c.sense.value, c.rhs] for c in spec.constraints],
        "flag_mode": spec.flag_mode.value,
        "layers": config.layers,
        "mode": config.mode.value,
    }
    key = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return key, tuple(spec.variables[j] for j in order)


def record_from_gadget(key: str, gadget: TrainedGadget) -> Dict:
    return {
        "key": key,
        "spec": {
            "flag_mode": gadget.spec.flag_mode.value,
            "constraints": [
                {"coeffs": list(c.coeffs), "sense": c.sense.value, "rhs": c.rhs} for c in gadget.spec.constraints
            ],
        },
        "hamiltonian": gadget.hamiltonian.to_dict(),
        "config": {"layers": gadget.config.layers, "mode": gadget.config.mode.value},
        "gammas": [float(g) for g in gadget.gammas],
        "betas": [float(b) for b in gadget.betas],
        "expectation": float(gadget.expectation),
        "gadget_ar": float(gadget.gadget_ar),
        "fidelity": float(gadget.fidelity),
        "seed": int(gadget.seed),
        "converged": bool(gadget.converged),
    }


def gadget_from_record(record: Dict) -> TrainedGadget:
    constraints = tuple(
        LinearConstraint(tuple(c["coeffs"]), Sense(c["sense"]), c["rhs"]) for c in record["spec"]["constraints"]
    )
    k = len(constraints[0].coeffs)
    spec = GadgetSpec(constraints, tuple(range(k)), record["spec"]["flag_mode"])
    return TrainedGadget(
        spec=spec,
        hamiltonian=HamiltonianModel.model_validate(record["hamiltonian"]).to_hamiltonian(),
        config=AnsatzConfig(record["config"]["layers"], record["config"]["mode"]),
        gammas=np.array(record["gammas"], dtype=float),
        betas=np.array(record["betas"], dtype=float),
        expectation=record["expectation"],
        gadget_ar=record["gadget_ar"],
        fidelity=record["fidelity"],
        seed=record["seed"],
        converged=record.get("converged", True),
    )


class GadgetStore:
    def __init__(self, path: Optional[str], metrics_path: Optional[str] = None):
        self.path = path
        self.metrics_path = metrics_path
        self._records: Dict[str, Dict] = {}
        if path and os.path.exists(path):
            with time_block("store_load", metrics_path, path=path):
                self._load()

    def _load(self) -> None:
        try:
            with open(self.path, "r", encoding="utf-8") as f:
                doc = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise GadgetStoreError(f"Cannot read gadget store {self.path}: {e}") from e
        if isinstance(doc, dict) and doc.get("version") not in (None, STORE_VERSION):
            raise GadgetStoreError(
                f"Gadget store {self.path} has version {doc.get('version')}, expected {STORE_VERSION}"
            )
        try:
            validate(doc, gadget_store_schema()["schema"])
        except ValidationError as e:
            raise GadgetStoreError(f"Gadget store {self.path} is malformed: {e.message}") from e
        for rec in doc["records"]:
            self._records[rec["key"]] = rec

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, key: str) -> bool:
        return key in self._records

    def keys(self) -> List[str]:
        return sorted(self._records)

    def get(self, key: str) -> Optional[TrainedGadget]:
        rec = self._records.get(key)
        return gadget_from_record(rec) if rec is not None else None

    def put(self, key: str, gadget: TrainedGadget) -> bool:
        """Store unless an existing record for the key has an equal or higher gadget_ar."""
        current = self._records.get(key)
        if current is not None and current["gadget_ar"] >= gadget.gadget_ar:
            return False
        self._records[key] = record_from_gadget(key, gadget)
        return True

    def to_document(self) -> Dict:
        return {"version": STORE_VERSION, "records": [self._records[k] for k in self.keys()]}

    def save(self) -> None:
        if not self.path:
            return
        directory = os.path.dirname(self.path) or "."
        os.makedirs(directory, exist_ok=True)
        with time_block("store_save", self.metrics_path, path=self.path, records=len(self._records)):
            fd, tmp = tempfile.mkstemp(prefix=".gadget_store.", suffix=".tmp", dir=directory)
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as f:
                    json.dump(self.to_document(), f, indent=2)
                os.replace(tmp, self.path)
            except BaseException:
                if os.path.exists(tmp):
                    os.remove(tmp)
                raise


def obtain_gadget(
    spec: GadgetSpec,
    config: AnsatzConfig,
    options: TrainOptions,
    store: Optional[GadgetStore] = None,
    metrics_path: Optional[str] = None,
) -> Tuple[TrainedGadget, str, bool]:
    """
    Fetch the canonical gadget from the store (training and storing it on a miss),
    then relabel it onto the caller's variables. Returns (gadget, key, from_store).
    """
    key, perm = canonicalize(spec, config)
    cached = store.get(key) if store is not None else None
    from_store = cached is not None
    if cached is None:
        cached = train_gadget(canonical_spec(spec), config, options, metrics_path)
        if store is not None:
            store.put(key, cached)
    log_event(metrics_path, {"type": "store_lookup", "gadget": spec.describe(), "hit": from_store})
    local_perm = [spec.variables.index(v) for v in perm]
    return relabel_gadget(cached, local_perm, spec), key, from_store

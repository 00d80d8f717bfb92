import json
from dataclasses import replace

import numpy as np
import pytest

from src.constraint_parser import parse_constraints
from src.gadget_builder import (
    AnsatzConfig,
    AnsatzMode,
    FlagMode,
    GadgetSpec,
    TrainOptions,
    label_states,
    proper_mass,
)
from src.gadget_store import GadgetStore, GadgetStoreError, canonical_spec, canonicalize, obtain_gadget

CFG = AnsatzConfig(1, AnsatzMode.MULTI)


def spec_of(*texts):
    return GadgetSpec.from_constraints(parse_constraints(list(texts)), FlagMode.PER_CONSTRAINT)


def test_key_ignores_variable_names():
    a, _ = canonicalize(spec_of("x0 + x1 = 1"), CFG)
    b, perm = canonicalize(spec_of("x3 + x7 = 1"), CFG)
    assert a == b
    assert perm == (3, 7)


def test_key_separates_sense_mode_and_depth():
    eq, _ = canonicalize(spec_of("x0 + x1 = 1"), CFG)
    le, _ = canonicalize(spec_of("x0 + x1 <= 1"), CFG)
    shared, _ = canonicalize(spec_of("x0 + x1 = 1"), AnsatzConfig(1, AnsatzMode.SHARED))
    deep, _ = canonicalize(spec_of("x0 + x1 = 1"), AnsatzConfig(2, AnsatzMode.MULTI))
    assert len({eq, le, shared, deep}) == 4


def test_overlap_patterns_share_a_key():
    a, perm_a = canonicalize(spec_of("x0 + x1 = 1", "x0 + x2 = 1"), CFG)
    b, perm_b = canonicalize(spec_of("x5 + x3 = 1", "x5 + x9 = 1"), CFG)
    assert a == b
    assert perm_a == (2, 1, 0)
    assert perm_b == (9, 3, 5)
    canon = canonical_spec(spec_of("x5 + x3 = 1", "x5 + x9 = 1"))
    assert [c.coeffs for c in canon.constraints] == [(0, 1, 1), (1, 0, 1)]


def test_empty_store_misses(tmp_path):
    store = GadgetStore(str(tmp_path / "store.json"))
    assert len(store) == 0
    assert store.get("missing") is None


def test_put_save_reload_is_exact(tmp_path, pair_gadget):
    path = str(tmp_path / "store.json")
    key, _ = canonicalize(pair_gadget.spec, pair_gadget.config)
    store = GadgetStore(path)
    assert store.put(key, pair_gadget)
    store.save()

    again = GadgetStore(path)
    assert key in again
    got = again.get(key)
    assert np.array_equal(got.gammas, pair_gadget.gammas)
    assert np.array_equal(got.betas, pair_gadget.betas)
    assert got.hamiltonian == pair_gadget.hamiltonian
    assert got.gadget_ar == pair_gadget.gadget_ar
    assert got.state().fidelity(pair_gadget.state()) == pytest.approx(1.0)


def test_put_keeps_the_better_gadget(pair_gadget):
    store = GadgetStore(None)
    worse = replace(pair_gadget, gadget_ar=0.5)
    assert store.put("k", worse)
    assert store.put("k", pair_gadget)
    assert not store.put("k", worse)
    assert store.get("k").gadget_ar == 1.0


def test_corrupt_store_raises(tmp_path):
    path = tmp_path / "store.json"
    path.write_text("{not json")
    with pytest.raises(GadgetStoreError):
        GadgetStore(str(path))


def test_wrong_version_raises(tmp_path):
    path = tmp_path / "store.json"
    path.write_text(json.dumps({"version": 2, "records": []}))
    with pytest.raises(GadgetStoreError):
        GadgetStore(str(path))


def test_malformed_record_raises(tmp_path):
    path = tmp_path / "store.json"
    path.write_text(json.dumps({"version": 1, "records": [{"key": "k"}]}))
    with pytest.raises(GadgetStoreError):
        GadgetStore(str(path))


def test_obtain_gadget_trains_once_and_relabels(tmp_path):
    path = str(tmp_path / "store.json")
    opts = TrainOptions(seed=0, restarts=2, max_evals=300)
    spec = spec_of("x5 + x3 = 1", "x5 + x9 = 1")

    store = GadgetStore(path)
    gadget, key, hit = obtain_gadget(spec, CFG, opts, store)
    assert not hit and key in store
    store.save()

    stored = GadgetStore(path).get(key)
    assert proper_mass(gadget.state(), label_states(spec)) == pytest.approx(stored.gadget_ar, abs=1e-9)

    again, key2, hit2 = obtain_gadget(spec_of("x0 + x1 = 1", "x0 + x2 = 1"), CFG, opts, GadgetStore(path))
    assert hit2 and key2 == key
    assert proper_mass(again.state(), again.labels()) == pytest.approx(stored.gadget_ar, abs=1e-9)

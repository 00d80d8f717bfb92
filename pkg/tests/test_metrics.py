import json

import numpy as np

from src.metrics import log_event, summarize_metrics, time_block
from src.optimize import multi_start_minimize
from src.validate import validate_instance_document


def test_log_event_and_summary(tmp_path):
    path = str(tmp_path / "m" / "metrics.jsonl")
    with time_block("gadget_training", path, gadget="{x0 + x1 = 1} [per-constraint]"):
        pass
    log_event(path, {"type": "gadget_trained", "gadget": "{x0 + x1 = 1} [per-constraint]", "gadget_ar": np.float64(0.75)})
    with open(path, encoding="utf-8") as f:
        events = [json.loads(line) for line in f]
    assert [e["type"] for e in events] == ["gadget_training", "gadget_trained"]
    assert events[1]["gadget_ar"] == 0.75
    text = summarize_metrics(path)
    assert "gadget_training: n=1" in text
    assert "Lowest gadget AR:" in text and "0.750000" in text


def test_disabled_metrics_write_nothing(tmp_path):
    log_event(None, {"type": "x"})
    log_event("", {"type": "x"})
    assert summarize_metrics(None) == "No metrics found."
    assert summarize_metrics(str(tmp_path / "absent.jsonl")) == "No metrics found."


def test_multi_start_prefers_lowest_index_on_ties():
    outcome = multi_start_minimize(lambda x: float(np.sum((x - 1.0) ** 2)), [np.zeros(2), np.zeros(2)], max_evals=400)
    assert outcome.best_restart == 0
    assert np.allclose(outcome.x, [1.0, 1.0], atol=1e-4)
    assert outcome.restarts == 2


def test_multi_start_stops_when_callback_accepts():
    outcome = multi_start_minimize(
        lambda x: float(np.sum(x**2)),
        [np.ones(1), np.ones(1), np.ones(1)],
        max_evals=500,
        fatol=1e-6,
        stop=lambda x, f: f <= 1e-6,
    )
    assert outcome.restarts == 1
    assert len(outcome.runs) == 1


def test_instance_document_checks():
    ok, _ = validate_instance_document(
        {"n": 2, "q": [[0, 1, 1.5]], "constraints": [{"coeffs": [1, 1], "sense": "LE", "rhs": 1}]}
    )
    assert ok
    ok, msg = validate_instance_document({"n": 2, "q": [], "constraints": [{"coeffs": [1], "sense": "LE", "rhs": 1}]})
    assert not ok and "coefficients" in msg
    ok, msg = validate_instance_document({"n": 2, "q": [], "constraints": [], "extra": 1})
    assert not ok

import numpy as np
import pytest

from src.constraint_parser import parse_constraints
from src.gadget_builder import GadgetSpec, ideal_feasible_state, label_states
from src.gm_qaoa import (
    InfeasibleInstanceError,
    SolveConfig,
    delta_rule,
    embed_gadget_state,
    embed_gadget_states,
    embedded_proper_mask,
    random_guess_baseline,
    run_gm_qaoa,
)
from src.problem import LinearConstraint, QcboInstance, QuadraticObjective, Sense


def pair_instance():
    obj = QuadraticObjective.from_terms(2, [(0, 0, 3), (1, 1, 4), (0, 1, 1)])
    return QcboInstance(obj, (LinearConstraint.from_indices(2, [0, 1], Sense.EQ, 1),))


def overlap_instance():
    obj = QuadraticObjective.from_terms(
        3, [(0, 0, 3), (0, 1, -1), (0, 2, 4), (1, 1, -2), (1, 2, -5), (2, 2, 1)]
    )
    cons = (
        LinearConstraint.from_indices(3, [0, 1], Sense.EQ, 1),
        LinearConstraint.from_indices(3, [0, 2], Sense.EQ, 1),
    )
    return QcboInstance(obj, cons)


def test_delta_rule_and_baselines():
    assert delta_rule(pair_instance()) == 5.0
    assert delta_rule(overlap_instance()) == 17.0
    assert random_guess_baseline(pair_instance()) == pytest.approx(1 / 4)
    assert random_guess_baseline(overlap_instance()) == pytest.approx(1 / 8)
    flat = QcboInstance(QuadraticObjective.zeros(2), pair_instance().constraints)
    assert random_guess_baseline(flat) == pytest.approx(2 / 4)


def test_pair_instance_one_layer_is_exact(pair_gadget):
    report = run_gm_qaoa(pair_instance(), pair_gadget, SolveConfig(layers=1, delta=10.0, seed=0))
    assert report.p_opt >= 0.99
    assert 0.98 <= report.ar <= 1.01
    assert report.modal_ket() == "100"
    assert report.f_star == 3.0
    assert report.h_max == pytest.approx(8.0)
    assert report.distribution.values.sum() == pytest.approx(1.0)


def test_overlap_instance_concentrates_on_optimum(overlap_gadget):
    report = run_gm_qaoa(overlap_instance(), overlap_gadget, SolveConfig(layers=1, delta=10.0, seed=0))
    assert report.modal_ket() == "01100"
    assert report.optimal_indices() == [0b01100]
    assert report.p_opt > 1 / 8
    assert report.f_star == -6.0
    # proper kets of the two feasible assignments carry clear flags
    feasible = [ket for ket, _ in report.ranked() if ket[3:] == "00" and ket[:3] in ("011", "100")]
    assert feasible == ["01100", "10000"]


def test_zero_layers_reports_gadget_statistics(pair_gadget):
    report = run_gm_qaoa(pair_instance(), pair_gadget, SolveConfig(layers=0, delta=10.0))
    assert report.layers == 0
    assert np.allclose(report.distribution.values, pair_gadget.state().probabilities())
    # feasible kets 010 and 100 share the mass of the ideal state
    assert report.p_opt == pytest.approx(0.25, abs=1e-9)
    assert report.improper_mass() == pytest.approx(0.0, abs=1e-9)


def test_infeasible_instance_raises(pair_gadget):
    obj = QuadraticObjective.zeros(2)
    inst = QcboInstance(obj, (LinearConstraint.from_indices(2, [0, 1], Sense.EQ, 3),))
    with pytest.raises(InfeasibleInstanceError):
        run_gm_qaoa(inst, pair_gadget, SolveConfig(layers=1))


def test_embed_gadget_state_adds_plus_states(pair_gadget):
    s = embed_gadget_state(pair_gadget, 3)
    assert s.m == 4
    g = pair_gadget.state().amps
    for a in range(2):
        for b in range(2):
            for v in range(2):
                local = (a << 2) | (b << 1) | v
                for c in range(2):
                    full = (a << 3) | (b << 2) | (c << 1) | v
                    assert np.isclose(s.amps[full], g[local] / np.sqrt(2))
    assert s.mass(embedded_proper_mask(pair_gadget, 3)) == pytest.approx(1.0, abs=1e-9)


def test_overlapping_gadgets_are_rejected(pair_gadget):
    with pytest.raises(ValueError, match="overlap"):
        embed_gadget_states([pair_gadget, pair_gadget], 2)
    with pytest.raises(ValueError, match="overlap"):
        embed_gadget_state([pair_gadget, pair_gadget], 2)


def test_disjoint_gadgets_tensor_into_combined_gadget(make_gadget):
    angles = dict(gammas=[np.pi / 4], betas=[-np.pi / 4, 0.0, 0.0])
    left = make_gadget(["x0 + x1 = 1"], **angles)
    right = make_gadget(["x2 + x3 = 1"], **angles)
    combined = label_states(GadgetSpec.from_constraints(parse_constraints(["x0 + x1 = 1", "x2 + x3 = 1"])))
    s = embed_gadget_states([left, right], 4)
    assert s.m == combined.m == 6
    assert s.fidelity(ideal_feasible_state(combined)) == pytest.approx(1.0, abs=1e-9)
    assert np.array_equal(embedded_proper_mask([left, right], 4), combined.proper)


@pytest.mark.parametrize("layers", [1, 2])
def test_exact_gadget_keeps_every_layer_proper(pair_gadget, layers):
    cfg = SolveConfig(layers=layers, delta=10.0, seed=0, grid=8, restarts=2, max_evals=400)
    report = run_gm_qaoa(pair_instance(), pair_gadget, cfg)
    assert report.improper_mass() <= 1e-9
    assert report.ar <= 1.0 + 1e-9


def test_report_document_and_determinism(pair_gadget):
    cfg = SolveConfig(layers=2, delta=10.0, seed=3, grid=8, restarts=2, max_evals=400)
    a = run_gm_qaoa(pair_instance(), pair_gadget, cfg)
    b = run_gm_qaoa(pair_instance(), pair_gadget, cfg)
    assert np.array_equal(a.gammas, b.gammas) and np.array_equal(a.betas, b.betas)
    assert a.ar == b.ar
    doc = a.to_document(threshold=0.0)
    assert len(doc["distribution"]) == 8
    assert doc["optimal"] == ["10"]
    assert sum(e["p"] for e in doc["distribution"]) == pytest.approx(1.0)
    assert [e["ket"] for e in doc["distribution"] if e["optimal"]] == ["100"]


def test_solver_logs_metrics(tmp_path, pair_gadget):
    path = tmp_path / "metrics.jsonl"
    run_gm_qaoa(pair_instance(), pair_gadget, SolveConfig(layers=1, delta=10.0, grid=4, restarts=1), str(path))
    text = path.read_text()
    assert '"type": "gm_qaoa_solve"' in text and '"type": "gm_qaoa_solved"' in text

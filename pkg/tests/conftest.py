import numpy as np
import pytest

from src.constraint_parser import parse_constraints
from src.gadget_builder import (
    AnsatzConfig,
    AnsatzMode,
    FlagMode,
    GadgetSpec,
    TrainedGadget,
    build_gadget_hamiltonian,
    label_states,
)


def hand_built_gadget(texts, gammas, betas, flag_mode=FlagMode.PER_CONSTRAINT):
    spec = GadgetSpec.from_constraints(parse_constraints(texts), flag_mode)
    h = build_gadget_hamiltonian(label_states(spec))
    return TrainedGadget(
        spec=spec,
        hamiltonian=h,
        config=AnsatzConfig(1, AnsatzMode.MULTI),
        gammas=np.array(gammas, dtype=float),
        betas=np.array(betas, dtype=float),
        expectation=-1.0,
        gadget_ar=1.0,
        fidelity=1.0,
        seed=0,
    )


@pytest.fixture
def pair_gadget():
    # exp(-i pi/4 Z0 Z1 Zv) then a total RX angle of -pi/4 gives the exact feasible superposition
    return hand_built_gadget(["x0 + x1 = 1"], [np.pi / 4], [-np.pi / 4, 0.0, 0.0])


@pytest.fixture
def overlap_gadget():
    # terms (by mask): Z0Z1Zv0 (1/2), Z0Z2Zv1 (1/2), Z1Z2Zv0Zv1 (-1/2)
    return hand_built_gadget(
        ["x0 + x1 = 1", "x0 + x2 = 1"],
        [np.pi / 2, np.pi / 2, 0.0],
        [0.0, -np.pi / 4, -np.pi / 4, 0.0, 0.0],
    )


@pytest.fixture
def make_gadget():
    return hand_built_gadget

from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator

from .hamiltonian import PauliZTerm, ZHamiltonian
from .problem import LinearConstraint, QcboInstance, QuadraticObjective, Sense


class ConstraintModel(BaseModel):
    coeffs: List[int] = Field(..., min_length=1)
    sense: Literal["EQ", "LE", "GE"]
    rhs: int

    @field_validator("coeffs")
    @classmethod
    def _nonempty_support(cls, v: List[int]):
        if not any(v):
            raise ValueError("Constraint has an empty support (all coefficients are zero)")
        return v

    def to_constraint(self) -> LinearConstraint:
        return LinearConstraint(tuple(self.coeffs), Sense(self.sense), self.rhs)


class QcboInstanceModel(BaseModel):
    n: int = Field(ge=1, le=24)
    q: List[List[float]] = Field(default_factory=list)
    constraints: List[ConstraintModel] = Field(default_factory=list)

    @field_validator("q")
    @classmethod
    def _triples(cls, v: List[List[float]]):
        for entry in v:
            if len(entry) != 3:
                raise ValueError(f"Objective entries are [i, j, coeff] triples, got {entry}")
            if entry[0] != int(entry[0]) or entry[1] != int(entry[1]):
                raise ValueError(f"Objective indices must be integers, got {entry[:2]}")
        return v

    def to_instance(self) -> QcboInstance:
        objective = QuadraticObjective.from_terms(self.n, [(int(i), int(j), c) for i, j, c in self.q])
        constraints = tuple(c.to_constraint() for c in self.constraints)
        return QcboInstance(objective, constraints)


class TermModel(BaseModel):
    mask: int = Field(ge=0)
    coeff: float


class HamiltonianModel(BaseModel):
    m: int = Field(ge=0, le=24)
    terms: List[TermModel]

    def to_hamiltonian(self) -> ZHamiltonian:
        return ZHamiltonian(self.m, (PauliZTerm(t.mask, t.coeff) for t in self.terms))


class KetEntry(BaseModel):
    ket: str = Field(pattern=r"^[01]+$")
    p: float = Field(ge=0, le=1.000000001)
    label: Literal["proper", "improper"]
    optimal: bool


class SolveReportDocument(BaseModel):
    ar: float
    p_opt: float = Field(ge=0, le=1.000000001)
    expectation: float
    f_star: float
    h_max: float
    delta: float = Field(ge=0)
    layers: int = Field(ge=0)
    n: int = Field(ge=1)
    flag_count: int = Field(ge=0)
    gammas: List[float]
    betas: List[float]
    seed: int
    gadgets: List[str]
    optimal: List[str]
    distribution: List[KetEntry]
    key: Optional[str] = None
    counts: Optional[dict] = None

    @field_validator("distribution")
    @classmethod
    def _mass(cls, v: List[KetEntry]):
        total = float(np.sum([e.p for e in v]))
        if total > 1.0 + 1e-9:
            raise ValueError(f"Distribution mass {total} exceeds 1")
        return v


class GadgetBuildSummary(BaseModel):
    key: str
    gadget: str
    mode: Literal["qaoa", "ma-qaoa"]
    layers: int = Field(ge=1)
    qubits: int = Field(ge=1)
    gadget_ar: float = Field(ge=-1e-9, le=1.000000001)
    fidelity: float = Field(ge=0, le=1.000000001)
    expectation: float
    converged: bool
    from_store: bool
    hamiltonian: HamiltonianModel

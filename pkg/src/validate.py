from typing import Dict, Tuple

from jsonschema import Draft202012Validator

from .schemas import qcbo_instance_schema


def validate_instance_document(doc: Dict) -> Tuple[bool, str]:
    validator = Draft202012Validator(qcbo_instance_schema()["schema"])
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        first = errors[0]
        where = "/".join(str(p) for p in first.path) or "<root>"
        return False, f"Instance document invalid at {where}: {first.message}"
    n = doc["n"]
    for i, j, _ in doc["q"]:
        if not (0 <= i <= j < n):
            return False, f"Objective entry ({i}, {j}) must satisfy 0 <= i <= j < n={n}"
    for c in doc["constraints"]:
        if len(c["coeffs"]) != n:
            return False, f"Constraint has {len(c['coeffs'])} coefficients but n={n}"
    return True, ""


def validate_trained_gadget(gadget, atol: float = 1e-9) -> Tuple[bool, str]:
    """gadget_ar must equal the probability mass on properly labeled kets."""
    ar = gadget.gadget_ar
    if not (-atol <= ar <= 1 + atol):
        return False, f"gadget_ar {ar} outside [0, 1]"
    mass = gadget.state().mass(gadget.labels().proper)
    if abs(mass - ar) > atol:
        return False, f"gadget_ar {ar:.12f} differs from proper-label mass {mass:.12f}"
    if gadget.fidelity > 1 - atol and abs(ar - 1.0) > atol:
        return False, f"fidelity {gadget.fidelity:.12f} to the ideal state but gadget_ar {ar:.12f}"
    return True, ""


def validate_solve_report(report, atol: float = 1e-9) -> Tuple[bool, str]:
    total = float(report.distribution.values.sum())
    if abs(total - 1.0) > atol:
        return False, f"Output distribution sums to {total:.12f}"
    if not (-atol <= report.p_opt <= 1 + atol):
        return False, f"p_opt {report.p_opt} outside [0, 1]"
    if report.distribution.values.shape[0] != 2 ** (report.n + report.flag_count):
        return False, "Distribution size does not match n + flag qubits"
    return True, ""

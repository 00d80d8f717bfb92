from typing import Any, Dict


def _number_array() -> Dict[str, Any]:
    return {"type": "array", "items": {"type": "number"}}


def hamiltonian_schema() -> Dict[str, Any]:
    return {
        "type": "object",
        "properties": {
            "m": {"type": "integer", "minimum": 0, "maximum": 24},
            "terms": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "mask": {"type": "integer", "minimum": 0},
                        "coeff": {"type": "number"},
                    },
                    "required": ["mask", "coeff"],
                    "additionalProperties": False,
                },
            },
        },
        "required": ["m", "terms"],
        "additionalProperties": False,
    }


def gadget_record_schema() -> Dict[str, Any]:
    return {
        "type": "object",
        "properties": {
            "key": {"type": "string", "minLength": 1},
            "spec": {
                "type": "object",
                "properties": {
                    "flag_mode": {"type": "string", "enum": ["single", "per-constraint"]},
                    "constraints": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "properties": {
                                "coeffs": {"type": "array", "minItems": 1, "items": {"type": "integer"}},
                                "sense": {"type": "string", "enum": ["EQ", "LE", "GE"]},
                                "rhs": {"type": "integer"},
                            },
                            "required": ["coeffs", "sense", "rhs"],
                            "additionalProperties": False,
                        },
                    },
                },
                "required": ["flag_mode", "constraints"],
                "additionalProperties": False,
            },
            "hamiltonian": hamiltonian_schema(),
            "config": {
                "type": "object",
                "properties": {
                    "layers": {"type": "integer", "minimum": 1},
                    "mode": {"type": "string", "enum": ["qaoa", "ma-qaoa"]},
                },
                "required": ["layers", "mode"],
                "additionalProperties": False,
            },
            "gammas": _number_array(),
            "betas": _number_array(),
            "expectation": {"type": "number", "minimum": -1.000001, "maximum": 1.000001},
            "gadget_ar": {"type": "number", "minimum": -0.000001, "maximum": 1.000001},
            "fidelity": {"type": "number", "minimum": 0.0, "maximum": 1.000001},
            "seed": {"type": "integer"},
            "converged": {"type": "boolean"},
        },
        "required": ["key", "spec", "hamiltonian", "config", "gammas", "betas", "expectation", "gadget_ar", "fidelity", "seed"],
        "additionalProperties": False,
    }


def gadget_store_schema() -> Dict[str, Any]:
    return {
        "name": "gadget_store_schema",
        "schema": {
            "type": "object",
            "properties": {
                "version": {"type": "integer", "enum": [1]},
                "records": {"type": "array", "items": gadget_record_schema()},
            },
            "required": ["version", "records"],
            "additionalProperties": False,
        },
        "strict": True,
    }


def qcbo_instance_schema() -> Dict[str, Any]:
    return {
        "name": "qcbo_instance_schema",
        "schema": {
            "type": "object",
            "properties": {
                "n": {"type": "integer", "minimum": 1, "maximum": 24},
                "q": {
                    "type": "array",
                    "items": {"type": "array", "minItems": 3, "maxItems": 3, "items": {"type": "number"}},
                    "description": "Upper-triangle entries as [i, j, coeff] with i <= j",
                },
                "constraints": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "coeffs": {"type": "array", "items": {"type": "integer"}},
                            "sense": {"type": "string", "enum": ["EQ", "LE", "GE"]},
                            "rhs": {"type": "integer"},
                        },
                        "required": ["coeffs", "sense", "rhs"],
                        "additionalProperties": False,
                    },
                },
            },
            "required": ["n", "q", "constraints"],
            "additionalProperties": False,
        },
        "strict": True,
    }

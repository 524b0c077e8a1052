"""
JSON Schema definitions for run configurations and result files.

The configuration schema doubles as the type table used to coerce INI
strings, and its `default` keywords fill in omitted keys.
"""

from .grids.functions import ProfileRegistry
from .modular import ModularKind
from .exponents import FIELD_KINDS
from .settings import (
    BBM_RTOL,
    EIGEN_MAX_ITER,
    EIGEN_TOL,
    DELTA_STUDY_RTOL,
    GAMMA_RTOL,
    LUXEMBURG_RTOL,
    QUAD_ANGLES,
    QUAD_FAR_LEVELS,
    QUAD_LEVELS,
    QUAD_POINTS_PER_LEVEL,
    SOLVER_COMPOSITION,
    SOLVER_MAX_ITER,
    SOLVER_STAGNATION_RTOL,
    SOLVER_TOL,
    THREADS,
)

COMMANDS = ["norms", "seminorm", "bbm", "gamma", "solve", "eigen", "check"]

CHECKS = [
    "condition_P",
    "critical_exponent",
    "norm_modular",
    "mollify",
    "truncation",
    "inclusion",
    "lemma_bound",
]

_ORDER = {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1,
          "description": "order in (0, 1)"}
_EXPONENT = {"type": "number", "exclusiveMinimum": 1, "description": "exponent in (1, inf)"}
_HORIZON = {"type": "number", "minimum": 0, "description": "horizon >= 0 (0 = local)"}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0, "description": "positive number"}
_TOLERANCE = {"type": "number", "minimum": 0, "description": "tolerance >= 0"}
_COORDS = {"type": "array", "items": {"type": "number"}, "minItems": 1, "maxItems": 3}


def _section(properties, required=()):
    return {
        "type": "object",
        "properties": properties,
        "required": list(required),
        "additionalProperties": False,
    }


CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "RunConfig",
    "description": "One reproducible perisobolev run",
    "type": "object",
    "required": ["run"],
    "additionalProperties": False,
    "properties": {
        "run": _section({
            "command": {"type": "string", "enum": COMMANDS},
            "threads": {"type": "integer", "minimum": 1, "default": THREADS},
        }, required=["command"]),
        "grid": _section({
            "lo": _COORDS,
            "hi": _COORDS,
            "cells": {"type": "array", "items": {"type": "integer", "minimum": 1},
                      "minItems": 1, "maxItems": 3},
        }, required=["lo", "hi", "cells"]),
        "function": _section({
            "kind": {"type": "string", "enum": sorted(ProfileRegistry.list_kinds())},
            "center": {**_COORDS, "default": [0.0]},
            "width": {**_POSITIVE, "default": 1.0},
            "amplitude": {"type": "number", "default": 1.0},
            "slope": {"type": "number", "default": 0.0},
            "lo": _COORDS,
            "hi": _COORDS,
        }, required=["kind"]),
        "exponent": _section({
            "kind": {"type": "string", "enum": list(FIELD_KINDS), "default": "constant"},
            "base": {**_EXPONENT, "default": 2.0},
            "amplitude": {"type": "number", "default": 0.0},
            "slope": {"type": "number", "default": 1.0},
            "axis": {"type": "integer", "minimum": 0, "default": 0},
            "length": {**_POSITIVE, "default": 1.0},
        }),
        "params": _section({
            "s": {"type": "array", "items": _ORDER, "minItems": 1, "maxItems": 3},
            "p": {"type": "array", "items": _EXPONENT, "minItems": 1, "maxItems": 3},
            "delta": {"type": "array", "items": _HORIZON, "minItems": 1, "maxItems": 3},
            "axis": {"type": "integer", "minimum": 0, "default": 0},
        }, required=["s", "p", "delta"]),
        "quadrature": _section({
            "levels": {"type": "integer", "minimum": 4, "default": QUAD_LEVELS},
            "points_per_level": {"type": "integer", "minimum": 2, "default": QUAD_POINTS_PER_LEVEL},
            "outer_margin": {"type": "number", "minimum": 0, "default": 0.0},
            "far_levels": {"type": "integer", "minimum": 1, "default": QUAD_FAR_LEVELS},
            "angles": {"type": "integer", "minimum": 2, "default": QUAD_ANGLES},
        }),
        "sweep": _section({
            "mode": {"type": "string", "enum": ["delta", "s"], "default": "delta"},
            "deltas": {"type": "array", "items": _POSITIVE, "minItems": 1},
            "s_values": {"type": "array", "items": _ORDER, "minItems": 2},
            "rtol": {**_TOLERANCE, "default": BBM_RTOL},
            "gamma_rtol": {**_TOLERANCE, "default": GAMMA_RTOL},
        }),
        "domain": _section({
            "lo": _COORDS,
            "hi": _COORDS,
        }, required=["lo", "hi"]),
        "source": _section({
            "kind": {"type": "string", "enum": ["constant", "function"], "default": "constant"},
            "value": {"type": "number", "default": 1.0},
        }),
        "solver": _section({
            "tol": {**_POSITIVE, "default": SOLVER_TOL},
            "max_iter": {"type": "integer", "minimum": 1, "default": SOLVER_MAX_ITER},
            "stagnation_rtol": {**_TOLERANCE, "default": SOLVER_STAGNATION_RTOL},
            "composition": {"type": "string", "enum": ["inverse_p", "unit"],
                            "default": SOLVER_COMPOSITION},
            "mu": {"type": "number", "minimum": 0},
            "interpolation": {"type": "string", "enum": ["linear", "cubic"], "default": "linear"},
            "study_deltas": {"type": "array", "items": _POSITIVE},
            "vanishing": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            "study_rtol": {**_TOLERANCE, "default": DELTA_STUDY_RTOL},
        }),
        "eigen": _section({
            "s": _ORDER,
            "tol": {**_POSITIVE, "default": EIGEN_TOL},
            "max_iter": {"type": "integer", "minimum": 1, "default": EIGEN_MAX_ITER},
        }, required=["s"]),
        "norms": _section({
            "kind": {"type": "string", "enum": [k.value for k in ModularKind]},
            "rtol": {**_POSITIVE, "default": LUXEMBURG_RTOL},
        }, required=["kind"]),
        "check": _section({
            "checks": {"type": "array", "items": {"type": "string", "enum": CHECKS},
                       "minItems": 1, "default": list(CHECKS)},
        }),
    },
}

ENERGY_REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "EnergyReport",
    "type": "object",
    "required": ["value", "error_estimate", "convention", "params", "flags"],
    "properties": {
        "value": {"type": "number", "minimum": 0},
        "error_estimate": {"type": "number", "minimum": 0},
        "convention": {"type": "string"},
        "params": {"type": "object"},
        "flags": {"type": "array", "items": {"type": "string"}},
    },
}

SWEEP_RESULT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "SweepResult",
    "type": "object",
    "required": ["parameter", "values", "ratios", "target", "extrapolated",
                 "relative_error", "passed", "flags"],
    "properties": {
        "parameter": {"type": "string", "enum": ["delta", "s"]},
        "values": {"type": "array", "items": {"type": "number"}, "minItems": 2},
        "ratios": {"type": "array", "items": {"type": "number"}, "minItems": 2},
        "target": {"type": "number"},
        "extrapolated": {"type": "number"},
        "relative_error": {"type": "number", "minimum": 0},
        "passed": {"type": "boolean"},
        "flags": {"type": "array", "items": {"type": "string"}},
        "extras": {"type": "object"},
    },
}

EIGEN_RESULT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "EigenResult",
    "type": "object",
    "required": ["index", "lambda1", "residual", "S_of_u", "k_of_u", "iterations",
                 "converged", "flags"],
    "properties": {
        "index": {"type": "integer", "const": 1},
        "lambda1": {"type": "number", "exclusiveMinimum": 0},
        "residual": {"type": "number", "minimum": 0},
        "S_of_u": {"type": "number", "exclusiveMinimum": 0},
        "k_of_u": {"type": "number"},
        "iterations": {"type": "integer", "minimum": 0},
        "converged": {"type": "boolean"},
        "flags": {"type": "array", "items": {"type": "string"}},
    },
}

ALL_SCHEMAS = {
    "config": CONFIG_SCHEMA,
    "energy_report": ENERGY_REPORT_SCHEMA,
    "sweep_result": SWEEP_RESULT_SCHEMA,
    "eigen_result": EIGEN_RESULT_SCHEMA,
}


def validate_config_schema():
    """
    Validate that the schemas themselves are well-formed.
    This is a sanity check for development.
    """
    try:
        import jsonschema
        for schema in ALL_SCHEMAS.values():
            jsonschema.Draft7Validator.check_schema(schema)
        return True
    except Exception as e:
        print(f"Schema validation error: {e}")
        return False


if __name__ == "__main__":

    if validate_config_schema():
        print("All schemas are valid!")
        import json
        print(json.dumps(CONFIG_SCHEMA, indent=2))
    else:
        print("Schemas have errors!")

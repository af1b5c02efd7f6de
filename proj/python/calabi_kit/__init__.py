"""Calabi compositions of hyperbolic affine hyperspheres (C++ core)."""

import json

from ._core import (
    Factor,
    Spec,
    SpecError,
    cli,
    composite,
    f_sequence,
    flat,
    hyperboloid,
    invariants,
    load_spec,
    normalization_constants,
    parse_spec,
    point,
    position,
    predicted_L1,
    structure_constant,
    verify_json,
)


def verify(spec, samples=10, tol=1e-8, seed=42):
    """verify_spec report as a dict."""
    return json.loads(verify_json(spec, samples, tol, seed))


__all__ = [
    "Factor", "Spec", "SpecError", "cli", "composite", "f_sequence", "flat", "hyperboloid",
    "invariants", "load_spec", "normalization_constants", "parse_spec", "point", "position",
    "predicted_L1", "structure_constant", "verify", "verify_json",
]

"""Shipped JSON Schemas for the model format and every CLI JSON output."""

import json
from importlib import resources

NAMES = (
    "model",
    "certify_report",
    "compare_rows",
    "vpfit_output",
    "sample_lb_output",
    "normmax_output",
    "zonotope",
)


def get(name: str) -> dict:
    """Load a shipped schema by short name, e.g. get("model")."""
    if name not in NAMES:
        raise KeyError(f"unknown schema {name!r}; available: {NAMES}")
    text = resources.files(__package__).joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)

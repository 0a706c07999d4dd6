"""Instance JSON: one schema for all three variants.

Values and target are strings in the value-literal grammar so that big
integers and polynomials survive JSON number limits.
"""

from __future__ import annotations

import json
from typing import Any, Dict

from . import values as V
from .errors import MixedDomainError
from .expressions import VARIANTS, Instance, TreeShape, make_instance, opset


def instance_to_json(inst: Instance) -> Dict[str, Any]:
    obj: Dict[str, Any] = {
        "variant": inst.variant,
        "ops": list(inst.ops),
        "values": [V.format_value(v) for v in inst.values],
        "target": V.format_value(inst.target),
    }
    if inst.shape is not None:
        obj["tree"] = inst.shape.to_json()
    if inst.provenance:
        obj["provenance"] = inst.provenance
    return obj


def instance_from_json(obj: Any) -> Instance:
    """Validate and build; malformed input raises ValueError (or a subclass)."""
    if not isinstance(obj, dict):
        raise ValueError("instance JSON must be an object")
    missing = [k for k in ("values", "target", "ops") if k not in obj]
    if missing:
        raise ValueError(f"instance JSON is missing {', '.join(missing)}")
    variant = obj.get("variant", "std")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    vals = obj["values"]
    if not isinstance(vals, list):
        raise ValueError("'values' must be a list")
    literals = [_literal(v) for v in vals]
    shape = TreeShape.from_json(obj["tree"]) if "tree" in obj else None
    ops = obj["ops"]
    if not isinstance(ops, (list, str)):
        raise ValueError("'ops' must be a list or a string")
    inst = make_instance(
        literals, _literal(obj["target"]), opset(ops), variant, shape, str(obj.get("provenance", ""))
    )
    # constants lift into the function domain silently; an explicit
    # "domain": "rat" turns that lifting into an error
    domain = obj.get("domain")
    if domain is not None:
        if domain not in ("rat", "fun"):
            raise ValueError(f"unknown domain {domain!r}")
        if domain == "rat" and inst.domain == "fun":
            raise MixedDomainError("instance declared rational but contains variables")
    return inst


def _literal(v) -> str:
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise ValueError(f"value {v!r} must be a string literal or an integer")
    return str(v)


def load_instance(text: str) -> Instance:
    return instance_from_json(json.loads(text))


def dumps(obj) -> str:
    """Canonical single-line JSON used for every machine-readable output."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))

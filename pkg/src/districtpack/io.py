"""JSON encoding of instances, plans, dual vectors and fractional solutions.

Every document carries ``"v": 1``. Rationals are written as
``[numerator, denominator]`` so files round-trip exactly.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from .constraints import ConfigError, ProblemSpec, as_fraction
from .graph import District, Graph, WeightAssignment
from .instances import Instance
from .lp import FractionalSolution

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    """A JSON document does not have the expected shape."""


def frac_to_json(x: Fraction | None):
    if x is None:
        return None
    return [x.numerator, x.denominator]


def spec_to_json(spec: ProblemSpec) -> dict:
    return {"mode": spec.mode, "k": spec.k, "radius": spec.radius,
            "c": frac_to_json(spec.c), "B": spec.B, "delta": frac_to_json(spec.delta)}


def spec_from_json(data: dict) -> ProblemSpec:
    try:
        return ProblemSpec(mode=data["mode"], k=int(data["k"]), radius=data.get("radius", "strong"),
                           c=None if data.get("c") is None else as_fraction(data["c"]),
                           B=data.get("B"), delta=as_fraction(data.get("delta", 0)))
    except KeyError as exc:
        raise SchemaError(f"spec is missing {exc}") from None


def instance_to_json(inst: Instance) -> dict:
    wa = inst.weights
    weights = {"w": list(wa.column("objective"))}
    for role, key in (("feature1", "w1"), ("feature2", "w2")):
        if wa.has(role):
            weights[key] = list(wa.column(role))
    return {"v": SCHEMA_VERSION, "n": inst.graph.n, "edges": [list(e) for e in inst.graph.edges],
            "weights": weights, "spec": spec_to_json(inst.spec), "meta": inst.meta}


def instance_from_json(data: dict) -> Instance:
    """Parse an instance; a missing objective column defaults to ``w1 + w2`` (or ``w1``)."""
    _check_version(data)
    try:
        n = int(data["n"])
        g = Graph.from_edges(n, data["edges"])
        spec = spec_from_json(data["spec"])
        weights = data["weights"]
        w1 = weights.get("w1")
        w2 = weights.get("w2")
        w = weights.get("w")
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed instance: {exc}") from None
    if w1 is None:
        raise SchemaError("instance needs a w1 feature column")
    if spec.mode == "balanced" and w2 is None:
        raise SchemaError("balanced instances need a w2 feature column")
    if w is None:
        w = [a + b for a, b in zip(w1, w2)] if spec.mode == "balanced" else list(w1)
    for col in (w, w1, w2):
        if col is not None and len(col) != n:
            raise SchemaError("weight column length does not match n")
    wa = WeightAssignment.from_columns(w, w1, w2 if spec.mode == "balanced" else None)
    return Instance(g, wa, spec, dict(data.get("meta", {})))


def districts_from_json(data: dict, n: int) -> list[District]:
    try:
        items = data["districts"]
        out = []
        for d in items:
            vs = [int(v) for v in d["vertices"]]
            out.append(District(tuple(sorted(vs)), int(d.get("center", min(vs) if vs else -1))))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed plan: {exc}") from None
    for d in out:
        if any(not 0 <= v < n for v in d.vertices):
            raise SchemaError(f"plan vertex out of range in {list(d.vertices)}")
    return out


def duals_from_json(data: dict, n: int) -> list[Fraction]:
    try:
        ys = [as_fraction(y) for y in data["duals"]]
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"malformed duals: {exc}") from None
    if len(ys) != n or any(y < 0 for y in ys):
        raise SchemaError("duals must be n nonnegative values")
    return ys


def fractional_from_json(data: dict, wa: WeightAssignment) -> FractionalSolution:
    obj = wa.index("objective")
    try:
        cols, xs = [], []
        for c in data["columns"]:
            vs = tuple(sorted(int(v) for v in c["vertices"]))
            cols.append(District(vs, int(c.get("center", vs[0])), (wa.total(vs)[obj],)))
            xs.append(float(c["x"]))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SchemaError(f"malformed fractional solution: {exc}") from None
    return FractionalSolution(tuple(cols), tuple(xs), wa.n)


def _check_version(data: Any) -> None:
    if not isinstance(data, dict):
        raise SchemaError("expected a JSON object")
    if data.get("v", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {data.get('v')!r}")


def read_json(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    _check_version(data)
    return data


def dumps(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2)


def write_json(data: dict, path: str | Path | None) -> None:
    text = dumps(data) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


__all__ = ["SchemaError", "ConfigError", "instance_to_json", "instance_from_json",
           "spec_to_json", "spec_from_json", "districts_from_json", "duals_from_json",
           "fractional_from_json", "read_json", "write_json", "dumps"]

"""JSON serialization of quantizer/baseline specs ("tables").

A table document is a JSON array of spec records.  Levels and interior
boundaries are serialized as decimal strings with 17 significant digits,
which round-trips float64 exactly.
"""
from __future__ import annotations

import json

import numpy as np

from .baselines import BaselineSpec
from .distributions import ModelKind
from .quantizer import QuantizerSpec

__all__ = ["spec_record", "record_to_spec", "dump_tables", "load_tables"]


def _fmt(values) -> list[str]:
    return [format(float(v), ".17g") for v in values]


def spec_record(spec, *, method: str = "optimal", tol: float | None = None,
                iterations: int | None = None,
                distortion: float | None = None) -> dict:
    record = {
        "method": method,
        "model_kind": spec.model_kind.value,
        "bits": spec.bits,
        "levels": _fmt(spec.levels),
        "interior_boundaries": _fmt(spec.interior_boundaries),
        "tol": tol,
        "iterations": iterations,
        "distortion": distortion,
    }
    clip = getattr(spec, "clip", None)
    if clip is not None:
        record["clip"] = format(float(clip), ".17g")
    return record


def record_to_spec(record: dict):
    kind = ModelKind(record["model_kind"])
    bits = record["bits"]
    levels = np.array([float(s) for s in record["levels"]])
    inner = np.array([float(s) for s in record["interior_boundaries"]])
    method = record.get("method", "optimal")
    if method == "optimal":
        bounds = np.concatenate(([-np.inf], inner, [np.inf]))
        return QuantizerSpec(bits, kind, levels, bounds)
    if method == "uniform":
        clip = float(record["clip"])
        bounds = np.concatenate(([-clip], inner, [clip]))
        return BaselineSpec(method, bits, kind, levels, bounds, clip=clip)
    bounds = np.concatenate(([-np.inf], inner, [np.inf]))
    return BaselineSpec(method, bits, kind, levels, bounds)


def dump_tables(records: list[dict]) -> str:
    return json.dumps(records, indent=2, sort_keys=True) + "\n"


def load_tables(path) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)

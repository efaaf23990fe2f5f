"""Pencil and report files.

Pencils travel as JSON with every complex entry an exact [re, im] pair of
binary64 values, row-major.  The writer is canonical (sorted keys, two-space
indentation, shortest exact float repr), so load -> save round-trips
byte-identically and equal reports serialize to equal bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .exceptions import ContractViolation
from .pencil import Pencil
from .radius import RadiusReport

TOOL_VERSION = "0.1.0"


def matrix_to_pairs(a: np.ndarray) -> list:
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(a)]


def pairs_to_matrix(rows, what: str) -> np.ndarray:
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ContractViolation(f"{what}: entries must be [re, im] pairs") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ContractViolation(f"{what}: entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def pencil_to_dict(p: Pencil, metadata: dict | None = None) -> dict:
    doc = {
        "x_dim": p.x_dim,
        "y_dim": p.y_dim,
        "T": matrix_to_pairs(p.T),
        "S": matrix_to_pairs(p.S),
    }
    if metadata:
        doc["metadata"] = metadata
    return doc


def pencil_from_dict(doc: dict):
    for key in ("x_dim", "y_dim", "T", "S"):
        if key not in doc:
            raise ContractViolation(f"pencil file is missing {key!r}")
    t = pairs_to_matrix(doc["T"], "T")
    s = pairs_to_matrix(doc["S"], "S")
    expected = (int(doc["y_dim"]), int(doc["x_dim"]))
    if t.shape != expected or s.shape != expected:
        raise ContractViolation(
            f"declared dims {expected} do not match arrays T{t.shape} S{s.shape}")
    return Pencil(t, s), doc.get("metadata", {})


def dumps_canonical(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def save_pencil(path, p: Pencil, metadata: dict | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(pencil_to_dict(p, metadata)))


def load_pencil(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return pencil_from_dict(doc)


def _ext(x):
    """Extended real -> JSON-safe value (strings for the infinities)."""
    if x is None:
        return None
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def ext_from_json(v):
    if v is None:
        return None
    if isinstance(v, str):
        return {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}[v]
    return float(v)


def report_to_dict(report: RadiusReport, config_echo: dict) -> dict:
    return {
        "tool_version": TOOL_VERSION,
        "config": config_echo,
        "d_oracle": _ext(report.d_oracle),
        "drop_points": [[z.real, z.imag] for z in report.drop_points],
        "d_bartlay": _ext(report.d_bartlay),
        "gamma_table": [
            {"m": row.m, "gamma_m": _ext(row.value), "gamma_root": _ext(row.root),
             "gamma_ratio": _ext(row.ratio)}
            for row in report.gamma_table
        ],
        "d_geninv": _ext(report.d_geninv),
        "witness_L": (matrix_to_pairs(report.witness_L)
                      if report.witness_L is not None else None),
        "certificate": report.certificate,
        "k": report.k,
        "warnings": report.warnings,
        "disagreement": _ext(report.disagreement),
        "seed": report.seed,
        "eps_rel": report.eps_rel,
        "m_max": report.m_max,
    }


def save_report(path, report: RadiusReport, config_echo: dict):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(report_to_dict(report, config_echo)))


def _csv_float(x) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def gamma_table_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "gamma_m", "gamma_root", "gamma_ratio"])
    for row in rows:
        writer.writerow([row.m, _csv_float(row.value), _csv_float(row.root),
                         _csv_float(row.ratio)])
    return buf.getvalue()

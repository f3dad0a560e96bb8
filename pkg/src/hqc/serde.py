"""Canonical file formats for states, filters, reports, and scan/sweep CSVs.

Formats:

* State JSON: ``{"dim": [2, 2], "matrix": [[{"re": x, "im": y}, ...4], ...4]}``
* Correlation-picture CSV ("rcsv"): 4 rows of 4 comma-separated reals.
* Filter JSON: ``{"f": [[{"re": x, "im": y}, ...2], ...2]}``
* Scan CSV header: ``theta,p,B,F3,HBstar,HF3star,cA,cB,entangled,flags``
  (flags as semicolon-joined tokens).
* Envelope CSV header: ``c_mid,max_B,max_F3,count``.

All floats are written with :func:`repr`, which preserves the full 17
significant digits of information needed for exact round-tripping.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .criteria import InaccessibilityReport
from .ellipsoid import SteeringEllipsoid
from .errors import ParseError
from .families import ScanRow
from .filtering import LocalFilter, OneSidedResult
from .montecarlo import EnvelopeRow
from .states import DensityMatrix, RMatrix, validate_state


def _fmt(x: float) -> str:
    return repr(float(x))


def _complex_entry(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _complex_from(obj: Any, where: str) -> complex:
    if not isinstance(obj, dict) or "re" not in obj or "im" not in obj:
        raise ParseError(f"{where}: expected {{'re': x, 'im': y}}, got {obj!r}")
    try:
        return complex(float(obj["re"]), float(obj["im"]))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: non-numeric entry {obj!r}") from exc


def state_to_dict(rho: DensityMatrix) -> dict:
    return {
        "dim": [2, 2],
        "matrix": [[_complex_entry(z) for z in row] for row in rho.matrix],
    }


def state_from_dict(obj: Any, tol: float = 1e-10) -> DensityMatrix:
    if not isinstance(obj, dict):
        raise ParseError(f"state document must be an object, got {type(obj).__name__}")
    if obj.get("dim") != [2, 2]:
        raise ParseError(f"state dim must be [2, 2], got {obj.get('dim')!r}")
    rows = obj.get("matrix")
    if not isinstance(rows, list) or len(rows) != 4 or any(not isinstance(r, list) or len(r) != 4 for r in rows):
        raise ParseError("state matrix must be a 4x4 array of {re, im} objects")
    m = np.array([[_complex_from(z, f"matrix[{i}][{j}]") for j, z in enumerate(row)] for i, row in enumerate(rows)])
    return validate_state(m, tol)


def load_state_json(path: str, tol: float = 1e-10) -> DensityMatrix:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return state_from_dict(obj, tol)


def dump_state_json(rho: DensityMatrix, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_dict(rho), fh, indent=1)
        fh.write("\n")


def rmatrix_to_csv(r: RMatrix) -> str:
    return "\n".join(",".join(_fmt(x) for x in row) for row in r.r) + "\n"


def rmatrix_from_csv(text: str) -> RMatrix:
    rows = [line for line in text.strip().splitlines() if line.strip()]
    if len(rows) != 4:
        raise ParseError(f"R-matrix CSV must have 4 rows, got {len(rows)}")
    try:
        arr = np.array([[float(x) for x in row.split(",")] for row in rows])
    except ValueError as exc:
        raise ParseError(f"R-matrix CSV has non-numeric entries: {exc}") from exc
    if arr.shape != (4, 4):
        raise ParseError(f"R-matrix CSV must be 4x4, got shape {arr.shape}")
    if abs(arr[0, 0] - 1.0) > 1e-9:
        raise ParseError(f"R[0,0] must be 1, got {arr[0, 0]!r}")
    arr[0, 0] = 1.0
    return RMatrix(arr)


def load_rmatrix_csv(path: str) -> RMatrix:
    with open(path, encoding="utf-8") as fh:
        return rmatrix_from_csv(fh.read())


def filter_to_dict(f: LocalFilter) -> dict:
    return {"f": [[_complex_entry(z) for z in row] for row in f.f]}


def filter_from_dict(obj: Any) -> LocalFilter:
    if not isinstance(obj, dict) or "f" not in obj:
        raise ParseError("filter document must be an object with key 'f'")
    rows = obj["f"]
    if not isinstance(rows, list) or len(rows) != 2 or any(not isinstance(r, list) or len(r) != 2 for r in rows):
        raise ParseError("filter 'f' must be a 2x2 array of {re, im} objects")
    m = np.array([[_complex_from(z, f"f[{i}][{j}]") for j, z in enumerate(row)] for i, row in enumerate(rows)])
    return LocalFilter.from_matrix(m)


def load_filter_json(path: str) -> LocalFilter:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return filter_from_dict(obj)


def ellipsoid_to_dict(e: SteeringEllipsoid) -> dict:
    return {
        "centre": [float(x) for x in e.centre],
        "q": [[float(x) for x in row] for row in e.q],
        "semiaxes": [float(x) for x in e.semiaxes],
        "degenerate": bool(e.degenerate),
    }


def _nan_to_none(x: float) -> float | None:
    return None if math.isnan(x) else float(x)


def report_to_dict(report: InaccessibilityReport) -> dict:
    return {
        "b": float(report.b),
        "f3": float(report.f3),
        "hb_star": _nan_to_none(report.hb_star),
        "hf3_star": _nan_to_none(report.hf3_star),
        "c_a": float(report.c_a),
        "c_b": float(report.c_b),
        "entangled": bool(report.entangled),
        "flags": sorted(report.flags),
        "thresholds": {"c_chsh": report.thresholds.c_chsh, "c_f3": report.thresholds.c_f3},
        "degenerate_normal_form": bool(report.degenerate_normal_form),
        "conjecture_conditional": bool(report.conjecture_conditional),
    }


def one_sided_result_to_dict(res: OneSidedResult) -> dict:
    return {
        "value": float(res.value),
        "objective": res.objective.value,
        "party": res.party.value,
        "converged": bool(res.converged),
        "starts_used": int(res.starts_used),
        "at_scale_floor": bool(res.at_scale_floor),
        "filter": filter_to_dict(res.filter),
    }


SCAN_CSV_HEADER = "theta,p,B,F3,HBstar,HF3star,cA,cB,entangled,flags"


def scan_rows_to_csv(rows: list[ScanRow]) -> str:
    lines = [SCAN_CSV_HEADER]
    for row in rows:
        lines.append(
            ",".join(
                [
                    _fmt(row.theta),
                    _fmt(row.p),
                    _fmt(row.b),
                    _fmt(row.f3),
                    _fmt(row.hb_star),
                    _fmt(row.hf3_star),
                    _fmt(row.c_a),
                    _fmt(row.c_b),
                    "true" if row.entangled else "false",
                    ";".join(sorted(row.flags)),
                ]
            )
        )
    return "\n".join(lines) + "\n"


ENVELOPE_CSV_HEADER = "c_mid,max_B,max_F3,count"


def envelope_to_csv(rows: list[EnvelopeRow]) -> str:
    lines = [ENVELOPE_CSV_HEADER]
    for row in rows:
        lines.append(",".join([_fmt(row.c_mid), _fmt(row.max_b), _fmt(row.max_f3), str(row.count)]))
    return "\n".join(lines) + "\n"

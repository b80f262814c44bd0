"""CSV and model-file formats used by the command line tool.

Curve tables are CSV with header ``id,<t1>,<t2>,...`` where the numeric
header cells are the strictly increasing observation grid; each row is
one sample's curve.  Responses are two-column ``id,y`` files.  Models
are JSON documents with a schema version so older files fail loudly
rather than silently misload.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .basis import BasisSystem, build_bspline_system, gram_matrix
from .errors import InputError
from .regression import FittedSofr, RobustReport

MODEL_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CurveTable:
    """Curves observed on a shared grid, with per-sample identifiers."""

    sample_ids: tuple[str, ...]
    grid: np.ndarray
    values: np.ndarray


def _parse_float(text: str, path: str, line: int, column: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"{path}: line {line}, column {column}: "
                         f"{text!r} is not a number") from None
    if not np.isfinite(value):
        raise InputError(f"{path}: line {line}, column {column}: "
                         f"{text!r} is not finite")
    return value


def read_curves(path: str) -> CurveTable:
    """Read one predictor's curve table."""
    try:
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    if not rows:
        raise InputError(f"{path}: file is empty")
    header = rows[0]
    if len(header) < 3:
        raise InputError(f"{path}: need a header 'id,<t1>,<t2>,...' with at "
                         "least 2 grid points")
    if header[0].strip() != "id":
        raise InputError(f"{path}: first header cell must be 'id', got {header[0]!r}")
    grid = np.array([_parse_float(cell, path, 1, j + 2)
                     for j, cell in enumerate(header[1:])])
    if (np.diff(grid) <= 0).any():
        raise InputError(f"{path}: grid header values must be strictly increasing")
    ids: list[str] = []
    values = []
    for i, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise InputError(f"{path}: line {i}: expected {len(header)} cells, "
                             f"got {len(row)}")
        ids.append(row[0].strip())
        values.append([_parse_float(cell, path, i, j + 2)
                       for j, cell in enumerate(row[1:])])
    if not ids:
        raise InputError(f"{path}: no data rows")
    if len(set(ids)) != len(ids):
        raise InputError(f"{path}: sample ids are not unique")
    return CurveTable(sample_ids=tuple(ids), grid=grid,
                      values=np.asarray(values, dtype=float))


def write_curves(path: str, table: CurveTable) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id"] + [repr(float(t)) for t in table.grid])
        for sid, row in zip(table.sample_ids, table.values):
            writer.writerow([sid] + [repr(float(v)) for v in row])


def read_response(path: str) -> tuple[tuple[str, ...], np.ndarray]:
    """Read an ``id,y`` response table."""
    try:
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    if not rows:
        raise InputError(f"{path}: file is empty")
    header = [cell.strip() for cell in rows[0]]
    if header != ["id", "y"]:
        raise InputError(f"{path}: header must be 'id,y', got {','.join(rows[0])!r}")
    ids: list[str] = []
    y = []
    for i, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise InputError(f"{path}: line {i}: expected 2 cells, got {len(row)}")
        ids.append(row[0].strip())
        y.append(_parse_float(row[1], path, i, 2))
    if not ids:
        raise InputError(f"{path}: no data rows")
    if len(set(ids)) != len(ids):
        raise InputError(f"{path}: sample ids are not unique")
    return tuple(ids), np.asarray(y, dtype=float)


def write_response(path: str, ids, y: np.ndarray) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id", "y"])
        for sid, value in zip(ids, y):
            writer.writerow([sid, repr(float(value))])


def write_predictions(path: str, ids, predictions: np.ndarray) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["sample_id", "prediction"])
        for sid, value in zip(ids, predictions):
            writer.writerow([sid, repr(float(value))])


def save_model(path: str, fit: FittedSofr) -> None:
    """Serialize a fitted model (basis layout, coefficients, diagnostics)."""
    doc = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "method": fit.method,
        "h": fit.h,
        "intercept": fit.intercept,
        "predictors": [
            {"domain": [s.domain[0], s.domain[1]], "num_basis": s.num_basis,
             "order": s.order}
            for s in fit.systems
        ],
        "beta_coefs": [float(v) for v in fit.beta_coefs],
        "robust": None,
    }
    if fit.robust_report is not None:
        rep = fit.robust_report
        doc["robust"] = {
            "weights": [float(w) for w in rep.weights],
            "c": rep.c,
            "prm_iterations": rep.prm_iterations,
            "prm_converged": rep.prm_converged,
            "m_iterations": rep.m_iterations,
            "m_converged": rep.m_converged,
            "scale": rep.scale,
        }
    with open(path, "w") as handle:
        json.dump(doc, handle, indent=2)
        handle.write("\n")


def load_model(path: str) -> FittedSofr:
    """Rebuild a fitted model saved by ``save_model``."""
    try:
        with open(path) as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not a model file ({exc})") from None
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise InputError(f"{path}: not a model file (missing schema_version)")
    if doc["schema_version"] != MODEL_SCHEMA_VERSION:
        raise InputError(f"{path}: model schema version {doc['schema_version']} "
                         f"is not supported (expected {MODEL_SCHEMA_VERSION})")
    try:
        systems = tuple(
            build_bspline_system((p["domain"][0], p["domain"][1]),
                                 p["num_basis"], p["order"])
            for p in doc["predictors"]
        )
        beta = np.asarray(doc["beta_coefs"], dtype=float)
        report = None
        if doc.get("robust") is not None:
            rb = doc["robust"]
            report = RobustReport(weights=np.asarray(rb["weights"], dtype=float),
                                  c=float(rb["c"]),
                                  prm_iterations=int(rb["prm_iterations"]),
                                  prm_converged=bool(rb["prm_converged"]),
                                  m_iterations=int(rb["m_iterations"]),
                                  m_converged=bool(rb["m_converged"]),
                                  scale=float(rb["scale"]))
        method = doc["method"]
        h = int(doc["h"])
        intercept = float(doc["intercept"])
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise InputError(f"{path}: malformed model file ({exc!r})") from None
    if method not in ("fpls", "rfpls", "fpc"):
        raise InputError(f"{path}: unknown method {method!r}")
    total = sum(s.num_basis for s in systems)
    if beta.size != total:
        raise InputError(f"{path}: coefficient length {beta.size} does not match "
                         f"the basis layout ({total})")
    Psi = block_diag(*[gram_matrix(s) for s in systems])
    return FittedSofr(method=method, systems=systems, Psi=Psi, beta_coefs=beta,
                      intercept=intercept, h=h, robust_report=report)

"""Matrix files and deterministic JSON output."""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from ..errors import ParseError
from ..flowstruct import realify
from ..numcore import GeneratorMatrix, ToleranceProfile, as_generator


@dataclass(frozen=True)
class MatrixDocument:
    """One matrix read from a JSON file.

    The file holds an object ``{"field": "real" | "complex", "entries":
    [[...], ...], "name": optional}``. Complex entries are ``[re, im]``
    pairs; plain numbers are accepted in complex documents as real entries.
    """

    field: str
    entries: np.ndarray
    name: str
    path: str = ""

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_complex(self) -> bool:
        return self.field == "complex"

    def generator(self) -> GeneratorMatrix:
        """Real generator; complex documents are realified."""
        if self.is_complex:
            return realify(self.entries)
        return as_generator(self.entries)

    def describe(self) -> dict:
        return {"name": self.name, "path": self.path, "field": self.field, "dim": self.dim}


def _entry(v, field: str, where: str):
    if isinstance(v, bool):
        raise ParseError(f"{where}: booleans are not numbers")
    if isinstance(v, (int, float)):
        return float(v) if field == "real" else complex(v)
    if field == "complex" and isinstance(v, list) and len(v) == 2 and all(
            isinstance(p, (int, float)) and not isinstance(p, bool) for p in v):
        return complex(v[0], v[1])
    raise ParseError(f"{where}: entry {v!r} is not a {field} number")


def parse_matrix_document(data, source: str = "<input>") -> MatrixDocument:
    """Validate a decoded JSON object as a matrix document.

    Raises
    ------
    ParseError
        On any schema violation, naming ``source``.
    """
    if not isinstance(data, dict):
        raise ParseError(f"{source}: expected a JSON object with 'field' and 'entries'")
    field = data.get("field", "real")
    if field not in ("real", "complex"):
        raise ParseError(f"{source}: field must be 'real' or 'complex', got {field!r}")
    rows = data.get("entries")
    if not isinstance(rows, list) or not rows:
        raise ParseError(f"{source}: 'entries' must be a non-empty list of rows")
    d = len(rows)
    parsed = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != d:
            raise ParseError(f"{source}: row {i + 1} does not have {d} entries (matrix must be square)")
        parsed.append([_entry(v, field, f"{source} [{i + 1},{j + 1}]") for j, v in enumerate(row)])
    arr = np.array(parsed, dtype=complex if field == "complex" else float)
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{source}: entries must be finite")
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise ParseError(f"{source}: name must be a string")
    base = os.path.splitext(os.path.basename(source))[0]
    return MatrixDocument(field, arr, name or base, source)


def load_matrix(path: str) -> MatrixDocument:
    """Read and validate a matrix file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_matrix_document(data, path)


def matrix_document_dict(m, name: str | None = None) -> dict:
    """JSON object for a real or complex matrix."""
    m = np.asarray(m)
    if np.iscomplexobj(m):
        entries = [[[float(z.real), float(z.imag)] for z in row] for row in m]
        doc = {"field": "complex", "entries": entries}
    else:
        doc = {"field": "real", "entries": np.asarray(m, dtype=float).tolist()}
    if name:
        doc["name"] = name
    return doc


def jsonable(v):
    """Recursively convert numpy values and non-finite floats for JSON."""
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return jsonable(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        f = float(v)
        if math.isnan(f):
            return None
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def tolerance_block(tol: ToleranceProfile) -> dict:
    """Tolerance profile with a short fingerprint of its values."""
    values = tol.to_dict()
    digest = hashlib.sha256(json.dumps(values, sort_keys=True).encode()).hexdigest()[:16]
    return {**values, "fingerprint": digest}

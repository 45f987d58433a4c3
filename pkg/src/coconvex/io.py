"""JSON records for cones, sets, measures, solutions and reports.

Every top-level document carries ``"schema": "coconvex/1"``.  Floats are
written with Python's shortest round-trip representation, so parsing an
emitted file gives back bit-identical values.
"""
from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .cone import Cone, make_cone
from .coconvex import CCoconvexSet, DiscreteMeasure, wulff_shape
from .errors import CoconvexError, ParseError, SchemaError

SCHEMA = "coconvex/1"
UNIT_TOL = 1e-9


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def dumps(record: dict) -> str:
    doc = {"schema": SCHEMA}
    doc.update(_plain(record))
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def write_json(path, record: dict) -> None:
    """Write atomically: temp file in the target directory, then rename."""
    text = dumps(record)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_text(path, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def loads(text: str, source: str = "<string>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{source}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: top level must be an object")
    if "schema" in doc and doc["schema"] != SCHEMA:
        raise SchemaError(f"{source}: unsupported schema {doc['schema']!r}")
    return doc


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror}") from None
    return loads(text, str(path))


def _field(doc, key, source):
    if key not in doc:
        raise SchemaError(f"{source}: missing field {key!r}")
    return doc[key]


def _matrix(value, key, source, n=None):
    try:
        M = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"{source}: field {key!r} must be a list of numeric vectors") from None
    if M.ndim != 2 or M.shape[0] == 0:
        raise SchemaError(f"{source}: field {key!r} must be a nonempty list of vectors")
    if n is not None and M.shape[1] != n:
        raise SchemaError(f"{source}: field {key!r} has vectors of length {M.shape[1]}, expected {n}")
    if not np.all(np.isfinite(M)):
        raise SchemaError(f"{source}: field {key!r} has non-finite entries")
    return M


def _unit_rows(M, key, source):
    bad = np.flatnonzero(np.abs(np.linalg.norm(M, axis=1) - 1.0) > UNIT_TOL)
    if len(bad):
        raise SchemaError(f"{source}: {key}[{bad[0]}] is not a unit vector")


def cone_from_record(doc: dict, source: str = "cone") -> Cone:
    n = _field(doc, "n", source)
    G = _matrix(_field(doc, "generators", source), "generators", source)
    if not isinstance(n, int) or n != G.shape[1]:
        raise SchemaError(f"{source}: field 'n' does not match the generator length")
    _unit_rows(G, "generators", source)
    try:
        return make_cone(G)
    except CoconvexError as e:
        raise SchemaError(f"{source}: {e}") from None


def set_from_record(doc: dict, source: str = "set") -> CCoconvexSet:
    cone = cone_from_record(_field(doc, "cone", source), f"{source}.cone")
    U = _matrix(_field(doc, "omega", source), "omega", source, cone.n)
    _unit_rows(U, "omega", source)
    s = np.array(_field(doc, "support", source), dtype=float)
    if s.shape != (len(U),):
        raise SchemaError(f"{source}: 'support' must have one value per direction")
    try:
        return wulff_shape(cone, U, s)
    except CoconvexError as e:
        raise SchemaError(f"{source}: {e}") from None


def measure_from_record(doc: dict, source: str = "measure") -> DiscreteMeasure:
    atoms = _field(doc, "atoms", source)
    if not isinstance(atoms, list) or not atoms:
        raise SchemaError(f"{source}: 'atoms' must be a nonempty list")
    U, w = [], []
    for i, a in enumerate(atoms):
        if not isinstance(a, dict):
            raise SchemaError(f"{source}: atoms[{i}] must be an object")
        U.append(_field(a, "u", f"{source}.atoms[{i}]"))
        w.append(_field(a, "w", f"{source}.atoms[{i}]"))
    U = _matrix(U, "atoms.u", source)
    _unit_rows(U, "atoms.u", source)
    w = np.array(w, dtype=float)
    if np.any(~np.isfinite(w)) or np.any(w < 0):
        raise SchemaError(f"{source}: atom weights must be finite and nonnegative")
    return DiscreteMeasure(U, w)


def strip_schema(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != "schema"}

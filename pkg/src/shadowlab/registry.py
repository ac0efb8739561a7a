"""
Builtin example matrices and the JSON matrix file format.

File format: ``{"n": N, "rows": [[[re, im], ...], ...]}`` with ``N`` rows of
``N`` two-element real arrays.
"""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .errors import MatrixShapeError, ParseError
from .linalg import is_hermitian
from .normalize import natural_rescale

OMEGA3 = np.exp(2j * np.pi / 3)
I = 1j

_RAW = {
    "A2_0": [[1, 1], [0, -1]],
    "A3_0": [[1, 1, 1], [0, OMEGA3, 1], [0, 0, OMEGA3 ** 2]],
    "A3_1": [[5 - 3 * I, 0, 6], [0, 5 + 3 * I, 6], [-6, -6, -10]],
    "A3_2": [[1, 1, 0], [0, OMEGA3, 0], [0, 0, OMEGA3 ** 2]],
    "A3_3": [[1, 0, 0], [0, OMEGA3, 0], [0, 0, OMEGA3 ** 2]],
    "A4_0": [[1, 1, 1, 1], [0, I, 1, 1], [0, 0, -1, 1], [0, 0, 0, -I]],
    "A4_1": [[I, 0, -1, 0], [0, 0, -1, 0], [1, 1, 1 - I, 0], [0, 0, 1, 1]],
    "A4_2": [[1, 0, 0, 1], [0, I, 0, 1], [0, 0, -1, 0], [0, 0, 0, -I]],
    "A4_3": [[1, 0, 0, 1], [0, I, 1, 0], [0, 0, -1, 0], [0, 0, 0, -I]],
    "A4_4": [[1, 0, 0, 1], [0, I, 0, 0], [0, 0, -1, 0], [0, 0, 0, -I]],
    "A4_5": [[I, 0, -1, 0], [0, 0, -1, 0], [1, 1, 1 - I, 0], [0, 0, 0, 1]],
    "A4_6": [[1, 0, 1, 0], [0, I, 0, 1], [0, 0, -1, 0], [0, 0, 0, -I]],
    "A4_7": [[1, 0, 0, 0], [0, I, 0, 1], [0, 0, -1, 0], [0, 0, 0, -I]],
    "A4_8": [[1, 0, 0, 0], [0, I, 0, 0], [0, 0, -1, 0], [0, 0, 0, -I]],
}

# prefactors quoted with the figures; the rest come from natural_rescale
_PREFACTORS = {
    "A2_0": math.sqrt(2 / 5),
    "A3_3": math.sqrt(2 / 3),
    "A4_8": 1 / math.sqrt(2),
}

H21 = np.array([[-1, -1 - I, 1], [-1 + I, 0, 1 + I], [1, 1 - I, 1]], dtype=complex)

DYNAMICS_VIEWS = {
    "D_A1": [[0, 0, 1], [0, I, 0], [0, 0, -1]],
    "D_A2": [[0, 1, 1], [0, I, 1], [0, 0, -1]],
    "D_A3": [[I, 0, 2], [0, 0, 0], [0, 0, -I]],
}


def _build():
    reg = {}
    for name, raw in _RAW.items():
        raw = np.array(raw, dtype=complex)
        reg[name + "_raw"] = raw
        if name in _PREFACTORS:
            reg[name] = _PREFACTORS[name] * raw
        else:
            reg[name] = natural_rescale(raw)
    reg["H21"] = H21.copy()
    for name, raw in DYNAMICS_VIEWS.items():
        reg[name] = np.array(raw, dtype=complex)
    return reg


BUILTINS = _build()


def builtin_names():
    return sorted(BUILTINS)


def get_builtin(name) -> np.ndarray:
    try:
        return BUILTINS[name].copy()
    except KeyError:
        raise ParseError(f"unknown builtin matrix {name!r}; known: {', '.join(builtin_names())}") from None


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"n": int(a.shape[0]), "rows": [[[float(z.real), float(z.imag)] for z in row] for row in a]}


def dumps_matrix(a) -> str:
    # repr-exact floats, so a dump/parse round trip is bit-exact
    return json.dumps(matrix_to_json(a))


def matrix_from_json(obj, source="<json>") -> np.ndarray:
    if not isinstance(obj, dict) or "rows" not in obj:
        raise ParseError(f"{source}: expected an object with 'n' and 'rows'")
    rows = obj["rows"]
    n = obj.get("n", len(rows) if isinstance(rows, list) else None)
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"{source}: 'n' must be a positive integer")
    if not isinstance(rows, list) or len(rows) != n:
        raise MatrixShapeError(f"{source}: expected {n} rows, got {len(rows) if isinstance(rows, list) else rows!r}")
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise _at_row(MatrixShapeError(
                f"{source}: row {i} has {len(row) if isinstance(row, list) else '?'} entries, expected {n}"), i)
        for j, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)):
                raise _at_row(ParseError(f"{source}: entry ({i},{j}) must be [re, im], got {entry!r}"), i)
            re, im = float(entry[0]), float(entry[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise _at_row(ParseError(f"{source}: entry ({i},{j}) is not finite"), i)
            out[i, j] = complex(re, im)
    return out


def _at_row(exc, row):
    exc.row = row
    return exc


def _row_line(text, row):
    """Line number where row ``row`` of the ``rows`` array opens, or ``None``."""
    start = text.find('"rows"')
    if start < 0:
        return None
    depth, seen = 0, -1
    for pos in range(text.index(":", start) + 1, len(text)):
        ch = text[pos]
        if ch == "[":
            depth += 1
            if depth == 2:
                seen += 1
                if seen == row:
                    return text.count("\n", 0, pos) + 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                return None
    return None


def loads_matrix(text, source="<string>") -> np.ndarray:
    """Parse the JSON matrix format; errors name the offending line."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return matrix_from_json(obj, source)
    except ParseError as exc:
        line = _row_line(text, exc.row) if hasattr(exc, "row") else None
        if line is None:
            raise
        raise type(exc)(f"{exc} (line {line})") from None


def parse_matrix(spec) -> np.ndarray:
    """Load a matrix from a builtin name or a JSON file path."""
    spec = str(spec)
    if spec in BUILTINS:
        return get_builtin(spec)
    path = Path(spec)
    if not path.exists():
        raise ParseError(f"{spec!r} is neither a builtin name nor an existing file")
    return loads_matrix(path.read_text(), str(path))


def parse_hamiltonian(spec) -> np.ndarray:
    h = parse_matrix(spec)
    if not is_hermitian(h):
        raise ParseError(f"{spec}: Hamiltonian is not Hermitian")
    return h


def matrix_hash(a) -> str:
    return hashlib.sha256(dumps_matrix(a).encode()).hexdigest()

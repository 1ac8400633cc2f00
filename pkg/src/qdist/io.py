"""JSON state files and CSV tables.

State files::

    {"dim": 2, "entries": [[0.5, 0.0], [0.5, 0.0], [0.5, 0.0], [0.5, 0.0]]}   # matrix, row-major [re, im]
    {"p": [0.25, 0.75]}                                                     # distribution

A distribution may also carry ``"log2p"`` (exact log2 masses), which takes
precedence over ``"p"`` when present.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .linalg import ValidationError
from .states import ProbVector, as_density


class StateFileError(ValidationError):
    pass


def state_to_json(state) -> dict:
    if isinstance(state, ProbVector):
        return {"p": [float(x) for x in state.p]}
    A = np.asarray(state, dtype=complex)
    n = A.shape[0]
    return {"dim": n, "entries": [[float(z.real), float(z.imag)] for z in A.reshape(-1)]}


def state_from_json(obj, source: str = "<state>"):
    if not isinstance(obj, dict):
        raise StateFileError(f"{source}: top level must be an object")
    if "log2p" in obj or "p" in obj:
        key = "log2p" if "log2p" in obj else "p"
        vals = obj[key]
        if not isinstance(vals, list) or not vals:
            raise StateFileError(f"{source}: field '{key}' must be a non-empty list of numbers")
        for i, v in enumerate(vals):
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise StateFileError(f"{source}: field '{key}[{i}]' is not a number: {v!r}")
        try:
            return ProbVector.from_log2(vals) if key == "log2p" else ProbVector(vals)
        except ValidationError as e:
            raise StateFileError(f"{source}: field '{key}': {e}") from None
    if "dim" in obj and "entries" in obj:
        n = obj["dim"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise StateFileError(f"{source}: field 'dim' must be a positive integer, got {n!r}")
        entries = obj["entries"]
        if not isinstance(entries, list) or len(entries) != n * n:
            got = len(entries) if isinstance(entries, list) else type(entries).__name__
            raise StateFileError(f"{source}: field 'entries' must hold dim*dim = {n * n} pairs, got {got}")
        flat = np.empty(n * n, dtype=complex)
        for i, pair in enumerate(entries):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
            ):
                raise StateFileError(f"{source}: field 'entries[{i}]' must be [re, im], got {pair!r}")
            flat[i] = complex(pair[0], pair[1])
        try:
            return as_density(flat.reshape(n, n))
        except ValidationError as e:
            raise StateFileError(f"{source}: field 'entries': {e}") from None
    raise StateFileError(f"{source}: expected either 'p' or 'dim' + 'entries' fields")


def load_state(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise StateFileError(f"{path}: cannot read ({e.strerror})") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise StateFileError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    return state_from_json(obj, str(path))


def save_state(state, path) -> None:
    Path(path).write_text(json.dumps(state_to_json(state)) + "\n")


def format_float(x: float) -> str:
    return repr(float(x))


def write_csv(header: list[str], rows, path=None) -> str:
    """Comma-separated, '.' decimal, header row; returns the text written."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text

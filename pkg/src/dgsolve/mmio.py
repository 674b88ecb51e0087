"""Dense Matrix Market reader and writer.

Only real (and integer) ``coordinate`` and ``array`` files with ``general``
or ``symmetric`` symmetry are supported.  Values are written with 17
significant digits so a write/read round trip is bit-exact.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .errors import ParseError, UnsupportedField

_FORMATS = ("coordinate", "array")
_FIELDS = ("real", "double", "integer")
_SYMMETRIES = ("general", "symmetric")


def _parse_header(line: str) -> tuple[str, str, str]:
    parts = line.split()
    if len(parts) != 5 or parts[0] != "%%MatrixMarket":
        raise ParseError("expected '%%MatrixMarket matrix <format> <field> <symmetry>'", 1)
    obj, fmt, fld, sym = (p.lower() for p in parts[1:])
    if obj != "matrix":
        raise ParseError(f"unsupported object {obj!r}", 1)
    if fmt not in _FORMATS:
        raise ParseError(f"unknown format {fmt!r}", 1)
    if fld in ("complex", "pattern"):
        raise UnsupportedField(f"{fld} fields are not supported", 1)
    if fld not in _FIELDS:
        raise ParseError(f"unknown field {fld!r}", 1)
    if sym not in _SYMMETRIES:
        raise UnsupportedField(f"{sym} symmetry is not supported", 1)
    return fmt, fld, sym


def _number(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"cannot parse value {token!r}", lineno) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {token!r}", lineno)
    return value


def _index(token: str, bound: int, lineno: int) -> int:
    try:
        k = int(token)
    except ValueError:
        raise ParseError(f"cannot parse index {token!r}", lineno) from None
    if not 1 <= k <= bound:
        raise ParseError(f"index {k} outside 1..{bound}", lineno)
    return k - 1


def read_matrix_market(lines) -> np.ndarray:
    """Parse Matrix Market text (an iterable of lines) into a dense 2-D array."""
    it = enumerate(lines, start=1)
    try:
        _, header = next(it)
    except StopIteration:
        raise ParseError("empty file", 1) from None
    fmt, _, sym = _parse_header(header)

    data = ((k, ln.split()) for k, ln in it if ln.strip() and not ln.lstrip().startswith("%"))
    try:
        lineno, size = next(data)
    except StopIteration:
        raise ParseError("missing size line") from None

    want = 3 if fmt == "coordinate" else 2
    if len(size) != want:
        raise ParseError(f"size line needs {want} integers", lineno)
    try:
        dims = [int(t) for t in size]
    except ValueError:
        raise ParseError("size line must hold integers", lineno) from None
    rows, cols = dims[0], dims[1]
    if rows < 0 or cols < 0 or (fmt == "coordinate" and dims[2] < 0):
        raise ParseError("negative size", lineno)
    if sym == "symmetric" and rows != cols:
        raise ParseError("symmetric matrix must be square", lineno)

    out = np.zeros((rows, cols))
    if fmt == "coordinate":
        expected = dims[2]
        count = 0
        for lineno, tok in data:
            if len(tok) != 3:
                raise ParseError("coordinate entry needs 'row col value'", lineno)
            count += 1
            if count > expected:
                raise ParseError(f"more than the declared {expected} entries", lineno)
            i = _index(tok[0], rows, lineno)
            j = _index(tok[1], cols, lineno)
            v = _number(tok[2], lineno)
            if sym == "symmetric" and j > i:
                raise ParseError("symmetric files list the lower triangle only", lineno)
            out[i, j] += v
            if sym == "symmetric" and i != j:
                out[j, i] += v
    else:
        if sym == "symmetric":
            positions = [(i, j) for j in range(cols) for i in range(j, rows)]
        else:
            positions = [(i, j) for j in range(cols) for i in range(rows)]
        expected = len(positions)
        count = 0
        for lineno, tok in data:
            if len(tok) != 1:
                raise ParseError("array entry needs exactly one value", lineno)
            if count >= expected:
                raise ParseError(f"more than the expected {expected} entries", lineno)
            i, j = positions[count]
            v = _number(tok[0], lineno)
            out[i, j] = v
            if sym == "symmetric":
                out[j, i] = v
            count += 1
    if count != expected:
        raise ParseError(f"expected {expected} entries, found {count}")
    return out


def load_matrix_market(path, vector: bool | None = None) -> np.ndarray:
    """Read a Matrix Market file.

    Single-column data comes back as a 1-D vector unless ``vector=False``;
    ``vector=True`` insists on a single column.
    """
    with open(path, encoding="ascii") as fh:
        m = read_matrix_market(fh)
    if vector is None:
        vector = m.shape[1] == 1
    if vector:
        if m.shape[1] != 1:
            raise ParseError(f"expected a single column, got shape {m.shape}")
        return m[:, 0].copy()
    return m


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def format_matrix_market(m) -> str:
    """Serialize a vector (as an ``array`` column) or a matrix (``coordinate``).

    Exactly symmetric matrices are written as the lower triangle with
    ``symmetric`` symmetry.
    """
    a = np.asarray(m, dtype=np.float64)
    if a.ndim == 1:
        lines = ["%%MatrixMarket matrix array real general", f"{a.shape[0]} 1"]
        lines += [_fmt(v) for v in a]
        return "\n".join(lines) + "\n"
    if a.ndim != 2:
        raise ValueError(f"cannot write array of shape {a.shape}")
    rows, cols = a.shape
    symmetric = rows == cols and np.array_equal(a, a.T)
    entries = []
    for j in range(cols):
        for i in range(j if symmetric else 0, rows):
            if a[i, j] != 0.0:
                entries.append(f"{i + 1} {j + 1} {_fmt(a[i, j])}")
    header = "%%MatrixMarket matrix coordinate real " + ("symmetric" if symmetric else "general")
    return "\n".join([header, f"{rows} {cols} {len(entries)}", *entries]) + "\n"


def write_matrix_market(path, m) -> None:
    text = format_matrix_market(m)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(text)
    os.replace(tmp, path)

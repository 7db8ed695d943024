"""CSV datasets and flat ``key=value`` config files.

Pconf files have header ``x1,...,xd,r``; labeled files ``x1,...,xd,y`` with
labels written as ``1`` / ``-1``.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from pconf.errors import InputFormatError
from pconf.risk import LabeledDataset, PconfDataset


def _fmt(v):
    return format(float(v), ".17g")


def _write_rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_pconf_csv(path, data):
    header = [f"x{j + 1}" for j in range(data.d)] + ["r"]
    _write_rows(path, header, ([_fmt(v) for v in x] + [_fmt(r)] for x, r in zip(data.X, data.r)))


def write_labeled_csv(path, data):
    header = [f"x{j + 1}" for j in range(data.d)] + ["y"]
    _write_rows(
        path, header, ([_fmt(v) for v in x] + [str(int(y))] for x, y in zip(data.X, data.y))
    )


def read_table(path):
    """Return ``(header, float array)`` for a numeric CSV with a header row."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InputFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if r]
    if not body:
        raise InputFormatError(f"{path}: no data rows")
    try:
        values = np.array([[float(v) for v in r] for r in body], dtype=np.float64)
    except ValueError as exc:
        raise InputFormatError(f"{path}: non-numeric value ({exc})") from None
    if values.ndim != 2 or values.shape[1] != len(header):
        raise InputFormatError(f"{path}: rows do not match the {len(header)}-column header")
    return header, values


def _split(path, header, values, target):
    if target not in header:
        raise InputFormatError(f"{path}: missing required column {target!r}")
    features = [h for h in header if h != target]
    expected = [f"x{j + 1}" for j in range(len(features))]
    if features != expected:
        raise InputFormatError(
            f"{path}: feature columns must be {','.join(expected)}, got {','.join(features)}"
        )
    t = header.index(target)
    return np.delete(values, t, axis=1), values[:, t]


def read_pconf_csv(path):
    header, values = read_table(path)
    X, r = _split(path, header, values, "r")
    if np.any(r < 0) or np.any(r > 1):
        raise InputFormatError(f"{path}: column 'r' must lie in [0, 1]")
    return PconfDataset(X, r)


def read_labeled_csv(path):
    header, values = read_table(path)
    X, y = _split(path, header, values, "y")
    if not np.all((y == 1) | (y == -1)):
        raise InputFormatError(f"{path}: column 'y' must contain only 1 and -1")
    return LabeledDataset(X, y.astype(np.int64))


def read_keyvalue(path):
    """Parse ``key=value`` lines; ``#`` starts a comment. Keys use underscores."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep or not key.strip():
            raise InputFormatError(f"{path}:{lineno}: expected key=value")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def parse_vector(text):
    try:
        return tuple(float(v) for v in str(text).replace(";", ",").split(",") if v.strip())
    except ValueError:
        raise InputFormatError(f"cannot parse vector {text!r}") from None

"""Atomic JSON/CSV writers with provenance comment lines."""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import os
import tempfile

import numpy as np


def timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, default=_default)


def write_json(path, doc) -> None:
    atomic_write_text(path, dumps(doc) + "\n")


def write_csv(path, header: str, rows, comments=(), fmt=None, config_hash: str = "") -> None:
    """CSV with ``# run:`` and ``# config_hash:`` comment lines above the header."""
    buf = io.StringIO()
    buf.write(f"# run: {timestamp()}\n")
    buf.write(f"# config_hash: {config_hash or 'none'}\n")
    for c in comments:
        buf.write(f"# {c}\n")
    buf.write(header + "\n")
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        if fmt is None:
            w.writerow([_cell(v) for v in row])
        else:
            w.writerow([f % v if isinstance(f, str) else f(v) for f, v in zip(fmt, row)])
    atomic_write_text(path, buf.getvalue())


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    return v


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    """Header and rows, skipping ``#`` comment lines."""
    with open(path, newline="") as f:
        lines = [ln for ln in f if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]

"""Deterministic CSV/JSON table emitters with atomic file replacement."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import tempfile


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v + 0.0)
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, complex):
        return [_json_value(v.real), _json_value(v.imag)]
    if isinstance(v, float):
        if not math.isfinite(v):
            return repr(v)
        return v + 0.0
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if hasattr(v, "item"):  # numpy scalar
        return _json_value(v.item())
    return v


def _meta_line(meta):
    parts = []
    for k, v in meta.items():
        if isinstance(v, (list, tuple, dict)):
            v = json.dumps(_json_value(v), separators=(",", ":"))
        elif isinstance(v, float):
            v = repr(v)
        parts.append(f"{k}={v}")
    return "# " + " ".join(parts)


def render(columns, rows, meta=None, fmt="csv", comments=()):
    """Serialize ``rows`` (sequences aligned with ``columns``) as CSV or JSON text.

    ``comments`` are extra ``#`` lines for CSV; JSON carries them as ``meta["notes"]``.
    """
    meta = dict(meta or {})
    if fmt == "json":
        if comments:
            meta["notes"] = list(comments)
        payload = {
            "meta": _json_value(meta),
            "rows": [dict(zip(columns, (_json_value(v) for v in row))) for row in rows],
        }
        return json.dumps(payload, indent=1) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    out = io.StringIO()
    if meta:
        out.write(_meta_line(meta) + "\n")
    for line in comments:
        out.write("# " + line + "\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return out.getvalue()


def atomic_write(path, text):
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".nhrg-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def emit(text, output=None):
    if output is None or output == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        atomic_write(output, text)

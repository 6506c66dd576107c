"""Deterministic CSV emission (RFC-4180 style, UTF-8, '.' decimal separator).

Floats are written with repr (shortest round-trip form) so that two runs
with identical inputs produce byte-identical files; the only line allowed
to vary is a leading '# generated:' timestamp comment.
"""

from __future__ import annotations

import csv
import datetime
import numbers
from pathlib import Path


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        return repr(float(v))
    if isinstance(v, numbers.Complex):
        return repr(complex(v))
    return str(v)


def write_csv(path, header: list[str], rows, comments: list[str] = (), timestamp: bool = True) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        if timestamp:
            fh.write(f"# generated: {datetime.datetime.now().isoformat()}\n")
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def read_csv(path):
    """Header and rows (strings), comment lines skipped."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    rows = list(reader)
    return rows[0], rows[1:]

"""CSV and plain-text table output.

CSV numbers use 17 significant digits (IEEE-754 round trip) and ``.`` as
the decimal separator; lines end in LF.  Nothing here depends on locale.
"""

from __future__ import annotations

import csv
import io
from typing import Iterable, Sequence


def format_number(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, int)) and not isinstance(x, float):
        return str(int(x))
    return format(float(x), ".17g")


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_number(v) for v in row])
    return buf.getvalue()


def to_text(header: Sequence[str], rows: Iterable[Sequence], digits: int = 10) -> str:
    cells = [list(header)]
    for row in rows:
        cells.append([v if isinstance(v, str) else format(float(v), f".{digits}g")
                      for v in row])
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def render(header, rows, fmt: str) -> str:
    rows = list(rows)
    return to_csv(header, rows) if fmt == "csv" else to_text(header, rows)


def parse_csv(text: str) -> tuple[list[str], list[list[float]]]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return header, [[float(v) for v in row] for row in reader]

"""Machine-readable run reports (JSON and CSV).

Floats are written with ``repr`` so every value re-parses to the same
double.  No timestamps or host data go into a report, which keeps output
byte-identical across identical runs.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Any

__all__ = ["Report", "rows_to_csv", "rows_from_csv"]


@dataclass
class Report:
    command: str
    parameters: dict[str, Any]
    version: str
    dataset: dict[str, Any]
    seed: int | None = None
    profiles: list[dict[str, Any]] = field(default_factory=list)
    verification: dict[str, Any] | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=False, allow_nan=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls(**json.loads(text))

    def rows(self) -> list[dict[str, Any]]:
        """All profile rows flattened, each tagged with its ``m``."""
        out = []
        for prof in self.profiles:
            for row in prof["rows"]:
                out.append({"m": prof["m"], **row})
        return out

    def to_csv(self) -> str:
        return rows_to_csv(self.rows())


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: list[dict[str, Any]]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    for r in rows[1:]:
        for c in r:
            if c not in cols:
                cols.append(c)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r[c]) if c in r else "" for c in cols])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[dict[str, Any]]:
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for key, val in rec.items():
            if val == "":
                continue
            if key in ("m", "k"):
                row[key] = int(val)
            else:
                try:
                    row[key] = float(val)
                except ValueError:
                    row[key] = val
        out.append(row)
    return out

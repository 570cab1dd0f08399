"""Verification records and their CSV / JSON serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

CSV_COLUMNS = (
    "check_id",
    "params_json",
    "value_re",
    "value_im",
    "oracle_re",
    "oracle_im",
    "abs_err",
    "rel_err",
    "pass",
)


@dataclass
class CheckRow:
    check_id: str
    params: dict
    value: complex
    oracle: complex
    passed: bool
    topic: str = ""
    abs_err: float | None = None
    rel_err: float | None = None

    def __post_init__(self):
        self.value = complex(self.value)
        self.oracle = complex(self.oracle)
        if self.abs_err is None:
            self.abs_err = abs(self.value - self.oracle)
        if self.rel_err is None:
            scale = abs(self.oracle)
            self.rel_err = self.abs_err / scale if scale > 0 else (0.0 if self.abs_err == 0 else math.inf)
        self.passed = bool(self.passed)

    def params_json(self) -> str:
        payload = dict(self.params)
        if self.topic:
            payload["topic"] = self.topic
        return json.dumps(payload, sort_keys=True, default=_jsonable)

    def as_record(self) -> dict:
        return {
            "check_id": self.check_id,
            "params_json": self.params_json(),
            "value_re": _fmt(self.value.real),
            "value_im": _fmt(self.value.imag),
            "oracle_re": _fmt(self.oracle.real),
            "oracle_im": _fmt(self.oracle.imag),
            "abs_err": _fmt(self.abs_err),
            "rel_err": _fmt(self.rel_err),
            "pass": "true" if self.passed else "false",
        }


@dataclass
class VerificationReport:
    suite: str
    rows: list[CheckRow] = field(default_factory=list)
    settings: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def add(self, *args, **kwargs) -> CheckRow:
        row = CheckRow(*args, **kwargs)
        self.rows.append(row)
        return row

    def extend(self, other: "VerificationReport") -> None:
        self.rows.extend(other.rows)
        self.notes.extend(other.notes)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[CheckRow]:
        return [r for r in self.rows if not r.passed]

    def by_id(self, prefix: str) -> list[CheckRow]:
        return [r for r in self.rows if r.check_id.startswith(prefix)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow(r.as_record())
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "suite": self.suite,
            "settings": self.settings,
            "notes": self.notes,
            "passed": self.passed,
            "rows": [r.as_record() for r in self.rows],
        }
        return json.dumps(doc, indent=1, sort_keys=True, default=_jsonable) + "\n"


def _fmt(x: float) -> str:
    if x is None:
        return ""
    if math.isinf(x) or math.isnan(x):
        return repr(float(x))
    return repr(float(x))


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "item"):
        return obj.item()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    return str(obj)


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))

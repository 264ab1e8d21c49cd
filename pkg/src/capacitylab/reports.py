"""Check reports and their deterministic serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

LE, GE, APPROX = "≤", "≥", "≈"
COMPARATORS = (LE, GE, APPROX)
FIELDS = ("check_name", "params", "value", "bound", "comparator", "tolerance", "pass", "runtime_ms")


def compare(value: float, bound: float, comparator: str, tolerance: float) -> bool:
    if math.isnan(value):
        return False
    if comparator == LE:
        return value <= bound + tolerance
    if comparator == GE:
        return value >= bound - tolerance
    if comparator == APPROX:
        return abs(value - bound) <= tolerance
    raise ValueError(f"unknown comparator {comparator!r}")


@dataclass(frozen=True)
class CheckReport:
    check_name: str
    params: dict
    value: float
    bound: float
    comparator: str
    tolerance: float
    passed: bool
    runtime_ms: int = 0

    def __post_init__(self):
        if self.comparator not in COMPARATORS:
            raise ValueError(f"unknown comparator {self.comparator!r}")
        if self.passed != compare(self.value, self.bound, self.comparator, self.tolerance):
            raise ValueError("pass flag disagrees with comparator")

    @classmethod
    def evaluate(cls, name, params, value, bound, comparator, tolerance=0.0, runtime_ms=0) -> "CheckReport":
        value, bound = float(value), float(bound)
        return cls(name, dict(params), value, bound, comparator, float(tolerance),
                   compare(value, bound, comparator, tolerance), int(runtime_ms))

    def as_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "params": _plain(self.params),
            "value": self.value,
            "bound": self.bound,
            "comparator": self.comparator,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "runtime_ms": self.runtime_ms,
        }

    def sort_key(self):
        return (self.check_name, json.dumps(_plain(self.params), sort_keys=True))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "item"):
        return obj.item()
    return obj


@dataclass(frozen=True)
class RunManifest:
    seed: int = 0
    suites: tuple[str, ...] = ("all",)
    out: str | None = None
    format: str = "json"
    n: int | None = None
    m: int | None = None
    samples: int | None = None
    alpha: float | None = None
    timing: bool = False


@dataclass
class Recorder:
    """Collects reports; timing is recorded only when enabled so default
    output stays byte-stable."""

    timing: bool = False
    reports: list = field(default_factory=list)

    @contextmanager
    def timed(self):
        box = {"ms": 0}
        start = time.perf_counter()
        yield box
        if self.timing:
            box["ms"] = int(round((time.perf_counter() - start) * 1000))

    def add(self, name, params, value, bound, comparator, tolerance=0.0, runtime_ms=0) -> CheckReport:
        rep = CheckReport.evaluate(name, params, value, bound, comparator, tolerance,
                                   runtime_ms if self.timing else 0)
        self.reports.append(rep)
        return rep


def sorted_reports(reports) -> list[CheckReport]:
    return sorted(reports, key=CheckReport.sort_key)


def reports_to_json(reports) -> str:
    return json.dumps([r.as_dict() for r in sorted_reports(reports)], indent=2, ensure_ascii=False) + "\n"


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in sorted_reports(reports):
        d = r.as_dict()
        d["params"] = json.dumps(d["params"], sort_keys=True)
        d["pass"] = str(d["pass"]).lower()
        w.writerow([d[k] for k in FIELDS])
    return buf.getvalue()


def validate_record(d: dict) -> bool:
    """True if ``d`` has exactly the report fields in order with sane types."""
    if tuple(d.keys()) != FIELDS:
        return False
    return (
        isinstance(d["check_name"], str)
        and isinstance(d["params"], dict)
        and isinstance(d["value"], (int, float))
        and isinstance(d["bound"], (int, float))
        and d["comparator"] in COMPARATORS
        and isinstance(d["tolerance"], (int, float))
        and isinstance(d["pass"], bool)
        and isinstance(d["runtime_ms"], int)
        and d["pass"] == compare(d["value"], d["bound"], d["comparator"], d["tolerance"])
    )

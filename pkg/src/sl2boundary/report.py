"""Reports shared by the verification suites and the CLI."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from typing import Any, List, Optional


@dataclass
class Case:
    name: str
    expected: str
    got: str
    provenance: str  # REFERENCE, DERIVED, TRIVIAL or PROPERTY
    passed: bool
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "expected": self.expected,
            "got": self.got,
            "provenance": self.provenance,
            "status": "pass" if self.passed else "fail",
        }
        if self.witness:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    cases: List[Case] = field(default_factory=list)
    error: Optional[str] = None
    payload: Any = None
    elapsed: float = 0.0

    @property
    def status(self) -> str:
        if self.error is not None:
            return "error"
        return "pass" if all(c.passed for c in self.cases) else "fail"

    def add(self, name, expected, got, provenance, passed=None, witness=None) -> Case:
        expected, got = str(expected), str(got)
        if passed is None:
            passed = expected == got
        case = Case(name, expected, got, provenance, bool(passed), witness)
        self.cases.append(case)
        return case

    def extend(self, other: "Report"):
        self.cases.extend(other.cases)
        if other.error and not self.error:
            self.error = other.error

    def to_json(self, deterministic: bool = False) -> dict:
        out = {
            "status": self.status,
            "cases": [c.to_json() for c in sorted(self.cases, key=lambda c: c.name)],
        }
        if self.error is not None:
            out["error"] = self.error
        if self.payload is not None:
            out["payload"] = self.payload
        if not deterministic:
            out["timing"] = round(self.elapsed, 6)
        return out


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def emit_report(report: Report, fmt: str = "json", deterministic: bool = False) -> bytes:
    """Serialize deterministically: sorted keys and cases, canonical rationals."""
    if fmt == "json":
        text = json.dumps(report.to_json(deterministic), sort_keys=True, separators=(",", ":"))
        return (text + "\n").encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "status", "expected", "got", "provenance"])
        for c in sorted(report.cases, key=lambda c: c.name):
            w.writerow([c.name, "pass" if c.passed else "fail", c.expected, c.got, c.provenance])
        return buf.getvalue().encode("utf-8")
    if fmt == "text":
        lines = [f"status: {report.status}"]
        if report.error:
            lines.append(f"error: {report.error}")
        for c in sorted(report.cases, key=lambda c: c.name):
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"{mark} {c.name}: expected {c.expected}, got {c.got} [{c.provenance}]")
        if report.payload is not None:
            lines.append(json.dumps(report.payload, sort_keys=True, indent=2))
        if not deterministic:
            lines.append(f"elapsed: {report.elapsed:.3f}s")
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")

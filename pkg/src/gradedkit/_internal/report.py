"""
Machine-readable verification reports.

JSON reports are sorted and indented so that a fixed (document, command, seed) produces
byte-identical output. Timings are only serialized on request.
"""

import logging
from dataclasses import dataclass, field
from typing import Any

import orjson

from gradedkit._internal.constants import GRADEDKIT_NAMESPACE, GRADEDKIT_REPORT_SCHEMA, GRADEDKIT_VERSION
from gradedkit._internal.core.verdict import Check, CheckReport, Verdict

logger = logging.getLogger(__name__)

FORMATS = ("json", "text")


@dataclass
class Report:
    """
    The outcome of one command on one document.

    Args:
        command: the command that ran
        document: label of the input document
        kind: structure kind of the input document
        checks: every identity instance checked, in order
        seed: seed used for sample points and randomized probes
        mode: nondegeneracy mode
        samples: number of pseudorandom sample points
        expected: expected verdict recorded in the document, if any
        output: command-specific payload (tables, normalized forms, diffs)
        timings: wall-clock seconds per phase
    """

    command: str
    document: str
    kind: str
    checks: list[Check] = field(default_factory=list)
    seed: int = 0
    mode: str = "strict"
    samples: int = 0
    expected: str | None = None
    output: dict[str, Any] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_checks(cls, command: str, document: str, kind: str, report: CheckReport, **kwargs) -> "Report":
        return cls(command, document, kind, list(report.checks), **kwargs)

    @property
    def verdict(self) -> Verdict:
        return CheckReport(self.command, self.checks).verdict

    @property
    def matches_expectation(self) -> bool | None:
        """Whether the verdict meets the document's expected verdict; None when none is recorded"""
        if self.expected is None:
            return None
        if self.expected == "pass":
            return self.verdict.passed
        return self.verdict == Verdict(self.expected)

    def to_dict(self, timings: bool = False) -> dict[str, Any]:
        data = {
            "schema": GRADEDKIT_REPORT_SCHEMA,
            "tool": {"name": GRADEDKIT_NAMESPACE, "version": GRADEDKIT_VERSION},
            "command": self.command,
            "document": self.document,
            "kind": self.kind,
            "verdict": str(self.verdict),
            "expected": self.expected,
            "seed": self.seed,
            "mode": self.mode,
            "samples": self.samples,
            "checks": [_check_dict(check) for check in self.checks],
            "output": self.output,
        }
        if timings:
            data["timings"] = dict(self.timings)
        return data


def _check_dict(check: Check) -> dict[str, Any]:
    entry = {"id": check.check_id, "anchor": check.anchor, "verdict": str(check.verdict)}
    if check.verdict is Verdict.FAIL:
        entry["witness"] = check.witness
        entry["residual"] = check.residual
    return entry


def _text(report: Report, timings: bool) -> str:
    lines = [f"{report.command} {report.document or '(unlabelled)'} [{report.kind}]: {str(report.verdict).upper()}"]
    counts: dict[str, int] = {}
    for check in report.checks:
        counts[check.anchor] = counts.get(check.anchor, 0) + 1
    for anchor, count in counts.items():
        failed = [c for c in report.checks if c.anchor == anchor and not c.passed]
        status = f"{len(failed)} FAILED" if failed else "ok"
        lines.append(f"  {anchor}: {count} checks, {status}")
        for check in failed:
            lines.append(f"    {check.check_id} at {check.witness}: residual {check.residual}")
    for key, value in report.output.items():
        lines.append(f"  {key}:")
        items = value if isinstance(value, list) else [value]
        lines.extend(f"    {item}" for item in items)
    if report.expected is not None:
        lines.append(f"  expected {report.expected}: {'met' if report.matches_expectation else 'NOT MET'}")
    lines.append(f"  seed {report.seed}, mode {report.mode}, {report.samples} samples")
    if timings:
        lines.extend(f"  {phase}: {seconds:.3f}s" for phase, seconds in report.timings.items())
    return "\n".join(lines) + "\n"


def emit_report(report: Report, format: str = "json", timings: bool = False) -> bytes:
    """
    Serialize a report as JSON (schema ``gradedkit.report/1``) or as a text summary.

    Raises:
        ValueError: for an unknown format
    """
    if format == "json":
        return orjson.dumps(report.to_dict(timings), option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2) + b"\n"
    if format == "text":
        return _text(report, timings).encode("utf-8")
    raise ValueError(f"Unknown report format {format!r}; expected one of {FORMATS}")

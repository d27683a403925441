"""
Verdicts shared by every verifier.

A verifier returns a ``CheckReport``: an ordered list of ``Check`` entries, one per identity
instance, each carrying the anchor of the equation it checks. Failing entries carry a
witness (the basis tuple or sample point) and the nonzero residual.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any, Callable, Iterable, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class Verdict(StrEnum):
    PASS = "pass"
    FAIL = "fail"
    STRICT_PASS = "strict-pass"
    SAMPLED_PASS = "sampled-pass"

    @property
    def passed(self) -> bool:
        return self is not Verdict.FAIL


@dataclass(frozen=True)
class Check:
    """One checked identity instance"""

    check_id: str
    anchor: str
    verdict: Verdict
    witness: str | None = None
    residual: str | None = None

    @property
    def passed(self) -> bool:
        return self.verdict.passed

    @classmethod
    def of(cls, check_id: str, anchor: str, residual: Any = None, witness: str | None = None) -> "Check":
        """PASS when the residual is falsy (zero), FAIL carrying witness and residual otherwise"""
        if _is_zero(residual):
            return cls(check_id, anchor, Verdict.PASS)
        return cls(check_id, anchor, Verdict.FAIL, witness=witness or check_id, residual=str(residual))

    @classmethod
    def failed(cls, check_id: str, anchor: str, witness: str, residual: Any = None) -> "Check":
        residual = None if residual is None else str(residual)
        return cls(check_id, anchor, Verdict.FAIL, witness=witness, residual=residual)


def _is_zero(residual: Any) -> bool:
    if residual is None:
        return True
    is_zero = getattr(residual, "is_zero", None)
    if callable(is_zero):
        return is_zero()
    if isinstance(residual, (list, tuple)):
        return all(_is_zero(r) for r in residual)
    return not residual


@dataclass
class CheckReport:
    """Ordered collection of checks with a combined verdict"""

    title: str
    checks: list[Check] = field(default_factory=list)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        if not check.passed:
            logger.debug("%s: %s failed at %s", self.title, check.check_id, check.witness)
        return check

    def extend(self, checks: Iterable[Check]) -> "CheckReport":
        for check in checks:
            self.add(check)
        return self

    def merge(self, other: "CheckReport", prefix: str | None = None) -> "CheckReport":
        for check in other.checks:
            if prefix:
                check = Check(f"{prefix}/{check.check_id}", check.anchor, check.verdict, check.witness, check.residual)
            self.add(check)
        return self

    @property
    def verdict(self) -> Verdict:
        verdicts = [check.verdict for check in self.checks]
        if Verdict.FAIL in verdicts:
            return Verdict.FAIL
        if Verdict.SAMPLED_PASS in verdicts:
            return Verdict.SAMPLED_PASS
        if verdicts and all(v is Verdict.STRICT_PASS for v in verdicts):
            return Verdict.STRICT_PASS
        return Verdict.PASS

    @property
    def passed(self) -> bool:
        return self.verdict.passed

    @property
    def first_failure(self) -> Check | None:
        return next((check for check in self.checks if not check.passed), None)

    def failures(self) -> list[Check]:
        return [check for check in self.checks if not check.passed]

    def by_anchor(self, anchor: str) -> list[Check]:
        return [check for check in self.checks if check.anchor == anchor]

    def failed_anchors(self) -> list[str]:
        anchors: list[str] = []
        for check in self.failures():
            if check.anchor not in anchors:
                anchors.append(check.anchor)
        return anchors


def ordered_map(func: Callable[[T], R], items: Sequence[T], max_workers: int | None = None) -> list[R]:
    """Map func over items, possibly on a thread pool, keeping input order in the output"""
    if max_workers is None:
        from gradedkit._internal.config import get_config

        max_workers = get_config().max_workers
    if max_workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(func, items))

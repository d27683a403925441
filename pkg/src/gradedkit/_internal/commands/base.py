import logging
import time
from abc import ABCMeta, abstractmethod
from dataclasses import dataclass

from gradedkit._internal.config import get_config
from gradedkit._internal.constants import GRADEDKIT_COMMAND_SPAN_NAME
from gradedkit._internal.core.verdict import CheckReport
from gradedkit._internal.dsl.document import SpecDocument
from gradedkit._internal.errors import KindMismatchError, MissingValueError
from gradedkit._internal.report import Report
from gradedkit._internal.tracer import traced

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CommandOptions:
    mode: str | None = None
    roundtrip: bool = False


class BaseCommand(metaclass=ABCMeta):
    """A CLI command: checks the document kinds it accepts and produces a Report"""

    name: str = ""
    kinds: tuple[str, ...] = ()
    companion_kinds: tuple[str, ...] = ()
    needs_companion: bool = False

    def validate(self, doc: SpecDocument, companion: SpecDocument | None) -> None:
        doc.require_kind(*self.kinds)
        if companion is None:
            if self.needs_companion:
                raise MissingValueError(f"{self.name} needs a second document")
            return
        if not self.companion_kinds:
            raise KindMismatchError(f"{self.name} takes a single document")
        companion.require_kind(*self.companion_kinds)

    @traced(GRADEDKIT_COMMAND_SPAN_NAME)
    def run(
        self, doc: SpecDocument, companion: SpecDocument | None = None, options: CommandOptions | None = None
    ) -> Report:
        options = options or CommandOptions()
        self.validate(doc, companion)
        config = get_config()
        mode = (options.mode or config.mode).lower()
        started = time.perf_counter()
        checks, output = self.execute(doc, companion, options, mode)
        elapsed = time.perf_counter() - started
        logger.info("%s on %s: %s", self.name, doc.label or doc.origin, checks.verdict)
        return Report.from_checks(
            self.name,
            doc.label,
            doc.kind,
            checks,
            seed=config.seed,
            mode=mode,
            samples=config.samples,
            expected=doc.expect,
            output=output,
            timings={self.name: elapsed},
        )

    @abstractmethod
    def execute(
        self, doc: SpecDocument, companion: SpecDocument | None, options: CommandOptions, mode: str
    ) -> tuple[CheckReport, dict]:
        """Run the command, returning the checks and the command-specific output"""

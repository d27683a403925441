from gradedkit._internal.commands.base import BaseCommand, CommandOptions
from gradedkit._internal.constants import ANCHOR_ROUND_TRIP, ANCHOR_STRUCTURE
from gradedkit._internal.core.algebroid import build_ce_differential, extract_brackets
from gradedkit._internal.core.graded import check_square_zero
from gradedkit._internal.core.verdict import Check, CheckReport
from gradedkit._internal.dsl.document import SpecDocument, build_algebroid


class CECommand(BaseCommand):
    """Emit the Chevalley-Eilenberg differential's generator table and check it squares to zero"""

    name = "ce"
    kinds = ("linfty",)

    def execute(self, doc: SpecDocument, companion: SpecDocument | None, options: CommandOptions, mode: str):
        A = build_algebroid(doc)
        report = CheckReport(f"ce {doc.label}".strip())
        for conflict in A.conflicts:
            report.add(Check.failed("skew-symmetry", ANCHOR_STRUCTURE, conflict))
        Q = build_ce_differential(A)
        report.merge(check_square_zero(Q))
        recovered = extract_brackets(Q, A.ce_table, check=False, label=A.label)
        mismatch = None if recovered == A else f"recovered {recovered!r} differs from the table"
        report.add(Check.of("extract(build)", ANCHOR_ROUND_TRIP, mismatch, "bracket table"))
        return report, {"differential": str(Q).splitlines()}

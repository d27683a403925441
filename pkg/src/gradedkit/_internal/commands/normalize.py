from gradedkit._internal.commands.base import BaseCommand, CommandOptions
from gradedkit._internal.constants import ANCHOR_CLOSURE_TOWER
from gradedkit._internal.core.forms import (
    ClosedFormsRetract,
    FormsBicomplex,
    normalize_closed_form,
    realize_closed_form,
)
from gradedkit._internal.core.verdict import Check, CheckReport
from gradedkit._internal.dsl.document import SpecDocument, build_algebroid, build_mixed_form
from gradedkit._internal.errors import MissingValueError


class NormalizeCommand(BaseCommand):
    """Send a closed p-form, given by its mixed terms, to the normalized complex"""

    name = "normalize"
    kinds = ("linfty",)

    def execute(self, doc: SpecDocument, companion: SpecDocument | None, options: CommandOptions, mode: str):
        if doc.closed is None:
            raise MissingValueError("normalize needs a 'closed p' declaration")
        p = doc.closed
        bicomplex = FormsBicomplex(build_algebroid(doc))
        omega = build_mixed_form(doc, bicomplex.table)
        report = CheckReport(f"normalize {doc.label}".strip())
        report.extend(ClosedFormsRetract(bicomplex, p).closure_checks(omega))
        if not report.passed:
            return report, {}

        value = normalize_closed_form(omega, bicomplex, p)
        again = normalize_closed_form(realize_closed_form(value, bicomplex), bicomplex, p)
        residual = None if again == value else f"{again} != {value}"
        report.add(Check.of("normalize(realize)", ANCHOR_CLOSURE_TOWER, residual, "normalized form"))
        output = {"potential": str(value.potential), "forms": [str(form) for form in value.base_forms]}
        return report, output

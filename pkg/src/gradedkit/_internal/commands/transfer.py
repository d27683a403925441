from gradedkit._internal.commands.base import BaseCommand, CommandOptions
from gradedkit._internal.core.transfer import verify_transfer
from gradedkit._internal.dsl.document import SpecDocument, build_algebroid, build_retract
from gradedkit._internal.errors import KindMismatchError


class TransferCommand(BaseCommand):
    """
    Homotopy transfer along a retract document. The algebroid is read from the retract document
    itself or from a companion: ``transfer algebroid.gk retract.gk`` or ``transfer retract.gk``.
    """

    name = "transfer"
    kinds = ("linfty", "retract")
    companion_kinds = ("linfty", "retract")

    def execute(self, doc: SpecDocument, companion: SpecDocument | None, options: CommandOptions, mode: str):
        if companion is None:
            doc.require_kind("retract")
            algebroid_doc, retract_doc = doc, doc
        elif {doc.kind, companion.kind} == {"linfty", "retract"}:
            algebroid_doc, retract_doc = (doc, companion) if doc.kind == "linfty" else (companion, doc)
        else:
            raise KindMismatchError("transfer takes an algebroid and a retract document")

        M = build_algebroid(algebroid_doc)
        report, transferred, extension = verify_transfer(M, build_retract(retract_doc, M))
        output = {
            "brackets": [f"[{','.join(key)}] = {value}" for key, value in transferred.brackets.items()],
            "differential": [f"d({name}) = {value}" for name, value in transferred.differential.items()],
            "morphism": [f"f({','.join(key)}) = {value}" for key, value in extension.components.items()],
        }
        return report, output

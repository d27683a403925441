from gradedkit._internal.commands.base import BaseCommand, CommandOptions
from gradedkit._internal.commands.dirac import dirac_report
from gradedkit._internal.core.algebroid import verify_linfty, verify_morphism
from gradedkit._internal.core.courant import verify_courant_axioms, verify_courant_morphism
from gradedkit._internal.core.symplectic import (
    verify_closure_shift2,
    verify_nondegenerate,
    verify_transitive_pairing,
    verify_zero_shifted,
)
from gradedkit._internal.core.transfer import verify_retract
from gradedkit._internal.core.verdict import CheckReport
from gradedkit._internal.dsl.document import (
    SpecDocument,
    build_algebroid,
    build_courant,
    build_courant_morphism,
    build_linfty_morphism,
    build_retract,
    build_symplectic,
    resolve_reference,
)
from gradedkit._internal.errors import KindMismatchError, MissingValueError


class VerifyCommand(BaseCommand):
    """Verify the structure a document describes, dispatching on its kind"""

    name = "verify"
    kinds = ("linfty", "courant", "dirac", "symplectic", "retract", "morphism")
    companion_kinds = ("linfty",)

    def execute(self, doc: SpecDocument, companion: SpecDocument | None, options: CommandOptions, mode: str):
        if companion is not None and doc.kind != "retract":
            raise KindMismatchError("Only retract documents take a companion algebroid")
        match doc.kind:
            case "linfty":
                return verify_linfty(build_algebroid(doc)), {}
            case "courant":
                return verify_courant_axioms(build_courant(doc)), {}
            case "dirac":
                return dirac_report(doc, None, mode)
            case "symplectic":
                return self._symplectic(doc, mode), {}
            case "retract":
                algebroid = build_algebroid(companion if companion is not None else doc)
                return verify_retract(build_retract(doc, algebroid)), {}
            case "morphism":
                return self._morphism(doc), {}
        raise KindMismatchError(f"Nothing to verify for kind {doc.kind!r}")

    def _symplectic(self, doc: SpecDocument, mode: str) -> CheckReport:
        data = build_symplectic(doc)
        A = data.algebroid
        if data.shift == 0:
            return verify_zero_shifted(A, data.form)
        if data.shift == 1:
            if doc.kernel:
                if doc.pairing is None:
                    raise MissingValueError("A transitive pairing needs a pairing matrix on the kernel")
                return verify_transitive_pairing(A, doc.kernel, doc.pairing)
            return verify_nondegenerate(data, mode=mode)
        report = CheckReport(f"symplectic {doc.label}".strip())
        report.merge(verify_closure_shift2(data))
        report.merge(verify_nondegenerate(data, mode=mode), prefix="nondegenerate")
        return report

    def _morphism(self, doc: SpecDocument) -> CheckReport:
        source, target = resolve_reference(doc, "source"), resolve_reference(doc, "target")
        if source.kind != target.kind:
            raise KindMismatchError(f"Morphism between a {source.kind} and a {target.kind} document")
        if source.kind == "courant":
            return verify_courant_morphism(build_courant_morphism(doc, build_courant(source), build_courant(target)))
        if source.kind == "linfty":
            M, L = build_algebroid(source), build_algebroid(target)
            return verify_morphism(build_linfty_morphism(doc, M, L), M, L)
        raise KindMismatchError(f"Morphisms are between linfty or courant documents, got {source.kind!r}")

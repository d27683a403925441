from gradedkit._internal.commands.base import BaseCommand, CommandOptions
from gradedkit._internal.constants import ANCHOR_DIRAC_INVOLUTIVE
from gradedkit._internal.core.dirac import (
    DiracData,
    check_coisotropic,
    coisotropic_dirac,
    conormal_dirac,
    graph_of_form,
    poisson_graph,
    schouten_bracket,
    tensor_dirac,
    verify_dirac,
)
from gradedkit._internal.core.verdict import Check, CheckReport
from gradedkit._internal.dsl.document import SpecDocument, build_bivector, build_courant, build_dirac, build_form


def dirac_structure(doc: SpecDocument) -> tuple[DiracData, list[Check], dict]:
    """
    The Dirac structure a document describes: explicit generators, the graph of a bivector
    (or its coisotropic variant when a support is given), the graph of the 2-form omega, or
    the conormal structure of the support.
    """
    E = build_courant(doc)
    pi = build_bivector(doc)
    if doc.generators:
        return build_dirac(doc, E), [], {}
    if pi is not None:
        schouten = schouten_bracket(pi)
        output = {"bivector": str(pi), "schouten": str(schouten)}
        if doc.support:
            checks = check_coisotropic(pi, doc.support).checks
            return coisotropic_dirac(E, pi, doc.support, doc.label), checks, output
        return poisson_graph(E, pi, doc.label), [], output
    omega = build_form(doc, "omega", 2)
    if omega is not None:
        return graph_of_form(E, omega, doc.label), [], {}
    return conormal_dirac(E, doc.support, doc.label), [], {}


def dirac_report(doc: SpecDocument, companion: SpecDocument | None, mode: str) -> tuple[CheckReport, dict]:
    D, checks, output = dirac_structure(doc)
    if companion is not None:
        other, other_checks, _ = dirac_structure(companion)
        D = tensor_dirac(D, other)
        checks = checks + [
            Check(f"companion/{c.check_id}", c.anchor, c.verdict, c.witness, c.residual) for c in other_checks
        ]
    report = CheckReport(f"dirac {D.label}".strip())
    report.extend(checks)
    report.merge(verify_dirac(D, mode=mode))
    output["generators"] = [str(g) for g in D.generators]
    if "schouten" in output and companion is None and not doc.support and not doc.generators:
        involutive = all(check.passed for check in report.by_anchor(ANCHOR_DIRAC_INVOLUTIVE))
        output["schouten-agrees"] = (output["schouten"] == "0") == involutive
    return report, output


class DiracCommand(BaseCommand):
    """Dirac, Poisson and coisotropic checks; a second document forms the tensor product"""

    name = "dirac"
    kinds = ("dirac",)
    companion_kinds = ("dirac",)

    def execute(self, doc: SpecDocument, companion: SpecDocument | None, options: CommandOptions, mode: str):
        return dirac_report(doc, companion, mode)

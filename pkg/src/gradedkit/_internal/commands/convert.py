from itertools import product

from gradedkit._internal.commands.base import BaseCommand, CommandOptions
from gradedkit._internal.constants import ANCHOR_ROUND_TRIP_COURANT
from gradedkit._internal.core.algebroid import LinftyAlgebroid, Section
from gradedkit._internal.core.courant import (
    CourantData,
    courant_to_symplectic,
    symplectic_to_courant,
    verify_courant_axioms,
)
from gradedkit._internal.core.symplectic import ShiftedSymplecticData, verify_closure_shift2
from gradedkit._internal.core.verdict import Check, CheckReport
from gradedkit._internal.dsl.document import SpecDocument, build_connection, build_courant, build_symplectic


def _differs(diff: list[str], what: str, left, right) -> None:
    if left != right:
        diff.append(f"{what}: {left} != {right}")


def courant_diff(E1: CourantData, E2: CourantData) -> list[str]:
    """Entry-by-entry differences between two Courant algebroids on the same basis"""
    if E1.basis != E2.basis:
        return [f"basis: {list(E1.basis)} != {list(E2.basis)}"]
    diff: list[str] = []
    zero = Section(E1.ring)
    for (i, x), (j, y) in product(enumerate(E1.basis), repeat=2):
        _differs(diff, f"<{x},{y}>", E1.gram[i][j], E2.gram[i][j])
    for x in E1.basis:
        _differs(diff, f"a({x})", E1.anchor_of(E1.section(x)), E2.anchor_of(E2.section(x)))
    for x, y in product(E1.basis, repeat=2):
        _differs(diff, f"[[{x},{y}]]", E1.brackets.get((x, y), zero), E2.brackets.get((x, y), zero))
    _differs(diff, "K", E1.K, E2.K)
    return diff


def algebroid_diff(A: LinftyAlgebroid, B: LinftyAlgebroid) -> list[str]:
    if A.modules != B.modules:
        return [f"modules: {A.modules} != {B.modules}"]
    diff: list[str] = []
    zero = Section(A.ring)
    for name in A.basis:
        _differs(diff, f"d({name})", A.differential.get(name, zero), B.differential.get(name, zero))
    for name in A.modules[0]:
        section = Section.basis(A.ring, name)
        _differs(diff, f"a({name})", A.anchor_of(section), B.anchor_of(section))
    for key in sorted(set(A.brackets) | set(B.brackets)):
        _differs(diff, f"[{','.join(key)}]", A.brackets.get(key, zero), B.brackets.get(key, zero))
    return diff


def symplectic_diff(first: ShiftedSymplecticData, second: ShiftedSymplecticData) -> list[str]:
    diff = algebroid_diff(first.algebroid, second.algebroid)
    if diff:
        return diff
    A = first.algebroid
    basis = [Section.basis(A.ring, n) for n in A.modules[0]]
    for x, y in product(basis, repeat=2):
        _differs(diff, f"Q({x},{y})", first.Q(x, y), second.Q(x, y))
        _differs(diff, f"psi({x},{y})", first.psi_of(x, y), second.psi_of(x, y))
    for name in A.modules[1] if A.amplitude >= 1 else ():
        section = Section.basis(A.ring, name)
        _differs(diff, f"phi({name})", first.phi_of(section), second.phi_of(section))
    _differs(diff, "K", first.K, second.K)
    return diff


def describe_symplectic(data: ShiftedSymplecticData) -> list[str]:
    A = data.algebroid
    lines = [f"d({name}) = {value}" for name, value in A.differential.items()]
    lines += [f"a({name}) = {value}" for name, value in A.anchor.items()]
    lines += [f"[{','.join(key)}] = {value}" for key, value in A.brackets.items()]
    lines += [f"phi({name}) = {value}" for name, value in data.phi.items()]
    lines += [f"psi({','.join(key)}) = {value}" for key, value in data.psi.items() if not value.is_zero()]
    lines.append(f"K = {data.K}")
    return lines


def describe_courant(E: CourantData) -> list[str]:
    pairs = product(enumerate(E.basis), repeat=2)
    lines = [f"<{x},{y}> = {E.gram[i][j]}" for (i, x), (j, y) in pairs if E.gram[i][j]]
    lines += [f"a({name}) = {value}" for name, value in E.anchor.items()]
    lines += [f"[[{x},{y}]] = {value}" for (x, y), value in E.brackets.items()]
    lines.append(f"K = {E.K}")
    return lines


class ConvertCommand(BaseCommand):
    """Convert between Courant algebroids and two-shifted symplectic data, optionally round-tripping"""

    name = "convert"
    kinds = ("courant", "symplectic")

    def execute(self, doc: SpecDocument, companion: SpecDocument | None, options: CommandOptions, mode: str):
        report = CheckReport(f"convert {doc.label}".strip())
        if doc.kind == "courant":
            E = build_courant(doc)
            connection = build_connection(doc, E)
            data = courant_to_symplectic(E, connection)
            report.merge(verify_closure_shift2(data), prefix="closure")
            output = {"symplectic": describe_symplectic(data)}
            if options.roundtrip:
                diff = courant_diff(E, symplectic_to_courant(data, connection))
                report.add(Check.of("round-trip", ANCHOR_ROUND_TRIP_COURANT, diff, "courant data"))
                output["diff"] = diff
            return report, output

        data = build_symplectic(doc)
        E = symplectic_to_courant(data)
        connection = build_connection(doc, E)
        if connection is not None:
            E = symplectic_to_courant(data, connection)
            connection = build_connection(doc, E)
        report.merge(verify_courant_axioms(E), prefix="axioms")
        output = {"courant": describe_courant(E)}
        if options.roundtrip:
            diff = symplectic_diff(data, courant_to_symplectic(E, connection))
            report.add(Check.of("round-trip", ANCHOR_ROUND_TRIP_COURANT, diff, "symplectic data"))
            output["diff"] = diff
        return report, output

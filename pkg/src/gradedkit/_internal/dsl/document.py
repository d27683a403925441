"""
Structure documents: the parsed form of a ``.gk`` file and the builders that turn it into
algebroids, Courant data, Dirac structures, shifted symplectic data, retracts and morphisms.
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

from gradedkit._internal.core.algebroid import LinftyAlgebroid, LinftyMorphism, Section
from gradedkit._internal.core.courant import (
    COVECTOR_PREFIX,
    VECTOR_PREFIX,
    CourantData,
    CourantMorphism,
    MetricConnection,
    make_h_twist,
    make_standard,
)
from gradedkit._internal.core.dirac import DiracData, Multivector
from gradedkit._internal.core.forms import FormsTable, MixedForm, forms_table
from gradedkit._internal.core.ring import BaseForm, BaseRing, Poly, VectorField, rational
from gradedkit._internal.core.symplectic import ShiftedSymplecticData
from gradedkit._internal.core.transfer import DeformationRetract
from gradedkit._internal.dsl.grammar import Apply, Name, Number, Statement, parse_statements
from gradedkit._internal.errors import KindMismatchError, MissingValueError, ParseError, ShapeError

logger = logging.getLogger(__name__)

SectionMap = dict[str, Poly]
FormMap = dict[tuple[str, ...], Poly]


@dataclass(frozen=True)
class Bundle:
    degree: int
    basis: tuple[str, ...]


@dataclass
class SpecDocument:
    """
    A parsed structure document. Polynomials are already evaluated in the declared ring, so
    two documents are equal exactly when they describe the same data.
    """

    ring: BaseRing
    kind: str = "linfty"
    label: str = ""
    expect: str | None = None
    shift: int | None = None
    references: dict[str, str] = field(default_factory=dict)
    bundles: dict[str, Bundle] = field(default_factory=dict)
    summands: dict[str, Bundle] = field(default_factory=dict)
    standard: bool = False
    pairing: tuple[tuple[Poly, ...], ...] | None = None
    anchors: dict[str, SectionMap] = field(default_factory=dict)
    differentials: dict[str, SectionMap] = field(default_factory=dict)
    brackets: dict[tuple[str, ...], SectionMap] = field(default_factory=dict)
    forms: dict[str, FormMap] = field(default_factory=dict)
    twist: str | None = None
    phi: dict[str, FormMap] = field(default_factory=dict)
    psi: dict[tuple[str, ...], FormMap] = field(default_factory=dict)
    connection: dict[tuple[str, ...], SectionMap] = field(default_factory=dict)
    generators: list[SectionMap] = field(default_factory=list)
    support: tuple[str, ...] = ()
    bivector: FormMap | None = None
    kernel: tuple[str, ...] = ()
    include: dict[str, SectionMap] = field(default_factory=dict)
    project: dict[str, SectionMap] = field(default_factory=dict)
    homotopy: dict[str, SectionMap] = field(default_factory=dict)
    maps: dict[tuple[str, ...], SectionMap] = field(default_factory=dict)
    closed: int | None = None
    mixed: FormMap = field(default_factory=dict)
    origin: Path | None = field(default=None, compare=False)

    def basis_names(self) -> set[str]:
        names = {n for bundle in self.bundles.values() for n in bundle.basis}
        names |= {n for bundle in self.summands.values() for n in bundle.basis}
        if self.standard:
            names |= {prefix + x for x in self.ring.names for prefix in (VECTOR_PREFIX, COVECTOR_PREFIX)}
        return names

    def require_kind(self, *kinds: str) -> None:
        if self.kind not in kinds:
            raise KindMismatchError(f"Expected a document of kind {' or '.join(kinds)}, got {self.kind!r}")


# Expression evaluation


def _location(node) -> int:
    match node:
        case Name(loc=loc):
            return loc
        case Apply(args=args):
            return min((_location(a) for a in args), default=0)
    return 0


def evaluate(node, ring: BaseRing, statement: Statement) -> Poly:
    """Evaluate an expression tree in the ring, reporting unknown coordinates at their column"""
    match node:
        case Number(value=value):
            return ring.const(rational(value.numerator, value.denominator))
        case Name(name=name, loc=loc):
            if name not in ring.names:
                raise statement.error(f"Undeclared coordinate {name!r}", loc, ring.names)
            return ring.gen(name)
        case Apply(op="neg", args=(operand,)):
            return -evaluate(operand, ring, statement)
        case Apply(op="pow", args=(base, exponent)):
            value = _constant(evaluate(exponent, ring, statement), ring)
            if value is None or value.denominator != 1 or value < 0:
                raise statement.error("Exponents must be nonnegative integers", _location(exponent))
            return evaluate(base, ring, statement) ** int(value.numerator)
        case Apply(op="/", args=(left, right)):
            value = _constant(evaluate(right, ring, statement), ring)
            if value is None or value == 0:
                raise statement.error("Division is only by nonzero constants", _location(right))
            return evaluate(left, ring, statement) * ring.const(1 / value)
        case Apply(op=op, args=(left, right)):
            a, b = evaluate(left, ring, statement), evaluate(right, ring, statement)
            return {"+": a + b, "-": a - b, "*": a * b}[op]
    raise statement.error(f"Malformed expression {node!r}")


def _constant(f: Poly, ring: BaseRing):
    return ring.constant_term(f) if f.is_ground else None


# Document assembly


class _DocumentBuilder:
    """Feeds statements into a SpecDocument, resolving names in declaration order"""

    PRELUDE = ("ring", "kind", "label", "expect", "shift", "source", "target")

    def __init__(self):
        self.doc: SpecDocument | None = None
        self.header: dict[str, object] = {}
        self.references: dict[str, str] = {}

    def feed(self, stmt: Statement) -> None:
        if stmt.keyword not in self.PRELUDE and self.doc is None:
            raise stmt.error(f"{stmt.keyword!r} needs a preceding ring declaration", 0, ("ring",))
        handler: Callable[[Statement], None] = getattr(self, f"_on_{stmt.keyword}")
        handler(stmt)

    def finish(self) -> SpecDocument:
        if self.doc is None:
            raise ParseError("Missing ring declaration", 1, 1, ("ring",))
        for key, value in self.header.items():
            setattr(self.doc, key, value)
        self.doc.references = dict(self.references)
        return self.doc

    # Lookups

    def _locate(self, stmt: Statement, name: str) -> int:
        found = re.search(rf"\b{re.escape(name)}\b", stmt.text)
        return found.start() if found else 0

    def _coordinate(self, stmt: Statement, name: str) -> str:
        if name not in self.doc.ring.names:
            raise stmt.error(f"Undeclared coordinate {name!r}", self._locate(stmt, name), self.doc.ring.names)
        return name

    def _basis(self, stmt: Statement, name: str) -> str:
        known = self.doc.basis_names()
        if name not in known:
            raise stmt.error(f"Undeclared basis element {name!r}", self._locate(stmt, name), tuple(sorted(known)))
        return name

    def _section(self, stmt: Statement, entries, check: bool = True) -> SectionMap:
        section = {}
        for name, node in entries:
            if check:
                self._basis(stmt, name)
            if name in section:
                raise stmt.error(f"Repeated entry {name!r}", self._locate(stmt, name))
            section[name] = evaluate(node, self.doc.ring, stmt)
        return section

    def _vector(self, stmt: Statement, entries) -> SectionMap:
        vector = {}
        for name, node in entries:
            self._coordinate(stmt, name)
            vector[name] = evaluate(node, self.doc.ring, stmt)
        return vector

    def _form(self, stmt: Statement, entries) -> FormMap:
        form = {}
        degrees = set()
        for names, node in entries:
            for name in names:
                self._coordinate(stmt, name)
            degrees.add(len(names))
            form[tuple(names)] = evaluate(node, self.doc.ring, stmt)
        if len(degrees) > 1:
            raise stmt.error(f"Form literal mixes degrees {sorted(degrees)}")
        return form

    def _once(self, stmt: Statement, table: dict, key, value) -> None:
        if key in table:
            raise stmt.error(f"{stmt.keyword} {key!r} is already defined", self._locate(stmt, str(key)))
        table[key] = value

    def _bundle(self, stmt: Statement, table: dict[str, Bundle]) -> None:
        name, degree, basis = stmt.tokens
        if degree > 0:
            raise stmt.error(f"Bundle degrees are nonpositive, got {degree}", self._locate(stmt, str(degree)))
        clash = set(basis) & (self.doc.basis_names() | set(self.doc.ring.names))
        if clash or len(set(basis)) != len(basis):
            repeated = sorted(clash) or [n for n in basis if basis.count(n) > 1]
            raise stmt.error(f"Basis names {repeated} are already in use", self._locate(stmt, repeated[0]))
        self._once(stmt, table, name, Bundle(degree, tuple(basis)))

    # Handlers

    def _on_ring(self, stmt: Statement) -> None:
        if self.doc is not None:
            raise stmt.error("Repeated ring declaration")
        try:
            self.doc = SpecDocument(BaseRing(stmt.tokens))
        except ShapeError as exc:
            raise stmt.error(str(exc), 4) from None

    def _header(self, stmt: Statement, key: str) -> None:
        if key in self.header:
            raise stmt.error(f"Repeated {stmt.keyword} declaration")
        self.header[key] = stmt.tokens[0]

    def _on_kind(self, stmt: Statement) -> None:
        self._header(stmt, "kind")

    def _on_label(self, stmt: Statement) -> None:
        self._header(stmt, "label")

    def _on_expect(self, stmt: Statement) -> None:
        self._header(stmt, "expect")

    def _on_shift(self, stmt: Statement) -> None:
        self._header(stmt, "shift")

    def _on_source(self, stmt: Statement) -> None:
        self._once(stmt, self.references, "source", stmt.tokens[0])

    def _on_target(self, stmt: Statement) -> None:
        self._once(stmt, self.references, "target", stmt.tokens[0])

    def _on_bundle(self, stmt: Statement) -> None:
        self._bundle(stmt, self.doc.bundles)

    def _on_summand(self, stmt: Statement) -> None:
        self._bundle(stmt, self.doc.summands)

    def _on_standard(self, stmt: Statement) -> None:
        if self.doc.standard:
            raise stmt.error("Repeated standard declaration")
        self.doc.standard = True

    def _on_pairing(self, stmt: Statement) -> None:
        if self.doc.pairing is not None:
            raise stmt.error("Repeated pairing declaration")
        (rows,) = stmt.tokens
        self.doc.pairing = tuple(tuple(evaluate(node, self.doc.ring, stmt) for node in row) for row in rows)

    def _on_anchor(self, stmt: Statement) -> None:
        name, entries = stmt.tokens
        self._once(stmt, self.doc.anchors, self._basis(stmt, name), self._vector(stmt, entries))

    def _on_differential(self, stmt: Statement) -> None:
        name, entries = stmt.tokens
        self._once(stmt, self.doc.differentials, self._basis(stmt, name), self._section(stmt, entries))

    def _on_bracket(self, stmt: Statement) -> None:
        names, entries = stmt.tokens
        key = tuple(self._basis(stmt, n) for n in names)
        self._once(stmt, self.doc.brackets, key, self._section(stmt, entries))

    def _on_form(self, stmt: Statement) -> None:
        name, entries = stmt.tokens
        self._once(stmt, self.doc.forms, name, self._form(stmt, entries))

    def _on_twist(self, stmt: Statement) -> None:
        (name,) = stmt.tokens
        if self.doc.twist is not None:
            raise stmt.error("Repeated twist declaration")
        if name not in self.doc.forms:
            raise stmt.error(f"Undeclared form {name!r}", self._locate(stmt, name), tuple(self.doc.forms))
        self.doc.twist = name

    def _on_phi(self, stmt: Statement) -> None:
        name, entries = stmt.tokens
        self._once(stmt, self.doc.phi, self._basis(stmt, name), self._form(stmt, entries))

    def _on_psi(self, stmt: Statement) -> None:
        names, entries = stmt.tokens
        if len(names) != 2:
            raise stmt.error(f"psi takes a pair of basis elements, got {len(names)}")
        key = tuple(self._basis(stmt, n) for n in names)
        self._once(stmt, self.doc.psi, key, self._form(stmt, entries))

    def _on_connection(self, stmt: Statement) -> None:
        names, entries = stmt.tokens
        if len(names) != 2:
            raise stmt.error("connection entries are keyed by (coordinate, basis element)")
        key = (self._coordinate(stmt, names[0]), self._basis(stmt, names[1]))
        self._once(stmt, self.doc.connection, key, self._section(stmt, entries))

    def _on_generator(self, stmt: Statement) -> None:
        (entries,) = stmt.tokens
        self.doc.generators.append(self._section(stmt, entries))

    def _on_support(self, stmt: Statement) -> None:
        (names,) = stmt.tokens
        self.doc.support = tuple(self._coordinate(stmt, n) for n in names)

    def _on_bivector(self, stmt: Statement) -> None:
        if self.doc.bivector is not None:
            raise stmt.error("Repeated bivector declaration")
        (entries,) = stmt.tokens
        self.doc.bivector = self._form(stmt, entries)

    def _on_kernel(self, stmt: Statement) -> None:
        (names,) = stmt.tokens
        self.doc.kernel = tuple(self._basis(stmt, n) for n in names)

    def _retract_map(self, stmt: Statement, table: dict[str, SectionMap]) -> None:
        name, entries = stmt.tokens
        check = bool(self.doc.bundles)
        if check:
            self._basis(stmt, name)
        self._once(stmt, table, name, self._section(stmt, entries, check=check))

    def _on_include(self, stmt: Statement) -> None:
        self._retract_map(stmt, self.doc.include)

    def _on_project(self, stmt: Statement) -> None:
        self._retract_map(stmt, self.doc.project)

    def _on_homotopy(self, stmt: Statement) -> None:
        self._retract_map(stmt, self.doc.homotopy)

    def _on_map(self, stmt: Statement) -> None:
        name, entries = stmt.tokens
        self._once(stmt, self.doc.maps, (name,), self._section(stmt, entries, check=False))

    def _on_component(self, stmt: Statement) -> None:
        names, entries = stmt.tokens
        self._once(stmt, self.doc.maps, tuple(names), self._section(stmt, entries, check=False))

    def _on_closed(self, stmt: Statement) -> None:
        if self.doc.closed is not None:
            raise stmt.error("Repeated closed declaration")
        self.doc.closed = stmt.tokens[0]

    def _on_mixed(self, stmt: Statement) -> None:
        names, node = stmt.tokens
        self._once(stmt, self.doc.mixed, tuple(names), evaluate(node, self.doc.ring, stmt))


def parse_spec(text: str, origin: Path | None = None) -> SpecDocument:
    """
    Parse a structure document.

    Raises:
        ParseError: for lexical, syntactic and name-resolution errors, with line and column
    """
    builder = _DocumentBuilder()
    for stmt in parse_statements(text):
        builder.feed(stmt)
    doc = builder.finish()
    doc.origin = origin
    logger.debug("parsed %s document %s", doc.kind, doc.label or "(unlabelled)")
    return doc


def load_document(path: str | Path) -> SpecDocument:
    path = Path(path)
    return parse_spec(path.read_text(encoding="utf-8"), origin=path)


def resolve_reference(doc: SpecDocument, role: str) -> SpecDocument:
    """Load the document named by a ``source`` or ``target`` statement, relative to doc"""
    try:
        reference = doc.references[role]
    except KeyError:
        raise MissingValueError(f"Document {doc.label or doc.origin} has no {role} reference") from None
    base = doc.origin.parent if doc.origin is not None else Path.cwd()
    return load_document(base / reference)


# Builders into core objects


def _to_section(ring: BaseRing, values: Mapping[str, Poly]) -> Section:
    return Section(ring, values)


def _to_form(ring: BaseRing, values: FormMap, degree: int, what: str) -> BaseForm:
    for names in values:
        if len(names) != degree:
            raise ShapeError(f"{what} must be a {degree}-form, got an entry {names}")
    return BaseForm(ring, degree, {tuple(ring.index(n) for n in names): c for names, c in values.items()})


def build_form(doc: SpecDocument, name: str, degree: int) -> BaseForm | None:
    values = doc.forms.get(name)
    return None if values is None else _to_form(doc.ring, values, degree, f"form {name}")


def build_algebroid(doc: SpecDocument) -> LinftyAlgebroid:
    ring = doc.ring
    levels: dict[int, list[str]] = {}
    for bundle in doc.bundles.values():
        levels.setdefault(-bundle.degree, []).extend(bundle.basis)
    modules = [levels.get(level, []) for level in range(max(levels, default=0) + 1)]
    anchor = {n: VectorField.from_mapping(ring, v) for n, v in doc.anchors.items()}
    differential = {n: _to_section(ring, v) for n, v in doc.differentials.items()}
    brackets = {names: _to_section(ring, v) for names, v in doc.brackets.items()}
    return LinftyAlgebroid(ring, modules, differential, anchor, brackets, label=doc.label)


def build_courant(doc: SpecDocument) -> CourantData:
    ring = doc.ring
    anchor = {n: VectorField.from_mapping(ring, v) for n, v in doc.anchors.items()}
    brackets = {}
    for names, values in doc.brackets.items():
        if len(names) != 2:
            raise ShapeError(f"Courant brackets are binary, got {names}")
        brackets[names] = _to_section(ring, values)
    K = build_form(doc, "K", 4)
    if doc.standard:
        E = make_standard(ring, doc.label or "standard")
        if anchor or doc.pairing is not None:
            raise ShapeError("The standard Courant algebroid fixes its own anchor and pairing")
        E = CourantData(ring, E.basis, E.gram, E.anchor, brackets, K, E.label)
    else:
        basis = [n for bundle in doc.bundles.values() for n in bundle.basis]
        if any(bundle.degree != 0 for bundle in doc.bundles.values()):
            raise ShapeError("Courant bundles sit in degree 0")
        if doc.pairing is None:
            raise MissingValueError("A Courant document needs a pairing or the standard declaration")
        E = CourantData(ring, basis, doc.pairing, anchor, brackets, K, doc.label)
    if doc.twist is not None:
        E = make_h_twist(E, build_form(doc, doc.twist, 3), doc.label or None)
    return E


def build_connection(doc: SpecDocument, E: CourantData) -> MetricConnection | None:
    if not doc.connection:
        return None
    components: dict[str, dict[str, Section]] = {}
    for (coordinate, name), values in doc.connection.items():
        components.setdefault(coordinate, {})[name] = _to_section(doc.ring, values)
    return MetricConnection(E, components)


def build_symplectic(doc: SpecDocument) -> ShiftedSymplecticData:
    if doc.shift is None:
        raise MissingValueError("A symplectic document needs a shift declaration")
    ring = doc.ring
    phi = {n: _to_form(ring, v, 1, f"phi({n})") for n, v in doc.phi.items()}
    psi = {names: _to_form(ring, v, 1, f"psi{names}") for names, v in doc.psi.items()}
    return ShiftedSymplecticData(
        doc.shift,
        build_algebroid(doc),
        form=build_form(doc, "omega", 2),
        phi=phi,
        psi=psi,
        pairing=doc.pairing,
        K=build_form(doc, "K", 4),
        label=doc.label,
    )


def build_bivector(doc: SpecDocument) -> Multivector | None:
    if doc.bivector is None:
        return None
    for names in doc.bivector:
        if len(names) != 2:
            raise ShapeError(f"Bivector entries are coordinate pairs, got {names}")
    return Multivector.from_mapping(doc.ring, doc.bivector)


def build_dirac(doc: SpecDocument, E: CourantData | None = None) -> DiracData:
    E = E if E is not None else build_courant(doc)
    generators = [_to_section(doc.ring, g) for g in doc.generators]
    return DiracData(E, generators, doc.support, label=doc.label)


def build_retract(doc: SpecDocument, algebroid: LinftyAlgebroid | None = None) -> DeformationRetract:
    algebroid = algebroid if algebroid is not None else build_algebroid(doc)
    if not doc.summands:
        raise MissingValueError("A retract document needs summand declarations")
    levels: dict[int, list[str]] = {}
    for bundle in doc.summands.values():
        levels.setdefault(-bundle.degree, []).extend(bundle.basis)
    modules = [levels.get(level, []) for level in range(max(levels) + 1)]
    ring = doc.ring
    return DeformationRetract(
        algebroid,
        modules,
        {n: _to_section(ring, v) for n, v in doc.include.items()},
        {n: _to_section(ring, v) for n, v in doc.project.items()},
        {n: _to_section(ring, v) for n, v in doc.homotopy.items()},
        label=doc.label,
    )


def build_linfty_morphism(doc: SpecDocument, source: LinftyAlgebroid, target: LinftyAlgebroid) -> LinftyMorphism:
    components = {names: _to_section(doc.ring, v) for names, v in doc.maps.items()}
    return LinftyMorphism(source, target, components, label=doc.label)


def build_courant_morphism(doc: SpecDocument, source: CourantData, target: CourantData) -> CourantMorphism:
    images = {}
    for names, values in doc.maps.items():
        if len(names) != 1:
            raise ShapeError(f"Courant morphisms are linear, got a component on {names}")
        images[names[0]] = _to_section(doc.ring, values)
    return CourantMorphism(source, target, images, build_form(doc, "H", 3), label=doc.label)


def build_mixed_form(doc: SpecDocument, table: FormsTable | None = None) -> MixedForm:
    table = table if table is not None else forms_table(build_algebroid(doc))
    result = table.zero()
    for names, coeff in doc.mixed.items():
        result = result + table.monomial(names, coeff)
    return result

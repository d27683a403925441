"""
Differential forms on the quotient of the base by an algebroid.

Mixed forms live in the free graded-commutative algebra on the dual generators xi_e, the
coordinate differentials dx and the differentials dxi_e. A generator of form degree one has
Koszul parity (internal degree + 1), so the de Rham differential d and the internal
differential delta are odd derivations that anticommute, and d + delta squares to zero.
The public internal_delta rescales delta by (-1)^p on form degree p so that it commutes with d.

The Euler homotopy h = i_E / q on internal degree q > 0 (zero on internal degree zero)
satisfies dh + hd = 1 there. Closed p-forms are computed in the normalized complex
Pot^{p-1} + Omega^{>=p}(U) reached from the truncated bicomplex by the perturbation lemma:

    i(b + G) = db + G,   p(w) = h(w_p) + w|_{q=0},   H = -h in form degree > p,
    A = sum_k (delta H)^k delta,   i' = i + HAi,   p' = p + pAH,   delta' = p d i + pAi.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Mapping, Sequence

from gradedkit._internal.constants import (
    ANCHOR_BICOMPLEX,
    ANCHOR_CLOSURE_TOWER,
    ANCHOR_OPERATOR_SYMBOL,
    ANCHOR_POTENTIAL,
    GRADEDKIT_NORMALIZE_SPAN_NAME,
)
from gradedkit._internal.core.algebroid import DUAL_PREFIX, LinftyAlgebroid, LinftyMorphism, Section
from gradedkit._internal.core.graded import GCAElement, Generator, GeneratorTable, GradedDerivation, Kind, Key
from gradedkit._internal.core.ring import BaseForm, BaseRing, Poly, contract_many, rational
from gradedkit._internal.core.verdict import Check, CheckReport
from gradedkit._internal.errors import IterationCapError, ShapeError
from gradedkit._internal.tracer import traced

logger = logging.getLogger(__name__)

FORM_PREFIX = "d"

MixedForm = GCAElement


class FormsTable(GeneratorTable):
    """Generators xi_e, dx_i and dxi_e of the forms algebra of an algebroid with the given modules"""

    def __init__(self, ring: BaseRing, modules: Sequence[Sequence[str]]):
        duals = [
            Generator(DUAL_PREFIX + name, 1 + level, 1, Kind.DUAL)
            for level, module in enumerate(modules)
            for name in module
        ]
        coordinate_forms = [Generator(FORM_PREFIX + x, 0, 0, Kind.FORM, form=1) for x in ring.names]
        dual_forms = [Generator(FORM_PREFIX + g.name, g.degree, 1, Kind.FORM, form=1) for g in duals]
        super().__init__(ring, duals + coordinate_forms + dual_forms)
        self.modules = tuple(tuple(m) for m in modules)
        self._basis_of = {DUAL_PREFIX + name: name for module in self.modules for name in module}
        self._level_of = {name: level for level, module in enumerate(self.modules) for name in module}

    @staticmethod
    def form_name(name: str) -> str:
        return FORM_PREFIX + name

    def basis_name(self, dual: str) -> str:
        return self._basis_of[dual]

    def dual(self, basis: str) -> GCAElement:
        return self.generator(DUAL_PREFIX + basis)

    def dual_form(self, basis: str) -> GCAElement:
        return self.generator(FORM_PREFIX + DUAL_PREFIX + basis)

    def coordinate_form(self, coordinate: str) -> GCAElement:
        return self.generator(FORM_PREFIX + coordinate)

    def level_of(self, basis: str) -> int:
        try:
            return self._level_of[basis]
        except KeyError:
            raise ShapeError(f"Unknown basis element {basis!r}") from None

    def embed(self, element: GCAElement) -> GCAElement:
        """Carry an element of the Chevalley-Eilenberg algebra into the forms algebra"""
        result = self.zero()
        for key, coeff in element.terms.items():
            result = result + self.monomial(element.table.key_names(key), coeff)
        return result

    def from_base_form(self, omega: BaseForm) -> GCAElement:
        result = self.zero()
        for indices, coeff in omega.terms.items():
            result = result + self.monomial([FORM_PREFIX + self.ring.names[i] for i in indices], coeff)
        return result

    def to_base_forms(self, element: GCAElement) -> dict[int, BaseForm]:
        """Split an element of internal degree zero into base forms by form degree"""
        position = {FORM_PREFIX + x: i for i, x in enumerate(self.ring.names)}
        terms: dict[int, dict[tuple[int, ...], Poly]] = {}
        for key, coeff in element.terms.items():
            names = self.key_names(key)
            if any(name not in position for name in names):
                raise ShapeError(f"{element} has components of positive internal degree")
            terms.setdefault(len(names), {})[tuple(position[name] for name in names)] = coeff
        return {degree: BaseForm(self.ring, degree, t) for degree, t in sorted(terms.items())}

    def to_base_form(self, element: GCAElement, degree: int) -> BaseForm:
        return self.to_base_forms(element).get(degree, BaseForm.zero(self.ring, degree))

    @cached_property
    def de_rham(self) -> GradedDerivation:
        values = {g.name: self.zero() for g in self.algebra}
        for g in self.of_kind(Kind.DUAL):
            values[g.name] = self.generator(FORM_PREFIX + g.name)
        base = {x: self.coordinate_form(x) for x in self.ring.names}
        return GradedDerivation(self, 1, values, base, weight=0)

    @cached_property
    def euler_contraction(self) -> GradedDerivation:
        """i_E: dxi_e -> |xi_e| xi_e, zero on every other generator"""
        values = {g.name: self.zero() for g in self.algebra}
        for g in self.of_kind(Kind.DUAL):
            values[FORM_PREFIX + g.name] = self.generator(g.name).scale(g.degree)
        return GradedDerivation(self, -1, values, weight=0)


def forms_table(algebroid: LinftyAlgebroid) -> FormsTable:
    return FormsTable(algebroid.ring, algebroid.modules)


def extend_derivation(Q: GradedDerivation, table: FormsTable) -> GradedDerivation:
    """Extend a Chevalley-Eilenberg differential to the forms algebra so that it anticommutes with d"""
    d = table.de_rham
    values = {}
    base = {}
    for g in table.of_kind(Kind.DUAL):
        value = table.embed(Q.on_generator(g.name))
        values[g.name] = value
        values[FORM_PREFIX + g.name] = -d(value)
    for x in table.ring.names:
        value = table.embed(Q.on_generator(x))
        base[x] = value
        values[FORM_PREFIX + x] = -d(value)
    return GradedDerivation(table, 1, values, base)


def internal_delta(omega: MixedForm, delta: GradedDerivation) -> MixedForm:
    """
    Apply the internal differential, normalized so that it commutes with d: delta(da) = d(delta a).

    On form degree p this is (-1)^p times the Koszul extension, which anticommutes with d and
    is the one the total differential d + delta and the perturbation series use.

    Args:
        omega: a mixed form
        delta: the Chevalley-Eilenberg differential, or its extension to the forms algebra
    """
    if delta.table != omega.table:
        delta = extend_derivation(delta, omega.table)
    result = omega.table.zero()
    for p, component in _form_components(omega).items():
        value = delta(component)
        result = result + (-value if p % 2 else value)
    return result


def de_rham_d_mixed(omega: MixedForm) -> MixedForm:
    return omega.table.de_rham(omega)


def _internal_components(omega: MixedForm) -> dict[int, MixedForm]:
    table = omega.table
    components: dict[int, dict[Key, Poly]] = {}
    for key, coeff in omega.terms.items():
        components.setdefault(table.key_degree(key), {})[key] = coeff
    return {q: GCAElement(table, terms) for q, terms in sorted(components.items())}


def _form_components(omega: MixedForm) -> dict[int, MixedForm]:
    table = omega.table
    components: dict[int, dict[Key, Poly]] = {}
    for key, coeff in omega.terms.items():
        components.setdefault(table.key_form(key), {})[key] = coeff
    return {p: GCAElement(table, terms) for p, terms in sorted(components.items())}


def euler_homotopy(omega: MixedForm) -> MixedForm:
    """h extended linearly over the internal degree components"""
    table = omega.table
    contraction = table.euler_contraction
    result = table.zero()
    for q, component in _internal_components(omega).items():
        if q > 0:
            result = result + contraction(component).scale(rational(1, q))
    return result


def euler_contraction_h(omega: MixedForm) -> MixedForm:
    """h(omega) = i_E(omega) / q for omega of internal degree q > 0, and zero in internal degree zero"""
    if len(_internal_components(omega)) > 1:
        raise ShapeError(f"Euler homotopy needs a form of a single internal degree, got {omega}")
    return euler_homotopy(omega)


class FormsBicomplex:
    """The forms algebra of an algebroid together with d, delta and h"""

    def __init__(self, algebroid: LinftyAlgebroid):
        self.algebroid = algebroid
        self.table = forms_table(algebroid)
        self.d = self.table.de_rham
        self.delta = extend_derivation(algebroid.ce_differential, self.table)

    @property
    def ring(self) -> BaseRing:
        return self.table.ring

    def h(self, omega: MixedForm) -> MixedForm:
        return euler_homotopy(omega)

    def total(self, omega: MixedForm) -> MixedForm:
        return self.d(omega) + self.delta(omega)

    def components(self, omega: MixedForm) -> dict[tuple[int, int], MixedForm]:
        """Bidegree (form degree, internal degree) components"""
        result = {}
        for p, by_form in _form_components(omega).items():
            for q, component in _internal_components(by_form).items():
                result[(p, q)] = component
        return result

    def internal(self, omega: MixedForm) -> MixedForm:
        """The internal differential commuting with d; see internal_delta"""
        return internal_delta(omega, self.delta)

    def check_bicomplex(self) -> CheckReport:
        """d^2 = 0, delta^2 = 0 and d delta - delta d = 0 on every generator"""
        report = CheckReport("bicomplex")
        table = self.table
        for g in table.generators:
            element = table.generator(g.name)
            if g.kind is Kind.BASE:
                d_part, delta_part = self.d.on_generator(g.name), self.delta.on_generator(g.name)
            else:
                d_part, delta_part = self.d(element), self.internal(element)
            report.add(Check.of(f"d^2({g.name})", ANCHOR_BICOMPLEX, self.d(d_part), g.name))
            report.add(Check.of(f"delta^2({g.name})", ANCHOR_BICOMPLEX, self.internal(delta_part), g.name))
            commutator = self.d(delta_part) - self.internal(d_part)
            report.add(Check.of(f"[d,delta]({g.name})", ANCHOR_BICOMPLEX, commutator, g.name))
        return report

    def is_potential(self, beta: MixedForm) -> bool:
        """beta lies in the image of h: h(beta) = 0 and hd(beta) = beta, all internal degrees positive"""
        if any(q <= 0 for q in _internal_components(beta)):
            return False
        return self.h(beta).is_zero() and self.h(self.d(beta)) == beta


def potential_differential(beta: MixedForm, bicomplex: FormsBicomplex) -> MixedForm:
    """delta_Pot(beta) = h delta d beta"""
    if not bicomplex.is_potential(beta):
        raise ShapeError(f"{beta} is not in the image of the Euler homotopy")
    return bicomplex.h(bicomplex.delta(bicomplex.d(beta)))


def potential_checks(beta: MixedForm, bicomplex: FormsBicomplex) -> list[Check]:
    """The three expressions h delta d, -h d delta and (dh - 1) delta of the potential differential agree"""
    h, d, delta = bicomplex.h, bicomplex.d, bicomplex.delta
    first = h(delta(d(beta)))
    second = -h(d(delta(beta)))
    third = d(h(delta(beta))) - delta(beta)
    return [
        Check.of("h.delta.d = -h.d.delta", ANCHOR_POTENTIAL, first - second),
        Check.of("h.delta.d = (dh-1).delta", ANCHOR_POTENTIAL, first - third),
    ]


def pullback_form(omega: MixedForm, f: LinftyMorphism) -> MixedForm:
    """
    Pull a mixed form on the quotient by f.target back to the quotient by f.source.

    Only strict morphisms over the same base: xi_e goes to sum_m f(m)^e xi_m, dxi_e to the
    de Rham differential of that image and dx to dx.
    """
    if f.max_arity > 1:
        raise ShapeError(f"Pullback needs a strict morphism, got components of arity {f.max_arity}")
    target = forms_table(f.target)
    if omega.table != target:
        raise ShapeError(f"{omega} does not live on the quotient by {f.target!r}")
    source = forms_table(f.source)
    images = {FORM_PREFIX + x: source.coordinate_form(x) for x in f.target.ring.names}
    for name in f.target.basis:
        image = source.zero()
        for m in f.source.basis:
            coeff = f.on_basis([m]).get(name)
            if coeff:
                image = image + source.dual(m).scale(coeff)
        images[DUAL_PREFIX + name] = image
        images[FORM_PREFIX + DUAL_PREFIX + name] = source.de_rham(image)

    result = source.zero()
    for key, coeff in omega.terms.items():
        term = source.scalar(coeff)
        for name in target.key_names(key):
            term = term * images[name]
        result = result + term
    return result


def twisting_map(G: BaseForm, algebroid: LinftyAlgebroid, p: int) -> MixedForm:
    """
    Contract a (p+q)-form on the base with the (q+1)-st exterior power of the anchor.

    The result (-1)^{q+1} sum_{e_1 < .. < e_{q+1}} xi_{e_1}..xi_{e_{q+1}} G(a e_1, .., a e_{q+1}, -)
    has form degree p - 1, internal degree and weight q + 1, and equals (h delta)^{q+1} G.
    """
    q = G.degree - p
    if q < 0 or p < 1:
        raise ShapeError(f"Twisting map needs a form of degree at least p = {p} >= 1, got degree {G.degree}")
    table = forms_table(algebroid)
    sign = -1 if (q + 1) % 2 else 1
    result = table.zero()
    for names in combinations(algebroid.modules[0], q + 1):
        fields = [algebroid.anchor_of(Section.basis(algebroid.ring, n)) for n in names]
        if any(v.is_zero() for v in fields):
            continue
        contracted = contract_many(fields, G)
        if contracted.is_zero():
            continue
        duals = table.monomial([DUAL_PREFIX + n for n in names])
        result = result + duals * table.from_base_form(contracted).scale(sign)
    return result


@dataclass(eq=False)
class NormalizedClosedForm:
    """A potential in Pot^{p-1} together with a base part in Omega^{>=p}(U)"""

    p: int
    potential: MixedForm
    base: MixedForm
    table: FormsTable = field(init=False)

    def __post_init__(self):
        self.potential._check(self.base)
        self.table = self.potential.table

    def __eq__(self, other):
        return (
            isinstance(other, NormalizedClosedForm)
            and self.p == other.p
            and self.potential == other.potential
            and self.base == other.base
        )

    __hash__ = None

    def __add__(self, other: "NormalizedClosedForm") -> "NormalizedClosedForm":
        return NormalizedClosedForm(self.p, self.potential + other.potential, self.base + other.base)

    def __sub__(self, other: "NormalizedClosedForm") -> "NormalizedClosedForm":
        return NormalizedClosedForm(self.p, self.potential - other.potential, self.base - other.base)

    def is_zero(self) -> bool:
        return self.potential.is_zero() and self.base.is_zero()

    @property
    def base_forms(self) -> list[BaseForm]:
        return list(self.table.to_base_forms(self.base).values())

    def __str__(self):
        return f"potential: {self.potential}; base: {self.base}"


class ClosedFormsRetract:
    """The perturbed retract of the truncated bicomplex onto the normalized complex of closed p-forms"""

    def __init__(self, bicomplex: FormsBicomplex, p: int):
        if p < 1:
            raise ShapeError(f"Closed p-forms need p >= 1, got {p}")
        self.bicomplex = bicomplex
        self.p = p

    @property
    def table(self) -> FormsTable:
        return self.bicomplex.table

    def truncate(self, omega: MixedForm) -> MixedForm:
        table = self.table
        return GCAElement(table, {k: c for k, c in omega.terms.items() if table.key_form(k) >= self.p})

    def include(self, value: NormalizedClosedForm) -> MixedForm:
        return self.bicomplex.d(value.potential) + value.base

    def project(self, omega: MixedForm) -> NormalizedClosedForm:
        table = self.table
        lowest = omega.homogeneous(form=self.p)
        base = GCAElement(table, {k: c for k, c in omega.terms.items() if not table.key_degree(k)})
        return NormalizedClosedForm(self.p, self.bicomplex.h(lowest), self.truncate(base))

    def homotopy(self, omega: MixedForm) -> MixedForm:
        table = self.table
        upper = GCAElement(table, {k: c for k, c in omega.terms.items() if table.key_form(k) > self.p})
        return -self.bicomplex.h(upper)

    def _cap(self, omega: MixedForm) -> int:
        table = self.table
        weight = max((table.key_weight(k) for k in omega.terms), default=0)
        span = max((table.key_form(k) - self.p for k in omega.terms), default=0)
        return max(weight, span) + self.bicomplex.algebroid.amplitude + 2

    def series(self, omega: MixedForm) -> MixedForm:
        """A(omega) = sum_k (delta H)^k delta omega, which stops once H runs out of form degree"""
        delta = self.bicomplex.delta
        cap = self._cap(omega)
        term = delta(omega)
        total = term
        steps = 0
        while not term.is_zero():
            steps += 1
            if steps > cap:
                raise IterationCapError(f"Perturbation series did not terminate after {cap} steps")
            term = delta(self.homotopy(term))
            total = total + term
        return total

    def twisted_differential(self, value: NormalizedClosedForm) -> NormalizedClosedForm:
        included = self.include(value)
        return self.project(self.bicomplex.d(included)) + self.project(self.series(included))

    def closure_checks(self, omega: MixedForm) -> list[Check]:
        """(d + delta) omega = 0, one equation per form degree, with nothing below form degree p"""
        table = self.table
        checks = []
        below = GCAElement(table, {k: c for k, c in omega.terms.items() if table.key_form(k) < self.p})
        checks.append(Check.of(f"form degree >= {self.p}", ANCHOR_CLOSURE_TOWER, below))
        total = self.bicomplex.total(omega)
        top = max((table.key_form(k) for k in omega.terms), default=self.p) + 1
        for degree in range(self.p, top + 1):
            checks.append(Check.of(f"closure({degree})", ANCHOR_CLOSURE_TOWER, total.homogeneous(form=degree)))
        return checks


def _as_form(omega: MixedForm | Sequence[MixedForm]) -> MixedForm:
    if isinstance(omega, GCAElement):
        return omega
    components = list(omega)
    if not components:
        raise ShapeError("Empty closure tower")
    total = components[0]
    for component in components[1:]:
        total = total + component
    return total


@traced(GRADEDKIT_NORMALIZE_SPAN_NAME)
def normalize_closed_form(
    omega: MixedForm | Sequence[MixedForm], bicomplex: FormsBicomplex, p: int
) -> NormalizedClosedForm:
    """
    Send a closed p-form (a cocycle of the truncated bicomplex) to the normalized complex.

    Raises:
        ShapeError: when the input is not a cocycle, naming the first failing closure equation
    """
    omega = _as_form(omega)
    retract = ClosedFormsRetract(bicomplex, p)
    for check in retract.closure_checks(omega):
        if not check.passed:
            raise ShapeError(f"Not a closed {p}-form: {check.check_id} has residual {check.residual}")
    normalized = retract.project(omega) + retract.project(retract.series(retract.homotopy(omega)))
    logger.debug("normalized closed %d-form to %s", p, normalized)
    return normalized


def realize_closed_form(value: NormalizedClosedForm, bicomplex: FormsBicomplex) -> MixedForm:
    """i'(value) = i(value) + H A i(value), a cocycle of the truncated bicomplex"""
    retract = ClosedFormsRetract(bicomplex, value.p)
    if not bicomplex.is_potential(value.potential):
        raise ShapeError(f"{value.potential} is not in the image of the Euler homotopy")
    residual = retract.twisted_differential(value)
    if not residual.is_zero():
        raise ShapeError(f"Normalized form is not closed under the twisted differential: {residual}")
    included = retract.include(value)
    return included + retract.homotopy(retract.series(included))


@dataclass
class OperatorSymbolPair:
    """
    The first-order operator and symbol of a one-form of internal degree n.

    operator maps increasing L_0 basis n-tuples to one-forms on the base; symbol maps an
    increasing (n-1)-tuple and a last basis element to a function, with
    w_n(x_1, .., f x_n) = f w_n(x_1, .., x_n) + symbol(x_1, .., x_{n-1} | x_n) df.
    """

    arity: int
    operator: dict[tuple[str, ...], BaseForm] = field(default_factory=dict)
    symbol: dict[tuple[tuple[str, ...], str], Poly] = field(default_factory=dict)


def section_contraction(table: FormsTable, section: Section) -> GradedDerivation:
    """i_x: xi_e -> x^e and dxi_e -> -d(x^e) for a section x of L_0"""
    d = table.de_rham
    values = {g.name: table.zero() for g in table.algebra}
    for name, coeff in section.items():
        if table.level_of(name) != 0:
            raise ShapeError(f"Operators are evaluated on sections of L_0, got {name!r}")
        scalar = table.scalar(coeff)
        values[DUAL_PREFIX + name] = scalar
        values[FORM_PREFIX + DUAL_PREFIX + name] = -d(scalar)
    return GradedDerivation(table, -1, values)


def evaluate_mixed(omega: MixedForm, sections: Sequence[Section]) -> MixedForm:
    """i_{x_n} .. i_{x_1} omega"""
    for section in sections:
        omega = section_contraction(omega.table, section)(omega)
    return omega


def _one_form_components(omega: MixedForm) -> dict[int, MixedForm]:
    table = omega.table
    for key in omega.terms:
        if table.key_form(key) != 1:
            raise ShapeError(f"Operator decomposition needs a one-form, got {omega}")
        if any(g.kind is Kind.DUAL and g.degree != 1 and e for e, g in zip(key, table.algebra)):
            raise ShapeError("Operator decomposition is defined for forms built from L_0 duals")
    return _internal_components(omega)


def form_to_operator(omega: MixedForm) -> list[OperatorSymbolPair]:
    """Split a one-form into first-order operators and their symbols, one pair per internal degree"""
    table = omega.table
    ring = table.ring
    basis = table.modules[0]
    pairs = []
    for n, component in _one_form_components(omega).items():
        pair = OperatorSymbolPair(n)
        for names in combinations(basis, n):
            value = evaluate_mixed(component, [Section.basis(ring, x) for x in names])
            form = table.to_base_form(value.homogeneous(degree=0), 1)
            if not form.is_zero():
                pair.operator[names] = form
        if n:
            for names in combinations(basis, n - 1):
                value = evaluate_mixed(component, [Section.basis(ring, x) for x in names])
                for last in basis:
                    coeff = value.coefficient(_single_key(table, FORM_PREFIX + DUAL_PREFIX + last))
                    if coeff:
                        pair.symbol[(names, last)] = -coeff
        pairs.append(pair)
    return pairs


def operator_to_form(pairs: Sequence[OperatorSymbolPair], table: FormsTable) -> MixedForm:
    """Rebuild the one-form from its operator and symbol tables"""
    ring = table.ring
    result = table.zero()
    for pair in pairs:
        for names, form in pair.operator.items():
            sections = [Section.basis(ring, x) for x in names]
            for indices, coeff in form.terms.items():
                coordinate = FORM_PREFIX + ring.names[indices[0]]
                monomial = table.monomial([DUAL_PREFIX + x for x in names] + [coordinate])
                image = evaluate_mixed(monomial, sections)
                normalizer = ring.constant_term(image.coefficient(_single_key(table, coordinate)))
                result = result + monomial.scale(coeff.quo_ground(normalizer))
        for (names, last), value in pair.symbol.items():
            sections = [Section.basis(ring, x) for x in names]
            differential = FORM_PREFIX + DUAL_PREFIX + last
            monomial = table.monomial([DUAL_PREFIX + x for x in names] + [differential])
            image = evaluate_mixed(monomial, sections)
            normalizer = ring.constant_term(image.coefficient(_single_key(table, differential)))
            result = result + monomial.scale((-value).quo_ground(normalizer))
    return result


def _single_key(table: FormsTable, name: str) -> Key:
    key = [0] * len(table.algebra)
    key[table.position(name)] = 1
    return tuple(key)


def symbol_probes(omega: MixedForm, pairs: Sequence[OperatorSymbolPair] | None = None) -> list[Check]:
    """Check w_n(x_1, .., f x_n) = f w_n(x_1, .., x_n) + symbol df with f each coordinate"""
    table = omega.table
    ring = table.ring
    basis = table.modules[0]
    components = _one_form_components(omega)
    pairs = pairs if pairs is not None else form_to_operator(omega)
    checks = []
    for pair in pairs:
        if not pair.arity:
            continue
        component = components.get(pair.arity, table.zero())
        for names in combinations(basis, pair.arity - 1):
            for last in basis:
                for coordinate in ring.names:
                    f = ring.gen(coordinate)
                    sections = [Section.basis(ring, x) for x in names]
                    lhs = evaluate_mixed(component, sections + [Section.basis(ring, last, f)])
                    rhs = evaluate_mixed(component, sections + [Section.basis(ring, last)]).scale(f)
                    symbol = pair.symbol.get((names, last), ring.zero)
                    rhs = rhs + table.coordinate_form(coordinate).scale(symbol)
                    witness = f"({','.join(names)}|{coordinate}*{last})"
                    checks.append(Check.of(f"symbol{witness}", ANCHOR_OPERATOR_SYMBOL, lhs - rhs, witness))
    return checks


def closure_tower(omega: MixedForm, p: int) -> list[MixedForm]:
    """The components w_p, w_{p+1}, .. of a closed form by form degree"""
    components = _form_components(omega)
    if not components:
        return []
    return [components.get(k, omega.table.zero()) for k in range(p, max(components) + 1)]


def base_forms_of(table: FormsTable, forms: Mapping[int, BaseForm] | Sequence[BaseForm]) -> MixedForm:
    values = forms.values() if isinstance(forms, Mapping) else forms
    result = table.zero()
    for form in values:
        result = result + table.from_base_form(form)
    return result

"""
Courant algebroids with a possibly non-closed 4-form, their morphisms and the passage to
two-shifted symplectic data on a Lie 2-algebroid.

Brackets are given on basis pairs and extended by

    [[f x, g y]] = f g [[x, y]] + f a(x)(g) y - g a(y)(f) x + g <x, y> a*(df),

which is the Leibniz rule in the second slot together with its first-slot consequence.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, combinations_with_replacement, product
from typing import Mapping, Sequence

from gradedkit._internal.config import get_config
from gradedkit._internal.constants import (
    ANCHOR_BUNDLE_TWIST,
    ANCHOR_COURANT_CLOSED,
    ANCHOR_COURANT_INVARIANCE,
    ANCHOR_COURANT_JACOBI,
    ANCHOR_COURANT_LEIBNIZ,
    ANCHOR_COURANT_PAIRING,
    ANCHOR_COURANT_SYMMETRIC,
    ANCHOR_EXACT,
    ANCHOR_MORPHISM_ANCHOR,
    ANCHOR_MORPHISM_BRACKET_DEFECT,
    ANCHOR_MORPHISM_FOUR_FORM,
    ANCHOR_MORPHISM_ORTHOGONAL,
    ANCHOR_TWO_MORPHISM,
    GRADEDKIT_VERIFY_BUNDLE_TWIST_SPAN_NAME,
    GRADEDKIT_VERIFY_COURANT_MORPHISM_SPAN_NAME,
    GRADEDKIT_VERIFY_COURANT_SPAN_NAME,
    GRADEDKIT_VERIFY_EXACT_SPAN_NAME,
)
from gradedkit._internal.core.algebroid import LinftyAlgebroid, Section
from gradedkit._internal.core.ring import (
    BaseForm,
    BaseRing,
    Poly,
    Rational,
    VectorField,
    check_same_ring,
    contract,
    de_rham_d,
    is_unit,
    lie_derivative,
    poly_adjugate,
    poly_det,
    rank_at,
    rational,
    restrict_form,
    sample_points,
)
from gradedkit._internal.core.symplectic import (
    ShiftedSymplecticData,
    closure_triple,
    function_differential,
    iota_chain,
)
from gradedkit._internal.core.verdict import Check, CheckReport, Verdict, ordered_map
from gradedkit._internal.errors import ShapeError
from gradedkit._internal.tracer import traced

logger = logging.getLogger(__name__)

VECTOR_PREFIX = "v_"
COVECTOR_PREFIX = "w_"
COTANGENT_PREFIX = "c_"


class CourantData:
    """
    A Courant algebroid E on the affine base, free on the given basis.

    Args:
        ring: the base ring
        basis: basis names of E
        pairing: Gram matrix of <,> in the basis
        anchor: vector fields of basis elements; absent means zero
        brackets: [[x, y]] on ordered basis pairs; absent means zero
        K: the 4-form; absent means zero
        label: free-form name used in reports
    """

    def __init__(
        self,
        ring: BaseRing,
        basis: Sequence[str],
        pairing: Sequence[Sequence[Poly]],
        anchor: Mapping[str, VectorField] | None = None,
        brackets: Mapping[tuple[str, str], Section | Mapping] | None = None,
        K: BaseForm | None = None,
        label: str = "",
    ):
        self.ring = ring
        self.label = label
        self.basis = tuple(basis)
        if len(set(self.basis)) != len(self.basis):
            raise ShapeError(f"Duplicate basis names in {self.basis}")
        if set(self.basis) & set(ring.names):
            raise ShapeError(f"Basis names clash with coordinates: {sorted(set(self.basis) & set(ring.names))}")
        self._index = {name: k for k, name in enumerate(self.basis)}
        if len(pairing) != len(self.basis) or any(len(row) != len(self.basis) for row in pairing):
            raise ShapeError(f"Pairing must be a {len(self.basis)}x{len(self.basis)} matrix")
        self.gram = [[ring.coerce(entry) for entry in row] for row in pairing]

        self.anchor: dict[str, VectorField] = {}
        for name, vector in (anchor or {}).items():
            self._position(name)
            check_same_ring(vector.ring, ring)
            if not vector.is_zero():
                self.anchor[name] = vector

        self.brackets: dict[tuple[str, str], Section] = {}
        for (x, y), value in (brackets or {}).items():
            self._position(x)
            self._position(y)
            value = value if isinstance(value, Section) else Section(ring, value)
            for name in value.names():
                self._position(name)
            if not value.is_zero():
                self.brackets[(x, y)] = value

        self.K = K if K is not None else BaseForm.zero(ring, 4)
        check_same_ring(self.K.ring, ring)
        if self.K.degree != 4:
            raise ShapeError(f"K must be a 4-form, got a {self.K.degree}-form")

    def _position(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ShapeError(f"Unknown basis element {name!r} of {self.label or 'E'}") from None

    def __eq__(self, other):
        return (
            isinstance(other, CourantData)
            and self.ring == other.ring
            and self.basis == other.basis
            and self.gram == other.gram
            and self.anchor == other.anchor
            and self.brackets == other.brackets
            and self.K == other.K
        )

    __hash__ = None

    def __repr__(self):
        return f"CourantData({self.label or 'unnamed'}: rank {len(self.basis)} over {self.ring!r})"

    def section(self, name: str, coeff=1) -> Section:
        self._position(name)
        return Section.basis(self.ring, name, coeff)

    def pair(self, s: Section, t: Section) -> Poly:
        result = self.ring.zero
        for x, f in s.items():
            row = self.gram[self._position(x)]
            for y, g in t.items():
                result += f * g * row[self._position(y)]
        return result

    def anchor_of(self, section: Section) -> VectorField:
        result = VectorField.zero(self.ring)
        for name, coeff in section.items():
            vector = self.anchor.get(name)
            if vector is not None:
                result = result + vector.scale(coeff)
        return result

    @cached_property
    def _inverse_gram(self) -> list[list[Poly]]:
        det = poly_det(self.ring, self.gram)
        if not is_unit(self.ring, det):
            raise ShapeError(f"Pairing of {self.label or 'E'} is degenerate: det = {det}")
        scale = self.ring.const(1 / self.ring.constant_term(det))
        return [[entry * scale for entry in row] for row in poly_adjugate(self.ring, self.gram)]

    def dual_anchor(self, gamma: BaseForm) -> Section:
        """a*(gamma), defined by <a*(gamma), e> = gamma(a(e))"""
        if gamma.degree != 1:
            raise ShapeError(f"a* takes 1-forms, got a {gamma.degree}-form")
        values = [contract(self.anchor_of(self.section(n)), gamma).scalar() for n in self.basis]
        inverse = self._inverse_gram
        coefficients = {}
        for k, name in enumerate(self.basis):
            coefficients[name] = sum((inverse[k][j] * values[j] for j in range(len(values))), self.ring.zero)
        return Section(self.ring, coefficients)

    def bracket(self, s: Section, t: Section) -> Section:
        result = Section(self.ring)
        for x, f in s.items():
            ax = self.anchor.get(x)
            for y, g in t.items():
                ay = self.anchor.get(y)
                value = self.brackets.get((x, y))
                if value is not None:
                    result = result + value.scale(f * g)
                if ax is not None and ax(g):
                    result = result + self.section(y, f * ax(g))
                if ay is not None and ay(f):
                    result = result - self.section(x, g * ay(f))
                q = self.gram[self._index[x]][self._index[y]]
                if q and not f.is_ground:
                    result = result + self.dual_anchor(function_differential(self.ring, f)).scale(g * q)
        return result

    def with_brackets(self, brackets: Mapping[tuple[str, str], Section], label: str | None = None) -> "CourantData":
        return CourantData(self.ring, self.basis, self.gram, self.anchor, brackets, self.K, label or self.label)


def make_standard(ring: BaseRing, label: str = "standard") -> CourantData:
    """T + T^v with <X + a, Y + b> = (a(Y) + b(X)) / 2 and the Dorfman bracket"""
    vectors = [VECTOR_PREFIX + x for x in ring.names]
    covectors = [COVECTOR_PREFIX + x for x in ring.names]
    n = ring.ngens
    half = rational(1, 2)
    gram = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        gram[i][n + i] = half
        gram[n + i][i] = half
    anchor = {v: VectorField.coordinate(ring, x) for v, x in zip(vectors, ring.names)}
    return CourantData(ring, vectors + covectors, gram, anchor, {}, label=label)


def make_h_twist(E: CourantData, H: BaseForm, label: str | None = None) -> CourantData:
    """[[x, y]]_H = [[x, y]] + a*(H(ax, ay, -)) / 2 with K replaced by K + dH"""
    if H.degree != 3:
        raise ShapeError(f"Twisting needs a 3-form, got a {H.degree}-form")
    brackets = dict(E.brackets)
    half = rational(1, 2)
    for x, y in product(E.basis, repeat=2):
        ax, ay = E.anchor_of(E.section(x)), E.anchor_of(E.section(y))
        twist = contract(ay, contract(ax, H))
        if not twist.is_zero():
            brackets[(x, y)] = brackets.get((x, y), Section(E.ring)) + E.dual_anchor(twist).scale(half)
    return CourantData(E.ring, E.basis, E.gram, E.anchor, brackets, E.K + de_rham_d(H), label or f"{E.label}+H")


class MetricConnection:
    """
    A connection on E given by nabla_{d/dx} e on basis elements; absent entries are zero.

    Args:
        E: the Courant algebroid whose underlying module carries the connection
        components: coordinate to basis name to nabla_{d/dx} of that basis element
    """

    def __init__(self, E: CourantData, components: Mapping[str, Mapping[str, Section | Mapping]] | None = None):
        self.E = E
        self.components: dict[str, dict[str, Section]] = {}
        for coordinate, values in (components or {}).items():
            E.ring.index(coordinate)
            for name, value in values.items():
                E.section(name)
                value = value if isinstance(value, Section) else Section(E.ring, value)
                if not value.is_zero():
                    self.components.setdefault(coordinate, {})[name] = value

    @classmethod
    def trivial(cls, E: CourantData) -> "MetricConnection":
        return cls(E)

    def covariant(self, s: Section) -> list[Section]:
        """nabla_{d/dx_i} s for each coordinate x_i"""
        ring = self.E.ring
        result = []
        for i, coordinate in enumerate(ring.names):
            value = Section(ring)
            table = self.components.get(coordinate, {})
            for name, coeff in s.items():
                value = value + Section.basis(ring, name, ring.partial(coeff, i))
                image = table.get(name)
                if image is not None:
                    value = value + image.scale(coeff)
            result.append(value)
        return result

    def pairing_form(self, s: Section, t: Section) -> BaseForm:
        """<nabla s, t> as a 1-form"""
        ring = self.E.ring
        terms = {(i,): self.E.pair(value, t) for i, value in enumerate(self.covariant(s))}
        return BaseForm(ring, 1, terms)

    def metric_checks(self) -> list[Check]:
        E = self.E
        checks = []
        for x, y in combinations_with_replacement(E.basis, 2):
            sx, sy = E.section(x), E.section(y)
            residual = function_differential(E.ring, E.pair(sx, sy))
            residual = residual - self.pairing_form(sx, sy) - self.pairing_form(sy, sx)
            checks.append(Check.of(f"metric({x},{y})", ANCHOR_COURANT_PAIRING, residual, f"({x},{y})"))
        return checks

    def is_metric(self) -> bool:
        return all(check.passed for check in self.metric_checks())


# Axioms


def _pairing_checks(E: CourantData) -> list[Check]:
    checks = []
    for x, y in combinations(E.basis, 2):
        residual = E.pair(E.section(x), E.section(y)) - E.pair(E.section(y), E.section(x))
        checks.append(Check.of(f"symmetric({x},{y})", ANCHOR_COURANT_PAIRING, residual, f"({x},{y})"))
    det = poly_det(E.ring, E.gram)
    if not is_unit(E.ring, det):
        checks.append(Check.failed("nondegenerate", ANCHOR_COURANT_PAIRING, "det <,>", det))
    return checks


def jacobi_residual(E: CourantData, x: Section, y: Section, z: Section) -> Section:
    """[[x,[[y,z]]]] - [[[[x,y]],z]] - [[y,[[x,z]]]] + a*(i_{ax} i_{ay} i_{az} K) / 2"""
    jacobiator = E.bracket(x, E.bracket(y, z)) - E.bracket(E.bracket(x, y), z) - E.bracket(y, E.bracket(x, z))
    anchors = [E.anchor_of(x), E.anchor_of(y), E.anchor_of(z)]
    return jacobiator + E.dual_anchor(iota_chain(anchors, E.K)).scale(rational(1, 2))


@traced(GRADEDKIT_VERIFY_COURANT_SPAN_NAME)
def verify_courant_axioms(E: CourantData) -> CheckReport:
    """
    Verify the pairing, the Leibniz rules in both slots, the symmetric part of the bracket,
    invariance of the pairing and the Jacobi identity twisted by K, and report dK.
    """
    report = CheckReport(f"courant {E.label}".strip())
    report.extend(_pairing_checks(E))
    if not report.passed:
        return report

    ring = E.ring
    basis = [E.section(n) for n in E.basis]
    for (x, y), g in product(product(basis, repeat=2), ring.names):
        f = ring.gen(g)
        second = E.bracket(x, y.scale(f)) - E.bracket(x, y).scale(f) - y.scale(E.anchor_of(x)(f))
        report.add(Check.of(f"leibniz({x},{g}*{y})", ANCHOR_COURANT_LEIBNIZ, second, f"({x},{g}*{y})"))
        first = (
            E.bracket(x.scale(f), y)
            - E.bracket(x, y).scale(f)
            + x.scale(E.anchor_of(y)(f))
            - E.dual_anchor(function_differential(ring, f)).scale(E.pair(x, y))
        )
        report.add(Check.of(f"leibniz({g}*{x},{y})", ANCHOR_COURANT_LEIBNIZ, first, f"({g}*{x},{y})"))

    for x, y in combinations_with_replacement(basis, 2):
        residual = E.bracket(x, y) + E.bracket(y, x) - E.dual_anchor(function_differential(ring, E.pair(x, y)))
        report.add(Check.of(f"symmetric({x},{y})", ANCHOR_COURANT_SYMMETRIC, residual, f"({x},{y})"))

    for x, y, z in product(basis, repeat=3):
        residual = E.anchor_of(x)(E.pair(y, z)) - E.pair(E.bracket(x, y), z) - E.pair(y, E.bracket(x, z))
        report.add(Check.of(f"invariance({x};{y},{z})", ANCHOR_COURANT_INVARIANCE, residual, f"({x};{y},{z})"))

    def jacobi(args: tuple[Section, Section, Section]) -> Check:
        witness = "({},{},{})".format(*args)
        return Check.of(f"jacobi{witness}", ANCHOR_COURANT_JACOBI, jacobi_residual(E, *args), witness)

    report.extend(ordered_map(jacobi, list(product(basis, repeat=3))))
    report.add(Check.of("dK", ANCHOR_COURANT_CLOSED, de_rham_d(E.K), "dK"))
    logger.debug("verified %r: %s", E, report.verdict)
    return report


# Exactness


def _has_unit_minor(ring: BaseRing, rows: list[list[Poly]], size: int) -> bool:
    """Some size x size minor taken on all rows and a choice of columns is a unit"""
    columns = len(rows[0]) if rows else 0
    for chosen in combinations(range(columns), size):
        minor = [[row[c] for c in chosen] for row in rows]
        if is_unit(ring, poly_det(ring, minor)):
            return True
    return False


@traced(GRADEDKIT_VERIFY_EXACT_SPAN_NAME)
def verify_exact(
    E: CourantData,
    points: Sequence[Sequence[Rational]] | None = None,
    mode: str | None = None,
) -> CheckReport:
    """
    Exactness of 0 -> T^v -> E -> T -> 0 through a* and a.

    STRICT-PASS when a o a* = 0 and both maps have a unit maximal minor, SAMPLED-PASS when the
    ranks are right at every sample point, FAIL with the first sample point where they drop.
    """
    config = get_config()
    mode = (mode or config.mode).lower()
    ring = E.ring
    n = ring.ngens
    report = CheckReport(f"exact {E.label}".strip())
    if len(E.basis) != 2 * n:
        report.add(Check.failed("rank", ANCHOR_EXACT, f"rank {len(E.basis)}", f"expected rank {2 * n}"))
        return report
    duals = [E.dual_anchor(BaseForm.differential(ring, x)) for x in ring.names]
    for x, image in zip(ring.names, duals):
        composite = E.anchor_of(image)
        if not composite.is_zero():
            report.add(Check.failed(f"a(a*(d{x}))", ANCHOR_EXACT, f"d{x}", composite))
    if not report.passed:
        return report

    anchor_rows = [[E.anchor_of(E.section(b)).components[i] for b in E.basis] for i in range(n)]
    dual_rows = [[image.get(b) for image in duals] for b in E.basis]
    if mode == "strict" and _has_unit_minor(ring, anchor_rows, n):
        transposed = [list(column) for column in zip(*dual_rows)] if dual_rows else []
        if _has_unit_minor(ring, transposed, n):
            report.add(Check("exact", ANCHOR_EXACT, Verdict.STRICT_PASS))
            return report

    points = sample_points(ring, config.seed, config.samples) if points is None else points
    for point in points:
        ranks = rank_at(ring, anchor_rows, point, len(E.basis)), rank_at(ring, dual_rows, point, n)
        if ranks != (n, n):
            witness = str(tuple(str(c) for c in point))
            message = f"rank a = {ranks[0]}, rank a* = {ranks[1]}, expected {n}"
            report.add(Check.failed("ranks", ANCHOR_EXACT, witness, message))
            return report
    report.add(Check(f"exact at {len(points)} points", ANCHOR_EXACT, Verdict.SAMPLED_PASS))
    logger.warning("exactness of %s only established at %d sample points", E.label or "E", len(points))
    return report


def standard_frame(E: CourantData) -> dict[str, tuple[str, str]]:
    """For each coordinate x the basis elements v with a(v) = d/dx and w with a*(dx) = 2w"""
    ring = E.ring
    frame = {}
    used: set[str] = set()
    for x in ring.names:
        target = VectorField.coordinate(ring, x)
        vector = next((n for n in E.basis if n not in used and E.anchor_of(E.section(n)) == target), None)
        image = E.dual_anchor(BaseForm.differential(ring, x))
        covector = image.names()[0] if len(image.names()) == 1 else None
        if vector is None or covector is None or image.get(covector) != ring.const(2):
            raise ShapeError(f"{E.label or 'E'} is not in a standard frame along {x!r}")
        used.update((vector, covector))
        frame[x] = (vector, covector)
    if len(used) != len(E.basis):
        raise ShapeError(f"{E.label or 'E'} has basis elements outside its standard frame")
    return frame


def restrict_exact(E: CourantData, killed: Sequence[str], label: str | None = None) -> CourantData:
    """
    Pullback of an exact Courant algebroid in standard frame to the coordinate subspace where
    the killed coordinates vanish: a^-1(T_Y) modulo the conormal directions.
    """
    ring = E.ring
    killed = list(killed)
    for name in killed:
        ring.index(name)
    frame = standard_frame(E)
    target = BaseRing([x for x in ring.names if x not in killed])
    dropped = {name for x in killed for name in frame[x]}
    kept = [n for n in E.basis if n not in dropped]
    tangent_killed = {frame[x][0] for x in killed}

    def restrict(f: Poly) -> Poly:
        return ring.restrict(f, killed, target)

    gram = [[restrict(E.gram[E._index[a]][E._index[b]]) for b in kept] for a in kept]
    anchor = {}
    for name in kept:
        vector = E.anchor_of(E.section(name))
        anchor[name] = VectorField(target, tuple(restrict(vector.components[ring.index(y)]) for y in target.names))
    brackets = {}
    for a, b in product(kept, repeat=2):
        value = E.brackets.get((a, b))
        if value is None:
            continue
        restricted = {}
        for name, coeff in value.items():
            coeff = restrict(coeff)
            if not coeff:
                continue
            if name in tangent_killed:
                raise ShapeError(f"[[{a},{b}]] leaves a^-1(T_Y) along {name!r}")
            if name not in dropped:
                restricted[name] = coeff
        brackets[(a, b)] = Section(target, restricted)
    K = restrict_form(E.K, killed, target)
    return CourantData(target, kept, gram, anchor, brackets, K, label or f"{E.label}|{{{','.join(killed)}=0}}")


# Morphisms


@dataclass(eq=False)
class CourantMorphism:
    """
    A 1-morphism (g, H): E -> E' given by the images of the basis of E and a 3-form H.
    """

    source: CourantData
    target: CourantData
    images: Mapping[str, Section]
    H: BaseForm | None = None
    label: str = ""

    def __post_init__(self):
        check_same_ring(self.source.ring, self.target.ring)
        images = {}
        for name, image in self.images.items():
            self.source.section(name)
            image = image if isinstance(image, Section) else Section(self.target.ring, image)
            for n in image.names():
                self.target.section(n)
            images[name] = image
        self.images = images
        self.H = self.H if self.H is not None else BaseForm.zero(self.source.ring, 3)
        if self.H.degree != 3:
            raise ShapeError(f"A Courant morphism carries a 3-form, got a {self.H.degree}-form")

    @classmethod
    def identity(
        cls, E: CourantData, target: CourantData | None = None, H: BaseForm | None = None
    ) -> "CourantMorphism":
        target = target if target is not None else E
        return cls(E, target, {n: target.section(n) for n in E.basis}, H, label="id")

    def __call__(self, section: Section) -> Section:
        result = Section(self.target.ring)
        for name, coeff in section.items():
            image = self.images.get(name)
            if image is not None:
                result = result + image.scale(coeff)
        return result

    def compose(self, other: "CourantMorphism") -> "CourantMorphism":
        """self o other, with 3-forms added"""
        images = {n: self(other(other.source.section(n))) for n in other.source.basis}
        return CourantMorphism(other.source, self.target, images, self.H + other.H, f"{self.label}.{other.label}")


def gauge_transform(m: CourantMorphism, B: BaseForm) -> CourantMorphism:
    """(g + a'* B a / 2, H + dB), the 1-morphism 2-isomorphic to m through B"""
    if B.degree != 2:
        raise ShapeError(f"Gauge transformations use a 2-form, got a {B.degree}-form")
    E, target = m.source, m.target
    half = rational(1, 2)
    images = {}
    for name in E.basis:
        shift = contract(E.anchor_of(E.section(name)), B)
        images[name] = m(E.section(name)) + target.dual_anchor(shift).scale(half)
    return CourantMorphism(E, target, images, m.H + de_rham_d(B), f"{m.label}+B")


def _two_morphism_checks(m: CourantMorphism, other: CourantMorphism, B: BaseForm) -> list[Check]:
    E, target = m.source, m.target
    half = rational(1, 2)
    checks = []
    for name in E.basis:
        shift = target.dual_anchor(contract(E.anchor_of(E.section(name)), B)).scale(half)
        residual = other(E.section(name)) - m(E.section(name)) - shift
        checks.append(Check.of(f"2-morphism({name})", ANCHOR_TWO_MORPHISM, residual, name))
    checks.append(Check.of("2-morphism(H)", ANCHOR_TWO_MORPHISM, other.H - m.H - de_rham_d(B), "H"))
    return checks


@traced(GRADEDKIT_VERIFY_COURANT_MORPHISM_SPAN_NAME)
def verify_courant_morphism(
    m: CourantMorphism, other: CourantMorphism | None = None, B: BaseForm | None = None
) -> CheckReport:
    """
    Verify a 1-morphism: anchors, orthogonality, the bracket defect measured by H and
    K' - K = dH. Given a second 1-morphism and a 2-form B, also verify that B is a 2-morphism
    from m to it.
    """
    E, target = m.source, m.target
    ring = E.ring
    report = CheckReport(f"courant morphism {m.label}".strip())
    basis = [E.section(n) for n in E.basis]
    for x in basis:
        residual = target.anchor_of(m(x)) - E.anchor_of(x)
        report.add(Check.of(f"anchor({x})", ANCHOR_MORPHISM_ANCHOR, residual, str(x)))
    for x, y in combinations_with_replacement(basis, 2):
        residual = target.pair(m(x), m(y)) - E.pair(x, y)
        report.add(Check.of(f"orthogonal({x},{y})", ANCHOR_MORPHISM_ORTHOGONAL, residual, f"({x},{y})"))

    half = rational(1, 2)
    probes = list(product(basis, repeat=2))
    probes += [(x, y.scale(ring.gen(g))) for x, y in product(basis, repeat=2) for g in ring.names]
    for x, y in probes:
        defect = m(E.bracket(x, y)) - target.bracket(m(x), m(y))
        twist = target.dual_anchor(iota_chain([E.anchor_of(x), E.anchor_of(y)], m.H)).scale(half)
        report.add(Check.of(f"defect({x},{y})", ANCHOR_MORPHISM_BRACKET_DEFECT, defect - twist, f"({x},{y})"))
    report.add(Check.of("K'-K-dH", ANCHOR_MORPHISM_FOUR_FORM, target.K - E.K - de_rham_d(m.H), "K"))

    if other is not None:
        if B is None:
            raise ShapeError("A 2-morphism check needs the 2-form B")
        if other.source is not E or other.target is not target:
            raise ShapeError("2-morphisms relate 1-morphisms with the same source and target")
        report.merge(verify_courant_morphism(other), prefix="other")
        report.extend(_two_morphism_checks(m, other, B))
    return report


@traced(GRADEDKIT_VERIFY_BUNDLE_TWIST_SPAN_NAME)
def verify_bundle_twist(
    charts: Mapping[str, CourantData],
    transitions: Mapping[tuple[str, str], CourantMorphism],
    twists: Mapping[tuple[str, str, str], BaseForm],
) -> CheckReport:
    """
    Gluing data for a Courant algebroid from charts: 1-morphisms g_ij: E_j -> E_i and 2-forms
    B_ijk with g_ij g_jk g_ki = 1 + a_i* B_ijk a_i / 2 and H_ij + H_jk + H_ki = dB_ijk.
    """
    report = CheckReport("bundle twist")
    for (i, j), g in transitions.items():
        if g.source is not charts[j] or g.target is not charts[i]:
            raise ShapeError(f"Transition ({i},{j}) must map chart {j!r} to chart {i!r}")
        report.merge(verify_courant_morphism(g), prefix=f"g_{i}{j}")
    for (i, j, k), B in twists.items():
        missing = [pair for pair in ((i, j), (j, k), (k, i)) if pair not in transitions]
        if missing:
            raise ShapeError(f"Twist ({i},{j},{k}) needs transitions {missing}")
        loop = transitions[(i, j)].compose(transitions[(j, k)]).compose(transitions[(k, i)])
        for check in _two_morphism_checks(CourantMorphism.identity(charts[i]), loop, B):
            check_id = f"cocycle({i}{j}{k})/{check.check_id}"
            report.add(Check(check_id, ANCHOR_BUNDLE_TWIST, check.verdict, check.witness, check.residual))
    return report


# Two-shifted symplectic data


def _one_form_section(ring: BaseRing, gamma: BaseForm) -> Section:
    return Section(ring, {COTANGENT_PREFIX + x: gamma.coefficient((i,)) for i, x in enumerate(ring.names)})


def courant_to_symplectic(E: CourantData, connection: MetricConnection | None = None) -> ShiftedSymplecticData:
    """
    Two-shifted symplectic data in Courant form: L_0 = E, L_1 = T^v with basis c_x, phi = id,
    Q = <,>, psi = d<x,y> - 2<nabla x, y> and

        d(c) = -a*(c) / 2,
        [x, y] = [[x, y]] - a*<nabla x, y>,
        [x, c] = L_{ax} c + psi(x, a* c) / 2 - d i_{ax} c / 2,

    with the ternary bracket solving the triple closure equation.
    """
    ring = E.ring
    connection = connection if connection is not None else MetricConnection.trivial(E)
    if connection.E is not E:
        raise ShapeError("The connection belongs to a different Courant algebroid")
    failures = [check for check in connection.metric_checks() if not check.passed]
    if failures:
        raise ShapeError(f"Connection is not metric at {failures[0].witness}: {failures[0].residual}")
    cotangent = [COTANGENT_PREFIX + x for x in ring.names]
    if set(cotangent) & set(E.basis):
        raise ShapeError(f"Basis names {sorted(set(cotangent) & set(E.basis))} are reserved for T^v")

    half = rational(1, 2)
    basis = {n: E.section(n) for n in E.basis}
    psi, binary = {}, {}
    for x, y in product(E.basis, repeat=2):
        P = connection.pairing_form(basis[x], basis[y])
        psi[(x, y)] = function_differential(ring, E.pair(basis[x], basis[y])) - P.scale(2)
        binary[(x, y)] = E.bracket(basis[x], basis[y]) - E.dual_anchor(P)
    dx = {c: BaseForm.differential(ring, x) for c, x in zip(cotangent, ring.names)}
    differential = {c: E.dual_anchor(dx[c]).scale(-half) for c in cotangent}
    modules = [E.basis, cotangent]

    skeleton = LinftyAlgebroid(ring, modules, differential, E.anchor, binary, label=E.label)
    stage = ShiftedSymplecticData(2, skeleton, phi=dx, psi=psi, pairing=E.gram, K=E.K)

    brackets: dict[tuple[str, ...], Section] = dict(binary)
    for x, c in product(E.basis, cotangent):
        ax = E.anchor_of(basis[x])
        value = lie_derivative(ax, dx[c]) + stage.psi_of(basis[x], E.dual_anchor(dx[c])).scale(half)
        value = value - de_rham_d(contract(ax, dx[c])).scale(half)
        brackets[(x, c)] = _one_form_section(ring, value)
    for x, y, z in combinations(E.basis, 3):
        brackets[(x, y, z)] = _one_form_section(ring, -closure_triple(stage, basis[x], basis[y], basis[z]))

    A = LinftyAlgebroid(ring, modules, differential, E.anchor, brackets, label=f"{E.label}-2".strip("-"))
    return ShiftedSymplecticData(2, A, phi=dx, psi=psi, pairing=E.gram, K=E.K, label=E.label)


def symplectic_to_courant(data: ShiftedSymplecticData, connection: MetricConnection | None = None) -> CourantData:
    """
    The Courant algebroid of two-shifted data in Courant form, with
    [[x, y]] = [x, y] + a*(d<x,y> - psi(x,y)) / 2 and a* = -2 d o phi^-1.

    A given connection must satisfy <nabla x, y> = (d<x,y> - psi(x,y)) / 2.
    """
    if data.shift != 2:
        raise ShapeError(f"Only two-shifted data corresponds to Courant algebroids, got shift {data.shift}")
    A, ring = data.algebroid, data.ring
    cotangent = tuple(COTANGENT_PREFIX + x for x in ring.names)
    if A.amplitude != 1 or A.modules[1] != cotangent:
        raise ShapeError(f"Data is not in Courant form: L_1 must be {list(cotangent)}")
    for c, x in zip(cotangent, ring.names):
        if data.phi.get(c) != BaseForm.differential(ring, x):
            raise ShapeError(f"Data is not in Courant form: phi({c}) must be d{x}")
    if connection is not None and connection.E.basis != A.modules[0]:
        raise ShapeError("The connection belongs to a different Courant algebroid")

    def dual_anchor(gamma: BaseForm) -> Section:
        return A.differential_of(_one_form_section(ring, gamma)).scale(-2)

    half = rational(1, 2)
    basis = {n: Section.basis(ring, n) for n in A.modules[0]}
    brackets = {}
    for x, y in product(A.modules[0], repeat=2):
        exact = function_differential(ring, data.Q(basis[x], basis[y])) - data.psi_of(basis[x], basis[y])
        value = A.bracket(basis[x], basis[y]) + dual_anchor(exact).scale(half)
        if connection is not None:
            residual = connection.pairing_form(basis[x], basis[y]) - exact.scale(half)
            if not residual.is_zero():
                raise ShapeError(f"Connection does not match psi on ({x},{y}): {residual}")
        brackets[(x, y)] = value
    return CourantData(ring, A.modules[0], data.pairing, A.anchor, brackets, data.K, label=data.label)


# Products


def embed_vector(v: VectorField, target: BaseRing) -> VectorField:
    values = {name: v.ring.embed(c, target) for name, c in zip(v.ring.names, v.components)}
    return VectorField.from_mapping(target, values)


def embed_form(omega: BaseForm, target: BaseRing) -> BaseForm:
    positions = [target.index(name) for name in omega.ring.names]
    terms = {tuple(positions[i] for i in key): omega.ring.embed(c, target) for key, c in omega.terms.items()}
    return BaseForm(target, omega.degree, terms)


def embed_section(s: Section, target: BaseRing) -> Section:
    return Section(target, {name: s.ring.embed(c, target) for name, c in s.items()})


def courant_product(E1: CourantData, E2: CourantData, label: str | None = None) -> CourantData:
    """E1 + E2 over the product of the bases; coordinates and basis names must be disjoint"""
    if set(E1.ring.names) & set(E2.ring.names):
        raise ShapeError(f"Product bases share coordinates {sorted(set(E1.ring.names) & set(E2.ring.names))}")
    if set(E1.basis) & set(E2.basis):
        raise ShapeError(f"Product algebroids share basis names {sorted(set(E1.basis) & set(E2.basis))}")
    ring = BaseRing(E1.ring.names + E2.ring.names)
    size = len(E1.basis) + len(E2.basis)
    gram = [[ring.zero] * size for _ in range(size)]
    for offset, E in ((0, E1), (len(E1.basis), E2)):
        for i, row in enumerate(E.gram):
            for j, entry in enumerate(row):
                gram[offset + i][offset + j] = E.ring.embed(entry, ring)
    anchor = {n: embed_vector(v, ring) for E in (E1, E2) for n, v in E.anchor.items()}
    brackets = {key: embed_section(value, ring) for E in (E1, E2) for key, value in E.brackets.items()}
    K = embed_form(E1.K, ring) + embed_form(E2.K, ring)
    return CourantData(ring, E1.basis + E2.basis, gram, anchor, brackets, K, label or f"{E1.label}*{E2.label}")

"""
Deformation retracts, homotopy transfer and the free complexes attached to an algebroid.

Transfer uses the tree formulas in the shifted symmetric convention: for basis elements
x_1..x_n of the retract target, with T_n the sum over partitions into k >= 2 blocks of
eps * lambda_k(i'_{B_1}, .., i'_{B_k}),

    i'_1 = i,   i'_n = h T_n,   lambda'_n = p T_n,   lambda'_1 = p d i,

and the transferred anchor is a o i. Only arities that can be nonzero for degree reasons
are computed.
"""

import logging
from typing import Mapping, Sequence

from gradedkit._internal.constants import (
    ANCHOR_LEIBNIZ,
    ANCHOR_RETRACT,
    GRADEDKIT_MAX_ARITY,
    GRADEDKIT_TRANSFER_SPAN_NAME,
    GRADEDKIT_VERIFY_RETRACT_SPAN_NAME,
)
from gradedkit._internal.core.algebroid import (
    LinftyAlgebroid,
    LinftyMorphism,
    Section,
    decalage_sign,
    set_partitions,
    shifted_sign,
    verify_linfty,
    verify_morphism,
)
from gradedkit._internal.core.ring import BaseRing, Poly, Rational, check_same_ring, rank_at
from gradedkit._internal.core.verdict import Check, CheckReport
from gradedkit._internal.errors import IterationCapError, ShapeError
from gradedkit._internal.tracer import traced

logger = logging.getLogger(__name__)


class LinearMap:
    """O(U)-linear map between free modules, given by the images of source basis elements"""

    def __init__(
        self,
        ring: BaseRing,
        source: Sequence[str],
        target: Sequence[str],
        images: Mapping[str, Section | Mapping] | None = None,
    ):
        self.ring = ring
        self.source = tuple(source)
        self.target = tuple(target)
        self.images: dict[str, Section] = {}
        for name, image in (images or {}).items():
            if name not in self.source:
                raise ShapeError(f"{name!r} is not in the source basis")
            image = image if isinstance(image, Section) else Section(ring, image)
            stray = [n for n in image.names() if n not in self.target]
            if stray:
                raise ShapeError(f"Image of {name!r} uses {stray} outside the target basis")
            if not image.is_zero():
                self.images[name] = image

    @classmethod
    def identity(cls, ring: BaseRing, basis: Sequence[str]) -> "LinearMap":
        return cls(ring, basis, basis, {n: Section.basis(ring, n) for n in basis})

    def __call__(self, section: Section) -> Section:
        result = Section(self.ring)
        for name, coeff in section.items():
            image = self.images.get(name)
            if image is not None:
                result = result + image.scale(coeff)
        return result

    def of(self, name: str) -> Section:
        return self.images.get(name, Section(self.ring))

    def compose(self, other: "LinearMap") -> "LinearMap":
        """self o other"""
        return LinearMap(self.ring, other.source, self.target, {n: self(other.of(n)) for n in other.source})

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(self.ring, self.source, self.target, {n: self.of(n) - other.of(n) for n in self.source})

    def __add__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(self.ring, self.source, self.target, {n: self.of(n) + other.of(n) for n in self.source})

    def __eq__(self, other):
        return isinstance(other, LinearMap) and self.images == other.images and self.source == other.source

    __hash__ = None

    def rows(self, source: Sequence[str] | None = None, target: Sequence[str] | None = None) -> list[list[Poly]]:
        """Matrix with one row per target basis element and one column per source basis element"""
        source = self.source if source is None else source
        target = self.target if target is None else target
        return [[self.of(s).get(t) for s in source] for t in target]


class DeformationRetract:
    """
    Maps i: L' -> M, p: M -> L' and h: M -> M of degree -1 for an algebroid M.

    L' is given by its modules; its differential p d i and anchor a o i are derived.
    """

    def __init__(
        self,
        source: LinftyAlgebroid,
        target_modules: Sequence[Sequence[str]],
        i: Mapping[str, Section | Mapping],
        p: Mapping[str, Section | Mapping],
        h: Mapping[str, Section | Mapping] | None = None,
        label: str = "",
    ):
        self.source = source
        self.label = label
        ring = source.ring
        skeleton = LinftyAlgebroid(ring, target_modules)
        self.target_modules = skeleton.modules
        self.i = LinearMap(ring, skeleton.basis, source.basis, i)
        self.p = LinearMap(ring, source.basis, skeleton.basis, p)
        self.h = LinearMap(ring, source.basis, source.basis, h or {})

        differential = {}
        for name in skeleton.basis:
            if skeleton.level_of(name) > 0:
                differential[name] = self.p(source.differential_of(self.i.of(name)))
        anchor = {name: source.anchor_of(self.i.of(name)) for name in skeleton.modules[0]}
        self.target = LinftyAlgebroid(ring, self.target_modules, differential=differential, anchor=anchor)

    @classmethod
    def trivial(cls, algebroid: LinftyAlgebroid) -> "DeformationRetract":
        identity = {n: Section.basis(algebroid.ring, n) for n in algebroid.basis}
        return cls(algebroid, algebroid.modules, identity, identity)


@traced(GRADEDKIT_VERIFY_RETRACT_SPAN_NAME)
def verify_retract(r: DeformationRetract) -> CheckReport:
    """ip - 1 = dh + hd, pi = 1, hi = 0, ph = 0, h^2 = 0, with i and p chain maps of degree zero"""
    M, L = r.source, r.target
    ring = M.ring
    report = CheckReport(f"retract {r.label}".strip())

    for name in L.basis:
        image = r.i.of(name)
        if image.names() and M.section_degree(image) != L.degree_of(name):
            report.add(Check.failed(f"deg i({name})", ANCHOR_RETRACT, name, image))
    for name in M.basis:
        image = r.p.of(name)
        if image.names() and L.section_degree(image) != M.degree_of(name):
            report.add(Check.failed(f"deg p({name})", ANCHOR_RETRACT, name, image))
        image = r.h.of(name)
        if image.names() and M.section_degree(image) != M.degree_of(name) - 1:
            report.add(Check.failed(f"deg h({name})", ANCHOR_RETRACT, name, image))
    if not report.passed:
        return report

    for name in L.basis:
        x = Section.basis(ring, name)
        report.add(Check.of(f"di({name})", ANCHOR_RETRACT, M.differential_of(r.i(x)) - r.i(L.differential_of(x)), name))
        report.add(Check.of(f"pi({name})", ANCHOR_RETRACT, r.p(r.i(x)) - x, name))
        report.add(Check.of(f"hi({name})", ANCHOR_RETRACT, r.h(r.i(x)), name))
    for name in M.basis:
        m = Section.basis(ring, name)
        homotopy = M.differential_of(r.h(m)) + r.h(M.differential_of(m))
        report.add(Check.of(f"ip({name})", ANCHOR_RETRACT, r.i(r.p(m)) - m - homotopy, name))
        report.add(Check.of(f"dp({name})", ANCHOR_RETRACT, L.differential_of(r.p(m)) - r.p(M.differential_of(m)), name))
        report.add(Check.of(f"ph({name})", ANCHOR_RETRACT, r.p(r.h(m)), name))
        report.add(Check.of(f"hh({name})", ANCHOR_RETRACT, r.h(r.h(m)), name))
    return report


class _TreeSums:
    """Memoized tree sums of the transfer formulas on basis tuples of the retract target"""

    def __init__(self, r: DeformationRetract):
        self.r = r
        self.M = r.source
        self.L = r.target
        self._inclusions: dict[tuple[str, ...], Section] = {}

    def degrees(self, sections: Sequence[Section]) -> list[int]:
        return [self.L.section_degree(s) or 0 for s in sections]

    def tree(self, sections: Sequence[Section], memo_names: tuple[str, ...] | None = None) -> Section:
        """T_n: sum over partitions into at least two blocks"""
        degrees = self.degrees(sections)
        total = self.M.zero_section()
        for partition in set_partitions(list(range(len(sections)))):
            if len(partition) < 2 or len(partition) > self.M.max_arity:
                continue
            order = [i for block in partition for i in block]
            args = []
            for block in partition:
                names = tuple(memo_names[i] for i in block) if memo_names else None
                args.append(self.inclusion([sections[i] for i in block], names))
            if any(arg.is_zero() for arg in args):
                continue
            total = total + self.M.symmetric_bracket(*args).scale(shifted_sign(order, degrees))
        return total

    def inclusion(self, sections: Sequence[Section], names: tuple[str, ...] | None = None) -> Section:
        """i'_n; memoized when evaluated on basis elements"""
        if names is not None and names in self._inclusions:
            return self._inclusions[names]
        if len(sections) == 1:
            value = self.r.i(sections[0])
        else:
            value = self.r.h(self.tree(sections, names))
        if names is not None:
            self._inclusions[names] = value
        return value

    def bracket(self, sections: Sequence[Section], names: tuple[str, ...] | None = None) -> Section:
        """lambda'_n for n >= 2"""
        return self.r.p(self.tree(sections, names))


def _arity_bounds(M: LinftyAlgebroid, L: LinftyAlgebroid) -> tuple[int, int]:
    bracket_bound = L.amplitude + 2
    inclusion_bound = max(bracket_bound - 1, M.amplitude + 1)
    if max(bracket_bound, inclusion_bound) > GRADEDKIT_MAX_ARITY:
        raise IterationCapError(
            f"Transfer would need arity {max(bracket_bound, inclusion_bound)} beyond the cap {GRADEDKIT_MAX_ARITY}"
        )
    return bracket_bound, inclusion_bound


@traced(GRADEDKIT_TRANSFER_SPAN_NAME)
def transfer_structure(M: LinftyAlgebroid, r: DeformationRetract) -> tuple[LinftyAlgebroid, LinftyMorphism]:
    """
    Transfer the L-infinity algebroid structure of M along a special deformation retract.

    Returns:
        The algebroid on the retract target and the extension i' of i to an L-infinity morphism into M
    """
    if r.source != M:
        raise ShapeError("Retract does not start at the given algebroid")
    retract = verify_retract(r)
    if not retract.passed:
        failure = retract.first_failure
        raise ShapeError(f"Retract identities fail at {failure.check_id}: {failure.residual}")

    L = r.target
    ring = M.ring
    bracket_bound, inclusion_bound = _arity_bounds(M, L)
    sums = _TreeSums(r)

    brackets: dict[tuple[str, ...], Section] = {}
    for arity in range(2, bracket_bound + 1):
        for names in L.canonical_tuples(arity, lambda d, n=arity: d + 2 - n >= -L.amplitude):
            value = sums.bracket([Section.basis(ring, n) for n in names], names)
            if not value.is_zero():
                brackets[names] = value.scale(decalage_sign([L.degree_of(n) for n in names]))

    components: dict[tuple[str, ...], Section] = {(n,): r.i.of(n) for n in L.basis}
    for arity in range(2, inclusion_bound + 1):
        for names in L.canonical_tuples(arity, lambda d, n=arity: d + 1 - n >= -M.amplitude):
            value = sums.inclusion([Section.basis(ring, n) for n in names], names)
            if not value.is_zero():
                components[names] = value.scale(decalage_sign([L.degree_of(n) for n in names]))

    label = f"{M.label}/{r.label}".strip("/") or "transferred"
    transferred = LinftyAlgebroid(ring, L.modules, L.differential, L.anchor, brackets, label=label)
    inclusion = LinftyMorphism(transferred, M, components, label=f"{label}-inclusion")
    logger.debug("transferred %r to %r with %d bracket entries", M, transferred, len(brackets))
    return transferred, inclusion


def transfer_probes(r: DeformationRetract, transferred: LinftyAlgebroid) -> list[Check]:
    """Compare the tree formula on (x, g*y) with the Leibniz extension of the transferred bracket"""
    ring = r.source.ring
    sums = _TreeSums(r)
    checks = []
    for x in transferred.basis:
        for y in transferred.basis:
            for g in ring.names:
                sx = Section.basis(ring, x)
                sy = Section.basis(ring, y, ring.gen(g))
                residual = sums.bracket([sx, sy]) - transferred.symmetric_bracket(sx, sy)
                checks.append(Check.of(f"transfer({x},{g}*{y})", ANCHOR_LEIBNIZ, residual, witness=f"({x},{g}*{y})"))
    return checks


def verify_transfer(M: LinftyAlgebroid, r: DeformationRetract) -> tuple[CheckReport, LinftyAlgebroid, LinftyMorphism]:
    """Transfer, then verify the output algebroid, the extended inclusion and the multilinearity probes"""
    report = CheckReport(f"transfer {r.label}".strip())
    report.merge(verify_retract(r), prefix="retract")
    transferred, inclusion = transfer_structure(M, r)
    report.merge(verify_linfty(transferred), prefix="linfty")
    report.merge(verify_morphism(inclusion, transferred, M), prefix="morphism")
    report.extend(transfer_probes(r, transferred))
    return report, transferred, inclusion


def transport_structure(
    A: LinftyAlgebroid,
    modules: Sequence[Sequence[str]],
    phi: Mapping[str, Section | Mapping],
    phi_inverse: Mapping[str, Section | Mapping],
    label: str = "",
) -> LinftyAlgebroid:
    """
    The structure of A carried along an isomorphism phi onto free modules with new basis names.

    lambda_B(b_1..b_n) = phi(lambda_A(phi^-1 b_1, .., phi^-1 b_n)), anchor a_A o phi^-1.
    """
    ring = A.ring
    skeleton = LinftyAlgebroid(ring, modules)
    forward = LinearMap(ring, A.basis, skeleton.basis, phi)
    backward = LinearMap(ring, skeleton.basis, A.basis, phi_inverse)
    for name in A.basis:
        if backward(forward.of(name)) != Section.basis(ring, name):
            raise ShapeError(f"phi^-1 o phi is not the identity on {name!r}")

    differential = {
        name: forward(A.differential_of(backward.of(name))) for name in skeleton.basis if skeleton.level_of(name) > 0
    }
    anchor = {name: A.anchor_of(backward.of(name)) for name in skeleton.modules[0]}
    brackets = {}
    for arity in range(2, A.max_arity + 1):
        for names in skeleton.canonical_tuples(arity):
            value = forward(A.symmetric_bracket(*(backward.of(n) for n in names)))
            if not value.is_zero():
                brackets[names] = value.scale(decalage_sign([skeleton.degree_of(n) for n in names]))
    return LinftyAlgebroid(ring, skeleton.modules, differential, anchor, brackets, label=label or f"{A.label}'")


def strict_morphism(
    source: LinftyAlgebroid, target: LinftyAlgebroid, phi: Mapping[str, Section | Mapping]
) -> LinftyMorphism:
    return LinftyMorphism(source, target, {(name,): image for name, image in phi.items()})


class FreeComplex:
    """
    Bounded cochain complex of free modules over the base ring.

    Args:
        ring: the base ring
        modules: cohomological degree to basis names
        differential: image of each basis element in the next degree; absent means zero
    """

    def __init__(self, ring: BaseRing, modules: Mapping[int, Sequence[str]], differential: Mapping[str, Section]):
        self.ring = ring
        self.modules = {degree: tuple(names) for degree, names in sorted(modules.items())}
        self._degree = {name: degree for degree, names in self.modules.items() for name in names}
        self.differential = {}
        for name, image in differential.items():
            check_same_ring(image.ring, ring)
            target = self._degree[name] + 1
            stray = [n for n in image.names() if self._degree.get(n) != target]
            if stray:
                raise ShapeError(f"Differential of {name!r} leaves degree {target}: {stray}")
            if not image.is_zero():
                self.differential[name] = image

    def degrees(self) -> list[int]:
        return list(self.modules)

    def basis(self, degree: int) -> tuple[str, ...]:
        return self.modules.get(degree, ())

    def d(self, section: Section) -> Section:
        result = Section(self.ring)
        for name, coeff in section.items():
            image = self.differential.get(name)
            if image is not None:
                result = result + image.scale(coeff)
        return result

    def matrix(self, degree: int) -> list[list[Poly]]:
        """Rows indexed by the basis in degree + 1, columns by the basis in degree"""
        source, target = self.basis(degree), self.basis(degree + 1)
        return [[self.differential.get(s, Section(self.ring)).get(t) for s in source] for t in target]

    def squares_to_zero(self) -> bool:
        return all(self.d(self.d(Section.basis(self.ring, n))).is_zero() for n in self._degree)

    def cohomology_ranks_at(self, point: Sequence[Rational]) -> dict[int, int]:
        ranks = {}
        for degree in self.modules:
            incoming = rank_at(self.ring, self.matrix(degree - 1), point, len(self.basis(degree - 1)))
            outgoing = rank_at(self.ring, self.matrix(degree), point, len(self.basis(degree)))
            ranks[degree] = len(self.basis(degree)) - outgoing - incoming
        return ranks

    def is_acyclic_at(self, point: Sequence[Rational]) -> bool:
        return not any(self.cohomology_ranks_at(point).values())


def tangent_name(coordinate: str) -> str:
    return f"d/d{coordinate}"


def algebroid_complex(A: LinftyAlgebroid) -> FreeComplex:
    """The underlying complex of A: L_i in degree -i"""
    modules = {-level: module for level, module in enumerate(A.modules)}
    return FreeComplex(A.ring, modules, A.differential)


def pullback_tangent_complex(A: LinftyAlgebroid) -> FreeComplex:
    """... -> L_1 -> L_0 -> T_U with T_U in degree zero and the anchor as last differential"""
    ring = A.ring
    modules = {-1 - level: module for level, module in enumerate(A.modules) if module}
    modules[0] = tuple(tangent_name(x) for x in ring.names)
    differential = dict(A.differential)
    for name in A.modules[0]:
        field = A.anchor.get(name)
        if field is not None:
            differential[name] = Section(ring, {tangent_name(x): c for x, c in zip(ring.names, field.components)})
    return FreeComplex(ring, modules, differential)

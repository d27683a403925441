"""
Dirac structures with support in Courant algebroids, Poisson bivectors and coisotropic
coordinate subspaces.

A support Y is the coordinate subspace where the listed coordinates vanish. Conditions on Y
are checked by restricting polynomials to the subring of the remaining coordinates.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Mapping, Sequence

from gradedkit._internal.config import get_config
from gradedkit._internal.constants import (
    ANCHOR_COISOTROPIC,
    ANCHOR_DIRAC_INVOLUTIVE,
    ANCHOR_DIRAC_LAGRANGIAN,
    ANCHOR_DIRAC_SUPPORT,
    GRADEDKIT_COISOTROPIC_SPAN_NAME,
    GRADEDKIT_VERIFY_DIRAC_SPAN_NAME,
)
from gradedkit._internal.core.algebroid import Section
from gradedkit._internal.core.courant import (
    CourantData,
    courant_product,
    embed_section,
    standard_frame,
)
from gradedkit._internal.core.ring import (
    BaseForm,
    BaseRing,
    Poly,
    Rational,
    contract,
    is_unit,
    poly_det,
    rank_at,
    sample_points,
)
from gradedkit._internal.core.verdict import Check, CheckReport, Verdict
from gradedkit._internal.errors import ShapeError
from gradedkit._internal.tracer import traced

logger = logging.getLogger(__name__)


class Multivector(BaseForm):
    """A skew k-vector field: coefficients of d/dx_{i_1} ^ .. ^ d/dx_{i_k} on increasing index tuples"""

    __slots__ = ()

    @classmethod
    def from_mapping(cls, ring: BaseRing, values: Mapping[tuple[str, ...], Poly]) -> "Multivector":
        degrees = {len(key) for key in values}
        if len(degrees) > 1:
            raise ShapeError(f"Mixed multivector degrees {sorted(degrees)}")
        degree = degrees.pop() if degrees else 2
        return cls(ring, degree, {tuple(ring.index(n) for n in key): c for key, c in values.items()})

    def component(self, *names: str) -> Poly:
        return self.coefficient(tuple(self.ring.index(n) for n in names))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms):
            basis = "^".join(f"d/d{self.ring.names[i]}" for i in key)
            parts.append(f"({self.terms[key]})*{basis}")
        return " + ".join(parts)

    __repr__ = __str__


def schouten_bracket(pi: Multivector, sigma: Multivector | None = None) -> Multivector:
    """
    Schouten bracket of bivectors, normalized so that
    [pi, pi](dx_i, dx_j, dx_k) = 2 ({x_i, {x_j, x_k}} + cyclic) for {f, g} = pi(df, dg).
    """
    sigma = pi if sigma is None else sigma
    if pi.degree != 2 or sigma.degree != 2:
        raise ShapeError("The Schouten bracket is implemented for bivectors")
    ring = pi.ring
    n = ring.ngens
    terms = {}
    for i, j, k in combinations(range(n), 3):
        total = ring.zero
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for m in range(n):
                total += pi.coefficient((a, m)) * ring.partial(sigma.coefficient((b, c)), m)
                total += sigma.coefficient((a, m)) * ring.partial(pi.coefficient((b, c)), m)
        if total:
            terms[(i, j, k)] = total
    return Multivector(ring, 3, terms)


@dataclass(eq=False)
class DiracData:
    """
    A candidate Dirac structure with support: generators of L inside E restricted to Y.

    Args:
        courant: the ambient Courant algebroid
        generators: sections of E whose restrictions frame L
        support: coordinates vanishing on Y; empty means Y is the whole base
    """

    courant: CourantData
    generators: Sequence[Section]
    support: Sequence[str] = ()
    label: str = ""

    def __post_init__(self):
        E = self.courant
        self.generators = tuple(self.generators)
        self.support = tuple(self.support)
        for section in self.generators:
            for name in section.names():
                E.section(name)
        for name in self.support:
            E.ring.index(name)

    @cached_property
    def support_ring(self) -> BaseRing:
        return BaseRing([x for x in self.courant.ring.names if x not in self.support])

    def on_support(self, f: Poly) -> Poly:
        return self.courant.ring.restrict(f, self.support, self.support_ring)

    def frame_rows(self) -> list[list[Poly]]:
        """One row per basis element of E, one column per generator, restricted to Y"""
        return [[self.on_support(g.get(name)) for g in self.generators] for name in self.courant.basis]


def _independence(D: DiracData, points, mode: str) -> Check:
    rows = D.frame_rows()
    n = len(D.generators)
    ring = D.support_ring
    if mode == "strict":
        for chosen in combinations(range(len(rows)), n):
            if is_unit(ring, poly_det(ring, [rows[r] for r in chosen])):
                return Check("frame", ANCHOR_DIRAC_LAGRANGIAN, Verdict.PASS)
    for point in points:
        rank = rank_at(ring, rows, point, n)
        if rank != n:
            witness = str(tuple(str(c) for c in point))
            return Check.failed("frame", ANCHOR_DIRAC_LAGRANGIAN, witness, f"generators span rank {rank} < {n}")
    return Check(f"frame at {len(points)} points", ANCHOR_DIRAC_LAGRANGIAN, Verdict.SAMPLED_PASS)


@traced(GRADEDKIT_VERIFY_DIRAC_SPAN_NAME)
def verify_dirac(
    D: DiracData, points: Sequence[Sequence[Rational]] | None = None, mode: str | None = None
) -> CheckReport:
    """
    Lagrangian (isotropic, half rank, independent generators on Y), supported (anchors
    tangent to Y) and involutive (<[[l_i, l_j]], l_k> vanishes on Y).
    """
    config = get_config()
    mode = (mode or config.mode).lower()
    E = D.courant
    report = CheckReport(f"dirac {D.label}".strip())
    gens = D.generators
    if 2 * len(gens) != len(E.basis):
        expected = f"expected {len(E.basis) // 2}"
        report.add(Check.failed("rank", ANCHOR_DIRAC_LAGRANGIAN, f"{len(gens)} generators", expected))
        return report
    for (i, a), (j, b) in combinations(list(enumerate(gens)), 2):
        report.add(Check.of(f"isotropic({i},{j})", ANCHOR_DIRAC_LAGRANGIAN, D.on_support(E.pair(a, b)), f"(l{i},l{j})"))
    for i, a in enumerate(gens):
        report.add(Check.of(f"isotropic({i},{i})", ANCHOR_DIRAC_LAGRANGIAN, D.on_support(E.pair(a, a)), f"(l{i},l{i})"))
    points = sample_points(D.support_ring, config.seed, config.samples) if points is None else points
    report.add(_independence(D, points, mode))

    ring = E.ring
    for i, a in enumerate(gens):
        vector = E.anchor_of(a)
        stray = {x: D.on_support(vector.components[ring.index(x)]) for x in D.support}
        stray = {x: c for x, c in stray.items() if c}
        report.add(Check.of(f"support(l{i})", ANCHOR_DIRAC_SUPPORT, stray, f"l{i}"))
    if not report.passed:
        return report

    for (i, a), (j, b) in product(list(enumerate(gens)), repeat=2):
        bracket = E.bracket(a, b)
        for k, c in enumerate(gens):
            residual = D.on_support(E.pair(bracket, c))
            report.add(Check.of(f"involutive({i},{j};{k})", ANCHOR_DIRAC_INVOLUTIVE, residual, f"(l{i},l{j},l{k})"))
    logger.debug("verified Dirac structure %s: %s", D.label or "L", report.verdict)
    return report


def same_subbundle(D1: DiracData, D2: DiracData) -> bool:
    """Equality of Lagrangian subbundles on a common support: L1 is orthogonal to L2"""
    if D1.courant != D2.courant or set(D1.support) != set(D2.support):
        return False
    if len(D1.generators) != len(D2.generators):
        return False
    E = D1.courant
    return all(not D1.on_support(E.pair(a, b)) for a in D1.generators for b in D2.generators)


def tensor_dirac(D1: DiracData, D2: DiracData, label: str | None = None) -> DiracData:
    """L1 + L2 inside E1 + E2 over the product base"""
    E = courant_product(D1.courant, D2.courant)
    generators = [embed_section(g, E.ring) for g in D1.generators + D2.generators]
    return DiracData(E, generators, D1.support + D2.support, label or f"{D1.label}*{D2.label}")


def unit_dirac() -> DiracData:
    """The zero Dirac structure in the zero Courant algebroid over a point"""
    ring = BaseRing([])
    return DiracData(CourantData(ring, [], [], label="point"), [], label="unit")


# Standard-frame constructions


def graph_of_form(E: CourantData, omega: BaseForm, label: str = "") -> DiracData:
    """{X + i_X omega}: involutive in an untwisted exact algebroid exactly when omega is closed"""
    if omega.degree != 2:
        raise ShapeError(f"Graphs are taken of 2-forms, got a {omega.degree}-form")
    frame = standard_frame(E)
    ring = E.ring
    generators = []
    for x, (vector, _) in frame.items():
        shift = contract(E.anchor_of(E.section(vector)), omega)
        covector = Section(ring, {frame[y][1]: shift.coefficient((ring.index(y),)) for y in ring.names})
        generators.append(E.section(vector) + covector)
    return DiracData(E, generators, label=label or "graph")


def _sharp(E: CourantData, pi: Multivector, frame: dict[str, tuple[str, str]], x: str) -> Section:
    """pi#(dx) in the vector part of the frame"""
    return Section(E.ring, {frame[y][0]: pi.component(x, y) for y in E.ring.names})


def poisson_graph(E: CourantData, pi: Multivector, label: str = "") -> DiracData:
    """{pi#(a) + a}: involutive exactly when [pi, pi] = 0"""
    check_bivector(E, pi)
    frame = standard_frame(E)
    generators = [E.section(frame[x][1]) + _sharp(E, pi, frame, x) for x in E.ring.names]
    return DiracData(E, generators, label=label or "poisson-graph")


def conormal_dirac(E: CourantData, support: Sequence[str], label: str = "") -> DiracData:
    """T_Y + N*_Y, supported on Y"""
    frame = standard_frame(E)
    generators = [E.section(frame[x][1] if x in support else frame[x][0]) for x in E.ring.names]
    return DiracData(E, generators, support, label=label or "conormal")


def coisotropic_dirac(E: CourantData, pi: Multivector, support: Sequence[str], label: str = "") -> DiracData:
    """T_Y-directions together with pi#(a) + a for a in the conormal of Y; supported iff Y is coisotropic"""
    check_bivector(E, pi)
    frame = standard_frame(E)
    generators = []
    for x in E.ring.names:
        if x in support:
            generators.append(E.section(frame[x][1]) + _sharp(E, pi, frame, x))
        else:
            generators.append(E.section(frame[x][0]))
    return DiracData(E, generators, support, label=label or "coisotropic")


def check_bivector(E: CourantData, pi: Multivector) -> None:
    if pi.degree != 2 or pi.ring != E.ring:
        raise ShapeError(f"Expected a bivector on {E.ring!r}")


@traced(GRADEDKIT_COISOTROPIC_SPAN_NAME)
def check_coisotropic(pi: Multivector, support: Sequence[str]) -> CheckReport:
    """Y is coisotropic when {x_a, x_b} = pi^{ab} vanishes on Y for every pair of vanishing coordinates"""
    ring = pi.ring
    support = list(support)
    for name in support:
        ring.index(name)
    target = BaseRing([x for x in ring.names if x not in support])
    report = CheckReport("coisotropic")
    for a, b in combinations(support, 2):
        residual = ring.restrict(pi.component(a, b), support, target)
        report.add(Check.of(f"pi({a},{b})", ANCHOR_COISOTROPIC, residual, f"({a},{b})"))
    if not report.checks:
        report.add(Check("codimension <= 1", ANCHOR_COISOTROPIC, Verdict.PASS))
    return report

"""
Shifted symplectic data on the stack quotient of an L-infinity algebroid.

Shift 0 data is a closed basic 2-form on the base, shift 1 data a map phi: L_0 -> Omega^1 and
shift 2 data the quadruple (phi, psi, Q, K) of a Lie 2-algebroid: phi: L_1 -> Omega^1, psi a
skew Omega^1-valued form on L_0, Q a symmetric pairing on L_0 and K a 4-form on the base.

Nondegeneracy compares the pullback tangent complex T with T^v[q] through the map determined
by the data and asks for an isomorphism (strict) or an acyclic cone at sample points.
"""

import logging
from dataclasses import dataclass, field, replace
from itertools import combinations, product
from typing import Mapping, Sequence

from gradedkit._internal.config import get_config
from gradedkit._internal.constants import (
    ANCHOR_BRACKET_SKEW,
    ANCHOR_CLOSURE_DIFFERENTIAL,
    ANCHOR_CLOSURE_MIXED,
    ANCHOR_CLOSURE_PAIRING,
    ANCHOR_CLOSURE_TRIPLE,
    ANCHOR_FOLIATION_BASIC,
    ANCHOR_FOLIATION_CLOSED,
    ANCHOR_FOLIATION_REGULAR,
    ANCHOR_FOLIATION_TRANSVERSE,
    ANCHOR_ISOTROPIC,
    ANCHOR_LINFTY,
    ANCHOR_NONDEGENERATE,
    ANCHOR_STRUCTURE,
    ANCHOR_TRANSITIVE,
    GRADEDKIT_VERIFY_CLOSURE_SPAN_NAME,
    GRADEDKIT_VERIFY_ISOTROPIC_SPAN_NAME,
    GRADEDKIT_VERIFY_NONDEGENERATE_SPAN_NAME,
    GRADEDKIT_VERIFY_TRANSITIVE_SPAN_NAME,
    GRADEDKIT_VERIFY_ZERO_SHIFTED_SPAN_NAME,
)
from gradedkit._internal.core.algebroid import LinftyAlgebroid, LinftyMorphism, Section, verify_linfty, verify_morphism
from gradedkit._internal.core.forms import (
    ClosedFormsRetract,
    FormsBicomplex,
    NormalizedClosedForm,
    forms_table,
    normalize_closed_form,
    pullback_form,
    realize_closed_form,
)
from gradedkit._internal.core.ring import (
    BaseForm,
    BaseRing,
    Poly,
    Rational,
    VectorField,
    contract,
    contract_many,
    de_rham_d,
    is_unit,
    lie_derivative,
    poly_det,
    rank_at,
    rational,
    sample_points,
)
from gradedkit._internal.core.transfer import (
    DeformationRetract,
    algebroid_complex,
    pullback_tangent_complex,
    tangent_name,
    transfer_structure,
)
from gradedkit._internal.core.verdict import Check, CheckReport, Verdict, ordered_map
from gradedkit._internal.errors import ShapeError
from gradedkit._internal.tracer import traced

logger = logging.getLogger(__name__)

SUPPORTED_SHIFTS = (0, 1, 2)


def iota_chain(vectors: Sequence[VectorField], omega: BaseForm) -> BaseForm:
    """i_{v_1} i_{v_2} .. i_{v_k} omega, innermost contraction first: omega(v_k, .., v_1, -)"""
    return contract_many(list(reversed(vectors)), omega)


def function_differential(ring: BaseRing, f: Poly) -> BaseForm:
    return de_rham_d(BaseForm.function(ring, f))


@dataclass(eq=False)
class ShiftedSymplecticData:
    """
    Closed form data of shift 0, 1 or 2 on an L-infinity algebroid.

    Args:
        shift: 0, 1 or 2
        algebroid: the algebroid the data lives on
        form: shift 0, the 2-form B on the base
        phi: shift 1, images of L_0 basis elements; shift 2, images of L_1 basis elements (1-forms)
        psi: shift 2, 1-forms on ordered L_0 basis pairs; a missing order is filled in by skew-symmetry
        pairing: shift 2, Gram matrix of Q in the L_0 basis
        K: shift 2, 4-form on the base; absent means zero
    """

    shift: int
    algebroid: LinftyAlgebroid
    form: BaseForm | None = None
    phi: Mapping[str, BaseForm] = field(default_factory=dict)
    psi: Mapping[tuple[str, str], BaseForm] = field(default_factory=dict)
    pairing: Sequence[Sequence[Poly]] | None = None
    K: BaseForm | None = None
    label: str = ""
    conflicts: list[str] = field(default_factory=list, init=False)

    def __post_init__(self):
        if self.shift not in SUPPORTED_SHIFTS:
            raise ShapeError(f"Shift {self.shift} is not supported; expected one of {SUPPORTED_SHIFTS}")
        A = self.algebroid
        ring = A.ring
        if self.shift == 0:
            if A.amplitude > 0:
                raise ShapeError("Zero-shifted data lives on a Lie algebroid concentrated in degree zero")
            self.form = self.form if self.form is not None else BaseForm.zero(ring, 2)
            if self.form.degree != 2:
                raise ShapeError(f"Zero-shifted data needs a 2-form, got a {self.form.degree}-form")
            return

        domain_level = self.shift - 1
        domain = A.modules[domain_level] if A.amplitude >= domain_level else ()
        if A.amplitude > domain_level:
            raise ShapeError(f"{self.shift}-shifted data needs amplitude at most {domain_level}, got {A.amplitude}")
        phi = {}
        for name, value in self.phi.items():
            if name not in domain:
                raise ShapeError(f"phi is defined on {name!r} outside L_{domain_level}")
            if value.degree != 1:
                raise ShapeError(f"phi({name}) must be a 1-form")
            phi[name] = value
        self.phi = phi
        if self.shift == 1:
            return

        basis = A.modules[0]
        self._index = {name: k for k, name in enumerate(basis)}
        rows = self.pairing if self.pairing is not None else [[0] * len(basis) for _ in basis]
        if len(rows) != len(basis) or any(len(row) != len(basis) for row in rows):
            raise ShapeError(f"Pairing must be a {len(basis)}x{len(basis)} matrix on L_0")
        self.pairing = [[ring.coerce(entry) for entry in row] for row in rows]
        self.K = self.K if self.K is not None else BaseForm.zero(ring, 4)
        if self.K.degree != 4:
            raise ShapeError(f"K must be a 4-form, got a {self.K.degree}-form")

        psi: dict[tuple[str, str], BaseForm] = {}
        for (x, y), value in self.psi.items():
            if x not in self._index or y not in self._index:
                raise ShapeError(f"psi is defined on ({x}, {y}) outside L_0")
            psi[(x, y)] = value
        for (x, y), value in list(psi.items()):
            other = psi.get((y, x))
            if other is None:
                psi[(y, x)] = -value
            elif other != -value:
                self.conflicts.append(f"psi({x},{y}) = {value} but psi({y},{x}) = {other}")
        self.psi = {key: value for key, value in psi.items() if not value.is_zero()}

    @property
    def ring(self) -> BaseRing:
        return self.algebroid.ring

    def Q(self, s: Section, t: Section) -> Poly:
        result = self.ring.zero
        for x, f in s.items():
            row = self.pairing[self._index[x]]
            for y, g in t.items():
                result += f * g * row[self._index[y]]
        return result

    def psi_of(self, s: Section, t: Section) -> BaseForm:
        """psi extended by psi(x, f y) = f psi(x, y) + Q(x, y) df and skew-symmetry"""
        ring = self.ring
        result = BaseForm.zero(ring, 1)
        for x, f in s.items():
            for y, g in t.items():
                value = self.psi.get((x, y))
                if value is not None:
                    result = result + value.scale(f * g)
                q = self.pairing[self._index[x]][self._index[y]]
                if q:
                    result = result + function_differential(ring, g).scale(f * q)
                    result = result - function_differential(ring, f).scale(g * q)
        return result

    def phi_of(self, section: Section) -> BaseForm:
        result = BaseForm.zero(self.ring, 1)
        for name, coeff in section.items():
            value = self.phi.get(name)
            if value is not None:
                result = result + value.scale(coeff)
        return result


# Nondegeneracy


Matrix = list[list[Poly]]


def _matmul(ring: BaseRing, left: Matrix, right: Matrix, shape: tuple[int, int, int]) -> Matrix:
    """(rows x inner) times (inner x columns); shape is (rows, inner, columns)"""
    rows, inner, columns = shape

    def entry(i: int, j: int) -> Poly:
        return sum((left[i][k] * right[k][j] for k in range(inner)), ring.zero)

    return [[entry(i, j) for j in range(columns)] for i in range(rows)]


class _ComparisonCone:
    """
    The map T -> T^v[q] as matrices together with its mapping cone.

    T^v[q] in degree n is the dual of T in degree -n-q. Its differentials are transposes of
    those of T, each with the sign that makes the comparison a chain map, when one exists.
    """

    def __init__(self, data: ShiftedSymplecticData):
        self.data = data
        self.ring = data.ring
        self.q = data.shift
        self.tangent = pullback_tangent_complex(data.algebroid)
        self.coordinates = {tangent_name(x): i for i, x in enumerate(self.ring.names)}
        degrees = self.tangent.degrees()
        low, high = min(degrees), max(degrees)
        self.degrees = list(range(min(low, -high - self.q) - 1, max(high, -low - self.q) + 2))
        self.signs = {n: 1 for n in self.degrees}
        self.chain_failures: list[tuple[int, list[list[Poly]]]] = []
        for n in self.degrees:
            self._fix_sign(n)

    def t_basis(self, n: int) -> tuple[str, ...]:
        return self.tangent.basis(n)

    def d_basis(self, n: int) -> tuple[str, ...]:
        return self.tangent.basis(-n - self.q)

    def dt(self, n: int) -> list[list[Poly]]:
        return self.tangent.matrix(n)

    def dd(self, n: int) -> list[list[Poly]]:
        """Differential of T^v[q] from degree n to n + 1"""
        below = self.tangent.matrix(-n - self.q - 1)
        sign = self.signs.get(n, 1)
        rows, cols = self.d_basis(n + 1), self.d_basis(n)
        return [[below[j][i] * sign for j in range(len(cols))] for i in range(len(rows))]

    def f(self, n: int) -> list[list[Poly]]:
        return [[self._pair(col, row) for col in self.t_basis(n)] for row in self.d_basis(n)]

    def _pair(self, left: str, right: str) -> Poly:
        """omega-flat(left) evaluated on right, for left in T^n and right in T^{-n-q}"""
        data, ring, coordinates = self.data, self.ring, self.coordinates
        A = data.algebroid
        if data.shift == 0:
            if left in coordinates and right in coordinates:
                return data.form.coefficient((coordinates[left], coordinates[right]))
            return ring.zero
        if left in coordinates and right not in coordinates:
            left, right = right, left
        if right in coordinates and left not in coordinates:
            value = data.phi.get(left)
            return value.coefficient((coordinates[right],)) if value is not None else ring.zero
        if data.shift == 2 and A.level_of(left) == 0 and A.level_of(right) == 0:
            return data.Q(Section.basis(ring, left), Section.basis(ring, right)) * 2
        return ring.zero

    def _fix_sign(self, n: int) -> None:
        """Choose the sign of the dual differential out of degree n so that f d = d' f"""
        shape = (len(self.d_basis(n + 1)), len(self.t_basis(n + 1)), len(self.t_basis(n)))
        left = _matmul(self.ring, self.f(n + 1), self.dt(n), shape)
        shape = (len(self.d_basis(n + 1)), len(self.d_basis(n)), len(self.t_basis(n)))
        for sign in (1, -1):
            self.signs[n] = sign
            right = _matmul(self.ring, self.dd(n), self.f(n), shape)
            residual = [[a - b for a, b in zip(lr, rr)] for lr, rr in zip(left, right)]
            if not any(entry for row in residual for entry in row):
                return
        self.chain_failures.append((n, residual))

    def strict_failures(self) -> list[str]:
        failures = []
        for n in self.degrees:
            rows, cols = len(self.d_basis(n)), len(self.t_basis(n))
            if rows != cols:
                failures.append(f"degree {n}: {cols} -> {rows} is not square")
            elif rows and not is_unit(self.ring, poly_det(self.ring, self.f(n))):
                failures.append(f"degree {n}: determinant {poly_det(self.ring, self.f(n))} is not a unit")
        return failures

    def cone_differential(self, n: int) -> tuple[list[list[Poly]], int]:
        """Cone^n = T^{n+1} + T^v[q]^n -> Cone^{n+1}; returns rows and the number of columns"""
        ring = self.ring
        t_src, d_src = len(self.t_basis(n + 1)), len(self.d_basis(n))
        t_dst, d_dst = len(self.t_basis(n + 2)), len(self.d_basis(n + 1))
        dt, f, dd = self.dt(n + 1), self.f(n + 1), self.dd(n)
        rows = []
        for i in range(t_dst):
            rows.append([-dt[i][j] for j in range(t_src)] + [ring.zero] * d_src)
        for i in range(d_dst):
            rows.append([f[i][j] for j in range(t_src)] + [dd[i][j] for j in range(d_src)])
        return rows, t_src + d_src

    def cohomology_at(self, point: Sequence[Rational], n: int) -> int:
        outgoing, size = self.cone_differential(n)
        incoming, incoming_cols = self.cone_differential(n - 1)
        return size - rank_at(self.ring, outgoing, point, size) - rank_at(self.ring, incoming, point, incoming_cols)


@traced(GRADEDKIT_VERIFY_NONDEGENERATE_SPAN_NAME)
def verify_nondegenerate(
    data: ShiftedSymplecticData,
    points: Sequence[Sequence[Rational]] | None = None,
    mode: str | None = None,
) -> CheckReport:
    """
    Nondegeneracy of shifted symplectic data.

    STRICT-PASS when the comparison T -> T^v[q] is an isomorphism of complexes (square blocks
    with unit determinants), SAMPLED-PASS when its cone is acyclic at every sample point, FAIL
    with the first sample point and degree where the cone has cohomology.

    Args:
        data: the shifted symplectic data
        points: sample points; defaults to the origin and the configured seeded points
        mode: "strict" tries the isomorphism first, "sampled" goes straight to sample points
    """
    config = get_config()
    mode = (mode or config.mode).lower()
    report = CheckReport(f"nondegeneracy {data.label}".strip())
    cone = _ComparisonCone(data)
    for degree, residual in cone.chain_failures:
        report.add(Check.failed(f"chain({degree})", ANCHOR_NONDEGENERATE, f"degree {degree}", residual))
    if not report.passed:
        return report

    if mode == "strict":
        failures = cone.strict_failures()
        if not failures:
            report.add(Check("isomorphism", ANCHOR_NONDEGENERATE, Verdict.STRICT_PASS))
            return report
        logger.debug("%s is not strictly nondegenerate: %s", data.label or "data", "; ".join(failures))

    if points is None:
        points = sample_points(data.ring, config.seed, config.samples)
    if not points:
        raise ShapeError("Sampled nondegeneracy needs at least one sample point")
    for point in points:
        for n in cone.degrees:
            rank = cone.cohomology_at(point, n)
            if rank:
                witness = f"point {tuple(str(c) for c in point)}, degree {n}"
                message = f"cone cohomology of rank {rank}"
                report.add(Check.failed(f"acyclic({n})", ANCHOR_NONDEGENERATE, witness, message))
                return report
    report.add(Check(f"acyclic at {len(points)} points", ANCHOR_NONDEGENERATE, Verdict.SAMPLED_PASS))
    logger.warning("nondegeneracy of %s only established at %d sample points", data.label or "data", len(points))
    return report


# Two-shifted closure equations


def _cyclic_term(data: ShiftedSymplecticData, x: Section, y: Section, z: Section) -> BaseForm:
    """L_{ax} psi(y,z) + psi(x,[y,z]) - 1/3 d(Q(x,[y,z]) + i_{ax} psi(y,z))"""
    A, ring = data.algebroid, data.ring
    ax = A.anchor_of(x)
    yz = A.bracket(y, z)
    psi_yz = data.psi_of(y, z)
    exact = data.Q(x, yz) + contract(ax, psi_yz).scalar()
    return lie_derivative(ax, psi_yz) + data.psi_of(x, yz) - function_differential(ring, exact).scale(rational(1, 3))


def closure_triple(data: ShiftedSymplecticData, x: Section, y: Section, z: Section) -> BaseForm:
    A = data.algebroid
    total = _cyclic_term(data, x, y, z) + _cyclic_term(data, y, z, x) + _cyclic_term(data, z, x, y)
    total = total + data.phi_of(A.bracket(x, y, z))
    return total - iota_chain([A.anchor_of(x), A.anchor_of(y), A.anchor_of(z)], data.K)


def closure_mixed(data: ShiftedSymplecticData, x: Section, u: Section) -> BaseForm:
    A, ring = data.algebroid, data.ring
    du = A.differential_of(u)
    return (
        lie_derivative(A.anchor_of(x), data.phi_of(u))
        - data.phi_of(A.bracket(x, u))
        - data.psi_of(x, du)
        + function_differential(ring, data.Q(x, du))
    )


def closure_pairing(data: ShiftedSymplecticData, x: Section, y: Section, z: Section) -> Poly:
    A = data.algebroid

    def half(a: Section, b: Section) -> Poly:
        return (
            A.anchor_of(b)(data.Q(a, z)) * 3
            - data.Q(a, A.bracket(b, z)) * 2
            + contract(A.anchor_of(a), data.psi_of(b, z)).scalar()
        )

    az_psi = contract(A.anchor_of(z), data.psi_of(x, y)).scalar()
    return half(x, y) - half(y, x) + data.Q(A.bracket(x, y), z) * 4 - az_psi * 2


def closure_differential(data: ShiftedSymplecticData, u: Section, x: Section) -> Poly:
    A = data.algebroid
    return data.Q(A.differential_of(u), x) * 2 + contract(A.anchor_of(x), data.phi_of(u)).scalar()


def _structure_checks(data: ShiftedSymplecticData) -> list[Check]:
    A, ring = data.algebroid, data.ring
    checks = [Check.failed("bracket-skew", ANCHOR_BRACKET_SKEW, conflict) for conflict in A.conflicts]
    if not A.conflicts:
        checks.append(Check("bracket-skew", ANCHOR_BRACKET_SKEW, Verdict.PASS))
    checks.extend(Check.failed("psi-skew", ANCHOR_STRUCTURE, conflict) for conflict in data.conflicts)
    basis = A.modules[0]
    for x, y in combinations(basis, 2):
        residual = data.Q(Section.basis(ring, x), Section.basis(ring, y)) - data.Q(
            Section.basis(ring, y), Section.basis(ring, x)
        )
        checks.append(Check.of(f"Q-symmetric({x},{y})", ANCHOR_STRUCTURE, residual))
    return checks


@traced(GRADEDKIT_VERIFY_CLOSURE_SPAN_NAME)
def verify_closure_shift2(data: ShiftedSymplecticData) -> CheckReport:
    """
    The closure equations of two-shifted data on a Lie 2-algebroid, plus its L-infinity axioms.

    Each equation is checked on basis tuples and on probes with one argument multiplied by a
    coordinate. Bracket tables that are not skew-symmetric fail under the bracket-skew anchor.
    """
    if data.shift != 2:
        raise ShapeError(f"Closure equations are for two-shifted data, got shift {data.shift}")
    A, ring = data.algebroid, data.ring
    report = CheckReport(f"closure {data.label}".strip())
    report.extend(_structure_checks(data))

    L0 = [Section.basis(ring, n) for n in A.modules[0]]
    L1 = [Section.basis(ring, n) for n in (A.modules[1] if A.amplitude >= 1 else ())]
    coordinates = [ring.gen(g) for g in ring.names]

    def triple(args: tuple[Section, Section, Section]) -> Check:
        x, y, z = args
        witness = f"({x},{y},{z})"
        return Check.of(f"triple{witness}", ANCHOR_CLOSURE_TRIPLE, closure_triple(data, x, y, z), witness)

    triples = list(combinations(L0, 3))
    triples += [(x, y, z.scale(g)) for x, y, z in triples for g in coordinates]
    report.extend(ordered_map(triple, triples))

    for x, u in product(L0, L1):
        for a, b in [(x, u)] + [(x.scale(g), u) for g in coordinates] + [(x, u.scale(g)) for g in coordinates]:
            report.add(Check.of(f"mixed({a},{b})", ANCHOR_CLOSURE_MIXED, closure_mixed(data, a, b), f"({a},{b})"))

    def pairing(args: tuple[Section, Section, Section]) -> Check:
        x, y, z = args
        witness = f"({x},{y},{z})"
        return Check.of(f"pairing{witness}", ANCHOR_CLOSURE_PAIRING, closure_pairing(data, x, y, z), witness)

    ordered = list(product(L0, repeat=3))
    ordered += [(x, y, z.scale(g)) for x, y, z in product(L0, repeat=3) for g in coordinates]
    report.extend(ordered_map(pairing, ordered))

    for u, x in product(L1, L0):
        residual = closure_differential(data, u, x)
        report.add(Check.of(f"differential({u},{x})", ANCHOR_CLOSURE_DIFFERENTIAL, residual, f"({u},{x})"))

    for check in verify_linfty(A).checks:
        report.add(replace(check, check_id=f"linfty/{check.check_id}", anchor=ANCHOR_LINFTY))
    logger.debug("closure of %s: %s", data.label or "data", report.verdict)
    return report


# Zero shift: regular foliations


def _anchor_rows(A: LinftyAlgebroid) -> list[list[Poly]]:
    """One row per coordinate, one column per L_0 basis element"""
    fields = [A.anchor.get(n, VectorField.zero(A.ring)) for n in A.modules[0]]
    return [[v.components[i] for v in fields] for i in range(A.ring.ngens)]


def _form_rows(B: BaseForm) -> list[list[Poly]]:
    n = B.ring.ngens
    return [[B.coefficient((i, j)) for j in range(n)] for i in range(n)]


@traced(GRADEDKIT_VERIFY_ZERO_SHIFTED_SPAN_NAME)
def verify_zero_shifted(
    A: LinftyAlgebroid, B: BaseForm, points: Sequence[Sequence[Rational]] | None = None
) -> CheckReport:
    """
    0-shifted symplectic structure on the quotient by a Lie algebroid A: a closed basic 2-form
    B whose kernel is exactly the image of an injective anchor, checked at sample points.
    """
    if A.amplitude > 0:
        raise ShapeError("Zero-shifted structures live on a Lie algebroid concentrated in degree zero")
    if B.degree != 2:
        raise ShapeError(f"Expected a 2-form, got a {B.degree}-form")
    ring = A.ring
    config = get_config()
    points = sample_points(ring, config.seed, config.samples) if points is None else points
    report = CheckReport(f"zero-shifted {A.label}".strip())
    report.add(Check.of("dB", ANCHOR_FOLIATION_CLOSED, de_rham_d(B), "dB"))
    for name in A.modules[0]:
        vector = A.anchor.get(name, VectorField.zero(ring))
        report.add(Check.of(f"i_a({name})B", ANCHOR_FOLIATION_BASIC, contract(vector, B), name))

    anchor, form = _anchor_rows(A), _form_rows(B)
    rank_L = len(A.modules[0])
    for point in points:
        witness = str(tuple(str(c) for c in point))
        rank_a = rank_at(ring, anchor, point, rank_L)
        if rank_a != rank_L:
            message = f"anchor rank {rank_a} < {rank_L}"
            report.add(Check.failed("anchor-injective", ANCHOR_FOLIATION_REGULAR, witness, message))
            break
        rank_B = rank_at(ring, form, point, ring.ngens)
        if rank_B != ring.ngens - rank_a:
            residual = f"rank B = {rank_B}, expected {ring.ngens - rank_a}"
            report.add(Check.failed("kernel", ANCHOR_FOLIATION_TRANSVERSE, witness, residual))
            break
    else:
        report.add(Check(f"regular at {len(points)} points", ANCHOR_FOLIATION_REGULAR, Verdict.SAMPLED_PASS))
    return report


# One shift, transitive case


@traced(GRADEDKIT_VERIFY_TRANSITIVE_SPAN_NAME)
def verify_transitive_pairing(
    A: LinftyAlgebroid,
    kernel: Sequence[str],
    g: Sequence[Sequence[Poly]],
    points: Sequence[Sequence[Rational]] | None = None,
) -> CheckReport:
    """
    A nondegenerate invariant symmetric pairing g on the kernel of a transitive Lie algebroid.

    The kernel is framed by the listed L_0 basis elements; g is its Gram matrix.
    """
    if A.amplitude > 0:
        raise ShapeError("Transitive pairings live on a Lie algebroid concentrated in degree zero")
    ring = A.ring
    kernel = tuple(kernel)
    for name in kernel:
        if A.level_of(name) != 0:
            raise ShapeError(f"Kernel element {name!r} is not in L_0")
        if not A.anchor_of(Section.basis(ring, name)).is_zero():
            raise ShapeError(f"Kernel frame element {name!r} has nonzero anchor")
    if len(g) != len(kernel) or any(len(row) != len(kernel) for row in g):
        raise ShapeError(f"Pairing must be {len(kernel)}x{len(kernel)}")
    g = [[ring.coerce(entry) for entry in row] for row in g]
    index = {name: k for k, name in enumerate(kernel)}

    def pair(s: Section, t: Section) -> Poly:
        return sum((f * c * g[index[a]][index[b]] for a, f in s.items() for b, c in t.items()), ring.zero)

    config = get_config()
    points = sample_points(ring, config.seed, config.samples) if points is None else points
    report = CheckReport(f"transitive {A.label}".strip())
    anchor = _anchor_rows(A)
    for point in points:
        rank = rank_at(ring, anchor, point, len(A.modules[0]))
        if rank != ring.ngens:
            witness = str(tuple(str(c) for c in point))
            message = f"anchor rank {rank} < {ring.ngens}"
            report.add(Check.failed("anchor-surjective", ANCHOR_TRANSITIVE, witness, message))
            return report

    for a, b in combinations(kernel, 2):
        report.add(Check.of(f"symmetric({a},{b})", ANCHOR_TRANSITIVE, g[index[a]][index[b]] - g[index[b]][index[a]]))
    det = poly_det(ring, g)
    if not is_unit(ring, det):
        report.add(Check.failed("nondegenerate", ANCHOR_TRANSITIVE, "det g", det))

    sections = {name: Section.basis(ring, name) for name in kernel}
    for x in A.modules[0]:
        sx = Section.basis(ring, x)
        ax = A.anchor_of(sx)
        for u, v in product(kernel, repeat=2):
            xu, xv = A.bracket(sx, sections[u]), A.bracket(sx, sections[v])
            stray = [n for n in xu.names() + xv.names() if n not in index]
            if stray:
                message = f"bracket leaves the kernel: {stray}"
                report.add(Check.failed(f"ideal({x},{u})", ANCHOR_TRANSITIVE, f"({x},{u})", message))
                continue
            residual = ax(g[index[u]][index[v]]) - pair(xu, sections[v]) - pair(sections[u], xv)
            report.add(Check.of(f"invariant({x};{u},{v})", ANCHOR_TRANSITIVE, residual, f"({x};{u},{v})"))
    if report.passed:
        report.add(Check(f"transitive at {len(points)} points", ANCHOR_TRANSITIVE, Verdict.SAMPLED_PASS))
    return report


# Isotropic structures


@dataclass(eq=False)
class IsotropicStructure:
    """
    A coboundary for the pullback of a closed p-form along a strict morphism f: M -> L.

    Args:
        morphism: f, over the identity of the base
        omega: closed p-form on the quotient by L, in the normalized complex
        witness: element of the normalized complex of M, one total degree below omega
    """

    morphism: LinftyMorphism
    omega: NormalizedClosedForm
    witness: NormalizedClosedForm
    label: str = ""

    def __post_init__(self):
        if self.witness.p != self.omega.p:
            raise ShapeError(f"Witness is a closed {self.witness.p}-form, omega a closed {self.omega.p}-form")
        if self.omega.table != forms_table(self.morphism.target):
            raise ShapeError("omega does not live on the quotient by the target algebroid")
        if self.witness.table != forms_table(self.morphism.source):
            raise ShapeError("Witness does not live on the quotient by the source algebroid")

    @classmethod
    def on_quotient(
        cls, algebroid: LinftyAlgebroid, omega: NormalizedClosedForm, witness: BaseForm, label: str = ""
    ) -> "IsotropicStructure":
        """An isotropic structure on the quotient map U -> [U/L]; the witness is a form on U"""
        point = LinftyAlgebroid(algebroid.ring, [[]], label="base")
        table = forms_table(point)
        normalized = NormalizedClosedForm(omega.p, table.zero(), table.from_base_form(witness))
        return cls(LinftyMorphism(point, algebroid), omega, normalized, label=label)


@traced(GRADEDKIT_VERIFY_ISOTROPIC_SPAN_NAME)
def verify_isotropic(structure: IsotropicStructure) -> CheckReport:
    """
    PASS when the twisted differential of the witness equals the normalized pullback of omega.

    The morphism is verified first; a failing morphism stops the check there.

    Raises:
        ShapeError: when omega is not closed under the twisted differential
    """
    f = structure.morphism
    p = structure.omega.p
    report = CheckReport(f"isotropic {structure.label}".strip())
    report.merge(verify_morphism(f, f.source, f.target), prefix="morphism")
    if not report.passed:
        return report

    source = FormsBicomplex(f.source)
    witness = structure.witness
    not_potential = None if source.is_potential(witness.potential) else witness.potential
    report.add(Check.of("potential(witness)", ANCHOR_ISOTROPIC, not_potential, "witness"))

    omega = realize_closed_form(structure.omega, FormsBicomplex(f.target))
    pulled = normalize_closed_form(pullback_form(omega, f), source, p)
    residual = ClosedFormsRetract(source, p).twisted_differential(witness) - pulled
    report.add(Check.of("coboundary(potential)", ANCHOR_ISOTROPIC, residual.potential, "potential"))
    report.add(Check.of("coboundary(base)", ANCHOR_ISOTROPIC, residual.base, "base"))
    logger.debug("isotropic structure %s: %s", structure.label, report.verdict)
    return report


# Truncation


def split_retract(A: LinftyAlgebroid, q: int) -> DeformationRetract:
    """
    Retract of A onto L_0..L_{q-1} with the image of d: L_q -> L_{q-1} removed, when d sends
    every basis element of L_q to a constant multiple of a distinct basis element.
    """
    ring = A.ring
    if A.amplitude != q:
        raise ShapeError(f"A split truncation to amplitude {q - 1} needs amplitude {q}, got {A.amplitude}")
    partner: dict[str, tuple[str, Poly]] = {}
    for u in A.modules[q]:
        image = A.differential.get(u)
        items = list(image.items()) if image is not None else []
        if len(items) != 1 or not is_unit(ring, items[0][1]) or items[0][0] in partner:
            raise ShapeError(f"d({u}) = {image} is not a unit multiple of a fresh basis element")
        target, c = items[0]
        partner[target] = (u, c)

    kept = [list(m) for m in A.modules[:q]]
    kept[q - 1] = [n for n in kept[q - 1] if n not in partner]
    kept_names = [n for m in kept for n in m]
    i = {n: Section.basis(ring, n) for n in kept_names}
    p = {n: Section.basis(ring, n) for n in kept_names}
    h = {t: Section.basis(ring, u, ring.const(-1 / ring.constant_term(c))) for t, (u, c) in partner.items()}
    return DeformationRetract(A, kept, i, p, h, label=f"truncate({q - 1})")


def amplitude_truncate(
    A: LinftyAlgebroid,
    q: int,
    retract: DeformationRetract | None = None,
    points: Sequence[Sequence[Rational]] | None = None,
) -> LinftyAlgebroid:
    """
    Truncate A to amplitude q - 1 so that q-shifted data can live on it.

    Requires the underlying complex to be acyclic in degrees <= -q at the sample points. Without
    a retract, the split retract of ``split_retract`` is used; the structure is then transferred.
    """
    if q < 1:
        raise ShapeError(f"Truncation level must be positive, got {q}")
    if A.amplitude <= q - 1:
        return A
    config = get_config()
    points = sample_points(A.ring, config.seed, config.samples) if points is None else points
    complex_ = algebroid_complex(A)
    for point in points:
        for degree, rank in complex_.cohomology_ranks_at(point).items():
            if degree <= -q and rank:
                raise ShapeError(
                    f"Cohomology of rank {rank} in degree {degree} at {point}; A has no amplitude {q - 1} truncation"
                )
    retract = retract if retract is not None else split_retract(A, q)
    if len(retract.target_modules) > q:
        raise ShapeError(f"Retract target has amplitude {len(retract.target_modules) - 1} > {q - 1}")
    truncated, _ = transfer_structure(A, retract)
    logger.debug("truncated %r to %r", A, truncated)
    return truncated

"""
Exact arithmetic on the affine base: rationals, polynomials, vector fields and forms.

Polynomials are sympy ``PolyElement`` values over ``QQ`` in a lexicographically ordered
``PolyRing``; the ring is declared once per document and shared by every structure built
on it. Forms keep strictly increasing dx multi-indices with the sign folded into the
coefficient, so equal forms have equal term maps.
"""

import logging
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing

from gradedkit._internal.errors import ShapeError

logger = logging.getLogger(__name__)

Rational = QQ.dtype
Poly = PolyElement


def rational(numerator: int, denominator: int = 1) -> Rational:
    """Reduced rational number; the denominator must be nonzero"""
    if denominator == 0:
        raise ShapeError("Rational with zero denominator")
    return QQ(numerator, denominator)


class BaseRing:
    """The coordinate ring Q[x_1, ..., x_n] with a fixed variable order"""

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ShapeError(f"Duplicate coordinate names in {names}")
        self.names = names
        self.ring = PolyRing(list(names) if names else "", QQ, lex)

    def __eq__(self, other):
        return isinstance(other, BaseRing) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"BaseRing({', '.join(self.names)})"

    @property
    def ngens(self) -> int:
        return len(self.names)

    @property
    def zero(self) -> Poly:
        return self.ring.zero

    @property
    def one(self) -> Poly:
        return self.ring.one

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ShapeError(f"Unknown coordinate {name!r} in {self!r}") from None

    def gen(self, name: str) -> Poly:
        return self.ring.gens[self.index(name)]

    def const(self, value) -> Poly:
        return self.ring(QQ.convert(value))

    def coerce(self, value) -> Poly:
        """Bring an int, rational or polynomial of this ring into the ring"""
        if isinstance(value, PolyElement):
            if value.ring != self.ring:
                raise ShapeError(f"Polynomial from {value.ring} used in {self!r}")
            return value
        return self.const(value)

    def partial(self, f: Poly, index: int) -> Poly:
        if not self.names:
            return self.zero
        return f.diff(self.ring.gens[index])

    def evaluate(self, f: Poly, point: Sequence[Rational]) -> Rational:
        """Value of f at a rational point, computed term by term"""
        if len(point) != self.ngens:
            raise ShapeError(f"Point of length {len(point)} in a ring with {self.ngens} variables")
        total = QQ(0)
        for monom, coeff in f.items():
            value = coeff
            for coordinate, exponent in zip(point, monom):
                if exponent:
                    value *= QQ.convert(coordinate) ** exponent
            total += value
        return total

    def restrict(self, f: Poly, killed: Iterable[str], target: "BaseRing") -> Poly:
        """Set the killed coordinates to zero and move f into the target subring"""
        killed_indices = {self.index(name) for name in killed}
        kept = [i for i in range(self.ngens) if i not in killed_indices]
        if tuple(self.names[i] for i in kept) != target.names:
            raise ShapeError(f"{target!r} is not the subring of {self!r} left after killing {sorted(killed)}")
        terms = {}
        for monom, coeff in f.items():
            if any(monom[i] for i in killed_indices):
                continue
            terms[tuple(monom[i] for i in kept)] = coeff
        return target.ring.from_dict(terms) if terms else target.zero

    def embed(self, f: Poly, target: "BaseRing") -> Poly:
        """Move f into a ring whose coordinates include these"""
        positions = [target.index(name) for name in self.names]
        terms = {}
        for monom, coeff in f.items():
            exponents = [0] * target.ngens
            for position, exponent in zip(positions, monom):
                exponents[position] = exponent
            terms[tuple(exponents)] = coeff
        return target.ring.from_dict(terms) if terms else target.zero

    def total_degree(self, f: Poly) -> int:
        return max((sum(monom) for monom in f.keys()), default=0)

    def constant_term(self, f: Poly) -> Rational:
        return dict(f.items()).get((0,) * self.ngens, QQ(0))


def check_same_ring(*rings: BaseRing) -> BaseRing:
    first = rings[0]
    for other in rings[1:]:
        if other != first:
            raise ShapeError(f"Mismatched variable sets: {first!r} and {other!r}")
    return first


@dataclass(frozen=True, eq=False)
class VectorField:
    """Derivation of the base ring: component i is the coefficient of d/dx_i"""

    ring: BaseRing
    components: tuple[Poly, ...]

    def __post_init__(self):
        if len(self.components) != self.ring.ngens:
            raise ShapeError(f"Vector field with {len(self.components)} components on {self.ring!r}")

    @classmethod
    def zero(cls, ring: BaseRing) -> "VectorField":
        return cls(ring, tuple(ring.zero for _ in ring.names))

    @classmethod
    def coordinate(cls, ring: BaseRing, name: str) -> "VectorField":
        index = ring.index(name)
        return cls(ring, tuple(ring.one if i == index else ring.zero for i in range(ring.ngens)))

    @classmethod
    def from_mapping(cls, ring: BaseRing, values: Mapping[str, Poly]) -> "VectorField":
        return cls(ring, tuple(ring.coerce(values.get(name, 0)) for name in ring.names))

    def __call__(self, f: Poly) -> Poly:
        result = self.ring.zero
        for index, component in enumerate(self.components):
            if component:
                result += component * self.ring.partial(f, index)
        return result

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.ring == other.ring and self.components == other.components

    __hash__ = None

    def __add__(self, other: "VectorField") -> "VectorField":
        check_same_ring(self.ring, other.ring)
        return VectorField(self.ring, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def __neg__(self) -> "VectorField":
        return VectorField(self.ring, tuple(-c for c in self.components))

    def scale(self, f) -> "VectorField":
        f = self.ring.coerce(f)
        return VectorField(self.ring, tuple(f * c for c in self.components))

    def is_zero(self) -> bool:
        return not any(self.components)

    def __str__(self):
        parts = [f"({c})*d/d{name}" for c, name in zip(self.components, self.ring.names) if c]
        return " + ".join(parts) or "0"


def lie_bracket_vf(v: VectorField, w: VectorField) -> VectorField:
    """[v, w] = v o w - w o v as a derivation of the base ring"""
    ring = check_same_ring(v.ring, w.ring)
    return VectorField(ring, tuple(v(wj) - w(vj) for vj, wj in zip(v.components, w.components)))


def _canonical_indices(indices: Sequence[int]) -> tuple[int, tuple[int, ...] | None]:
    """Sort a dx multi-index, returning the permutation sign; a repeated index gives sign 0"""
    if len(set(indices)) != len(indices):
        return 0, None
    items = list(indices)
    sign = 1
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j] > items[j + 1]:
                items[j], items[j + 1] = items[j + 1], items[j]
                sign = -sign
    return sign, tuple(items)


class BaseForm:
    """A p-form on the base: map from strictly increasing index tuples to coefficients"""

    __slots__ = ("ring", "degree", "terms")

    def __init__(self, ring: BaseRing, degree: int, terms: Mapping[tuple[int, ...], Poly] | None = None):
        if degree < 0:
            raise ShapeError(f"Negative form degree {degree}")
        self.ring = ring
        self.degree = degree
        canonical: dict[tuple[int, ...], Poly] = {}
        for indices, coeff in (terms or {}).items():
            if len(indices) != degree:
                raise ShapeError(f"Index tuple {indices} in a {degree}-form")
            if any(i < 0 or i >= ring.ngens for i in indices):
                raise ShapeError(f"Index tuple {indices} out of range for {ring!r}")
            sign, key = _canonical_indices(indices)
            if not sign:
                continue
            canonical[key] = canonical.get(key, ring.zero) + ring.coerce(coeff) * sign
        self.terms = {key: coeff for key, coeff in canonical.items() if coeff}

    @classmethod
    def zero(cls, ring: BaseRing, degree: int) -> "BaseForm":
        return cls(ring, degree)

    @classmethod
    def function(cls, ring: BaseRing, f) -> "BaseForm":
        return cls(ring, 0, {(): ring.coerce(f)})

    @classmethod
    def differential(cls, ring: BaseRing, *names: str, coeff=1) -> "BaseForm":
        """coeff * dx_{names[0]} ^ ... ^ dx_{names[-1]}"""
        return cls(ring, len(names), {tuple(ring.index(n) for n in names): ring.coerce(coeff)})

    def __eq__(self, other):
        return (
            isinstance(other, BaseForm)
            and self.ring == other.ring
            and self.degree == other.degree
            and self.terms == other.terms
        )

    __hash__ = None

    def _check(self, other: "BaseForm"):
        check_same_ring(self.ring, other.ring)
        if self.degree != other.degree:
            raise ShapeError(f"Adding forms of degree {self.degree} and {other.degree}")

    def __add__(self, other: "BaseForm") -> "BaseForm":
        self._check(other)
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = terms.get(key, self.ring.zero) + coeff
        return BaseForm(self.ring, self.degree, terms)

    def __neg__(self) -> "BaseForm":
        return BaseForm(self.ring, self.degree, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "BaseForm") -> "BaseForm":
        return self + (-other)

    def scale(self, f) -> "BaseForm":
        f = self.ring.coerce(f)
        return BaseForm(self.ring, self.degree, {k: f * c for k, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, indices: Sequence[int]) -> Poly:
        sign, key = _canonical_indices(indices)
        if not sign:
            return self.ring.zero
        return self.terms.get(key, self.ring.zero) * sign

    def scalar(self) -> Poly:
        """The coefficient of a 0-form"""
        if self.degree:
            raise ShapeError(f"A {self.degree}-form is not a function")
        return self.terms.get((), self.ring.zero)

    def wedge(self, other: "BaseForm") -> "BaseForm":
        check_same_ring(self.ring, other.ring)
        terms: dict[tuple[int, ...], Poly] = {}
        for left, a in self.terms.items():
            for right, b in other.terms.items():
                sign, key = _canonical_indices(left + right)
                if sign:
                    terms[key] = terms.get(key, self.ring.zero) + a * b * sign
        return BaseForm(self.ring, self.degree + other.degree, terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms):
            basis = "^".join(f"d{self.ring.names[i]}" for i in key)
            parts.append(f"({self.terms[key]})" + (f"*{basis}" if basis else ""))
        return " + ".join(parts)

    __repr__ = __str__


def de_rham_d(omega: BaseForm) -> BaseForm:
    """Exterior derivative, coefficientwise partials"""
    ring = omega.ring
    terms: dict[tuple[int, ...], Poly] = {}
    for indices, coeff in omega.terms.items():
        for i in range(ring.ngens):
            if i in indices:
                continue
            partial = ring.partial(coeff, i)
            if partial:
                sign, key = _canonical_indices((i,) + indices)
                terms[key] = terms.get(key, ring.zero) + partial * sign
    return BaseForm(ring, omega.degree + 1, terms)


def contract(v: VectorField, omega: BaseForm) -> BaseForm:
    """Interior product into the first slot"""
    ring = check_same_ring(v.ring, omega.ring)
    if omega.degree == 0:
        raise ShapeError("Cannot contract a vector field into a 0-form")
    terms: dict[tuple[int, ...], Poly] = {}
    for indices, coeff in omega.terms.items():
        for position, i in enumerate(indices):
            component = v.components[i]
            if not component:
                continue
            key = indices[:position] + indices[position + 1 :]
            value = coeff * component
            terms[key] = terms.get(key, ring.zero) + (value if position % 2 == 0 else -value)
    return BaseForm(ring, omega.degree - 1, terms)


def contract_many(vectors: Sequence[VectorField], omega: BaseForm) -> BaseForm:
    """omega(v_1, ..., v_k, -): the first listed vector fills the first slot"""
    for v in vectors:
        omega = contract(v, omega)
    return omega


def evaluate_form(omega: BaseForm, vectors: Sequence[VectorField]) -> Poly:
    """Full evaluation omega(v_1, ..., v_p)"""
    if len(vectors) != omega.degree:
        raise ShapeError(f"A {omega.degree}-form evaluated on {len(vectors)} vector fields")
    return contract_many(vectors, omega).scalar()


def lie_derivative(v: VectorField, omega: BaseForm) -> BaseForm:
    """Cartan formula d i_v + i_v d; on functions this is v(f)"""
    if omega.degree == 0:
        return BaseForm.function(omega.ring, v(omega.scalar()))
    return de_rham_d(contract(v, omega)) + contract(v, de_rham_d(omega))


def restrict_form(omega: BaseForm, killed: Iterable[str], target: BaseRing) -> BaseForm:
    """Pullback to the coordinate subspace where the killed coordinates vanish"""
    killed = list(killed)
    killed_indices = {omega.ring.index(name) for name in killed}
    kept = [i for i in range(omega.ring.ngens) if i not in killed_indices]
    reindex = {old: new for new, old in enumerate(kept)}
    terms = {}
    for indices, coeff in omega.terms.items():
        if any(i in killed_indices for i in indices):
            continue
        terms[tuple(reindex[i] for i in indices)] = omega.ring.restrict(coeff, killed, target)
    return BaseForm(target, omega.degree, terms)


# Exact matrices over the base ring and at rational points


def poly_matrix(ring: BaseRing, rows: Sequence[Sequence[Poly]]) -> DomainMatrix:
    domain = ring.ring.to_domain()
    return DomainMatrix.from_list([[ring.coerce(entry) for entry in row] for row in rows], domain)


def poly_det(ring: BaseRing, rows: Sequence[Sequence[Poly]]) -> Poly:
    """Determinant of a square polynomial matrix; the empty matrix has determinant one"""
    if not rows:
        return ring.one
    if any(len(row) != len(rows) for row in rows):
        raise ShapeError(f"Determinant of a non-square {len(rows)}x{len(rows[0])} matrix")
    return ring.coerce(poly_matrix(ring, rows).det())


def poly_adjugate(ring: BaseRing, rows: Sequence[Sequence[Poly]]) -> list[list[Poly]]:
    """Adjugate by cofactors: adj[i][j] = (-1)^(i+j) det(rows without row j and column i)"""
    if not rows:
        return []
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ShapeError(f"Adjugate of a non-square {n}x{len(rows[0])} matrix")

    def minor(skip_row: int, skip_col: int) -> list[list[Poly]]:
        return [[row[c] for c in range(n) if c != skip_col] for r, row in enumerate(rows) if r != skip_row]

    return [[poly_det(ring, minor(j, i)) * (-1) ** (i + j) for j in range(n)] for i in range(n)]


def is_unit(ring: BaseRing, f: Poly) -> bool:
    """Units of Q[x] are the nonzero constants"""
    return bool(f) and f.is_ground


def matrix_at(ring: BaseRing, rows: Sequence[Sequence[Poly]], point: Sequence[Rational], ncols: int) -> DomainMatrix:
    values = [[ring.evaluate(entry, point) for entry in row] for row in rows]
    return DomainMatrix.from_list(values, QQ) if values else DomainMatrix.zeros((0, ncols), QQ)


def rank_at(ring: BaseRing, rows: Sequence[Sequence[Poly]], point: Sequence[Rational], ncols: int) -> int:
    if not rows or not ncols:
        return 0
    return matrix_at(ring, rows, point, ncols).rank()


def sample_points(ring: BaseRing, seed: int, samples: int) -> list[tuple[Rational, ...]]:
    """The origin followed by ``samples`` pseudorandom rational points, reproducible from the seed"""
    rng = random.Random(seed)
    points = [tuple(QQ(0) for _ in ring.names)]
    for _ in range(samples):
        points.append(tuple(QQ(rng.randint(-9, 9), rng.randint(1, 4)) for _ in ring.names))
    return points

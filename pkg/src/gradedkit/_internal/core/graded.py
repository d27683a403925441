"""
Free graded-commutative algebras over the base ring and their derivations.

Generators carry an internal degree, a weight and a form degree; the Koszul sign of a
generator is the parity of internal degree plus form degree, so d and the internal
differential anticommute on forms. Base coordinates live in the polynomial coefficients;
algebra monomials are exponent tuples over the remaining generators in canonical order
(dual generators by (degree, declaration index), then form symbols by declaration index).
"""

import logging
from dataclasses import dataclass
from enum import StrEnum
from typing import Iterable, Mapping, Sequence

from gradedkit._internal.constants import (
    ANCHOR_SQUARE_ZERO,
    GRADEDKIT_MAX_DEGREE,
    GRADEDKIT_MIN_DEGREE,
    GRADEDKIT_SQUARE_ZERO_SPAN_NAME,
)
from gradedkit._internal.core.ring import BaseRing, Poly
from gradedkit._internal.core.verdict import Check, CheckReport, ordered_map
from gradedkit._internal.errors import MissingValueError, ShapeError
from gradedkit._internal.tracer import traced

logger = logging.getLogger(__name__)

Key = tuple[int, ...]


class Kind(StrEnum):
    BASE = "base"
    DUAL = "dual"
    FORM = "form"


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    weight: int
    kind: Kind
    form: int = 0

    @property
    def total_degree(self) -> int:
        return self.degree + self.form

    @property
    def parity(self) -> int:
        return self.total_degree % 2


def koszul_sign(permutation: Sequence[tuple[int, int]]) -> int:
    """
    Sign of reordering graded symbols.

    Args:
        permutation: the symbols in their new order, each given as (original position, degree)

    Returns:
        +1 or -1, the product of (-1)^{|a||b|} over every pair whose order was swapped
    """
    positions = [position for position, _ in permutation]
    if sorted(positions) != list(range(len(positions))):
        raise ShapeError(f"Not a permutation: {positions}")
    sign = 1
    for i in range(len(permutation)):
        for j in range(i + 1, len(permutation)):
            if permutation[i][0] > permutation[j][0] and permutation[i][1] % 2 and permutation[j][1] % 2:
                sign = -sign
    return sign


class GeneratorTable:
    """Ordered generators of a free graded-commutative algebra over a base ring"""

    def __init__(self, ring: BaseRing, generators: Iterable[Generator]):
        declared = list(generators)
        names = list(ring.names) + [g.name for g in declared]
        if len(set(names)) != len(names):
            raise ShapeError(f"Generator names are not unique: {names}")
        for g in declared:
            if g.kind is Kind.BASE:
                raise ShapeError(f"Base coordinate {g.name!r} must come from the ring")
            if not GRADEDKIT_MIN_DEGREE <= g.degree <= GRADEDKIT_MAX_DEGREE:
                raise ShapeError(
                    f"Generator {g.name!r} has degree {g.degree} "
                    f"outside [{GRADEDKIT_MIN_DEGREE}, {GRADEDKIT_MAX_DEGREE}]"
                )
            if g.weight < 0:
                raise ShapeError(f"Generator {g.name!r} has negative weight")
            if g.kind is Kind.DUAL and g.weight != 1:
                raise ShapeError(f"Dual generator {g.name!r} must have weight one")

        order = {g.name: i for i, g in enumerate(declared)}
        duals = sorted((g for g in declared if g.kind is Kind.DUAL), key=lambda g: (g.degree, order[g.name]))
        forms = [g for g in declared if g.kind is Kind.FORM]

        self.ring = ring
        self.base = tuple(Generator(name, 0, 0, Kind.BASE) for name in ring.names)
        self.algebra = tuple(duals + forms)
        self._position = {g.name: i for i, g in enumerate(self.algebra)}
        self._parity = tuple(g.parity for g in self.algebra)
        self._hash = hash((ring, self.algebra))

    def __eq__(self, other):
        return self is other or (
            isinstance(other, GeneratorTable) and self.ring == other.ring and self.algebra == other.algebra
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"GeneratorTable({', '.join(g.name for g in self.generators)})"

    @property
    def generators(self) -> tuple[Generator, ...]:
        return self.base + self.algebra

    @property
    def size(self) -> int:
        return len(self.algebra)

    def __contains__(self, name: str) -> bool:
        return name in self._position or name in self.ring.names

    def get(self, name: str) -> Generator:
        if name in self._position:
            return self.algebra[self._position[name]]
        if name in self.ring.names:
            return self.base[self.ring.index(name)]
        raise ShapeError(f"Unknown generator {name!r} in {self!r}")

    def position(self, name: str) -> int:
        try:
            return self._position[name]
        except KeyError:
            raise ShapeError(f"{name!r} is not an algebra generator of {self!r}") from None

    def of_kind(self, kind: Kind) -> tuple[Generator, ...]:
        return tuple(g for g in self.generators if g.kind is kind)

    # Monomial bookkeeping

    def unit_key(self) -> Key:
        return (0,) * len(self.algebra)

    def key_degree(self, key: Key) -> int:
        return sum(e * g.degree for e, g in zip(key, self.algebra) if e)

    def key_weight(self, key: Key) -> int:
        return sum(e * g.weight for e, g in zip(key, self.algebra) if e)

    def key_form(self, key: Key) -> int:
        return sum(e * g.form for e, g in zip(key, self.algebra) if e)

    def key_parity(self, key: Key) -> int:
        return sum(e * p for e, p in zip(key, self._parity) if e) % 2

    def key_names(self, key: Key) -> list[str]:
        """Generator names of a monomial with multiplicity, in canonical order"""
        return [g.name for e, g in zip(key, self.algebra) for _ in range(e)]

    def multiply_keys(self, left: Key, right: Key) -> tuple[int, Key | None]:
        """Sign and key of the product of two canonical monomials; sign 0 when an odd generator repeats"""
        sign = 1
        odd_after = 0
        # walk right to left, counting odd generators of the left factor past each odd one of the right
        for i in range(len(left) - 1, -1, -1):
            if not self._parity[i]:
                continue
            if left[i] and right[i]:
                return 0, None
            if right[i] and odd_after % 2:
                sign = -sign
            if left[i]:
                odd_after += 1
        return sign, tuple(a + b for a, b in zip(left, right))

    def key_of(self, names: Sequence[str]) -> tuple[int, Key | None]:
        """Sign and key of the ordered product of the named algebra generators"""
        sign, key = 1, self.unit_key()
        for name in names:
            single = [0] * len(self.algebra)
            single[self.position(name)] = 1
            factor, key = self.multiply_keys(key, tuple(single))
            if not factor:
                return 0, None
            sign *= factor
        return sign, key

    # Element constructors

    def zero(self) -> "GCAElement":
        return GCAElement(self, {})

    def one(self) -> "GCAElement":
        return self.scalar(1)

    def scalar(self, f) -> "GCAElement":
        return GCAElement(self, {self.unit_key(): self.ring.coerce(f)})

    def unit(self, key: Key, coeff=1) -> "GCAElement":
        return GCAElement(self, {key: self.ring.coerce(coeff)})

    def generator(self, name: str) -> "GCAElement":
        if name in self.ring.names:
            return self.scalar(self.ring.gen(name))
        return self.monomial([name])

    def monomial(self, names: Sequence[str], coeff=1) -> "GCAElement":
        sign, key = self.key_of(names)
        if not sign:
            return self.zero()
        return GCAElement(self, {key: self.ring.coerce(coeff) * sign})


class GCAElement:
    """Element of a free graded-commutative algebra: canonical monomial key to coefficient"""

    __slots__ = ("table", "terms")

    def __init__(self, table: GeneratorTable, terms: Mapping[Key, Poly]):
        self.table = table
        self.terms = {key: coeff for key, coeff in terms.items() if coeff}

    def _check(self, other: "GCAElement") -> None:
        if self.table is not other.table and self.table != other.table:
            raise ShapeError(f"Mismatched generator tables {self.table!r} and {other.table!r}")

    def __eq__(self, other):
        return isinstance(other, GCAElement) and self.table == other.table and self.terms == other.terms

    __hash__ = None

    def __add__(self, other: "GCAElement") -> "GCAElement":
        self._check(other)
        terms = dict(self.terms)
        zero = self.table.ring.zero
        for key, coeff in other.terms.items():
            terms[key] = terms.get(key, zero) + coeff
        return GCAElement(self.table, terms)

    def __sub__(self, other: "GCAElement") -> "GCAElement":
        return self + (-other)

    def __neg__(self) -> "GCAElement":
        return GCAElement(self.table, {key: -coeff for key, coeff in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, GCAElement):
            return gca_multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, f) -> "GCAElement":
        f = self.table.ring.coerce(f)
        return GCAElement(self.table, {key: f * coeff for key, coeff in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, key: Key) -> Poly:
        return self.terms.get(key, self.table.ring.zero)

    def constant(self) -> Poly:
        return self.coefficient(self.table.unit_key())

    def homogeneous(
        self, degree: int | None = None, weight: int | None = None, form: int | None = None
    ) -> "GCAElement":
        """The component of the given internal degree, weight and form degree"""
        table = self.table
        return GCAElement(
            table,
            {
                key: coeff
                for key, coeff in self.terms.items()
                if (degree is None or table.key_degree(key) == degree)
                and (weight is None or table.key_weight(key) == weight)
                and (form is None or table.key_form(key) == form)
            },
        )

    def bidegrees(self) -> set[tuple[int, int]]:
        """(internal degree, weight) pairs of the nonzero components"""
        return {(self.table.key_degree(k), self.table.key_weight(k)) for k in self.terms}

    def total_degrees(self) -> set[int]:
        return {self.table.key_degree(k) + self.table.key_form(k) for k in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.bidegrees()) <= 1 and len(self.total_degrees()) <= 1

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, reverse=True):
            names = "*".join(self.table.key_names(key))
            coeff = self.terms[key]
            parts.append(f"({coeff})*{names}" if names else f"({coeff})")
        return " + ".join(parts)

    __repr__ = __str__


def gca_multiply(a: GCAElement, b: GCAElement) -> GCAElement:
    a._check(b)
    table = a.table
    zero = table.ring.zero
    terms: dict[Key, Poly] = {}
    for left, ca in a.terms.items():
        for right, cb in b.terms.items():
            sign, key = table.multiply_keys(left, right)
            if sign:
                product = ca * cb
                terms[key] = terms.get(key, zero) + (product if sign > 0 else -product)
    return GCAElement(table, terms)


class GradedDerivation:
    """
    Derivation of total Koszul degree ``degree``, determined by its generator values.

    ``values`` maps algebra generator names to their images; ``base_action`` maps base
    coordinate names to the image of the coordinate function and is zero when absent.
    """

    def __init__(
        self,
        table: GeneratorTable,
        degree: int,
        values: Mapping[str, GCAElement],
        base_action: Mapping[str, GCAElement] | None = None,
        weight: int | None = None,
        homogeneous: bool = True,
    ):
        self.table = table
        self.degree = degree
        self.weight = weight
        self.homogeneous = homogeneous
        self.values = dict(values)
        self.base_action = dict(base_action or {})
        self._cache: dict[Key, GCAElement] = {}

        for name, value in list(self.values.items()) + list(self.base_action.items()):
            generator = table.get(name)
            value._check(table.zero())
            if name in self.values and generator.kind is Kind.BASE:
                raise ShapeError(f"Base coordinate {name!r} belongs in the base action")
            if name in self.base_action and generator.kind is not Kind.BASE:
                raise ShapeError(f"{name!r} is not a base coordinate")
            expected = generator.total_degree + degree
            if homogeneous and value.terms and value.total_degrees() != {expected}:
                raise ShapeError(f"Value of {name!r} is not homogeneous of total degree {expected}: {value}")
            if weight is not None and value.terms and {w for _, w in value.bidegrees()} != {generator.weight + weight}:
                raise ShapeError(f"Value of {name!r} does not shift weight by {weight}")

    @property
    def parity(self) -> int:
        return self.degree % 2

    def with_defaults(self) -> "GradedDerivation":
        """The same derivation with explicit zero values for every unset generator"""
        zero = self.table.zero()
        values = {g.name: self.values.get(g.name, zero) for g in self.table.algebra}
        return GradedDerivation(self.table, self.degree, values, self.base_action, self.weight, self.homogeneous)

    def on_generator(self, name: str) -> GCAElement:
        generator = self.table.get(name)
        if generator.kind is Kind.BASE:
            return self.base_action.get(name, self.table.zero())
        try:
            return self.values[name]
        except KeyError:
            raise MissingValueError(f"Derivation has no value on generator {name!r}") from None

    def on_function(self, f: Poly) -> GCAElement:
        """D(f) = sum_i (df/dx_i) D(x_i)"""
        table = self.table
        result = table.zero()
        for index, name in enumerate(table.ring.names):
            action = self.base_action.get(name)
            if action is None or action.is_zero():
                continue
            partial = table.ring.partial(f, index)
            if partial:
                result = result + action.scale(partial)
        return result

    def _on_monomial(self, key: Key) -> GCAElement:
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        table = self.table
        sequence = [i for i, e in enumerate(key) for _ in range(e)]
        result = table.zero()
        prefix_parity = 0
        for s, i in enumerate(sequence):
            generator = table.algebra[i]
            value = self.on_generator(generator.name)
            if value.terms:
                left = [0] * len(key)
                right = [0] * len(key)
                for j in sequence[:s]:
                    left[j] += 1
                for j in sequence[s + 1 :]:
                    right[j] += 1
                term = table.unit(tuple(left)) * value * table.unit(tuple(right))
                result = result + (-term if self.parity and prefix_parity else term)
            prefix_parity ^= generator.parity
        self._cache[key] = result
        return result

    def apply(self, a: GCAElement) -> GCAElement:
        a._check(self.table.zero())
        table = self.table
        result = table.zero()
        for key, coeff in a.terms.items():
            unit = table.unit(key)
            base_part = self.on_function(coeff)
            if base_part.terms:
                result = result + base_part * unit
            monomial_part = self._on_monomial(key)
            if monomial_part.terms:
                result = result + monomial_part.scale(coeff)
        return result

    __call__ = apply

    def __eq__(self, other):
        if not isinstance(other, GradedDerivation) or self.table != other.table:
            return False
        zero = self.table.zero()
        return all(
            self.values.get(g.name, zero) == other.values.get(g.name, zero) for g in self.table.algebra
        ) and all(
            self.base_action.get(n, zero) == other.base_action.get(n, zero) for n in self.table.ring.names
        )

    __hash__ = None

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values.values()) and all(
            v.is_zero() for v in self.base_action.values()
        )

    def _combine(self, other: "GradedDerivation", sign: int) -> "GradedDerivation":
        if self.table != other.table or self.degree != other.degree:
            raise ShapeError("Only derivations of the same degree on the same table can be added")
        zero = self.table.zero()
        values = {
            g.name: self.values.get(g.name, zero) + other.values.get(g.name, zero).scale(sign)
            for g in self.table.algebra
        }
        base = {
            n: self.base_action.get(n, zero) + other.base_action.get(n, zero).scale(sign)
            for n in self.table.ring.names
        }
        homogeneous = self.homogeneous and other.homogeneous
        return GradedDerivation(self.table, self.degree, values, base, homogeneous=homogeneous)

    def __add__(self, other: "GradedDerivation") -> "GradedDerivation":
        return self._combine(other, 1)

    def __sub__(self, other: "GradedDerivation") -> "GradedDerivation":
        return self._combine(other, -1)

    def scale(self, f) -> "GradedDerivation":
        values = {name: value.scale(f) for name, value in self.values.items()}
        base = {name: value.scale(f) for name, value in self.base_action.items()}
        return GradedDerivation(self.table, self.degree, values, base, self.weight, self.homogeneous)

    def __str__(self):
        lines = [f"{name} -> {value}" for name, value in self.base_action.items() if value.terms]
        lines += [f"{g.name} -> {self.values[g.name]}" for g in self.table.algebra if g.name in self.values]
        return "\n".join(lines)


def derivation_apply(D: GradedDerivation, a: GCAElement) -> GCAElement:
    return D.apply(a)


def derivation_commutator(D1: GradedDerivation, D2: GradedDerivation) -> GradedDerivation:
    """Graded commutator D1 D2 - (-1)^{|D1||D2|} D2 D1, returned by its generator values"""
    if D1.table != D2.table:
        raise ShapeError("Commutator of derivations on different generator tables")
    table = D1.table
    sign = -1 if D1.parity and D2.parity else 1
    values = {}
    for g in table.algebra:
        element = table.generator(g.name)
        values[g.name] = D1(D2(element)) - D2(D1(element)).scale(sign)
    base = {}
    for name in table.ring.names:
        element = table.generator(name)
        value = D1(D2(element)) - D2(D1(element)).scale(sign)
        if value.terms:
            base[name] = value
    return GradedDerivation(table, D1.degree + D2.degree, values, base, homogeneous=D1.homogeneous and D2.homogeneous)


def euler_derivation(table: GeneratorTable) -> GradedDerivation:
    """Multiplies each monomial by its internal degree"""
    values = {g.name: table.generator(g.name).scale(g.degree) for g in table.algebra}
    return GradedDerivation(table, 0, values, weight=0)


@traced(GRADEDKIT_SQUARE_ZERO_SPAN_NAME)
def check_square_zero(D: GradedDerivation) -> CheckReport:
    """
    Check D o D = 0 on every generator, base coordinates first.

    D^2 = [D, D] / 2 is itself a derivation, so it vanishes iff it vanishes on generators.
    """
    if not D.parity:
        raise ShapeError(f"Square-zero test needs an odd derivation, got degree {D.degree}")
    table = D.table
    report = CheckReport("square-zero")

    def square(g: Generator) -> Check:
        residual = D(D.on_generator(g.name)) if g.kind is Kind.BASE else D(D(table.generator(g.name)))
        return Check.of(f"D^2({g.name})", ANCHOR_SQUARE_ZERO, residual, witness=g.name)

    report.extend(ordered_map(square, list(table.generators)))
    logger.debug("square-zero check on %s: %s", table, report.verdict)
    return report

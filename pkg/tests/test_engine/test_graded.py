"""
Unit tests for graded-commutative algebras and derivations
"""

import pytest

from gradedkit import MissingValueError, ShapeError, configure
from gradedkit._internal.constants import ANCHOR_SQUARE_ZERO
from gradedkit._internal.core import graded
from gradedkit._internal.core.graded import (
    Generator,
    GeneratorTable,
    GradedDerivation,
    Kind,
    check_square_zero,
    derivation_apply,
    derivation_commutator,
    euler_derivation,
    gca_multiply,
    koszul_sign,
)


@pytest.fixture
def table(plane):
    return GeneratorTable(
        plane,
        [
            Generator("a", 1, 1, Kind.DUAL),
            Generator("b", 1, 1, Kind.DUAL),
            Generator("c", 2, 1, Kind.DUAL),
        ],
    )


class TestKoszulSign:
    """Test koszul_sign function"""

    def test_swapping_odd_symbols(self):
        """Test sign of odd transpositions.

        Tests that swapping two odd symbols gives -1 and two even ones gives +1.
        """
        assert koszul_sign([(1, 1), (0, 1)]) == -1
        assert koszul_sign([(1, 2), (0, 1)]) == 1
        assert koszul_sign([(0, 1), (1, 1)]) == 1

    def test_not_a_permutation(self):
        """Test input validation.

        Tests that repeated positions are rejected.
        """
        with pytest.raises(ShapeError):
            koszul_sign([(0, 1), (0, 1)])


class TestGeneratorTable:
    """Test GeneratorTable class"""

    def test_odd_generators_anticommute(self, table):
        """Test graded commutativity.

        Tests that ab = -ba, a^2 = 0 and odd times even commutes.
        """
        assert table.monomial(["a", "b"]) == -table.monomial(["b", "a"])
        assert table.monomial(["a", "a"]).is_zero()
        assert table.monomial(["a", "c"]) == table.monomial(["c", "a"])
        assert not table.monomial(["c", "c"]).is_zero()

    def test_multiplication_is_associative(self, table, plane):
        """Test associativity.

        Tests (a * xc) * b = a * (xc * b).
        """
        a, b = table.generator("a"), table.generator("b")
        xc = table.generator("c").scale(plane.gen("x"))
        assert (a * xc) * b == a * (xc * b)

    def test_multiply_sums(self, table, plane):
        """Test gca_multiply on sums.

        Tests (a + xb)(a + b) = (1 - x) ab and that a foreign table is rejected.
        """
        a, b = table.generator("a"), table.generator("b")
        x = plane.gen("x")
        assert gca_multiply(a + b.scale(x), a + b) == table.monomial(["a", "b"], 1 - x)

        other = GeneratorTable(plane, [Generator("a", 1, 1, Kind.DUAL)])
        with pytest.raises(ShapeError):
            gca_multiply(a, other.generator("a"))

    def test_name_clash_with_coordinates(self, plane):
        """Test name validation.

        Tests that an algebra generator may not reuse a coordinate name.
        """
        with pytest.raises(ShapeError):
            GeneratorTable(plane, [Generator("x", 1, 1, Kind.DUAL)])

    def test_degree_bounds(self, plane):
        """Test degree validation.

        Tests that generators outside the supported degree range are rejected.
        """
        with pytest.raises(ShapeError):
            GeneratorTable(plane, [Generator("a", 9, 1, Kind.DUAL)])

    def test_dual_weight(self, plane):
        """Test weight validation.

        Tests that dual generators must have weight one.
        """
        with pytest.raises(ShapeError):
            GeneratorTable(plane, [Generator("a", 1, 2, Kind.DUAL)])


class TestGradedDerivation:
    """Test GradedDerivation class"""

    def test_leibniz_rule(self, table):
        """Test graded Leibniz rule.

        Tests D(ab) = D(a)b - aD(b) for an odd derivation and odd a.
        """
        D = GradedDerivation(
            table,
            1,
            {"a": table.monomial(["c"]), "b": table.zero(), "c": table.zero()},
        )
        a, b = table.generator("a"), table.generator("b")
        assert D(a * b) == D(a) * b - a * D(b)

    def test_base_action(self, table, plane):
        """Test action on functions.

        Tests D(x) read from the base action and D(x^2) = 2x D(x).
        """
        x = plane.gen("x")
        D = GradedDerivation(table, 1, {}, {"x": table.generator("a")})
        assert D(table.scalar(x**2)) == table.generator("a").scale(2 * x)

    def test_apply_to_product(self, table):
        """Test derivation_apply.

        Tests that D(ab) = cb when D sends a to c and b to zero.
        """
        D = GradedDerivation(table, 1, {"a": table.generator("c"), "b": table.zero(), "c": table.zero()})
        product = table.generator("a") * table.generator("b")
        assert derivation_apply(D, product) == table.monomial(["c", "b"])

    def test_missing_generator_value(self, table):
        """Test missing values.

        Tests that applying D to a generator without a value raises MissingValueError.
        """
        D = GradedDerivation(table, 1, {"a": table.generator("c")})
        with pytest.raises(MissingValueError):
            derivation_apply(D, table.generator("a") * table.generator("b"))

    def test_inhomogeneous_value_rejected(self, table):
        """Test degree validation.

        Tests that a derivation value of the wrong degree raises ShapeError.
        """
        with pytest.raises(ShapeError):
            GradedDerivation(table, 1, {"a": table.generator("b")})

    def test_commutator_of_euler(self, table):
        """Test graded commutator.

        Tests that the Euler derivation commutes with itself to zero.
        """
        euler = euler_derivation(table)
        assert derivation_commutator(euler, euler).is_zero()
        assert euler(table.monomial(["a", "c"])) == table.monomial(["a", "c"]).scale(3)


class TestSquareZero:
    """Test check_square_zero function"""

    def test_square_zero_passes(self, table):
        """Test a differential.

        Tests that Q(x) = a with Q zero on the algebra generators squares to zero.
        """
        Q = GradedDerivation(
            table,
            1,
            {"a": table.zero(), "b": table.zero(), "c": table.zero()},
            {"x": table.generator("a")},
        )
        report = check_square_zero(Q)
        assert report.passed
        assert len(report.checks) == 5
        assert {check.anchor for check in report.checks} == {ANCHOR_SQUARE_ZERO}

    def test_square_zero_fails(self, table, plane):
        """Test a derivation with nonzero square.

        Tests that Q(x) = a, Q(y) = x b gives Q^2(y) = ab and reports y as the witness.
        """
        x = plane.gen("x")
        Q = GradedDerivation(
            table,
            1,
            {"a": table.zero(), "b": table.zero(), "c": table.zero()},
            {"x": table.generator("a"), "y": table.generator("b").scale(x)},
        )
        report = check_square_zero(Q)
        assert not report.passed
        assert report.first_failure.witness == "y"
        assert [check.passed for check in report.checks] == [True, False, True, True, True]

    def test_generators_checked_on_worker_pool(self, table, plane, mocker):
        """Test the per-generator fan-out.

        Tests that the generator checks go through ordered_map and keep their order on several workers.
        """
        configure(max_workers=4)
        spy = mocker.spy(graded, "ordered_map")
        x = plane.gen("x")
        Q = GradedDerivation(
            table,
            1,
            {"a": table.zero(), "b": table.zero(), "c": table.zero()},
            {"x": table.generator("a"), "y": table.generator("b").scale(x)},
        )
        report = check_square_zero(Q)
        spy.assert_called_once()
        assert [check.check_id for check in report.checks] == ["D^2(x)", "D^2(y)", "D^2(a)", "D^2(b)", "D^2(c)"]
        assert report.first_failure.witness == "y"

    def test_even_derivation_rejected(self, table):
        """Test parity validation.

        Tests that the square-zero check requires an odd derivation.
        """
        with pytest.raises(ShapeError):
            check_square_zero(euler_derivation(table))

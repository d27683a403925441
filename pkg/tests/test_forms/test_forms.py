"""
Unit tests for the forms bicomplex and closed forms
"""

import random

import pytest

from gradedkit import (
    BaseForm,
    ClosedFormsRetract,
    FormsBicomplex,
    LinftyAlgebroid,
    ShapeError,
    VectorField,
    normalize_closed_form,
    realize_closed_form,
)
from gradedkit._internal.constants import ANCHOR_CLOSURE_TOWER
from gradedkit._internal.core.forms import (
    closure_tower,
    de_rham_d_mixed,
    euler_contraction_h,
    form_to_operator,
    internal_delta,
    operator_to_form,
    potential_checks,
    potential_differential,
    symbol_probes,
    twisting_map,
)
from tests.conftest import make_sl2


@pytest.fixture
def translations(plane) -> LinftyAlgebroid:
    """The foliation of the plane by lines parallel to the x-axis"""
    return LinftyAlgebroid(plane, [["e"]], anchor={"e": VectorField.coordinate(plane, "x")}, label="translations")


def random_potential(bicomplex: FormsBicomplex, rng: random.Random, p: int, terms: int = 4):
    """A sum of random monomials of form degree p or p + 1 and internal degree at most two"""
    table = bicomplex.table
    ring = table.ring
    duals = [g.name for g in table.algebra if g.name.startswith("xi_")]
    coordinate_forms = ["d" + x for x in ring.names]
    dual_forms = ["d" + name for name in duals]
    beta = table.zero()
    while len(beta.terms) < terms:
        form_degree = rng.choice([p, p + 1])
        dual_count = rng.randint(0, 2)
        factors = rng.sample(duals, min(dual_count, len(duals)))
        internal = len(factors)
        for _ in range(form_degree):
            factor = rng.choice(coordinate_forms + dual_forms if internal < 2 else coordinate_forms)
            internal += factor in dual_forms
            factors.append(factor)
        coeff = rng.randint(-2, 2) * ring.gen(rng.choice(ring.names)) ** rng.randint(0, 2)
        beta = beta + table.monomial(factors, coeff)
    return beta


class TestFormsBicomplex:
    """Test FormsBicomplex class"""

    @pytest.mark.parametrize("name", ["sl2", "action", "translations"])
    def test_bicomplex_identities(self, name, request):
        """Test d^2 = 0, delta^2 = 0 and d delta = delta d.

        Tests the bicomplex identities on every generator of the forms algebra.
        """
        bicomplex = FormsBicomplex(request.getfixturevalue(name))
        report = bicomplex.check_bicomplex()
        assert report.passed, report.first_failure

    def test_generator_parities(self, translations):
        """Test Koszul parity of form generators.

        Tests that xi_e and dx anticommute with themselves while dxi_e commutes.
        """
        table = FormsBicomplex(translations).table
        assert table.monomial(["xi_e", "xi_e"]).is_zero()
        assert table.monomial(["dx", "dx"]).is_zero()
        assert not table.monomial(["dxi_e", "dxi_e"]).is_zero()
        assert table.monomial(["dx", "dy"]) == -table.monomial(["dy", "dx"])

    def test_delta_on_coordinate_form(self, translations):
        """Test the internal differential on dx.

        Tests that the Koszul extension used by the total differential gives delta(dx) = -dxi_e for the anchor d/dx.
        """
        bicomplex = FormsBicomplex(translations)
        table = bicomplex.table
        assert bicomplex.delta(table.coordinate_form("x")) == -table.dual_form("e")
        assert bicomplex.delta(table.coordinate_form("y")).is_zero()

    def test_potential(self, translations):
        """Test the image of the Euler homotopy.

        Tests that xi_e is a potential while dxi_e and y are not.
        """
        bicomplex = FormsBicomplex(translations)
        table = bicomplex.table
        assert bicomplex.is_potential(table.dual("e"))
        assert not bicomplex.is_potential(table.dual_form("e"))
        assert not bicomplex.is_potential(table.scalar(bicomplex.ring.gen("y")))
        assert bicomplex.h(table.dual_form("e")) == table.dual("e")

    def test_components_by_bidegree(self, translations):
        """Test bidegree splitting.

        Tests that a mixed form splits into (form degree, internal degree) components.
        """
        bicomplex = FormsBicomplex(translations)
        table = bicomplex.table
        omega = table.monomial(["dy"]) + table.monomial(["dxi_e"]) + table.monomial(["xi_e", "dy"])
        assert set(bicomplex.components(omega)) == {(1, 0), (1, 1)}

    @pytest.mark.parametrize("seed", range(5))
    def test_potential_differential_agrees(self, seed, action):
        """Test the three formulas for the potential differential.

        Tests h delta d = -h d delta = (dh - 1) delta on random potentials.
        """
        bicomplex = FormsBicomplex(action)
        rng = random.Random(seed)
        beta = bicomplex.h(bicomplex.d(random_potential(bicomplex, rng, 1)))
        assert all(check.passed for check in potential_checks(beta, bicomplex))

    def test_twisting_map_is_iterated_h_delta(self, translations, plane):
        """Test the twisting map.

        Tests that contracting dx^dy with the anchor equals h delta on the base form.
        """
        bicomplex = FormsBicomplex(translations)
        G = BaseForm.differential(plane, "x", "y")
        expected = bicomplex.h(bicomplex.delta(bicomplex.table.from_base_form(G)))
        assert twisting_map(G, translations, 2) == expected
        assert twisting_map(G, translations, 2) == -bicomplex.table.monomial(["xi_e", "dy"])

    def test_twisting_map_degree_validation(self, translations, plane):
        """Test twisting map validation.

        Tests that a base form of degree below p is rejected.
        """
        with pytest.raises(ShapeError):
            twisting_map(BaseForm.differential(plane, "x"), translations, 2)


class TestFormOperations:
    """Test the differentials and the Euler homotopy as functions of a mixed form"""

    def test_de_rham(self, translations, plane):
        """Test de_rham_d_mixed.

        Tests d(y xi_e) = dy xi_e + y dxi_e.
        """
        table = FormsBicomplex(translations).table
        y = plane.gen("y")
        omega = table.dual("e").scale(y)
        expected = table.coordinate_form("y") * table.dual("e") + table.dual_form("e").scale(y)
        assert de_rham_d_mixed(omega) == expected

    def test_internal_delta_extends_ce_differential(self, translations):
        """Test internal_delta.

        Tests that the CE differential is extended to the forms algebra, giving delta(dx) = d(delta x) = dxi_e.
        """
        table = FormsBicomplex(translations).table
        delta = internal_delta(table.coordinate_form("x"), translations.ce_differential)
        assert delta == table.dual_form("e")

    @pytest.mark.parametrize("name", ["sl2", "action", "translations"])
    def test_internal_delta_commutes_with_d(self, name, request):
        """Test delta(da) = d(delta a).

        Tests the commutation and delta^2 = 0 on every coordinate, dual generator and their differentials.
        """
        algebroid = request.getfixturevalue(name)
        bicomplex = FormsBicomplex(algebroid)
        table = bicomplex.table
        elements = [table.scalar(algebroid.ring.gen(x)) for x in algebroid.ring.names]
        elements += [table.dual(e) for e in algebroid.basis]
        elements += [de_rham_d_mixed(a) for a in list(elements)]
        for a in elements:
            delta_a = internal_delta(a, algebroid.ce_differential)
            assert internal_delta(de_rham_d_mixed(a), algebroid.ce_differential) == de_rham_d_mixed(delta_a)
            assert internal_delta(delta_a, bicomplex.delta).is_zero()

    def test_euler_contraction(self, translations):
        """Test euler_contraction_h.

        Tests h(dxi_e) = xi_e, that internal degree zero is killed and that mixed internal degrees are rejected.
        """
        table = FormsBicomplex(translations).table
        assert euler_contraction_h(table.dual_form("e")) == table.dual("e")
        assert euler_contraction_h(table.coordinate_form("y")).is_zero()
        with pytest.raises(ShapeError):
            euler_contraction_h(table.dual_form("e") + table.coordinate_form("y"))

    def test_potential_differential_in_form_degree_zero(self, sl2):
        """Test potential_differential.

        Tests that on a potential of form degree zero it is minus the internal differential.
        """
        bicomplex = FormsBicomplex(sl2)
        xi_h = bicomplex.table.dual("h")
        assert not bicomplex.delta(xi_h).is_zero()
        assert potential_differential(xi_h, bicomplex) == -bicomplex.delta(xi_h)

    def test_potential_differential_rejects_non_potential(self, translations):
        """Test potential validation.

        Tests that dxi_e is rejected.
        """
        bicomplex = FormsBicomplex(translations)
        with pytest.raises(ShapeError):
            potential_differential(bicomplex.table.dual_form("e"), bicomplex)


class TestClosedForms:
    """Test normalize_closed_form and realize_closed_form"""

    def test_normalize_closed_one_form(self, translations, plane):
        """Test normalization of dy + dxi_e.

        Tests that the potential is xi_e and the base part is dy.
        """
        bicomplex = FormsBicomplex(translations)
        table = bicomplex.table
        omega = table.monomial(["dy"]) + table.monomial(["dxi_e"])
        normalized = normalize_closed_form(omega, bicomplex, 1)
        assert normalized.potential == table.dual("e")
        assert normalized.base_forms == [BaseForm.differential(plane, "y")]

    def test_normalize_rejects_open_form(self, translations):
        """Test closure validation.

        Tests that dx, whose internal differential is -dxi_e, is rejected.
        """
        bicomplex = FormsBicomplex(translations)
        with pytest.raises(ShapeError) as exc_info:
            normalize_closed_form(bicomplex.table.coordinate_form("x"), bicomplex, 1)
        assert "closure(1)" in str(exc_info.value)

    def test_closure_checks_below_p(self, translations):
        """Test the truncation condition.

        Tests that a function component is reported when p = 1.
        """
        bicomplex = FormsBicomplex(translations)
        retract = ClosedFormsRetract(bicomplex, 1)
        checks = retract.closure_checks(bicomplex.table.scalar(bicomplex.ring.gen("y")))
        assert not checks[0].passed
        assert {check.anchor for check in checks} == {ANCHOR_CLOSURE_TOWER}

    def test_retract_requires_positive_p(self, translations):
        """Test p validation.

        Tests that closed 0-forms are rejected.
        """
        with pytest.raises(ShapeError):
            ClosedFormsRetract(FormsBicomplex(translations), 0)

    @pytest.mark.parametrize("index", range(25))
    def test_normalize_realize_round_trip(self, index, plane):
        """Test the closed-forms retract on exact cocycles.

        Tests that realizing a normalized cocycle gives a cocycle with the same normal form.
        """
        rng = random.Random(index)
        algebroids = [
            make_sl2(plane),
            LinftyAlgebroid(
                plane,
                [["p", "q"]],
                anchor={"p": VectorField.coordinate(plane, "x"), "q": VectorField.from_mapping(plane, {"x": plane.gen("x")})},
                brackets={("p", "q"): {"p": 1}},
            ),
            LinftyAlgebroid(plane, [["e"]], anchor={"e": VectorField.coordinate(plane, "x")}),
        ]
        bicomplex = FormsBicomplex(algebroids[index % 3])
        p = 1 + index % 2
        omega = bicomplex.total(random_potential(bicomplex, rng, p))

        normalized = normalize_closed_form(omega, bicomplex, p)
        realized = realize_closed_form(normalized, bicomplex)

        assert bicomplex.total(realized).is_zero()
        assert all(form >= p for form, _ in bicomplex.components(realized))
        assert normalize_closed_form(realized, bicomplex, p) == normalized

    def test_closure_tower_components(self, translations):
        """Test splitting into the closure tower.

        Tests that the tower lists components from form degree p upward, zeros included.
        """
        table = FormsBicomplex(translations).table
        omega = table.monomial(["dx", "dy", "dxi_e"])
        tower = closure_tower(omega, 1)
        assert len(tower) == 3
        assert tower[0].is_zero()
        assert tower[2] == omega


class TestOperators:
    """Test the operator and symbol decomposition of one-forms"""

    def test_round_trip(self, action, plane):
        """Test form to operator and back.

        Tests that a one-form of internal degrees 0, 1 and 2 is rebuilt from its operator and symbol.
        """
        table = FormsBicomplex(action).table
        x, y = plane.gen("x"), plane.gen("y")
        omega = (
            table.monomial(["dy"], x)
            + table.monomial(["xi_p", "dx"])
            + table.monomial(["xi_q", "dy"], y)
            + table.monomial(["dxi_p"], x)
            + table.monomial(["xi_p", "dxi_q"])
        )
        pairs = form_to_operator(omega)
        assert [pair.arity for pair in pairs] == [0, 1, 2]
        assert operator_to_form(pairs, table) == omega
        assert all(check.passed for check in symbol_probes(omega, pairs))

    def test_symbol_of_dual_form(self, translations):
        """Test the symbol of dxi_e.

        Tests that dxi_e has a nonzero symbol on e and no zeroth-order operator part on e.
        """
        table = FormsBicomplex(translations).table
        pairs = form_to_operator(table.dual_form("e"))
        assert pairs[0].arity == 1
        assert pairs[0].symbol[((), "e")]

    def test_rejects_two_forms(self, translations):
        """Test one-form validation.

        Tests that the decomposition rejects forms of form degree two.
        """
        table = FormsBicomplex(translations).table
        with pytest.raises(ShapeError):
            form_to_operator(table.monomial(["dx", "dy"]))

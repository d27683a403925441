"""
Unit tests for Courant algebroids and their morphisms
"""

import pytest

from gradedkit import (
    BaseForm,
    BaseRing,
    CourantData,
    CourantMorphism,
    Section,
    ShapeError,
    Verdict,
    VectorField,
    make_h_twist,
    make_standard,
    verify_courant_axioms,
    verify_courant_morphism,
)
from gradedkit._internal.constants import (
    ANCHOR_BUNDLE_TWIST,
    ANCHOR_COURANT_CLOSED,
    ANCHOR_COURANT_JACOBI,
    ANCHOR_COURANT_PAIRING,
    ANCHOR_MORPHISM_ANCHOR,
    ANCHOR_MORPHISM_ORTHOGONAL,
    ANCHOR_TWO_MORPHISM,
)
from gradedkit._internal.core.courant import (
    courant_product,
    gauge_transform,
    restrict_exact,
    standard_frame,
    verify_bundle_twist,
    verify_exact,
)
from gradedkit._internal.core.ring import rational


class TestCourantData:
    """Test CourantData class"""

    def test_standard_pairing(self, plane):
        """Test the standard pairing.

        Tests <v_x, w_x> = 1/2 and <v_x, w_y> = 0.
        """
        E = make_standard(plane)
        assert E.basis == ("v_x", "v_y", "w_x", "w_y")
        assert E.pair(E.section("v_x"), E.section("w_x")) == plane.const(rational(1, 2))
        assert E.pair(E.section("v_x"), E.section("w_y")) == plane.zero

    def test_dual_anchor(self, plane):
        """Test a*.

        Tests that a*(dx) = 2 w_x so that <a*(dx), v_x> = dx(d/dx) = 1.
        """
        E = make_standard(plane)
        assert E.dual_anchor(BaseForm.differential(plane, "x")) == Section.basis(plane, "w_x", 2)

    def test_dorfman_bracket(self, plane):
        """Test the Leibniz-extended bracket.

        Tests [[v_x, y w_y]] = 0 and [[v_y, y w_y]] = w_y on the standard Courant algebroid.
        """
        E = make_standard(plane)
        y = plane.gen("y")
        assert E.bracket(E.section("v_x"), E.section("w_y", y)).is_zero()
        assert E.bracket(E.section("v_y"), E.section("w_y", y)) == E.section("w_y")

    def test_label_ignored_by_equality(self, plane):
        """Test equality.

        Tests that two standard algebroids with different labels are equal.
        """
        assert make_standard(plane, "one") == make_standard(plane, "two")

    def test_validation(self, plane):
        """Test constructor validation.

        Tests duplicate basis names, coordinate clashes and wrong matrix sizes.
        """
        with pytest.raises(ShapeError):
            CourantData(plane, ["a", "a"], [[1, 0], [0, 1]])
        with pytest.raises(ShapeError):
            CourantData(plane, ["x"], [[1]])
        with pytest.raises(ShapeError):
            CourantData(plane, ["a", "b"], [[1, 0]])

    def test_twist_needs_three_form(self, plane):
        """Test twist validation.

        Tests that twisting by a 2-form is rejected.
        """
        with pytest.raises(ShapeError):
            make_h_twist(make_standard(plane), BaseForm.differential(plane, "x", "y"))


class TestCourantAxioms:
    """Test verify_courant_axioms function"""

    def test_standard_passes(self, space):
        """Test the standard Courant algebroid.

        Tests that T + T^v with the Dorfman bracket satisfies every axiom.
        """
        report = verify_courant_axioms(make_standard(space))
        assert report.passed
        assert report.by_anchor(ANCHOR_COURANT_JACOBI)

    def test_standard_on_plane(self, plane):
        """Test the standard Courant algebroid on the plane.

        Tests that inverting the constant Gram matrix over Q[x, y] works for the axioms and for a*.
        """
        E = make_standard(plane)
        assert verify_courant_axioms(E).passed
        assert E.dual_anchor(BaseForm.differential(plane, "y")) == Section.basis(plane, "w_y", 2)

    def test_twisted_passes(self, space):
        """Test an H-twisted Courant algebroid.

        Tests that twisting by x dx^dy^dz keeps every axiom.
        """
        H = BaseForm.differential(space, "x", "y", "z", coeff=space.gen("x"))
        assert verify_courant_axioms(make_h_twist(make_standard(space), H)).passed

    def test_twist_without_four_form_fails(self):
        """Test Jacobi twisted by K.

        Tests that dropping K = dH from a twist by a non-closed H breaks Jacobi.
        """
        ring = BaseRing(["x", "y", "z", "u"])
        H = BaseForm.differential(ring, "x", "y", "z", coeff=ring.gen("u"))
        twisted = make_h_twist(make_standard(ring), H)
        assert verify_courant_axioms(twisted).passed

        untwisted = CourantData(ring, twisted.basis, twisted.gram, twisted.anchor, twisted.brackets)
        report = verify_courant_axioms(untwisted)
        assert ANCHOR_COURANT_JACOBI in report.failed_anchors()
        assert ANCHOR_COURANT_CLOSED not in report.failed_anchors()

    def test_non_symmetric_pairing(self):
        """Test pairing validation.

        Tests that a non-symmetric Gram matrix fails and stops further checks.
        """
        ring = BaseRing(["x"])
        E = CourantData(ring, ["a", "b"], [[1, 1], [0, 1]])
        report = verify_courant_axioms(E)
        assert [check.anchor for check in report.failures()] == [ANCHOR_COURANT_PAIRING]
        assert not report.by_anchor(ANCHOR_COURANT_JACOBI)


class TestExactness:
    """Test verify_exact, standard frames, restriction and products"""

    def test_standard_is_exact(self, space):
        """Test strict exactness.

        Tests that the standard Courant algebroid is strictly exact.
        """
        assert verify_exact(make_standard(space)).verdict is Verdict.STRICT_PASS

    def test_sampled_exactness(self, space):
        """Test sampled mode.

        Tests that sampled mode gives a sampled pass.
        """
        assert verify_exact(make_standard(space), mode="sampled").verdict is Verdict.SAMPLED_PASS

    def test_degenerate_anchor(self):
        """Test rank failure.

        Tests that the anchor x d/dx drops rank at the origin.
        """
        ring = BaseRing(["x"])
        E = CourantData(
            ring,
            ["v", "w"],
            [[0, rational(1, 2)], [rational(1, 2), 0]],
            anchor={"v": VectorField.from_mapping(ring, {"x": ring.gen("x")})},
        )
        report = verify_exact(E)
        assert report.verdict is Verdict.FAIL
        assert report.first_failure.witness == "('0',)"

    def test_standard_frame(self, plane):
        """Test frame detection.

        Tests that each coordinate is paired with its v and w basis elements.
        """
        assert standard_frame(make_standard(plane)) == {"x": ("v_x", "w_x"), "y": ("v_y", "w_y")}

    def test_restrict_to_plane(self, space, plane):
        """Test restriction to a coordinate subspace.

        Tests that restricting the standard algebroid to z = 0 gives the standard algebroid of the plane.
        """
        restricted = restrict_exact(make_standard(space), ["z"])
        expected = make_standard(plane)
        assert restricted.basis == expected.basis
        assert restricted.gram == expected.gram
        assert restricted.anchor == expected.anchor
        assert not restricted.brackets

    def test_product(self, plane):
        """Test products of Courant algebroids.

        Tests that the product of two standard lines is an exact Courant algebroid over the plane.
        """
        E = courant_product(make_standard(BaseRing(["x"])), make_standard(BaseRing(["y"])))
        assert E.ring.names == plane.names
        assert verify_courant_axioms(E).passed
        assert verify_exact(E).passed

    def test_product_needs_disjoint_coordinates(self, plane):
        """Test product validation.

        Tests that factors sharing coordinates are rejected.
        """
        with pytest.raises(ShapeError):
            courant_product(make_standard(plane), make_standard(BaseRing(["y"])))


class TestCourantMorphism:
    """Test CourantMorphism, gauge transformations and bundle twists"""

    def test_identity_passes(self, space):
        """Test the identity 1-morphism.

        Tests that the identity with H = 0 passes.
        """
        assert verify_courant_morphism(CourantMorphism.identity(make_standard(space))).passed

    def test_anchor_and_pairing_failures(self, plane):
        """Test a map that moves v_x and rescales w_x.

        Tests that the anchor and orthogonality checks both fail.
        """
        E = make_standard(plane)
        images = {n: E.section(n) for n in E.basis}
        images["v_x"] = E.section("v_y")
        images["w_x"] = E.section("w_x", 2)
        report = verify_courant_morphism(CourantMorphism(E, E, images))
        assert {ANCHOR_MORPHISM_ANCHOR, ANCHOR_MORPHISM_ORTHOGONAL} <= set(report.failed_anchors())

    def test_identity_into_twist(self, space):
        """Test the 3-form of a morphism.

        Tests that the identity from E to E twisted by H is a 1-morphism exactly when it carries H.
        """
        E = make_standard(space)
        H = BaseForm.differential(space, "x", "y", "z", coeff=space.gen("y"))
        twisted = make_h_twist(E, H)
        assert verify_courant_morphism(CourantMorphism.identity(E, twisted, H)).passed
        assert not verify_courant_morphism(CourantMorphism.identity(E, twisted)).passed

    def test_gauge_transform_is_two_morphism(self, space):
        """Test gauge transformations.

        Tests that B = x dy^dz is a 2-morphism from the identity to its gauge transform.
        """
        m = CourantMorphism.identity(make_standard(space))
        B = BaseForm.differential(space, "y", "z", coeff=space.gen("x"))
        other = gauge_transform(m, B)
        report = verify_courant_morphism(m, other, B)
        assert report.passed, report.first_failure
        assert report.by_anchor(ANCHOR_TWO_MORPHISM)

    def test_wrong_two_morphism(self, space):
        """Test 2-morphism failure.

        Tests that the gauge transform by B is not related to the identity through 2B.
        """
        m = CourantMorphism.identity(make_standard(space))
        B = BaseForm.differential(space, "y", "z", coeff=space.gen("x"))
        report = verify_courant_morphism(m, gauge_transform(m, B), B.scale(2))
        assert ANCHOR_TWO_MORPHISM in report.failed_anchors()

    def test_two_morphism_validation(self, space):
        """Test 2-morphism endpoint validation.

        Tests that B is required and that both 1-morphisms share source and target objects.
        """
        E = make_standard(space)
        m = CourantMorphism.identity(E)
        B = BaseForm.differential(space, "x", "y")
        with pytest.raises(ShapeError):
            verify_courant_morphism(m, gauge_transform(m, B))
        with pytest.raises(ShapeError):
            verify_courant_morphism(m, CourantMorphism.identity(make_standard(space)), B)

    def test_composition(self, space):
        """Test composition of gauge transformations.

        Tests that composing gauge transforms adds their 3-forms.
        """
        E = make_standard(space)
        B1 = BaseForm.differential(space, "y", "z", coeff=space.gen("x"))
        B2 = BaseForm.differential(space, "x", "z", coeff=space.gen("y"))
        m = CourantMorphism.identity(E)
        composed = gauge_transform(m, B1).compose(gauge_transform(m, B2))
        expected = gauge_transform(m, B1 + B2)
        assert composed.H == expected.H
        assert all(composed(E.section(n)) == expected(E.section(n)) for n in E.basis)


class TestBundleTwist:
    """Test verify_bundle_twist function"""

    @pytest.fixture
    def three_charts(self, space):
        charts = {i: make_standard(space, f"chart {i}") for i in ("1", "2", "3")}
        x, y, z = (space.gen(n) for n in ("x", "y", "z"))
        forms = {
            ("1", "2"): BaseForm.differential(space, "y", "z", coeff=x),
            ("2", "3"): BaseForm.differential(space, "x", "z", coeff=y),
            ("3", "1"): BaseForm.differential(space, "x", "y", coeff=z**2),
        }
        transitions = {
            (i, j): gauge_transform(CourantMorphism.identity(charts[j], charts[i]), B) for (i, j), B in forms.items()
        }
        return charts, transitions, forms

    def test_cocycle_passes(self, three_charts):
        """Test a consistent triple overlap.

        Tests that B_123 = B_12 + B_23 + B_31 passes the cocycle condition.
        """
        charts, transitions, forms = three_charts
        B = forms[("1", "2")] + forms[("2", "3")] + forms[("3", "1")]
        report = verify_bundle_twist(charts, transitions, {("1", "2", "3"): B})
        assert report.passed, report.first_failure
        assert report.by_anchor(ANCHOR_BUNDLE_TWIST)

    def test_cocycle_fails(self, three_charts):
        """Test an inconsistent triple overlap.

        Tests that B_123 = B_12 alone fails under the bundle-twist anchor.
        """
        charts, transitions, forms = three_charts
        report = verify_bundle_twist(charts, transitions, {("1", "2", "3"): forms[("1", "2")]})
        assert set(report.failed_anchors()) == {ANCHOR_BUNDLE_TWIST}

    def test_missing_transition(self, three_charts):
        """Test twist validation.

        Tests that a twist over a loop with a missing transition is rejected.
        """
        charts, transitions, forms = three_charts
        del transitions[("3", "1")]
        with pytest.raises(ShapeError):
            verify_bundle_twist(charts, transitions, {("1", "2", "3"): forms[("1", "2")]})

    def test_transition_between_wrong_charts(self, three_charts):
        """Test transition validation.

        Tests that g_12 must map chart 2 into chart 1.
        """
        charts, transitions, _ = three_charts
        transitions[("1", "2")] = CourantMorphism.identity(charts["1"], charts["2"])
        with pytest.raises(ShapeError):
            verify_bundle_twist(charts, transitions, {})

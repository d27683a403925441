"""
Unit tests for deformation retracts and homotopy transfer
"""

import random

import pytest
from sympy.polys.domains import QQ

from gradedkit import (
    BaseRing,
    DeformationRetract,
    LinftyAlgebroid,
    Section,
    ShapeError,
    VectorField,
    transfer_structure,
    verify_linfty,
    verify_retract,
    verify_transfer,
)
from gradedkit._internal.constants import ANCHOR_RETRACT
from gradedkit._internal.core.ring import rational
from gradedkit._internal.core.transfer import (
    FreeComplex,
    LinearMap,
    algebroid_complex,
    pullback_tangent_complex,
    transport_structure,
)


def contractible_extension(index: int) -> tuple[LinftyAlgebroid, DeformationRetract, dict]:
    """
    A Lie algebra on (h, e, f) extended by a contractible pair d(t) = k u,
    with u appearing in the brackets, retracted back onto (H, E, F).
    """
    rng = random.Random(1000 + index)
    ring = BaseRing(["x"])
    a, b, c, d, s, w = (rng.randint(-3, 3) for _ in range(6))
    k = rng.choice([-3, -2, -1, 1, 2, 3])
    anchor = {"h": VectorField.coordinate(ring, "x")} if index % 2 else {}
    M = LinftyAlgebroid(
        ring,
        [["h", "e", "f", "u"], ["t"]],
        differential={"t": {"u": k}},
        anchor=anchor,
        brackets={
            ("h", "e"): {"e": a, "f": b, "u": s},
            ("h", "f"): {"e": c, "f": d, "u": w},
        },
        label=f"extension {index}",
    )
    r = DeformationRetract(
        M,
        [["H", "E", "F"]],
        i={"H": {"h": 1}, "E": {"e": 1}, "F": {"f": 1}},
        p={"h": {"H": 1}, "e": {"E": 1}, "f": {"F": 1}},
        h={"u": {"t": rational(-1, k)}},
        label="contract",
    )
    return M, r, {"a": a, "b": b, "c": c, "d": d}


class TestDeformationRetract:
    """Test DeformationRetract class"""

    def test_trivial_retract(self, sl2):
        """Test the identity retract.

        Tests that the trivial retract passes and has the source as target.
        """
        r = DeformationRetract.trivial(sl2)
        assert verify_retract(r).passed
        assert r.target.modules == sl2.modules

    def test_target_differential_and_anchor_derived(self, action):
        """Test induced structure on the target.

        Tests that the target anchor is a o i.
        """
        r = DeformationRetract(action, [["P"]], i={"P": {"p": 1}}, p={"p": {"P": 1}})
        assert r.target.anchor["P"] == VectorField.coordinate(action.ring, "x")

    def test_missing_homotopy_fails(self):
        """Test the homotopy identity.

        Tests that dropping h breaks ip - 1 = dh + hd on u and t.
        """
        M, r, _ = contractible_extension(0)
        broken = DeformationRetract(M, r.target_modules, r.i.images, r.p.images, label="no homotopy")
        report = verify_retract(broken)
        assert not report.passed
        assert {check.witness for check in report.failures()} == {"u", "t"}
        assert set(report.failed_anchors()) == {ANCHOR_RETRACT}

    def test_wrong_degree_homotopy(self, sl2):
        """Test degree validation.

        Tests that a homotopy of degree zero is reported before any identity is evaluated.
        """
        identity = {n: {n: 1} for n in sl2.basis}
        r = DeformationRetract(sl2, sl2.modules, identity, identity, h={"h": {"e": 1}})
        report = verify_retract(r)
        assert [check.check_id for check in report.checks] == ["deg h(h)"]

    def test_image_outside_basis(self, sl2):
        """Test map validation.

        Tests that i may not land outside the source basis.
        """
        with pytest.raises(ShapeError):
            DeformationRetract(sl2, [["H"]], i={"H": {"q": 1}}, p={})


class TestTransfer:
    """Test transfer_structure and verify_transfer"""

    def test_trivial_transfer_is_identity(self, sl2):
        """Test transfer along the identity.

        Tests that transferring sl2 along the trivial retract gives back sl2.
        """
        transferred, inclusion = transfer_structure(sl2, DeformationRetract.trivial(sl2))
        assert transferred == sl2
        assert inclusion.max_arity == 1

    @pytest.mark.parametrize("index", range(25))
    def test_contractible_extension(self, index):
        """Test transfer off a contractible pair.

        Tests that the transferred algebroid and the extended inclusion pass and the bracket is the projection.
        """
        M, r, constants = contractible_extension(index)
        assert verify_linfty(M).passed

        report, L, inclusion = verify_transfer(M, r)

        assert report.passed, report.first_failure
        ring = M.ring
        H, E, F = (Section.basis(ring, n) for n in ("H", "E", "F"))
        assert L.bracket(H, E) == Section(ring, {"E": constants["a"], "F": constants["b"]})
        assert L.bracket(H, F) == Section(ring, {"E": constants["c"], "F": constants["d"]})
        assert L.bracket(E, F).is_zero()
        assert inclusion.source is L
        assert inclusion.target is M

    def test_failing_retract_raises(self):
        """Test transfer along a broken retract.

        Tests that transfer_structure raises ShapeError naming the failing identity.
        """
        M, r, _ = contractible_extension(1)
        broken = DeformationRetract(M, r.target_modules, r.i.images, r.p.images)
        with pytest.raises(ShapeError) as exc_info:
            transfer_structure(M, broken)
        assert "ip(" in str(exc_info.value)

    def test_retract_of_other_algebroid(self, sl2, action):
        """Test source validation.

        Tests that the retract must start at the given algebroid.
        """
        with pytest.raises(ShapeError):
            transfer_structure(action, DeformationRetract.trivial(sl2))


class TestTransport:
    """Test transport_structure and free complexes"""

    def test_transport_renames(self, sl2, plane):
        """Test transport along a renaming.

        Tests that sl2 carried to (H, E, F) has the renamed bracket table.
        """
        phi = {"h": {"H": 1}, "e": {"E": 1}, "f": {"F": 1}}
        inverse = {"H": {"h": 1}, "E": {"e": 1}, "F": {"f": 1}}
        renamed = transport_structure(sl2, [["H", "E", "F"]], phi, inverse)
        expected = LinftyAlgebroid(
            plane,
            [["H", "E", "F"]],
            brackets={("H", "E"): {"E": 2}, ("H", "F"): {"F": -2}, ("E", "F"): {"H": 1}},
        )
        assert renamed == expected

    def test_transport_rejects_non_inverse(self, sl2):
        """Test isomorphism validation.

        Tests that a wrong inverse is rejected.
        """
        phi = {"h": {"H": 1}, "e": {"E": 1}, "f": {"F": 1}}
        inverse = {"H": {"h": 2}, "E": {"e": 1}, "F": {"f": 1}}
        with pytest.raises(ShapeError):
            transport_structure(sl2, [["H", "E", "F"]], phi, inverse)

    def test_linear_map_composition(self, plane):
        """Test composition of linear maps.

        Tests (g o f)(a) = g(f(a)) on a two-step map.
        """
        f = LinearMap(plane, ["a"], ["b", "c"], {"a": {"b": 1, "c": plane.gen("x")}})
        g = LinearMap(plane, ["b", "c"], ["d"], {"b": {"d": 2}, "c": {"d": 1}})
        assert g.compose(f).of("a") == Section.basis(plane, "d", 2 + plane.gen("x"))

    def test_pullback_tangent_complex(self, action):
        """Test the anchor complex.

        Tests cohomology ranks of L_0 -> T_U at the origin, where x d/dx vanishes, and away from it.
        """
        complex_ = pullback_tangent_complex(action)
        assert complex_.squares_to_zero()
        assert complex_.cohomology_ranks_at((QQ(0), QQ(0))) == {-1: 1, 0: 1}
        assert complex_.cohomology_ranks_at((QQ(2), QQ(0))) == {-1: 1, 0: 1}

    def test_algebroid_complex_acyclic(self):
        """Test acyclicity of a contractible pair.

        Tests that d(t) = u is acyclic and d(t) = x u is not acyclic at the origin.
        """
        ring = BaseRing(["x"])
        A = LinftyAlgebroid(ring, [["u"], ["t"]], differential={"t": {"u": 1}})
        B = LinftyAlgebroid(ring, [["u"], ["t"]], differential={"t": {"u": ring.gen("x")}})
        assert algebroid_complex(A).is_acyclic_at((QQ(0),))
        assert not algebroid_complex(B).is_acyclic_at((QQ(0),))
        assert algebroid_complex(B).is_acyclic_at((QQ(1),))

    def test_free_complex_degree_validation(self, plane):
        """Test differential validation.

        Tests that a differential skipping a degree is rejected.
        """
        with pytest.raises(ShapeError):
            FreeComplex(plane, {0: ["a"], 2: ["b"]}, {"a": Section.basis(plane, "b")})

"""
Unit tests for the closure equations of two-shifted symplectic data
"""

from itertools import product

import pytest

from gradedkit import (
    BaseForm,
    BaseRing,
    CourantData,
    LinftyAlgebroid,
    MetricConnection,
    Section,
    ShapeError,
    ShiftedSymplecticData,
    VectorField,
    courant_to_symplectic,
    make_h_twist,
    make_standard,
    symplectic_to_courant,
    verify_closure_shift2,
    verify_courant_axioms,
    verify_nondegenerate,
)
from gradedkit._internal.constants import (
    ANCHOR_BRACKET_SKEW,
    ANCHOR_CLOSURE_PAIRING,
    ANCHOR_CLOSURE_TRIPLE,
    ANCHOR_COURANT_INVARIANCE,
    ANCHOR_COURANT_JACOBI,
    ANCHOR_COURANT_LEIBNIZ,
    ANCHOR_COURANT_SYMMETRIC,
    ANCHOR_LINFTY,
)
from gradedkit._internal.core.algebroid import decalage_sign
from gradedkit._internal.core.ring import rational

ALGEBROIDS = ["standard", "twist-x", "twist-yz", "quadratic-kernel"]
CONNECTIONS = ["trivial", "rotating"]


def quadratic_kernel() -> CourantData:
    """
    T + k + T^v over Q[x], rank four, with k = span(k1, k2) split by <k1, k2> = 1/2.

    d/dx acts on k with weights 1 and -1 and [[k1, k2]] = dx.
    """
    ring = BaseRing(["x"])
    half = rational(1, 2)
    gram = [[0, 0, 0, half], [0, 0, half, 0], [0, half, 0, 0], [half, 0, 0, 0]]
    brackets = {
        ("v", "k1"): {"k1": 1},
        ("k1", "v"): {"k1": -1},
        ("v", "k2"): {"k2": -1},
        ("k2", "v"): {"k2": 1},
        ("k1", "k2"): {"w": 1},
        ("k2", "k1"): {"w": -1},
    }
    anchor = {"v": VectorField.coordinate(ring, "x")}
    return CourantData(ring, ["v", "k1", "k2", "w"], gram, anchor, brackets, label="quadratic kernel")


def heisenberg_frame(space) -> CourantData:
    """T + T^v over Q[x,y,z] in the frame d/dx, d/dy + x d/dz, d/dz and dx, dy, dz - x dy"""
    x = space.gen("x")
    half = rational(1, 2)
    gram = [[0] * 6 for _ in range(6)]
    for i in range(3):
        gram[i][3 + i] = gram[3 + i][i] = half
    anchor = {
        "e1": VectorField.coordinate(space, "x"),
        "e2": VectorField.from_mapping(space, {"y": 1, "z": x}),
        "e3": VectorField.coordinate(space, "z"),
    }
    brackets = {
        ("e1", "e2"): {"e3": 1},
        ("e2", "e1"): {"e3": -1},
        ("e1", "f3"): {"f2": -1},
        ("f3", "e1"): {"f2": 1},
        ("e2", "f3"): {"f1": 1},
        ("f3", "e2"): {"f1": -1},
    }
    basis = ["e1", "e2", "e3", "f1", "f2", "f3"]
    return CourantData(space, basis, gram, anchor, brackets, label="heisenberg frame")


def courant_algebroid(space, name: str):
    if name == "quadratic-kernel":
        return quadratic_kernel()
    if name == "heisenberg-frame":
        return heisenberg_frame(space)
    E = make_standard(space)
    x, y, z = (space.gen(n) for n in ("x", "y", "z"))
    if name == "twist-x":
        return make_h_twist(E, BaseForm.differential(space, "x", "y", "z", coeff=x))
    if name == "twist-yz":
        return make_h_twist(E, BaseForm.differential(space, "x", "y", "z", coeff=y * z))
    return E


def connection_on(E, name: str) -> MetricConnection:
    """The trivial connection, or one rotating v_y into w_z along x (k1, k2 scaled by x, -x on the kernel)"""
    if name == "trivial":
        return MetricConnection.trivial(E)
    if "k1" in E.basis:
        x = E.ring.gen("x")
        return MetricConnection(
            E,
            {"x": {"k1": Section.basis(E.ring, "k1", x), "k2": Section.basis(E.ring, "k2", -x)}},
        )
    y = E.ring.gen("y")
    return MetricConnection(
        E,
        {"x": {"v_y": Section.basis(E.ring, "w_z", y), "v_z": Section.basis(E.ring, "w_y", -y)}},
    )


def drop_entries(E: CourantData, keys: list[tuple[str, str]]) -> CourantData:
    """The same Courant data without some bracket table entries"""
    return E.with_brackets({key: value for key, value in E.brackets.items() if key not in keys}, label="mutant")


class CourantWithoutAnchorTerm(CourantData):
    """Courant data whose bracket leaves (a(x) g) y out of [[x, g y]]"""

    def bracket(self, s: Section, t: Section) -> Section:
        result = super().bracket(s, t)
        for x, f in s.items():
            ax = self.anchor.get(x)
            if ax is None:
                continue
            for y, g in t.items():
                result = result - self.section(y, f * ax(g))
        return result


class LinftyWithoutAnchorTerm(LinftyAlgebroid):
    """L-infinity data whose binary bracket leaves the anchor term of the second slot out of the Leibniz rule"""

    def _evaluate(self, sections, symmetric):
        result = super()._evaluate(sections, symmetric)
        if len(sections) != 2:
            return result
        for (x, f), (y, g) in product(sections[0].items(), sections[1].items()):
            ax = self.anchor.get(x)
            if ax is not None:
                sign = decalage_sign([self.degree_of(x), self.degree_of(y)]) if symmetric else 1
                result = result - Section.basis(self.ring, y, f * ax(g) * sign)
        return result


def mutate(data: ShiftedSymplecticData, changes: dict[tuple[str, ...], Section]) -> ShiftedSymplecticData:
    """The same data with some bracket entries overwritten"""
    A = data.algebroid
    brackets = dict(A.brackets)
    brackets.update(changes)
    mutated = LinftyAlgebroid(A.ring, A.modules, A.differential, A.anchor, brackets, label="mutant")
    return ShiftedSymplecticData(2, mutated, phi=data.phi, psi=data.psi, pairing=data.pairing, K=data.K)


def shifted(data: ShiftedSymplecticData, key: tuple[str, ...], name: str, coeff=1) -> Section:
    return data.algebroid.brackets.get(key, Section(data.ring)) + Section.basis(data.ring, name, coeff)


@pytest.fixture
def standard_data(space) -> ShiftedSymplecticData:
    return courant_to_symplectic(make_standard(space))


class TestCourantRoundTrip:
    """Test courant_to_symplectic and symplectic_to_courant"""

    @pytest.mark.parametrize("connection", CONNECTIONS)
    @pytest.mark.parametrize("algebroid", ALGEBROIDS)
    def test_round_trip(self, algebroid, connection, space):
        """Test the Courant and two-shifted correspondence.

        Tests that converting to symplectic data passes the closure equations and converts back to E.
        """
        E = courant_algebroid(space, algebroid)
        nabla = connection_on(E, connection)
        data = courant_to_symplectic(E, nabla)

        report = verify_closure_shift2(data)

        assert report.passed, report.first_failure
        assert symplectic_to_courant(data, nabla) == E

    def test_round_trip_without_connection(self, space):
        """Test the default connection.

        Tests that omitting the connection on the way back also recovers E.
        """
        E = courant_algebroid(space, "twist-yz")
        assert symplectic_to_courant(courant_to_symplectic(E)) == E

    def test_courant_form(self, standard_data, space):
        """Test the shape of the two-shifted data.

        Tests that L_1 is spanned by c_x, c_y, c_z with phi(c_x) = dx and d(c_x) = -w_x.
        """
        A = standard_data.algebroid
        assert A.modules[1] == ("c_x", "c_y", "c_z")
        assert standard_data.phi["c_x"] == BaseForm.differential(space, "x")
        assert A.differential["c_x"] == Section.basis(space, "w_x", -1)

    def test_nondegenerate(self, standard_data):
        """Test nondegeneracy of the converted data.

        Tests that the data coming from the standard Courant algebroid is nondegenerate.
        """
        assert verify_nondegenerate(standard_data).passed

    def test_rejects_non_metric_connection(self, space):
        """Test connection validation.

        Tests that a connection that does not preserve the pairing is rejected.
        """
        E = make_standard(space)
        nabla = MetricConnection(E, {"x": {"v_y": Section.basis(space, "w_y", 1)}})
        assert not nabla.is_metric()
        with pytest.raises(ShapeError):
            courant_to_symplectic(E, nabla)

    def test_rejects_foreign_connection(self, space):
        """Test connection ownership.

        Tests that a connection on a different Courant algebroid is rejected.
        """
        with pytest.raises(ShapeError):
            courant_to_symplectic(make_standard(space), MetricConnection.trivial(make_standard(space)))

    def test_back_conversion_needs_courant_form(self, sl2):
        """Test shape validation on the way back.

        Tests that data without the cotangent L_1 is rejected.
        """
        with pytest.raises(ShapeError):
            symplectic_to_courant(ShiftedSymplecticData(2, sl2))
        with pytest.raises(ShapeError):
            symplectic_to_courant(ShiftedSymplecticData(1, sl2))


class TestClosureMutants:
    """Test verify_closure_shift2 on corrupted bracket tables"""

    @pytest.mark.parametrize("pair", [("v_x", "v_y"), ("v_x", "w_y"), ("w_x", "w_z"), ("v_y", "c_x")])
    def test_skew_mutants(self, pair, standard_data):
        """Test bracket tables that are not skew-symmetric.

        Tests that giving [a, b] and [b, a] the same nonzero value fails under bracket-skew.
        """
        a, b = pair
        value = shifted(standard_data, pair, "w_z")
        report = verify_closure_shift2(mutate(standard_data, {(a, b): value, (b, a): value}))
        assert ANCHOR_BRACKET_SKEW in report.failed_anchors()

    @pytest.mark.parametrize(
        "key,name,coeff",
        [
            (("v_x", "v_y"), "w_z", 1),
            (("v_y", "v_z"), "w_x", 1),
            (("w_x", "w_y"), "v_z", 1),
            (("v_x", "v_z"), "w_y", 2),
        ],
    )
    def test_pairing_mutants(self, key, name, coeff, standard_data):
        """Test brackets that do not preserve the pairing.

        Tests that adding a constant term to a binary bracket fails the pairing equation with a skew table.
        """
        report = verify_closure_shift2(mutate(standard_data, {key: shifted(standard_data, key, name, coeff)}))
        failed = report.failed_anchors()
        assert ANCHOR_CLOSURE_PAIRING in failed
        assert ANCHOR_BRACKET_SKEW not in failed

    @pytest.mark.parametrize(
        "key,name",
        [
            (("v_x", "v_y", "v_z"), "c_x"),
            (("v_x", "v_y", "w_z"), "c_y"),
            (("v_x", "w_y", "w_z"), "c_z"),
            (("w_x", "w_y", "w_z"), "c_x"),
        ],
    )
    def test_ternary_mutants(self, key, name, standard_data):
        """Test corrupted ternary brackets.

        Tests that a ternary bracket with a nonzero differential breaks the L-infinity relations.
        """
        report = verify_closure_shift2(mutate(standard_data, {key: shifted(standard_data, key, name)}))
        assert ANCHOR_LINFTY in report.failed_anchors()

    def test_unmutated_passes(self, standard_data):
        """Test the control case.

        Tests that rebuilding the data without changes still passes, triple equation included.
        """
        report = verify_closure_shift2(mutate(standard_data, {}))
        assert report.passed
        assert report.by_anchor(ANCHOR_CLOSURE_TRIPLE)

    def test_requires_shift_two(self, sl2):
        """Test shift validation.

        Tests that one-shifted data is rejected.
        """
        with pytest.raises(ShapeError):
            verify_closure_shift2(ShiftedSymplecticData(1, sl2))


class TestCourantMutants:
    """Test verify_courant_axioms and verify_closure_shift2 on Courant data with terms removed"""

    @pytest.mark.parametrize("algebroid", ["heisenberg-frame", "quadratic-kernel"])
    def test_fixtures_pass(self, algebroid, space):
        """Test the control cases.

        Tests that both fixtures satisfy the axioms and convert to data passing the closure equations.
        """
        E = courant_algebroid(space, algebroid)
        assert verify_courant_axioms(E).passed
        assert verify_closure_shift2(courant_to_symplectic(E)).passed

    @pytest.mark.parametrize(
        "algebroid,dropped,courant_anchor,closure_anchor",
        [
            ("heisenberg-frame", [("e2", "e1")], ANCHOR_COURANT_SYMMETRIC, ANCHOR_BRACKET_SKEW),
            ("heisenberg-frame", [("f3", "e2")], ANCHOR_COURANT_SYMMETRIC, ANCHOR_BRACKET_SKEW),
            ("quadratic-kernel", [("k2", "k1")], ANCHOR_COURANT_SYMMETRIC, ANCHOR_BRACKET_SKEW),
            ("heisenberg-frame", [("e1", "f3"), ("f3", "e1")], ANCHOR_COURANT_INVARIANCE, ANCHOR_CLOSURE_PAIRING),
            ("heisenberg-frame", [("e2", "f3"), ("f3", "e2")], ANCHOR_COURANT_INVARIANCE, ANCHOR_CLOSURE_PAIRING),
            ("quadratic-kernel", [("k1", "k2"), ("k2", "k1")], ANCHOR_COURANT_INVARIANCE, ANCHOR_CLOSURE_PAIRING),
        ],
    )
    def test_dropped_table_entries(self, algebroid, dropped, courant_anchor, closure_anchor, space):
        """Test deleted bracket terms.

        Tests that removing one side of a skew pair breaks the symmetric part and the skew table,
        and removing both sides breaks invariance of the pairing and the pairing closure equation.
        """
        mutant = drop_entries(courant_algebroid(space, algebroid), dropped)
        assert courant_anchor in verify_courant_axioms(mutant).failed_anchors()
        assert closure_anchor in verify_closure_shift2(courant_to_symplectic(mutant)).failed_anchors()

    def test_lie_derivative_dropped(self, space):
        """Test the Dorfman bracket without L_X b.

        Tests that dropping the Lie-derivative entries [[e1, f3]] and [[e2, f3]] fails invariance
        and leaves a converted table that is not skew.
        """
        mutant = drop_entries(heisenberg_frame(space), [("e1", "f3"), ("e2", "f3")])
        failed = verify_courant_axioms(mutant).failed_anchors()
        assert ANCHOR_COURANT_INVARIANCE in failed
        assert ANCHOR_COURANT_SYMMETRIC in failed
        assert ANCHOR_BRACKET_SKEW in verify_closure_shift2(courant_to_symplectic(mutant)).failed_anchors()

    @pytest.mark.parametrize("algebroid", ["heisenberg-frame", "quadratic-kernel"])
    def test_leibniz_term_dropped(self, algebroid, space):
        """Test brackets without the anchor term of the Leibniz rule.

        Tests that dropping (a(x) g) y fails the Courant Leibniz rule, and dropping the same term
        from the converted binary bracket fails the L-infinity Leibniz checks.
        """
        E = courant_algebroid(space, algebroid)
        mutant = CourantWithoutAnchorTerm(E.ring, E.basis, E.gram, E.anchor, E.brackets, E.K, label="mutant")
        assert ANCHOR_COURANT_LEIBNIZ in verify_courant_axioms(mutant).failed_anchors()

        data = courant_to_symplectic(mutant)
        A = data.algebroid
        stripped = LinftyWithoutAnchorTerm(A.ring, A.modules, A.differential, A.anchor, A.brackets, label="mutant")
        report = verify_closure_shift2(
            ShiftedSymplecticData(2, stripped, phi=data.phi, psi=data.psi, pairing=data.pairing, K=data.K)
        )
        failed = [check.check_id for check in report.failures() if check.anchor == ANCHOR_LINFTY]
        assert any(check_id.startswith("linfty/leibniz") for check_id in failed)

    @pytest.mark.parametrize(
        "coeff,names",
        [("u", ("x", "y", "z")), ("x", ("y", "z", "u")), ("y", ("x", "z", "u"))],
    )
    def test_four_form_dropped(self, coeff, names):
        """Test a twist that loses its four-form.

        Tests that removing K = dH from an H-twisted bracket fails the twisted Jacobi identity and the
        L-infinity relations of the converted data, while the twist with K passes both.
        """
        ring = BaseRing(["x", "y", "z", "u"])
        twisted = make_h_twist(make_standard(ring), BaseForm.differential(ring, *names, coeff=ring.gen(coeff)))
        assert verify_courant_axioms(twisted).passed
        assert verify_closure_shift2(courant_to_symplectic(twisted)).passed

        mutant = CourantData(ring, twisted.basis, twisted.gram, twisted.anchor, twisted.brackets, label="mutant")
        assert ANCHOR_COURANT_JACOBI in verify_courant_axioms(mutant).failed_anchors()
        report = verify_closure_shift2(courant_to_symplectic(mutant))
        assert any(check.check_id.startswith("linfty/Q^2") for check in report.failures())

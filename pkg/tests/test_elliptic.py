import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ratdist import elliptic
from ratdist.elliptic import INFINITY, MAZUR_ORDERS, CubicCurve, CurvePoint
from ratdist.errors import PointNotOnCurve, SingularCurve

from curves import random_curve_with_points
from oracles import MULTIPLES_1_2, chord_sum, sympy_discriminant
from strategies import rationals

X12 = CubicCurve(2, -60, 144)
P1 = CurvePoint(3, 3)


class TestMembership:
    def test_examples(self):
        assert elliptic.contains(X12, P1)
        assert elliptic.contains(X12, INFINITY)
        assert not elliptic.contains(X12, CurvePoint(3, 4))

    def test_partial_point_rejected(self):
        with pytest.raises(ValueError):
            CurvePoint(U=1)


class TestAddition:
    def test_chord_through_special_points(self):
        assert elliptic.add(X12, P1, CurvePoint(0, 12)) == CurvePoint(4, 0)

    def test_identity_and_inverse(self):
        assert elliptic.add(X12, P1, INFINITY) == P1
        assert elliptic.add(X12, INFINITY, P1) == P1
        assert elliptic.add(X12, P1, -P1) == INFINITY

    def test_doubling_matches_table(self):
        assert elliptic.add(X12, P1, P1) == CurvePoint(F(17, 4), F(11, 8))

    def test_two_torsion_doubles_to_infinity(self):
        assert elliptic.add(X12, CurvePoint(4, 0), CurvePoint(4, 0)) == INFINITY

    def test_rejects_singular_curve(self):
        with pytest.raises(SingularCurve):
            elliptic.add(CubicCurve(0, 0, 0), CurvePoint(1, 1), CurvePoint(1, 1))

    def test_rejects_foreign_point(self):
        with pytest.raises(PointNotOnCurve):
            elliptic.add(X12, P1, CurvePoint(3, 4))

    def test_chord_matches_symbolic_oracle(self):
        rng = random.Random(7)
        for _ in range(20):
            curve, (P, Q, _) = random_curve_with_points(rng)
            S = elliptic.add(curve, P, Q)
            assert (S.U, S.W) == chord_sum(curve.A, curve.B, curve.C, (P.U, P.W), (Q.U, Q.W))

    def test_sum_is_collinear_with_summands(self):
        rng = random.Random(11)
        for _ in range(20):
            curve, (P, Q, _) = random_curve_with_points(rng)
            R = -elliptic.add(curve, P, Q)
            # P, Q and -(P+Q) lie on one line
            assert (Q.U - P.U) * (R.W - P.W) == (R.U - P.U) * (Q.W - P.W)


class TestScalarMultiplication:
    def test_table_prefix(self):
        for k, (U, W) in enumerate(MULTIPLES_1_2[:3], start=1):
            assert elliptic.scalar_mul(X12, k, P1) == CurvePoint(F(U), F(W))

    def test_zero_and_negative(self):
        assert elliptic.scalar_mul(X12, 0, P1) == INFINITY
        assert elliptic.scalar_mul(X12, -3, P1) == -elliptic.scalar_mul(X12, 3, P1)

    def test_double_and_add_agrees_with_repeated_addition(self):
        for k, pt in enumerate(elliptic.multiples(X12, P1, 25), start=1):
            assert elliptic.scalar_mul(X12, k, P1) == pt

    @given(st.integers(-15, 15), st.integers(-15, 15))
    def test_linearity(self, k, l):
        lhs = elliptic.scalar_mul(X12, k + l, P1)
        rhs = elliptic.add(X12, elliptic.scalar_mul(X12, k, P1), elliptic.scalar_mul(X12, l, P1))
        assert lhs == rhs


class TestGroupAxioms:
    @pytest.mark.parametrize("seed", range(5))
    def test_axioms_on_random_curves(self, seed):
        rng = random.Random(seed)
        curve, (P, Q, R) = random_curve_with_points(rng)
        add = lambda a, b: elliptic.add(curve, a, b)
        assert add(add(P, Q), R) == add(P, add(Q, R))
        assert add(P, Q) == add(Q, P)
        assert add(P, INFINITY) == P
        assert add(P, -P) == INFINITY
        for S in (add(P, Q), add(add(P, Q), R), elliptic.scalar_mul(curve, 3, R)):
            assert elliptic.contains(curve, S)


class TestTorsion:
    def test_examples(self):
        assert elliptic.torsion_order(X12, CurvePoint(4, 0)) == 2
        assert elliptic.torsion_order(X12, INFINITY) == 1
        assert elliptic.torsion_order(X12, P1) is None

    def test_known_orders(self):
        # y^2 = x^3 + 1: (2, 3) has order 6, (0, 1) order 3, (-1, 0) order 2
        curve = CubicCurve(0, 0, 1)
        assert elliptic.torsion_order(curve, CurvePoint(2, 3)) == 6
        assert elliptic.torsion_order(curve, CurvePoint(0, 1)) == 3
        assert elliptic.torsion_order(curve, CurvePoint(-1, 0)) == 2

    def test_order_four(self):
        # y^2 = x^3 + 4x: (2, 4) has order 4
        assert elliptic.torsion_order(CubicCurve(0, 4, 0), CurvePoint(2, 4)) == 4

    def test_only_mazur_orders(self):
        rng = random.Random(3)
        for _ in range(30):
            curve, pts = random_curve_with_points(rng)
            for P in pts:
                order = elliptic.torsion_order(curve, P)
                assert order is None or order in MAZUR_ORDERS


class TestInvariants:
    @pytest.mark.parametrize(
        "coeffs, value",
        [((0, 0, 0), 0), ((2, -60, 144), 2880), ((0, -3, 2), 0)],
    )
    def test_discriminant_examples(self, coeffs, value):
        assert elliptic.discriminant(CubicCurve(*coeffs)) == value

    def test_discriminant_nonzero(self):
        assert elliptic.discriminant(CubicCurve(0, -1, 0)) != 0

    @given(rationals(50), rationals(50), rationals(50))
    def test_discriminant_matches_sympy(self, A, B, C):
        assert elliptic.discriminant(CubicCurve(A, B, C)) == sympy_discriminant(A, B, C)

    def test_three_real_roots(self):
        assert elliptic.has_three_distinct_real_roots(X12)
        assert not elliptic.has_three_distinct_real_roots(CubicCurve(0, 1, 0))
        assert not elliptic.has_three_distinct_real_roots(CubicCurve(0, -3, 2))
        assert elliptic.has_three_distinct_real_roots(CubicCurve(0, -1, 0))

    @given(rationals(30), rationals(30))
    def test_real_roots_follow_discriminant_sign(self, B, C):
        curve = CubicCurve(0, B, C)
        assert elliptic.has_three_distinct_real_roots(curve) == (elliptic.discriminant(curve) > 0)

    def test_j_anchors(self):
        assert elliptic.j_invariant(CubicCurve(0, 1, 0)) == 1728
        assert elliptic.j_invariant(CubicCurve(0, 0, 1)) == 0

    def test_j_at_family_point(self):
        # A^2 - 3B = 184 and the discriminant is 2880 for (2, -60, 144)
        assert elliptic.j_invariant(X12) * 2880 == 256 * 184**3

    def test_j_singular(self):
        with pytest.raises(SingularCurve):
            elliptic.j_invariant(CubicCurve(0, 0, 0))

    @given(rationals(30), rationals(30), rationals(30), rationals(30))
    def test_j_shift_invariant(self, A, B, C, t):
        curve = CubicCurve(A, B, C)
        if not elliptic.is_nonsingular(curve):
            return
        assert elliptic.j_invariant(elliptic.shift(curve, t)) == elliptic.j_invariant(curve)


class TestSerialization:
    def test_point_json(self):
        pt = CurvePoint(F(-189, 25), F(-2091, 125))
        assert pt.to_json() == {"U": "-189/25", "W": "-2091/125"}
        assert CurvePoint.from_json(pt.to_json()) == pt
        assert CurvePoint.from_json(INFINITY.to_json()) == INFINITY

    def test_curve_json(self):
        assert CubicCurve.from_json(X12.to_json()) == X12

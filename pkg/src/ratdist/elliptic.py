"""Chord-and-tangent arithmetic on W^2 = U^3 + A U^2 + B U + C over the rationals.

Points carry named coordinates ``U`` and ``W`` so that they can never be
transposed when printed.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .errors import PointNotOnCurve, SingularCurve
from .rational_core import format_rational, parse_rational

MAZUR_ORDERS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12)


@dataclass(frozen=True)
class CubicCurve:
    A: Fraction
    B: Fraction
    C: Fraction

    def __post_init__(self):
        for name in ("A", "B", "C"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    def rhs(self, U: Fraction) -> Fraction:
        return ((U + self.A) * U + self.B) * U + self.C

    def to_json(self) -> dict:
        return {k: format_rational(getattr(self, k)) for k in ("A", "B", "C")}

    @classmethod
    def from_json(cls, doc: dict) -> "CubicCurve":
        return cls(*(parse_rational(doc[k]) for k in ("A", "B", "C")))

    def __str__(self):
        return f"W^2 = U^3 + ({self.A})U^2 + ({self.B})U + ({self.C})"


@dataclass(frozen=True)
class CurvePoint:
    """Affine point (U, W), or the point at infinity when both are ``None``."""

    U: Optional[Fraction] = None
    W: Optional[Fraction] = None

    def __post_init__(self):
        if (self.U is None) != (self.W is None):
            raise ValueError("both coordinates or neither")
        if self.U is not None:
            object.__setattr__(self, "U", Fraction(self.U))
            object.__setattr__(self, "W", Fraction(self.W))

    @property
    def is_infinity(self) -> bool:
        return self.U is None

    def __neg__(self) -> "CurvePoint":
        return self if self.is_infinity else CurvePoint(self.U, -self.W)

    def to_json(self) -> dict:
        if self.is_infinity:
            return {"infinity": True}
        return {"U": format_rational(self.U), "W": format_rational(self.W)}

    @classmethod
    def from_json(cls, doc: dict) -> "CurvePoint":
        if doc.get("infinity"):
            return INFINITY
        return cls(parse_rational(doc["U"]), parse_rational(doc["W"]))

    def __repr__(self):
        if self.is_infinity:
            return "CurvePoint(infinity)"
        return f"CurvePoint(U={self.U}, W={self.W})"


INFINITY = CurvePoint()


def discriminant(curve: CubicCurve) -> Fraction:
    A, B, C = curve.A, curve.B, curve.C
    return 18 * A * B * C - 4 * A**3 * C + A * A * B * B - 4 * B**3 - 27 * C * C


def is_nonsingular(curve: CubicCurve) -> bool:
    return discriminant(curve) != 0


def contains(curve: CubicCurve, pt: CurvePoint) -> bool:
    if pt.is_infinity:
        return True
    return pt.W * pt.W == curve.rhs(pt.U)


def _check(curve: CubicCurve, *points: CurvePoint) -> None:
    if discriminant(curve) == 0:
        raise SingularCurve(str(curve))
    for pt in points:
        if not contains(curve, pt):
            raise PointNotOnCurve(f"{pt!r} is not on {curve}")


def _add(curve: CubicCurve, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if P.U == Q.U:
        if P.W != Q.W or P.W == 0:
            return INFINITY
        slope = (3 * P.U * P.U + 2 * curve.A * P.U + curve.B) / (2 * P.W)
    else:
        slope = (Q.W - P.W) / (Q.U - P.U)
    # third intersection of the line with the cubic, reflected in the U-axis
    U = slope * slope - curve.A - P.U - Q.U
    W = -P.W - (U - P.U) * slope
    return CurvePoint(U, W)


def add(curve: CubicCurve, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    _check(curve, P, Q)
    return _add(curve, P, Q)


def _scalar_mul(curve: CubicCurve, k: int, P: CurvePoint) -> CurvePoint:
    if k < 0:
        return _scalar_mul(curve, -k, -P)
    result = INFINITY
    addend = P
    while k:
        if k & 1:
            result = _add(curve, result, addend)
        k >>= 1
        if k:
            addend = _add(curve, addend, addend)
    return result


def scalar_mul(curve: CubicCurve, k: int, P: CurvePoint) -> CurvePoint:
    _check(curve, P)
    return _scalar_mul(curve, int(k), P)


def multiples(curve: CubicCurve, P: CurvePoint, kmax: int) -> Iterator[CurvePoint]:
    """Yield P, 2P, ..., kmax*P by repeated chord additions."""
    _check(curve, P)
    acc = INFINITY
    for _ in range(kmax):
        acc = _add(curve, acc, P)
        yield acc


def torsion_order(curve: CubicCurve, P: CurvePoint, cap: int = 12) -> Optional[int]:
    """Order of P if finite, otherwise ``None``.

    Over the rationals a torsion point has order 1..10 or 12, so looking at the
    first twelve multiples is conclusive.
    """
    _check(curve, P)
    acc = INFINITY
    for k in range(1, cap + 1):
        acc = _add(curve, acc, P)
        if acc.is_infinity:
            if k not in MAZUR_ORDERS:
                raise AssertionError(f"order {k} contradicts Mazur's bound")
            return k
    return None


def has_three_distinct_real_roots(curve: CubicCurve) -> bool:
    A, B, C = curve.A, curve.B, curve.C
    if not A * A - 3 * B > 0:
        return False
    return -A * A * B * B + 4 * B**3 + 4 * A**3 * C - 18 * A * B * C + 27 * C * C < 0


J_CONSTANT = 256


def j_invariant(curve: CubicCurve) -> Fraction:
    disc = discriminant(curve)
    if disc == 0:
        raise SingularCurve(str(curve))
    c4 = curve.A * curve.A - 3 * curve.B
    return J_CONSTANT * c4**3 / disc


def shift(curve: CubicCurve, t) -> CubicCurve:
    """The curve obtained by substituting U -> U + t."""
    t = Fraction(t)
    A, B, C = curve.A, curve.B, curve.C
    return CubicCurve(A + 3 * t, B + 2 * A * t + 3 * t * t, C + B * t + A * t * t + t**3)

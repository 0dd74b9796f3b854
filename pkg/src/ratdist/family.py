"""The two-parameter family of quartics y^2 = x^4 + p x^3 + q x^2 + r x + 1 and their cubic models.

Parameters are ``m`` (cotangent of the angle between the line L and the
base line AC) and ``n`` (the ratio OC/AO).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from . import elliptic
from .elliptic import CubicCurve, CurvePoint
from .errors import ExcludedPoint, NotOnQuartic, PointNotOnCurve, SingularParams
from .rational_core import format_rational, parse_rational


@dataclass(frozen=True)
class FamilyParams:
    m: Fraction
    n: Fraction

    def __post_init__(self):
        object.__setattr__(self, "m", parse_rational(self.m))
        object.__setattr__(self, "n", parse_rational(self.n))

    @property
    def singular(self) -> bool:
        m, n = self.m, self.n
        return n == 0 or n == -1 or (m == 0 and n == 1)

    def require_nonsingular(self) -> None:
        if self.singular:
            raise SingularParams(f"(m, n) = ({self.m}, {self.n}) lies on the discriminant locus")


@dataclass(frozen=True)
class QuarticCurve:
    p: Fraction
    q: Fraction
    r: Fraction

    def value(self, x: Fraction) -> Fraction:
        return (((x + self.p) * x + self.q) * x + self.r) * x + 1

    def contains(self, x, y) -> bool:
        return Fraction(y) ** 2 == self.value(Fraction(x))


def quartic_of(params: FamilyParams) -> QuarticCurve:
    m, n = params.m, params.n
    p = 4 * (1 + n) * m
    q = 4 * (1 + n) ** 2 * m * m + 4 * n * n - 2
    return QuarticCurve(p, q, -p)


def cubic_of(params: FamilyParams) -> CubicCurve:
    m, n = params.m, params.n
    A = 1 - 2 * n * n + (1 + n) ** 2 * m * m
    B = -n * n * (1 + n) * ((1 - n) + 2 * (n + 1) * m * m)
    C = n**4 * (1 + n) ** 2 * m * m
    return CubicCurve(A, B, C)


def cubic_from_quartic(quartic: QuarticCurve) -> CubicCurve:
    """Cubic coefficients computed from (p, q, r) alone, without using (m, n)."""
    p, q, r = quartic.p, quartic.q, quartic.r
    A = (3 * p * p - 8 * q) / 16
    B = (3 * p**4 - 16 * p * p * q + 16 * q * q + 16 * p * r - 64) / 256
    C = ((p**3 - 4 * p * q + 8 * r) / 64) ** 2
    return CubicCurve(A, B, C)


def q_factorization(params: FamilyParams) -> tuple[Fraction, tuple[Fraction, Fraction]]:
    """Q(U) = (U - root) * (U^2 + b U + c); returns ``(root, (b, c))``."""
    m, n = params.m, params.n
    b = m * m * (1 + n) ** 2 - n * n + 1
    c = -m * m * n * n * (1 + n) ** 2
    return n * n, (b, c)


def family_discriminant(params: FamilyParams) -> Fraction:
    m, n = params.m, params.n
    return n**4 * (1 + n) ** 2 * (1 + m * m) * ((1 - n) ** 2 + (1 + n) ** 2 * m * m)


def special_points(params: FamilyParams) -> tuple[CurvePoint, CurvePoint, CurvePoint, CurvePoint]:
    m, n = params.m, params.n
    P1 = CurvePoint(U=n * n - 1, W=m * (1 + n))
    P2 = CurvePoint(U=Fraction(0), W=n * n * (1 + n) * m)
    P3 = CurvePoint(U=n * n, W=Fraction(0))
    return P1, P2, P3, -P1


def on_special_line(params: FamilyParams, pt: CurvePoint) -> bool:
    """Whether ``pt`` lies on W + (1+n) m U = n^2 (1+n) m."""
    m, n = params.m, params.n
    return pt.W + (1 + n) * m * pt.U == n * n * (1 + n) * m


def _w_offset(quartic: QuarticCurve) -> Fraction:
    p, q, r = quartic.p, quartic.q, quartic.r
    return (p**3 - 4 * p * q + 8 * r) / 64


def excluded_quartic_point(params: FamilyParams) -> Optional[tuple[Fraction, Fraction]]:
    """The quartic point with no image under the transform (U = 0), if m != 0."""
    m, n = params.m, params.n
    if m == 0:
        return None
    return -(n - 1) / (2 * m), ((n - 1) ** 2 + 4 * m * m * n * n) / (4 * m * m)


def quartic_to_cubic(params: FamilyParams, x, y) -> CurvePoint:
    x, y = Fraction(x), Fraction(y)
    quartic = quartic_of(params)
    if not quartic.contains(x, y):
        raise NotOnQuartic(f"({x}, {y})")
    m, n = params.m, params.n
    U = -(y - x * x - 2 * (1 + n) * m * x + (1 - 2 * n * n)) / 2
    if U == 0:
        raise ExcludedPoint(f"({x}, {y}) maps to U = 0")
    V = x * U
    W = V + quartic.p / 4 * U + _w_offset(quartic)
    return CurvePoint(U, W)


def _cubic_to_quartic(params: FamilyParams, quartic: QuarticCurve, pt: CurvePoint):
    if pt.is_infinity or pt.U == 0:
        raise ExcludedPoint(f"{pt!r} has no quartic preimage")
    m, n = params.m, params.n
    V = pt.W - quartic.p / 4 * pt.U - _w_offset(quartic)
    x = V / pt.U
    y = -2 * pt.U + x * x + 2 * (1 + n) * m * x + 2 * n * n - 1
    return x, y


def cubic_to_quartic(params: FamilyParams, pt: CurvePoint) -> tuple[Fraction, Fraction]:
    if pt.is_infinity or pt.U == 0:
        raise ExcludedPoint(f"{pt!r} has no quartic preimage")
    curve = cubic_of(params)
    if not elliptic.contains(curve, pt):
        raise PointNotOnCurve(f"{pt!r} is not on {curve}")
    return _cubic_to_quartic(params, quartic_of(params), pt)


def torsion_scan(params: FamilyParams) -> Optional[int]:
    """Order of P1(m, n); ``None`` when it has infinite order."""
    params.require_nonsingular()
    P1 = special_points(params)[0]
    return elliptic.torsion_order(cubic_of(params), P1)


def oval_membership_check(params: FamilyParams) -> bool:
    """Sign certificate that +-P1 and +-P2 sit on the bounded real component."""
    params.require_nonsingular()
    root, (b, c) = q_factorization(params)
    u1 = params.n**2 - 1
    between_quadratic_roots = c <= 0 and u1 * u1 + b * u1 + c <= 0
    left_of_linear_root = u1 <= root and 0 <= root
    return between_quadratic_roots and left_of_linear_root


# -- grid scans ---------------------------------------------------------------

SCAN_COLUMNS = ("m", "n", "singular", "discriminant", "torsion_order", "oval_check")


def grid(lo: Fraction, hi: Fraction, steps: int) -> list[Fraction]:
    if steps < 1:
        raise ValueError("steps must be positive")
    if steps == 1:
        return [Fraction(lo)]
    step = (Fraction(hi) - Fraction(lo)) / (steps - 1)
    return [lo + i * step for i in range(steps)]


def scan_row(params: FamilyParams) -> dict:
    row = {
        "m": format_rational(params.m),
        "n": format_rational(params.n),
        "singular": int(params.singular),
        "discriminant": format_rational(family_discriminant(params)),
        "torsion_order": "",
        "oval_check": 0,
    }
    if not params.singular:
        order = torsion_scan(params)
        row["torsion_order"] = "" if order is None else order
        row["oval_check"] = int(oval_membership_check(params))
    return row


def scan(m_values: Iterable[Fraction], n_values: Iterable[Fraction]) -> list[dict]:
    """Row-major scan (m outer, n inner)."""
    n_values = list(n_values)
    return [scan_row(FamilyParams(m, n)) for m in m_values for n in n_values]


def scan_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SCAN_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()

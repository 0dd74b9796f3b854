"""Exact rationals, rational square roots and rational points on the unit circle.

Exact quantities are :class:`fractions.Fraction` (always stored in lowest
terms with a positive denominator).  Approximation targets and tolerances are
inherently inexact; they live in a private mpmath context with 192 bits of
working precision.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

import mpmath

BigRat = Fraction

# certificate coordinates routinely run to thousands of digits
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

REAL = mpmath.MPContext()
REAL.prec = 192

RealLike = Union[str, int, float, Fraction, "mpmath.mpf"]


def parse_rational(value) -> Fraction:
    """Read ``"num/den"``, an integer/decimal literal, or a rational number exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational")


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def real(value: RealLike):
    """Convert to a high-precision real; decimal strings are read at full precision."""
    if isinstance(value, Fraction):
        return REAL.mpf(value.numerator) / value.denominator
    if isinstance(value, str):
        s = value.strip()
        if "/" in s:
            return real(Fraction(s))
        return REAL.mpf(s)
    return REAL.mpf(value)


def real_to_fraction(x) -> Fraction:
    """Exact value of a binary floating point number."""
    x = REAL.mpf(x)
    if not REAL.isfinite(x):
        raise ValueError("non-finite value")
    sign, man, exp, _ = x._mpf_
    man, exp = (-1) ** sign * int(man), int(exp)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


def _isqrt_exact(n: int) -> Optional[int]:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def is_perfect_square(q) -> Optional[Fraction]:
    """Non-negative rational square root of ``q`` if it exists, else ``None``."""
    q = Fraction(q)
    num = _isqrt_exact(q.numerator)
    if num is None:
        return None
    den = _isqrt_exact(q.denominator)
    if den is None:
        return None
    return Fraction(num, den)


def simplest_between(lo: Fraction, hi: Optional[Fraction]) -> Fraction:
    """The rational of least denominator (then least magnitude) in the open interval (lo, hi).

    ``hi=None`` stands for +infinity.  This walks the Stern-Brocot tree through
    continued fraction expansions of the endpoints.
    """
    if hi is not None and not lo < hi:
        raise ValueError("empty interval")
    if hi is not None and hi <= 0:
        return -simplest_between(-hi, -lo)
    if lo < 0:
        return Fraction(0)
    # 0 <= lo < hi
    fl = lo.numerator // lo.denominator
    if hi is None or fl + 1 < hi:
        return Fraction(fl + 1)
    # lo and hi share the integer part fl and hi <= fl + 1
    frac_lo = lo - fl
    frac_hi = hi - fl
    inner_lo = 1 / frac_hi
    inner_hi = None if frac_lo == 0 else 1 / frac_lo
    return fl + 1 / simplest_between(inner_lo, inner_hi)


def rational_near(x: RealLike, delta: RealLike) -> Fraction:
    """Simplest rational strictly within ``delta`` of the real ``x``."""
    x = real(x)
    delta = real(delta)
    if not delta > 0:
        raise ValueError("delta must be positive")
    # a tiny delta next to a large x needs extra bits for the sum
    with REAL.extraprec(max(0, int(REAL.mag(x) - REAL.mag(delta)) + 8)):
        return simplest_between(real_to_fraction(x - delta), real_to_fraction(x + delta))


@dataclass(frozen=True)
class RationalAngle:
    """An angle whose cosine and sine are both rational."""

    cos: Fraction
    sin: Fraction

    def __post_init__(self):
        object.__setattr__(self, "cos", Fraction(self.cos))
        object.__setattr__(self, "sin", Fraction(self.sin))
        if self.cos * self.cos + self.sin * self.sin != 1:
            raise ValueError(f"({self.cos}, {self.sin}) is not on the unit circle")

    def __add__(self, other: "RationalAngle") -> "RationalAngle":
        return RationalAngle(
            self.cos * other.cos - self.sin * other.sin,
            self.sin * other.cos + self.cos * other.sin,
        )

    def __neg__(self) -> "RationalAngle":
        return RationalAngle(self.cos, -self.sin)

    def __sub__(self, other: "RationalAngle") -> "RationalAngle":
        return self + (-other)

    def supplement(self) -> "RationalAngle":
        """pi minus this angle."""
        return RationalAngle(-self.cos, self.sin)

    @property
    def radians(self):
        return REAL.atan2(real(self.sin), real(self.cos))

    @property
    def tan(self) -> Fraction:
        if self.cos == 0:
            raise ZeroDivisionError("tangent undefined at a quarter turn")
        return self.sin / self.cos

    def to_json(self) -> dict:
        return {"cos": format_rational(self.cos), "sin": format_rational(self.sin)}

    @classmethod
    def from_json(cls, doc: dict) -> "RationalAngle":
        return cls(parse_rational(doc["cos"]), parse_rational(doc["sin"]))


def angle_from_tangent_half(t) -> RationalAngle:
    t = Fraction(t)
    d = 1 + t * t
    return RationalAngle((1 - t * t) / d, 2 * t / d)


HALF_TURN = RationalAngle(-1, 0)


def rational_angle_near(theta: RealLike, delta: RealLike) -> RationalAngle:
    """A rational angle within ``delta`` of ``theta``, of minimal height.

    Among all tangent half-angle values in the admissible window the one with
    the smallest denominator is taken.
    """
    theta = real(theta)
    delta = real(delta)
    if not delta > 0:
        raise ValueError("delta must be positive")
    pi = REAL.pi
    # reduce to (-pi, pi], then to [-pi/2, pi/2] using the exact half turn
    theta = theta - 2 * pi * REAL.floor((theta + pi) / (2 * pi))
    if theta <= -pi:
        theta += 2 * pi
    flip = False
    if theta > pi / 2:
        theta -= pi
        flip = True
    elif theta < -pi / 2:
        theta += pi
        flip = True
    window = min(delta, pi / 4) * (1 - REAL.ldexp(1, -20))
    extra = 0
    while True:
        # very narrow windows need more working bits to stay non-empty
        with REAL.extraprec(extra):
            lo = real_to_fraction(REAL.tan((theta - window) / 2))
            hi = real_to_fraction(REAL.tan((theta + window) / 2))
        if lo < hi:
            break
        extra += REAL.prec
    t = simplest_between(lo, hi)
    angle = angle_from_tangent_half(t)
    return angle + HALF_TURN if flip else angle


def is_member_qtan2(p: int, q: int) -> bool:
    """Whether arctan(q/p) has rational cosine and sine, i.e. p^2 + q^2 is a square."""
    if p == 0 and q == 0:
        raise ValueError("p and q cannot both be zero")
    return _isqrt_exact(p * p + q * q) is not None


def angle_distance(a, b):
    """Distance between two real angles on the circle."""
    d = REAL.fmod(real(a) - real(b), 2 * REAL.pi)
    d = abs(d)
    return min(d, 2 * REAL.pi - d)

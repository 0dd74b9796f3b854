"""Rational point sets in the plane and their certificates.

A certificate stores exact rational coordinates in a private canonical frame
together with the rigid motion (rotation, then translation) that carries it
back onto the user's points.  Distances and area are invariant under the
motion, so all of them can be checked exactly without ever touching the
(generally irrational) user-frame coordinates.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from . import elliptic
from .elliptic import INFINITY, CurvePoint
from .errors import (
    DegeneratePoint,
    ExcludedPoint,
    NotAParallelogram,
    NotATriangle,
    NotOnQuartic,
    SquareRootNotRational,
    ZeroDenominator,
    ZeroInput,
)
from .family import (
    FamilyParams,
    _cubic_to_quartic,
    _w_offset,
    cubic_of,
    quartic_of,
    quartic_to_cubic,
    special_points,
)
from .rational_core import (
    REAL,
    RationalAngle,
    angle_from_tangent_half,
    format_rational,
    _isqrt_exact,
    is_perfect_square,
    parse_rational,
    rational_angle_near,
    rational_near,
    real,
    real_to_fraction,
    simplest_between,
)

GUARD = REAL.ldexp(1, -20)
PLANS = 6  # hub configurations ranked before committing to exact arithmetic
HUBS = 4  # C' placements tried per labelling and attempt
FALLBACK_K = 24  # largest multiple realised when no candidate meets eps


# -- containers ---------------------------------------------------------------


@dataclass(frozen=True)
class PointSet:
    """Labelled input points; coordinates are read exactly from their decimal form."""

    labels: tuple
    coords: tuple

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be unique")
        if len(self.labels) != len(self.coords):
            raise ValueError("one coordinate pair per label")
        coords = tuple((parse_rational(x), parse_rational(y)) for x, y in self.coords)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))

    @classmethod
    def from_points(cls, points: Sequence, labels: Optional[Sequence[str]] = None) -> "PointSet":
        """Build from ``[(x, y), ...]`` or ``[(label, x, y), ...]``."""
        points = list(points)
        if points and len(points[0]) == 3:
            return cls(tuple(p[0] for p in points), tuple((p[1], p[2]) for p in points))
        if labels is None:
            labels = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"[: len(points)]
        return cls(tuple(labels), tuple(points))

    def __len__(self):
        return len(self.labels)

    def point(self, label: str) -> tuple[Fraction, Fraction]:
        return self.coords[self.labels.index(label)]

    def real_point(self, label: str):
        x, y = self.point(label)
        return real(x), real(y)


@dataclass(frozen=True)
class Frame:
    """Rigid motion user = Rot(angle) * canonical + (dx, dy)."""

    angle: object = 0
    dx: object = 0
    dy: object = 0

    def __post_init__(self):
        for name in ("angle", "dx", "dy"):
            object.__setattr__(self, name, real(getattr(self, name)))

    def to_user(self, x, y):
        c, s = REAL.cos(self.angle), REAL.sin(self.angle)
        x, y = real(x), real(y)
        return c * x - s * y + self.dx, s * x + c * y + self.dy

    def to_canonical(self, X, Y):
        c, s = REAL.cos(self.angle), REAL.sin(self.angle)
        X, Y = real(X) - self.dx, real(Y) - self.dy
        return c * X + s * Y, -s * X + c * Y

    def to_json(self) -> dict:
        return {"angle": float(self.angle), "dx": float(self.dx), "dy": float(self.dy)}


IDENTITY = Frame()


@dataclass
class SearchBudget:
    kmax: int = 120
    time_budget: float = 60.0


@dataclass
class RationalCertificate:
    points: list  # [(label, x, y)] in the canonical frame, polygon order
    distances: dict  # {(label, label): Fraction}
    area: Optional[Fraction] = None
    frame: Frame = IDENTITY
    gap: object = 0
    budget_exhausted: bool = False
    hub: Optional[tuple] = None  # diagonal intersection, when the construction has one

    @property
    def labels(self) -> list[str]:
        return [p[0] for p in self.points]

    def coords(self, label: str) -> tuple[Fraction, Fraction]:
        for l, x, y in self.points:
            if l == label:
                return x, y
        raise KeyError(label)

    def distance(self, a: str, b: str) -> Fraction:
        return self.distances[(a, b)] if (a, b) in self.distances else self.distances[(b, a)]

    def user_points(self) -> dict:
        return {l: self.frame.to_user(x, y) for l, x, y in self.points}

    def to_json(self) -> dict:
        doc = {
            "points": [
                {"label": l, "x": format_rational(x), "y": format_rational(y)}
                for l, x, y in self.points
            ],
            "distances": [
                {"from": a, "to": b, "value": format_rational(v)}
                for (a, b), v in self.distances.items()
            ],
            "area": None if self.area is None else format_rational(self.area),
            "frame": self.frame.to_json(),
            "gap": float(self.gap),
            "budget_exhausted": bool(self.budget_exhausted),
        }
        if self.hub is not None:
            doc["hub"] = {"x": format_rational(self.hub[0]), "y": format_rational(self.hub[1])}
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "RationalCertificate":
        points = [(str(p["label"]), parse_rational(p["x"]), parse_rational(p["y"])) for p in doc["points"]]
        distances = {
            (str(d["from"]), str(d["to"])): parse_rational(d["value"]) for d in doc.get("distances", [])
        }
        area = doc.get("area")
        frame = doc.get("frame") or {}
        hub = doc.get("hub")
        return cls(
            points=points,
            distances=distances,
            area=None if area is None else parse_rational(area),
            frame=Frame(frame.get("angle", 0), frame.get("dx", 0), frame.get("dy", 0)),
            gap=real(doc.get("gap", 0)),
            budget_exhausted=bool(doc.get("budget_exhausted", False)),
            hub=None if hub is None else (parse_rational(hub["x"]), parse_rational(hub["y"])),
        )


# -- exact checks -------------------------------------------------------------


# Unreduced (numerator, denominator) pairs.  Certificates carry numbers with
# hundreds of thousands of digits, and Fraction spends nearly all of its time
# in gcd when reducing intermediate results; these helpers reduce at most once.


def _raw(q: Fraction) -> tuple[int, int]:
    return q.numerator, q.denominator


def _radd(p, q):
    return p[0] * q[1] + q[0] * p[1], p[1] * q[1]


def _rneg(p):
    return -p[0], p[1]


def _rmul(p, q):
    return p[0] * q[0], p[1] * q[1]


def _req(p, q) -> bool:
    return p[0] * q[1] == q[0] * p[1]


def _sq_dist_raw(p, q):
    dx = _radd(_raw(p[0]), _rneg(_raw(q[0])))
    dy = _radd(_raw(p[1]), _rneg(_raw(q[1])))
    return _radd(_rmul(dx, dx), _rmul(dy, dy))


def _sq_dist(p, q) -> Fraction:
    return Fraction(*_sq_dist_raw(p, q))


def _shoelace_raw(coords: Sequence):
    s = (0, 1)
    for (x0, y0), (x1, y1) in zip(coords, list(coords[1:]) + [coords[0]]):
        s = _radd(s, _radd(_rmul(_raw(x0), _raw(y1)), _rneg(_rmul(_raw(x1), _raw(y0)))))
    return abs(s[0]), 2 * s[1]


def shoelace_area(coords: Sequence) -> Fraction:
    return Fraction(*_shoelace_raw(coords))


def heron_16_area_sq(a, b, c) -> Fraction:
    a2, b2, c2 = Fraction(a) ** 2, Fraction(b) ** 2, Fraction(c) ** 2
    return 2 * a2 * b2 + 2 * b2 * c2 + 2 * c2 * a2 - a2 * a2 - b2 * b2 - c2 * c2


def verify_reasons(cert: RationalCertificate) -> list[str]:
    """Everything wrong with a certificate; empty when it is valid."""
    reasons = []
    labels = cert.labels
    if len(set(labels)) != len(labels):
        reasons.append("duplicate labels")
    coords = {l: (x, y) for l, x, y in cert.points}
    for a, b in itertools.combinations(labels, 2):
        if (a, b) not in cert.distances and (b, a) not in cert.distances:
            reasons.append(f"distance {a}{b} missing")
    for (a, b), d in cert.distances.items():
        if a not in coords or b not in coords:
            reasons.append(f"distance {a}{b} refers to an unknown point")
            continue
        if not isinstance(d, Fraction):
            reasons.append(f"distance {a}{b} is not an exact rational")
            continue
        if d < 0:
            reasons.append(f"distance {a}{b} = {d} is negative")
        if not _req(_rmul(_raw(d), _raw(d)), _sq_dist_raw(coords[a], coords[b])):
            reasons.append(f"distance {a}{b} = {d} does not match the coordinates")
    if cert.area is not None:
        if not _req(_raw(Fraction(cert.area)), _shoelace_raw([coords[l] for l in labels])):
            reasons.append(f"area {cert.area} does not match the shoelace formula")
    return reasons


def certificate_verify(cert: RationalCertificate) -> bool:
    return not verify_reasons(cert)


def _certify(points: list, area: bool = True, known: Optional[dict] = None, **kw) -> RationalCertificate:
    """Certificate for rational coordinates, with every pairwise distance a rational square root.

    Distances in ``known`` (keyed by unordered label pairs) are checked rather
    than recomputed.
    """
    known = {frozenset(k): v for k, v in (known or {}).items()}
    distances = {}
    for (a, pa), (b, pb) in itertools.combinations([(l, (x, y)) for l, x, y in points], 2):
        d = known.get(frozenset((a, b)))
        if d is not None:
            if d < 0 or not _req(_rmul(_raw(d), _raw(d)), _sq_dist_raw(pa, pb)):
                raise SquareRootNotRational(f"|{a}{b}| = {d} is inconsistent with the coordinates")
        else:
            d = is_perfect_square(_sq_dist(pa, pb))
            if d is None:
                raise SquareRootNotRational(f"|{a}{b}|^2 = {_sq_dist(pa, pb)}")
        distances[(a, b)] = d
    area_value = shoelace_area([(x, y) for _, x, y in points]) if area else None
    return RationalCertificate(points=points, distances=distances, area=area_value, **kw)


def hausdorff_gap(cert: RationalCertificate, target: PointSet):
    """Largest displacement between matched labels, in user coordinates."""
    user = cert.user_points()
    gap = REAL.zero
    for label in target.labels:
        X, Y = target.real_point(label)
        ux, uy = user[label]
        gap = max(gap, REAL.hypot(ux - X, uy - Y))
    return gap


def _within(gap, eps) -> bool:
    return gap * (1 + GUARD) < eps


def _identity_if_rational(shape: PointSet) -> Optional[RationalCertificate]:
    pts = [(l, x, y) for l, (x, y) in zip(shape.labels, shape.coords)]
    try:
        return _certify(pts)
    except SquareRootNotRational:
        return None


# -- small constructions ------------------------------------------------------


def hyperbola_point(a, u) -> tuple[Fraction, Fraction]:
    a, u = Fraction(a), Fraction(u)
    if a == 0 or u == 0:
        raise ZeroInput("a and u must be nonzero")
    return (u + a / u) / 2, (u - a / u) / 2


def line_rational_distance_point(r, angle: RationalAngle, u) -> tuple[Fraction, Fraction]:
    """Point R on a line through P at the given angle to PQ, |PQ| = r.

    Returns ``(q, p)`` with q = |PR| (signed along the line) and p = |QR|.
    """
    r, u = Fraction(r), Fraction(u)
    if r <= 0 or u <= 0:
        raise ValueError("r and u must be positive")
    a = r * r * angle.sin * angle.sin
    p = (u + a / u) / 2
    s = (u - a / u) / 2
    return r * angle.cos + s, p


def _u_for_target(r: Fraction, angle: RationalAngle, q_target):
    """Real u > 0 with q(u) = q_target (q is increasing in u)."""
    a = real(r * r * angle.sin * angle.sin)
    s = real(q_target) - real(r * angle.cos)
    return s + REAL.sqrt(s * s + a)


def euler_triangle(p: int, q: int, r: int, s: int, sign: int = 1) -> RationalCertificate:
    """Rational-area triangle from the side proportions of Euler's theorem.

    ``sign=+1`` takes the upper signs (ps + rq)(pr - qs), ``sign=-1`` the lower.
    The sides are scaled to the primitive integer triangle.
    """
    if not (p > q > 0 and r >= s > 0):
        raise NotATriangle("need p > q > 0 and r >= s > 0")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a = Fraction(r * r + s * s, r * s)
    b = Fraction((p * s + sign * r * q) * (p * r - sign * q * s), p * q * r * s)
    c = Fraction(p * p + q * q, p * q)
    if b <= 0:
        raise NotATriangle(f"middle term {b} is not positive")
    if not (a < b + c and b < a + c and c < a + b):
        raise NotATriangle(f"sides {a}, {b}, {c} violate the triangle inequality")
    den = 1
    for v in (a, b, c):
        den = den * v.denominator // _gcd(den, v.denominator)
    ints = [int(v * den) for v in (a, b, c)]
    g = _gcd(_gcd(ints[0], ints[1]), ints[2])
    a, b, c = (Fraction(v, g) for v in ints)
    area = is_perfect_square(heron_16_area_sq(a, b, c))
    if area is None:
        raise SquareRootNotRational(f"Heron area of ({a}, {b}, {c}) is irrational")
    area /= 4
    # B at the origin, C on the axis, A above
    x = (a * a + c * c - b * b) / (2 * a)
    y = 2 * area / a
    points = [("A", x, y), ("B", Fraction(0), Fraction(0)), ("C", a, Fraction(0))]
    return _certify(points)


def _gcd(a: int, b: int) -> int:
    import math

    return math.gcd(a, b)


def kummer_check(xi, nu, x, y, c) -> bool:
    xi, nu, x, y, c = (Fraction(v) for v in (xi, nu, x, y, c))
    if 0 in (xi, nu, x, y):
        raise ZeroDenominator("xi, nu, x, y must be nonzero")
    if not abs(c) < 1:
        raise ValueError("|c| must be < 1")

    def f(t, shift):
        return ((t + shift) ** 2 - 1) / (2 * t)

    return f(xi, c) * f(x, -c) == f(nu, -c) * f(y, c)


# -- rational points on a line through O --------------------------------------


def _lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // _gcd(out, v)
    return out


def _locate_B(a: Fraction, c: Fraction, angle: RationalAngle, x: Fraction):
    """Intersection B of line L with the line through C of slope 2x/(1-x^2).

    Returns ``(X, Y, BO, BA, BC)`` with the distances certified rational.
    Works on integer numerators throughout so that each output is reduced once.
    """
    N, D = x.numerator, x.denominator
    P, Q = 2 * N * D, D * D - N * N  # slope at C is P/Q
    if P == 0 or Q == 0:
        raise DegeneratePoint(f"x = {x}")
    if angle.cos == 0:
        L = _lcm(a.denominator, c.denominator)
        al, ga = int(a * L), int(c * L)
        R, S = -ga * P, al * Q
    else:
        t = angle.sin / angle.cos
        L = _lcm(a.denominator, c.denominator, t.denominator)
        al, ga, ta = int(a * L), int(c * L), int(t * L)
        R, S = ga * ta * P, L * (al + ga) * P - al * ta * Q
    if S == 0:
        raise DegeneratePoint("line through A is vertical")
    den = P * S - R * Q  # slope at A is R/S
    if den == 0:
        raise DegeneratePoint("lines through A and C are parallel")
    x_num = ga * P * S + al * R * Q
    y_num = (al + ga) * P * R
    if x_num == 0 and y_num == 0:
        raise DegeneratePoint("B coincides with O")
    base = L * den
    root_a = _isqrt_exact(R * R + S * S)
    if root_a is None:
        raise SquareRootNotRational(f"x = {x} does not satisfy the rationality conditions")
    X, Y = Fraction(x_num, base), Fraction(y_num, base)
    if angle.cos != 0:
        BO = abs(X / angle.cos)
    else:
        BO = abs(Y)
    # |X + a| * sqrt(1 + mA^2) and |X - c| * sqrt(1 + mC^2), with sqrt(P^2 + Q^2) = N^2 + D^2
    BA = Fraction(abs(x_num + al * den) * root_a, abs(base * S))
    BC = Fraction(abs(x_num - ga * den) * (N * N + D * D), abs(base * Q))
    return X, Y, BO, BA, BC


def quartic_point_to_B(params: FamilyParams, a, c, angle: RationalAngle, x, y) -> RationalCertificate:
    """Certificate for {A, O, C, B} with B on L built from a rational quartic point.

    A = (-a, 0), O = (0, 0), C = (c, 0) and L makes ``angle`` with the
    positive axis; ``c`` may be negative (C on the same side as A).
    """
    a, c, x, y = Fraction(a), Fraction(c), Fraction(x), Fraction(y)
    if angle.sin == 0:
        raise ValueError("L must not coincide with AC")
    if a <= 0 or c == 0:
        raise ValueError("need a > 0 and c != 0")
    if params.m != angle.cos / angle.sin or params.n != c / a:
        raise ValueError("params do not match (a, c, angle)")
    if not quartic_of(params).contains(x, y):
        raise NotOnQuartic(f"({x}, {y})")
    X, Y, BO, BA, BC = _locate_B(a, c, angle, x)
    A, O, C = (-a, Fraction(0)), (Fraction(0), Fraction(0)), (c, Fraction(0))
    distances = {
        ("A", "O"): a,
        ("A", "C"): abs(a + c),
        ("O", "C"): abs(c),
        ("B", "O"): BO,
        ("B", "A"): BA,
        ("B", "C"): BC,
    }
    points = [("A", *A), ("O", *O), ("C", *C), ("B", X, Y)]
    return RationalCertificate(points=points, distances=distances, area=None)


def _B_position(a, c, cos, sin, x):
    """(X, Y) of B for a quartic abscissa ``x``; works on exact or real inputs.

    Returns ``None`` when the construction degenerates.
    """
    if x == 0 or x * x == 1:
        return None
    mC = 2 * x / (1 - x * x)
    if cos == 0:
        mA = -c * mC / a
    else:
        den = (a + c) * mC - a * sin / cos
        if den == 0:
            return None
        mA = c * mC * (sin / cos) / den
    if mA == mC:
        return None
    return (c * mC + a * mA) / (mC - mA), (a + c) * mC * mA / (mC - mA)


def _real_point(pt: CurvePoint):
    return None if pt.is_infinity else (real(pt.U), real(pt.W))


def _add_real(curve_real, P, Q):
    """Chord-and-tangent law on approximate points; ``None`` is the identity."""
    if P is None:
        return Q
    if Q is None:
        return P
    A, B, _ = curve_real
    if P[0] == Q[0]:
        if P[1] != Q[1] or P[1] == 0:
            return None
        slope = (3 * P[0] * P[0] + 2 * A * P[0] + B) / (2 * P[1])
    else:
        slope = (Q[1] - P[1]) / (Q[0] - P[0])
    U = slope * slope - A - P[0] - Q[0]
    return U, -P[1] - (U - P[0]) * slope


def _candidate_stream(curve, generator: CurvePoint, cosets: Sequence[CurvePoint], kmax: int):
    """Yield ``(k, T, approx)`` for the points k*G + T, k = +-1..+-kmax.

    The multiples are tracked in high-precision reals, which keeps the search
    cheap; the exact point is recomputed only for the chosen candidate.
    """
    curve_real = (real(curve.A), real(curve.B), real(curve.C))
    G = _real_point(generator)
    reals = [_real_point(T) for T in cosets]
    acc = None
    for k in range(1, kmax + 1):
        acc = _add_real(curve_real, acc, G)
        if acc is None:
            return
        for sign in (1, -1):
            signed = (acc[0], sign * acc[1])
            for T, T_real in zip(cosets, reals):
                if T_real is not None and REAL.almosteq(signed[0], T_real[0], REAL.ldexp(1, -150)):
                    continue
                yield sign * k, T, _add_real(curve_real, signed, T_real)


def _exact_candidate(curve, generator: CurvePoint, k: int, T: CurvePoint) -> CurvePoint:
    return elliptic._add(curve, elliptic._scalar_mul(curve, k, generator), T)


def _approx_x(params: FamilyParams, quartic, approx):
    """Real quartic abscissa of an approximate cubic point, or ``None`` if excluded."""
    if approx is None or approx[0] == 0:
        return None
    V = approx[1] - real(quartic.p) / 4 * approx[0] - real(_w_offset(quartic))
    return V / approx[0]


def _rank_line(params, a, c, angle, generator, cosets, kmax, target, floor, eps, deadline):
    """Approximate gaps of the candidates k*G + T against ``target``, best first.

    ``target`` is a real point in the canonical frame and ``floor`` the error
    already committed elsewhere.  Stops at the first candidate within ``eps``,
    which is then the one of smallest |k|.
    """
    curve = cubic_of(params)
    quartic = quartic_of(params)
    cos, sin = real(angle.cos), real(angle.sin)
    ra, rc = real(a), real(c)
    ranked = []
    for count, (k, T, approx) in enumerate(_candidate_stream(curve, generator, cosets, kmax)):
        if count % 16 == 0 and time.monotonic() > deadline:
            break
        x = _approx_x(params, quartic, approx)
        located = None if x is None else _B_position(ra, rc, cos, sin, x)
        if located is None:
            continue
        g = max(floor, REAL.hypot(located[0] - target[0], located[1] - target[1]))
        ranked.append((g, k, T))
        if _within(g, eps):
            return [ranked[-1]]
    ranked.sort(key=lambda item: item[0])
    return ranked


def _realize_line(params, a, c, angle, generator, ranked, target, floor):
    """Exact B for the first usable ranked candidate, or ``None``.

    Returns ``(gap, (X, Y), (BO, BA, BC))``.
    """
    curve = cubic_of(params)
    quartic = quartic_of(params)
    for _, k, T in ranked[:8]:
        pt = _exact_candidate(curve, generator, k, T)
        try:
            x, _ = _cubic_to_quartic(params, quartic, pt)
            X, Y, *lengths = _locate_B(a, c, angle, x)
        except (ExcludedPoint, DegeneratePoint):
            continue
        g = max(floor, REAL.hypot(real(X) - target[0], real(Y) - target[1]))
        return g, (X, Y), tuple(lengths)
    return None


def _search_line(params, a, c, angle, generator, cosets, kmax, target, floor, eps, deadline):
    ranked = _rank_line(params, a, c, angle, generator, cosets, kmax, target, floor, eps, deadline)
    return _realize_line(params, a, c, angle, generator, ranked, target, floor)


def _naive_height(pt: CurvePoint) -> int:
    return max(pt.U.numerator.bit_length(), pt.U.denominator.bit_length(), 1)


# -- triangle -----------------------------------------------------------------


def _rhypot(v):
    return REAL.hypot(v[0], v[1])


def _sub(p, q):
    return p[0] - q[0], p[1] - q[1]


def _dot(p, q):
    return p[0] * q[0] + p[1] * q[1]


def _cross(p, q):
    return p[0] * q[1] - p[1] * q[0]


@dataclass
class _Triangle:
    apex: str
    h: Fraction
    coords: dict  # label -> (Fraction, Fraction); apex at (0, h), base on the axis
    frame: Frame
    gap: object


def _build_triangle(shape: PointSet, apex: str, eps, shrink: int = 0) -> _Triangle:
    """Rational triangle keeping ``apex`` fixed and the opposite side's direction.

    The foot of the altitude from ``apex`` must fall strictly inside the
    opposite side.  ``shrink`` tightens the initial tolerance, which yields a
    different (higher) choice of rational angles.
    """
    eps = real(eps)
    others = [l for l in shape.labels if l != apex]
    A = shape.real_point(apex)
    B = shape.real_point(others[0])
    C = shape.real_point(others[1])
    BC = _sub(C, B)
    e = (BC[0] / _rhypot(BC), BC[1] / _rhypot(BC))
    foot_t = _dot(_sub(A, B), e)
    D = (B[0] + foot_t * e[0], B[1] + foot_t * e[1])
    AD = _rhypot(_sub(A, D))
    if AD == 0:
        raise NotATriangle("apex lies on the opposite side")
    nrm = ((A[0] - D[0]) / AD, (A[1] - D[1]) / AD)
    if _cross(e, nrm) < 0:
        e = (-e[0], -e[1])
    tB = _dot(_sub(B, D), e)
    tC = _dot(_sub(C, D), e)
    if not tB * tC < 0:
        raise NotATriangle("foot of the altitude is not inside the opposite side")
    alpha = REAL.atan(abs(tB) / AD)
    beta = REAL.atan(abs(tC) / AD)
    half_pi = REAL.pi / 2
    delta = eps / 4 / 2**shrink
    for _ in range(200):
        h = rational_near(AD, min(delta, AD / 2))
        da = min(delta / (real(h) + 1) / (1 + REAL.tan(alpha) ** 2), alpha / 2, (half_pi - alpha) / 2)
        db = min(delta / (real(h) + 1) / (1 + REAL.tan(beta) ** 2), beta / 2, (half_pi - beta) / 2)
        a1 = rational_angle_near(alpha, da)
        b1 = rational_angle_near(beta, db)
        xB = (1 if tB > 0 else -1) * h * a1.tan
        xC = (1 if tC > 0 else -1) * h * b1.tan
        hr = real(h)
        frame = Frame(REAL.atan2(e[1], e[0]), A[0] - hr * nrm[0], A[1] - hr * nrm[1])
        coords = {apex: (Fraction(0), h), others[0]: (xB, Fraction(0)), others[1]: (xC, Fraction(0))}
        gap = REAL.zero
        for label, P in ((apex, A), (others[0], B), (others[1], C)):
            ux, uy = frame.to_user(*coords[label])
            gap = max(gap, REAL.hypot(ux - P[0], uy - P[1]))
        if _within(gap, eps):
            return _Triangle(apex, h, coords, frame, gap)
        delta /= 2
    raise RuntimeError("triangle approximation did not converge")


def _collinear_certificate(shape: PointSet, eps) -> RationalCertificate:
    """Rational positions along the common line, keeping one extreme point fixed."""
    eps = real(eps)
    labels = shape.labels
    pairs = list(itertools.combinations(labels, 2))
    s, t = max(pairs, key=lambda p: _sq_dist(shape.point(p[0]), shape.point(p[1])))
    S, T = shape.real_point(s), shape.real_point(t)
    ST = _sub(T, S)
    length = _rhypot(ST)
    e = (ST[0] / length, ST[1] / length)
    pos = {l: _dot(_sub(shape.real_point(l), S), e) for l in labels}
    # positions can coincide when a nearly flat shape is projected
    seps = [abs(pos[p] - pos[q]) for p, q in pairs if pos[p] != pos[q]]
    delta = min([eps / 2] + [d / 3 for d in seps])
    coords = {l: (Fraction(0) if l == s else rational_near(pos[l], delta), Fraction(0)) for l in labels}
    frame = Frame(REAL.atan2(e[1], e[0]), S[0], S[1])
    cert = _certify([(l, *coords[l]) for l in labels], frame=frame)
    cert.gap = hausdorff_gap(cert, shape)
    return cert


def _is_collinear(shape: PointSet) -> bool:
    p0 = shape.coords[0]
    return all(_cross(_sub(p, p0), _sub(q, p0)) == 0 for p, q in itertools.combinations(shape.coords[1:], 2))


def approx_triangle(tri: PointSet, eps) -> RationalCertificate:
    """Rational triangle with rational area within ``eps`` of ``tri``.

    The vertex opposite the longest side stays where it is and the longest side
    keeps its direction.
    """
    if len(tri) != 3:
        raise ValueError("a triangle has three points")
    if len(set(tri.coords)) != 3:
        raise NotATriangle("points must be distinct")
    eps = real(eps)
    if not eps > 0:
        raise ValueError("eps must be positive")
    cert = _identity_if_rational(tri)
    if cert is not None:
        return cert
    if _is_collinear(tri):
        return _collinear_certificate(tri, eps)
    labels = tri.labels
    apex = max(
        labels,
        key=lambda l: _sq_dist(*[tri.point(o) for o in labels if o != l]),
    )
    try:
        built = _build_triangle(tri, apex, eps)
    except (ValueError, RuntimeError):
        # angles too close to a right angle to resolve; a flat answer is
        # acceptable when the altitude is already below eps / 2
        P, Q = [tri.point(o) for o in labels if o != apex]
        cross = _cross(_sub(tri.point(apex), P), _sub(Q, P))
        if real(cross * cross) / real(_sq_dist(P, Q)) < (eps / 2) ** 2:
            return _collinear_certificate(tri, eps)
        raise
    cert = _certify([(l, *built.coords[l]) for l in labels], frame=built.frame)
    cert.gap = hausdorff_gap(cert, tri)
    return cert


# -- parallelogram ------------------------------------------------------------


def _angle_candidates(theta, delta, limit: int) -> Iterator[RationalAngle]:
    """Distinct rational angles within ``delta`` of ``theta``, simplest first."""
    seen = set()
    width = real(delta)
    for i in range(limit):
        # alternate between the whole window and its two halves at finer scales
        for offset in (0, -1, 1):
            centre = real(theta) + offset * width / 2
            ang = rational_angle_near(centre, width / 2 if offset else width)
            if ang not in seen and abs(ang.radians - real(theta)) < delta:
                seen.add(ang)
                yield ang
        width /= 2


def _small_quartic_points(params: FamilyParams, height: int) -> Iterator[tuple[Fraction, Fraction]]:
    """Rational points (x, y) on the quartic with |num x|, den x <= height."""
    quartic = quartic_of(params)
    for den in range(1, height + 1):
        for num in range(-height, height + 1):
            x = Fraction(num, den)
            if x.denominator != den:
                continue
            y = is_perfect_square(quartic.value(x))
            if y is not None:
                yield x, y


def find_generator(params: FamilyParams, height: int = 40) -> Optional[CurvePoint]:
    """A cubic point of infinite order coming from a small quartic point, if any."""
    curve = cubic_of(params)
    if not elliptic.is_nonsingular(curve):
        return None
    for x, y in _small_quartic_points(params, height):
        for yy in (y, -y):
            try:
                pt = quartic_to_cubic(params, x, yy)
            except ExcludedPoint:
                continue
            if elliptic.torsion_order(curve, pt) is None:
                return pt
    return None


def _torsion_cosets(curve, points: Iterable[CurvePoint]) -> list[CurvePoint]:
    """The subgroup generated by the given torsion points (small, found by closure)."""
    group = [INFINITY]
    frontier = list(points)
    while frontier:
        g = frontier.pop()
        if g in group:
            continue
        new = [elliptic._add(curve, g, h) for h in group]
        group.append(g)
        frontier.extend(p for p in new if p not in group)
    return group


def _is_parallelogram(shape: PointSet) -> bool:
    (ax, ay), (bx, by), (cx, cy), (dx, dy) = shape.coords
    scale = max(abs(v) for v in (ax, ay, bx, by, cx, cy, dx, dy)) + 1
    tol = Fraction(1, 10**9) * scale
    closes = abs(ax + cx - bx - dx) <= tol and abs(ay + cy - by - dy) <= tol
    area = _cross((bx - ax, by - ay), (dx - ax, dy - ay))
    return closes and area != 0


def approx_parallelogram(quad: PointSet, eps, search: Optional[SearchBudget] = None) -> RationalCertificate:
    """Parallelogram with rational sides, both diagonals and area near ``quad``.

    Works in the frame centred at the diagonal intersection M with AC on the
    axis: A' = (-a, 0), C' = (a, 0), B' on a line through M at a rational
    angle, and D' = -B'.  Only B' has to be found.
    """
    if len(quad) != 4:
        raise NotAParallelogram("a parallelogram has four points")
    if not _is_parallelogram(quad):
        raise NotAParallelogram("opposite sides are not parallel and equal")
    eps = real(eps)
    search = search or SearchBudget()
    cert = _identity_if_rational(quad)
    if cert is not None:
        return cert
    lA, lB, lC, lD = quad.labels
    A, B, C, D = (quad.real_point(l) for l in quad.labels)
    M = ((A[0] + B[0] + C[0] + D[0]) / 4, (A[1] + B[1] + C[1] + D[1]) / 4)
    half_ac = _rhypot(_sub(C, M))
    e = ((C[0] - M[0]) / half_ac, (C[1] - M[1]) / half_ac)
    rel = _sub(B, M)
    bx, by = _dot(rel, e), _cross(e, rel)
    rho_target = REAL.hypot(bx, by)
    theta_target = REAL.atan2(by, bx)
    frame = Frame(REAL.atan2(e[1], e[0]), M[0], M[1])
    started = time.monotonic()
    best = None

    def finish(a, Bq, lengths=None, exhausted=False):
        pts = {lA: (-a, Fraction(0)), lC: (a, Fraction(0)), lB: Bq, lD: (-Bq[0], -Bq[1])}
        known = {}
        if lengths is not None:
            BO, BA, BC = lengths
            known = {(lA, lB): BA, (lC, lB): BC, (lA, lD): BC, (lC, lD): BA, (lB, lD): 2 * BO}
        cert = _certify(
            [(l, *pts[l]) for l in quad.labels], frame=frame, hub=(Fraction(0), Fraction(0)), known=known
        )
        cert.gap = hausdorff_gap(cert, quad)
        cert.budget_exhausted = exhausted
        return cert

    def gap_of(a, Bq):
        err_a = abs(real(a) - half_ac)
        err_b = REAL.hypot(real(Bq[0]) - bx, real(Bq[1]) - by)
        err_d = err_b  # central symmetry, with the centre fixed
        return max(err_a, err_b, err_d)

    delta = eps / 4
    for _attempt in range(8):
        a = rational_near(half_ac, delta)
        ang_delta = delta / (rho_target + 1)
        # rhombus: diagonals perpendicular after rounding the angle
        quarter = RationalAngle(0, 1 if theta_target > 0 else -1)
        if abs(quarter.radians - theta_target) < ang_delta:
            psi = rational_angle_near(REAL.atan2(rho_target, real(a)), ang_delta / (real(a) + 1))
            if psi.cos > 0 and psi.sin > 0:
                Bq = (Fraction(0), quarter.sin * a * psi.tan)
                if _within(gap_of(a, Bq), eps):
                    return finish(a, Bq)
        # rectangle: B' on the circle of radius a, at twice a rational half-angle
        if abs(rho_target - real(a)) < delta:
            half = rational_angle_near(theta_target / 2, ang_delta / 2)
            full = half + half
            Bq = (a * full.cos, a * full.sin)
            if _within(gap_of(a, Bq), eps):
                return finish(a, Bq)
        for angle in _angle_candidates(theta_target, ang_delta, 4):
            if angle.sin == 0 or angle.cos == 0:
                continue
            params = FamilyParams(angle.cos / angle.sin, 1)
            gen = find_generator(params)
            if gen is None:
                continue
            curve = cubic_of(params)
            P1, _, P3, _ = special_points(params)
            cosets = _torsion_cosets(curve, [P1, P3])
            found = _search_line(
                params, a, a, angle, gen, cosets, search.kmax,
                (bx, by), abs(real(a) - half_ac), eps, started + search.time_budget,
            )
            if found is None:
                continue
            g, Bq, lengths = found
            if best is None or g < best[0]:
                best = (g, a, Bq, lengths)
            if _within(g, eps):
                return finish(a, Bq, lengths)
        if time.monotonic() - started > search.time_budget:
            break
        delta /= 2
    if best is None:
        raise RuntimeError("no rational parallelogram found within the search budget")
    return finish(best[1], best[2], best[3], exhausted=True)


# -- quadrilateral ------------------------------------------------------------


def _intersection_params(P, Q, R, S):
    """Parameters (s, t) with P + s (Q - P) = R + t (S - R), or None when parallel."""
    d1, d2 = _sub(Q, P), _sub(S, R)
    den = _cross(d1, d2)
    if den == 0:
        return None
    w = _sub(R, P)
    return _cross(w, d2) / den, _cross(w, d1) / den


def _quad_layouts(shape: PointSet) -> list:
    """Relabellings in which lines AC and BD meet at a hub O strictly inside BD.

    Each entry is ``(kind, (a, b, c, d), O)`` where kind is ``convex`` (O
    inside AC), ``concave`` (C strictly between A and O) or ``vertex``
    (C = O), and the angle AOB is at least a right angle.  Convex layouts
    come first.
    """
    found = []
    for perm in itertools.permutations(shape.labels):
        A, B, C, D = (shape.point(l) for l in perm)
        st = _intersection_params(A, C, B, D)
        if st is None:
            continue
        s, t = st
        if not (0 < t < 1) or s <= 0:
            continue
        O = (A[0] + s * (C[0] - A[0]), A[1] + s * (C[1] - A[1]))
        if _dot(_sub(A, O), _sub(B, O)) > 0:
            continue
        kind = "convex" if s < 1 else "concave" if s > 1 else "vertex"
        found.append((kind, perm, O))
    if not found:
        raise ValueError("no admissible diagonal layout")
    order = {"convex": 0, "concave": 1, "vertex": 2}
    found.sort(key=lambda item: order[item[0]])
    return found


def _rotation_to_negative_axis(v: tuple[Fraction, Fraction], length: Fraction):
    """Exact (cos, sin) of the rotation taking v onto (-length, 0)."""
    return -v[0] / length, v[1] / length


def _rotate(cs, p):
    c, s = cs
    return c * p[0] - s * p[1], s * p[0] + c * p[1]


def _u_candidates(u_star, width, count: int = 12) -> Iterator[Fraction]:
    seen = set()
    lo = real_to_fraction(u_star - width)
    hi = real_to_fraction(u_star + width)
    centre = real_to_fraction(u_star)
    windows = [(lo, hi)]
    while windows and len(seen) < count:
        l, h = windows.pop(0)
        if not l < h:
            continue
        u = simplest_between(max(l, Fraction(0)), h) if h > 0 else None
        if u is None or u <= 0:
            continue
        if u not in seen:
            seen.add(u)
            yield u
        windows.extend([(l, (l + centre) / 2 if l < centre else (l + h) / 2), ((h + centre) / 2 if h > centre else (l + h) / 2, h)])


def approx_quadrilateral(quad: PointSet, eps, search: Optional[SearchBudget] = None) -> RationalCertificate:
    """Rational 4-set with rational area within ``eps`` of ``quad`` (best effort).

    Step 1 approximates the triangle at the diagonal intersection O, step 2
    places C' on line A'O, step 3 walks multiples of the family generator to
    put D' on line B'O.  When no candidate lands within ``eps`` the closest one
    is returned with ``budget_exhausted`` set.
    """
    if len(quad) != 4:
        raise ValueError("a quadrilateral has four points")
    if len(set(quad.coords)) != 4:
        raise ValueError("points must be distinct")
    eps = real(eps)
    if not eps > 0:
        raise ValueError("eps must be positive")
    search = search or SearchBudget()
    cert = _identity_if_rational(quad)
    if cert is not None:
        return cert
    if _is_collinear(quad):
        return _collinear_certificate(quad, eps)
    layouts = _quad_layouts(quad)
    deadline = time.monotonic() + search.time_budget
    # Rank hub configurations cheaply in reals, then realise the smallest exactly.
    # Every labelling is tried: when the diagonals are nearly perpendicular the
    # multiples of P1 only sweep part of line L, and another vertex may be in reach.
    planning_deadline = time.monotonic() + search.time_budget / 2
    hits, misses = [], []
    for attempt in range(12):
        for kind, labels, O in layouts:
            for step in itertools.islice(_steps_one_two(quad, kind, labels, O, eps, attempt), HUBS):
                if kind == "vertex":
                    return step
                plan = _plan_three(quad, step, eps, search, planning_deadline)
                if plan is None:
                    continue
                (hits if _within(plan[1], eps) else misses).append(plan)
                if len(hits) >= PLANS or time.monotonic() > planning_deadline:
                    break
            if len(hits) >= PLANS or time.monotonic() > planning_deadline:
                break
        if len(hits) >= PLANS or time.monotonic() > planning_deadline:
            break
    hits.sort(key=lambda plan: plan[0])
    misses.sort(key=lambda plan: plan[1])
    if misses and not hits:
        # a flagged answer is not worth a huge exact computation
        _, _, hub, ranked = misses[0]
        small = [item for item in ranked if abs(item[1]) <= FALLBACK_K]
        misses = [(None, None, hub, small or ranked)]
    best = None
    for _, _, hub, ranked in hits + misses[:1]:
        result = _step_three(quad, hub, ranked, eps)
        if result is None:
            continue
        if not result.budget_exhausted:
            return result
        if best is None or result.gap < best.gap:
            best = result
        if time.monotonic() > deadline:
            break
    if best is None:
        raise RuntimeError("quadrilateral approximation failed")
    return best


@dataclass
class _Hub:
    labels: tuple
    a: Fraction
    b: Fraction
    c: Fraction
    Bq: tuple
    angle: RationalAngle
    params: FamilyParams
    frame: Frame
    fixed_gap: object


def _steps_one_two(quad, kind, labels, O, eps, attempt):
    """Yield hub configurations (or, when C is the hub, finished certificates)."""
    lA, lB, lC, lD = labels
    tri = PointSet(("O", lA, lB), (O, quad.point(lA), quad.point(lB)))
    share = eps / 4
    built = _build_triangle(tri, "O", share, shrink=attempt)
    h = built.h
    Ot = (Fraction(0), h)
    vA = _sub(built.coords[lA], Ot)
    vB = _sub(built.coords[lB], Ot)
    a = is_perfect_square(vA[0] ** 2 + vA[1] ** 2)
    b = is_perfect_square(vB[0] ** 2 + vB[1] ** 2)
    rot = _rotation_to_negative_axis(vA, a)
    Bq = _rotate(rot, vB)
    angle = RationalAngle(Bq[0] / b, Bq[1] / b)
    psi = REAL.atan2(real(rot[1]), real(rot[0]))
    hub_user = built.frame.to_user(*Ot)
    frame = Frame(built.frame.angle - psi, hub_user[0], hub_user[1])
    Cu = quad.real_point(lC)
    Du = quad.real_point(lD)
    Or = (real(O[0]), real(O[1]))
    fixed = {lA: (-a, Fraction(0)), lB: Bq}

    def err(label, pt):
        ux, uy = frame.to_user(*pt)
        P = quad.real_point(label)
        return REAL.hypot(ux - P[0], uy - P[1])

    gap_ab = max(err(lA, fixed[lA]), err(lB, fixed[lB]))
    if kind == "vertex":
        # C is the hub itself; D' goes on the ray opposite B' at rational distance from A'
        ray = RationalAngle(angle.cos, angle.sin)
        q_star = _rhypot(_sub(Du, Or))
        u_star = _u_for_target(a, ray, q_star)
        width = share / (1 + real(a * a * ray.sin**2) / u_star**2)
        for u in _u_candidates(u_star, width):
            q, _ = line_rational_distance_point(a, ray, u)
            if q <= 0:
                continue
            pts = {lA: fixed[lA], lB: Bq, lC: (Fraction(0), Fraction(0)), lD: (-q * angle.cos, -q * angle.sin)}
            cert = _certify([(l, *pts[l]) for l in quad.labels], frame=frame, hub=(Fraction(0), Fraction(0)))
            cert.gap = hausdorff_gap(cert, quad)
            if _within(cert.gap, eps):
                yield cert
                return
        return
    # step 2: C' on the axis, beyond O (convex) or between A' and O (concave)
    side = 1 if kind == "convex" else -1
    ray = RationalAngle(side * angle.cos, angle.sin)
    q_star = _rhypot(_sub(Cu, Or))
    u_star = _u_for_target(b, ray, q_star)
    width = share / (1 + real(b * b * ray.sin**2) / u_star**2)
    Dc = frame.to_canonical(*Du)
    # distance from D to line L, which no choice of D' on L can beat
    off_line = abs(_cross((real(angle.cos), real(angle.sin)), Dc))
    for u in _u_candidates(u_star, width):
        q, _ = line_rational_distance_point(b, ray, u)
        if q <= 0 or (side < 0 and q >= a):
            continue
        c = side * q
        params = FamilyParams(angle.cos / angle.sin, c / a)
        if params.singular:
            continue
        if elliptic.torsion_order(cubic_of(params), special_points(params)[0]) is not None:
            continue
        gap = max(gap_ab, err(lC, (c, Fraction(0))), off_line)
        if not _within(gap, eps):
            continue
        yield _Hub(labels, a, b, c, Bq, angle, params, frame, gap)


def _plan_three(quad, hub: _Hub, eps, search: SearchBudget, deadline):
    """Rank D' candidates for a hub; returns ``(cost, gap, hub, ranked)`` or ``None``.

    The cost k^2 * h(P1) estimates the size of the exact answer.
    """
    P1, P2, P3, _ = special_points(hub.params)
    target = hub.frame.to_canonical(*quad.real_point(hub.labels[3]))
    ranked = _rank_line(
        hub.params, hub.a, hub.c, hub.angle, P1, (INFINITY, P2, P3), search.kmax,
        target, hub.fixed_gap, eps, deadline,
    )
    if not ranked:
        return None
    gap, k, _ = ranked[0]
    return k * k * _naive_height(P1), gap, hub, ranked


def _step_three(quad, hub: _Hub, ranked, eps) -> Optional[RationalCertificate]:
    lA, lB, lC, lD = hub.labels
    P1 = special_points(hub.params)[0]
    target = hub.frame.to_canonical(*quad.real_point(lD))
    found = _realize_line(hub.params, hub.a, hub.c, hub.angle, P1, ranked, target, hub.fixed_gap)
    if found is None:
        return None
    _, Dq, (DO, DA, DC) = found
    pts = {lA: (-hub.a, Fraction(0)), lB: hub.Bq, lC: (hub.c, Fraction(0)), lD: Dq}
    # D' is on line L through O, as is B' at distance b along the direction of L
    along = Dq[0] * hub.angle.cos + Dq[1] * hub.angle.sin
    known = {(lD, lA): DA, (lD, lC): DC, (lD, lB): abs(hub.b - (DO if along > 0 else -DO))}
    cert = _certify(
        [(l, *pts[l]) for l in quad.labels], frame=hub.frame, hub=(Fraction(0), Fraction(0)), known=known
    )
    cert.gap = hausdorff_gap(cert, quad)
    cert.budget_exhausted = not _within(cert.gap, eps)
    return cert

"""Command line interface: ``ratdist {multiples,approx,scan,verify,transform}``.

Payloads go to stdout (or ``--out``) and diagnostics to stderr.  Exit status
is 0 for ok, 2 for a flagged result (search budget exhausted) and 1 on error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import elliptic, family, geometry
from .errors import RatDistError
from .rational_core import format_rational, parse_rational, real

OK, ERROR, FLAGGED = 0, 1, 2


@dataclass
class CommandResult:
    status: str  # ok | flagged | error
    payload: object = None
    diagnostics: list = field(default_factory=list)
    text: Optional[str] = None  # preformatted payload (CSV)

    @property
    def exit_code(self) -> int:
        return {"ok": OK, "flagged": FLAGGED, "error": ERROR}[self.status]

    def render(self) -> str:
        if self.text is not None:
            return self.text
        return json.dumps(self.payload, indent=2) + "\n"


def _rational_arg(value: str):
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {value!r}") from exc


def _range_arg(value: str):
    lo, sep, hi = value.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("expected lo:hi")
    return _rational_arg(lo), _rational_arg(hi)


def _positive_int(value: str) -> int:
    k = int(value)
    if k < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return k


def _load_json(path: str):
    # decimals stay strings so that they are read exactly
    with open(path) as fh:
        return json.load(fh, parse_float=str, parse_int=str)


def load_points(path: str) -> geometry.PointSet:
    doc = _load_json(path)
    if isinstance(doc, dict):
        doc = doc.get("points")
    if not isinstance(doc, list) or not doc:
        raise ValueError("expected a list of points")
    if isinstance(doc[0], dict):
        return geometry.PointSet.from_points([(str(p["label"]), p["x"], p["y"]) for p in doc])
    return geometry.PointSet.from_points([tuple(p) for p in doc])


# -- commands -----------------------------------------------------------------


def cmd_multiples(m, n, kmax: int) -> CommandResult:
    params = family.FamilyParams(m, n)
    params.require_nonsingular()
    curve = family.cubic_of(params)
    P1 = family.special_points(params)[0]
    rows = [
        {"k": k, **pt.to_json()}
        for k, pt in enumerate(elliptic.multiples(curve, P1, kmax), start=1)
    ]
    payload = {
        "m": format_rational(params.m),
        "n": format_rational(params.n),
        "curve": curve.to_json(),
        "multiples": rows,
    }
    return CommandResult("ok", payload)


APPROXIMATORS = {
    "triangle": lambda pts, eps, budget: geometry.approx_triangle(pts, eps),
    "parallelogram": geometry.approx_parallelogram,
    "quad": geometry.approx_quadrilateral,
}


def cmd_approx(shape: str, path: str, eps, kbudget: int = 120, time_budget: float = 60.0) -> CommandResult:
    points = load_points(path)
    eps = real(eps)
    cert = APPROXIMATORS[shape](points, eps, geometry.SearchBudget(kbudget, time_budget))
    diagnostics = [f"gap = {float(cert.gap):.6g}"]
    if cert.budget_exhausted:
        diagnostics.append(f"search budget exhausted before reaching eps = {float(eps)}")
        return CommandResult("flagged", cert.to_json(), diagnostics)
    return CommandResult("ok", cert.to_json(), diagnostics)


def cmd_scan(m_range, n_range, steps: int) -> CommandResult:
    rows = family.scan(family.grid(*m_range, steps), family.grid(*n_range, steps))
    return CommandResult("ok", text=family.scan_csv(rows), diagnostics=[f"{len(rows)} rows"])


def cmd_verify(path: str) -> CommandResult:
    cert = geometry.RationalCertificate.from_json(_load_json(path))
    reasons = geometry.verify_reasons(cert)
    if reasons:
        return CommandResult("error", {"valid": False, "reasons": reasons}, reasons)
    return CommandResult("ok", {"valid": True, "reasons": []})


def cmd_transform(direction: str, m, n, first, second) -> CommandResult:
    params = family.FamilyParams(m, n)
    params.require_nonsingular()
    if direction == "q2c":
        pt = family.quartic_to_cubic(params, first, second)
        return CommandResult("ok", pt.to_json())
    x, y = family.cubic_to_quartic(params, elliptic.CurvePoint(first, second))
    return CommandResult("ok", {"x": format_rational(x), "y": format_rational(y)})


# -- argument parsing ---------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Treats ``-1/2`` and ``-1:2`` as values rather than option names."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(r"^-\d[\d/.:eE+-]*$")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ratdist", description=__doc__.splitlines()[0])
    parser.add_argument("--out", help="write the payload here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("multiples", help="k*P1 on the cubic of the family member (m, n)")
    p.add_argument("--m", type=_rational_arg, required=True)
    p.add_argument("--n", type=_rational_arg, required=True)
    p.add_argument("--kmax", type=_positive_int, default=11)

    p = sub.add_parser("approx", help="rational approximation of a polygon")
    p.add_argument("shape", choices=sorted(APPROXIMATORS))
    p.add_argument("file", help="JSON points file")
    p.add_argument("--eps", type=_rational_arg, required=True)
    p.add_argument("--kbudget", type=_positive_int, default=120)
    p.add_argument("--time-budget", type=float, default=60.0)

    p = sub.add_parser("scan", help="torsion and oval scan over a parameter grid (CSV)")
    p.add_argument("--m-range", type=_range_arg, default=(parse_rational(-2), parse_rational(2)))
    p.add_argument("--n-range", type=_range_arg, default=(parse_rational(-2), parse_rational(2)))
    p.add_argument("--steps", type=_positive_int, default=5)

    p = sub.add_parser("verify", help="check a certificate exactly")
    p.add_argument("file")

    p = sub.add_parser("transform", help="map points between the quartic and the cubic")
    p.add_argument("direction", choices=("q2c", "c2q"))
    p.add_argument("--m", type=_rational_arg, required=True)
    p.add_argument("--n", type=_rational_arg, required=True)
    p.add_argument("--x", type=_rational_arg)
    p.add_argument("--y", type=_rational_arg)
    p.add_argument("--U", type=_rational_arg)
    p.add_argument("--W", type=_rational_arg)
    return parser


def run(args: argparse.Namespace) -> CommandResult:
    if args.command == "multiples":
        return cmd_multiples(args.m, args.n, args.kmax)
    if args.command == "approx":
        return cmd_approx(args.shape, args.file, args.eps, args.kbudget, args.time_budget)
    if args.command == "scan":
        return cmd_scan(args.m_range, args.n_range, args.steps)
    if args.command == "verify":
        return cmd_verify(args.file)
    if args.direction == "q2c":
        if args.x is None or args.y is None:
            raise ValueError("q2c needs --x and --y")
        return cmd_transform("q2c", args.m, args.n, args.x, args.y)
    if args.U is None or args.W is None:
        raise ValueError("c2q needs --U and --W")
    return cmd_transform("c2q", args.m, args.n, args.U, args.W)


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = run(args)
    except (RatDistError, ValueError, KeyError, TypeError, OSError, ZeroDivisionError) as exc:
        message = f"{type(exc).__name__}: {exc}"
        result = CommandResult("error", {"error": type(exc).__name__, "message": str(exc)}, [message])
    for line in result.diagnostics:
        print(line, file=sys.stderr)
    out = result.render()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

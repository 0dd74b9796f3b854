"""Exact constructions of point sets with rational mutual distances."""
from .elliptic import INFINITY, CubicCurve, CurvePoint
from .family import FamilyParams
from .geometry import (
    PointSet,
    RationalCertificate,
    SearchBudget,
    approx_parallelogram,
    approx_quadrilateral,
    approx_triangle,
    certificate_verify,
)
from .rational_core import BigRat, RationalAngle, is_perfect_square, rational_angle_near

__all__ = [
    "BigRat",
    "CubicCurve",
    "CurvePoint",
    "FamilyParams",
    "INFINITY",
    "PointSet",
    "RationalAngle",
    "RationalCertificate",
    "SearchBudget",
    "approx_parallelogram",
    "approx_quadrilateral",
    "approx_triangle",
    "certificate_verify",
    "is_perfect_square",
    "rational_angle_near",
]

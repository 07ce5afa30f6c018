"""Exact computations on F_{q^2}-maximal curves in characteristic 3."""
__version__ = "0.1.0"

from .gf import FieldElement, FieldSpec, mk_field, field_for_q  # noqa: E402
from .curves import CurveModel, make_curve, count_points  # noqa: E402
from .invariants import castelnuovo, genus_spectrum, semigroup, enumerate_completions  # noqa: E402
from .orders import generic_orders, frobenius_orders, classify_rational_points, sv_budget  # noqa: E402

__all__ = [
    "FieldElement", "FieldSpec", "mk_field", "field_for_q",
    "CurveModel", "make_curve", "count_points",
    "castelnuovo", "genus_spectrum", "semigroup", "enumerate_completions",
    "generic_orders", "frobenius_orders", "classify_rational_points", "sv_budget",
]

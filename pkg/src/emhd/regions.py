"""Classification of (p, q, r) exponent triples for the uniqueness criterion.

The criterion asks for curl(B) in L^q(0,T; B^r_{p,inf}) with

    2/q + 3/p = 1 + r,    3/(1+r) < p <= inf,    r in (0, 1],    (p,q) != (inf, 1),

and the companion Lebesgue test declares the solution regular (hence unique)
when 2/q + 3/p <= 1.  Between the two scaling lines, with no criterion
satisfied, uniqueness is open.

Points that miss the criterion only by sitting on the boundary of one of its
inequalities (or at an endpoint p, q in {1, inf} of the admissible exponent
range) are reported as ``excluded_boundary``; in the schematic parameter
diagram these are exactly the corner points of the shaded region.  The r = 0
labels fall outside (0, 1] and are classified the same way rather than
guessing intent.  When r is omitted only the Lebesgue test applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_TOL = 1e-12

UNIQUENESS = "uniqueness_region"
BOUNDARY = "excluded_boundary"
REGION_I = "region_I_open"
REGION_II = "region_II_regular"


class ExponentError(ValueError):
    pass


@dataclass(frozen=True)
class CriterionTriple:
    p: float
    q: float
    r: float | None
    classification: str


def _inv(x: float) -> float:
    return 0.0 if math.isinf(x) else 1.0 / x


def _validate(p: float, q: float, r: float | None) -> None:
    for name, val in (("p", p), ("q", q)):
        if not (val >= 1.0):  # also rejects NaN
            raise ExponentError(f"exponent {name} must lie in [1, inf], got {val}")
    if r is not None:
        if math.isnan(r) or math.isinf(r):
            raise ExponentError(f"smoothness exponent r must be finite, got {r}")
        if r <= -1.0:
            raise ExponentError(f"smoothness exponent r must exceed -1, got {r}")


def classify(p: float, q: float, r: float | None = None) -> CriterionTriple:
    """Classify an exponent triple; r may be omitted for the Lebesgue test."""
    p, q = float(p), float(q)
    if r is not None:
        r = float(r)
    _validate(p, q, r)
    scaling = 2.0 * _inv(q) + 3.0 * _inv(p)

    if r is not None:
        p_floor = 3.0 / (1.0 + r)
        in_theorem = (
            abs(scaling - (1.0 + r)) <= _TOL
            and p > p_floor + _TOL
            and r > _TOL
            and r <= 1.0 + _TOL
            and not (math.isinf(p) and q == 1.0)
        )
        if in_theorem:
            return CriterionTriple(p, q, r, UNIQUENESS)
        at_boundary = (
            (math.isinf(p) and q == 1.0)
            or abs(p - p_floor) <= _TOL
            or abs(r) <= _TOL
            or p == 1.0
            or math.isinf(p)
            or q == 1.0
            or math.isinf(q)
        )
        if at_boundary:
            return CriterionTriple(p, q, r, BOUNDARY)

    if scaling <= 1.0 + _TOL:
        return CriterionTriple(p, q, r, REGION_II)
    return CriterionTriple(p, q, r, REGION_I)


def parse_exponent(text: str) -> float:
    """Parse an exponent that may be 'inf' or a fraction like '3/2'."""
    text = text.strip().lower()
    if text in ("inf", "infinity", "oo"):
        return math.inf
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)

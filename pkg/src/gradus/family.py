"""The parametric counterexample family and the quadratic-extension checks.

A family member is determined by an odd integer p >= 3, a Laurent
polynomial f(x) = sum a_i x^i supported on [-p+1, p], and positive weights
(w1, w2).  Validity requires a_p != 0, the pole order q = -ord_x(f) to
satisfy 2 <= q <= p-1, and q < w2/w1 < p.  Instantiation produces the two
shift rewrites y = Y + f(x) and y = Y + f(-x) with weights (w1, -w2) and
their pointwise maximum.

The quadratic-extension material lives at u = x^2, v = y: conjugation is
x -> -x, and the even subring of Q[x, 1/x, y] is identified with
Q[u, 1/u, v].  ``pullback_eta`` evaluates the downstairs degree function by
pulling back along u -> x^2, v -> y and checking that both conjugate
rewrites agree; ``integral_closure_check`` forms the monic quadratic
T^2 + g1*T + g2 vanishing at f and verifies the coefficient degree bounds
eta(g_e) <= e * max(delta1(f), delta2(f)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .degrees import (
    DELTA1,
    DELTA2,
    ETA,
    UV_RING,
    XY_RING,
    MaxDegree,
    PuiseuxDegree,
    SubstitutedWeightedDegree,
)
from .rings import LaurentPolynomial, PolyError, format_poly


class InvalidFamilyError(PolyError):
    """instantiate_family was handed a spec that fails validation."""


def _fraction_to_json(q: Fraction):
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class FamilySpec:
    """Parameters (p, {a_i}, w1, w2) of one family member."""

    p: int
    coeffs: Tuple[Tuple[int, Fraction], ...]
    w1: int
    w2: int

    @staticmethod
    def make(p: int, coeffs: Dict[int, object], w1: int, w2: int) -> "FamilySpec":
        items = tuple(
            sorted((int(i), Fraction(c)) for i, c in coeffs.items() if Fraction(c) != 0)
        )
        return FamilySpec(p=p, coeffs=items, w1=w1, w2=w2)

    @staticmethod
    def from_json(data: dict) -> "FamilySpec":
        return FamilySpec.make(
            p=int(data["p"]),
            coeffs={int(i): Fraction(str(c)) for i, c in data["coeffs"].items()},
            w1=int(data["w1"]),
            w2=int(data["w2"]),
        )

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "coeffs": {str(i): _fraction_to_json(c) for i, c in self.coeffs},
            "w1": self.w1,
            "w2": self.w2,
        }

    def shift_poly(self, conjugated: bool = False) -> LaurentPolynomial:
        """f(x), or f(-x) for the conjugate member."""
        terms = {}
        for i, c in self.coeffs:
            terms[(i, 0)] = c * (-1) ** i if conjugated else c
        return LaurentPolynomial(XY_RING, terms)

    def pole_order(self) -> Optional[int]:
        """q = -ord_x(f); None for the zero polynomial."""
        if not self.coeffs:
            return None
        return -min(i for i, _ in self.coeffs)


def validate_family(spec: FamilySpec) -> list:
    """All violations of the family constraints; empty means valid."""
    violations = []
    if spec.p < 3 or spec.p % 2 == 0:
        violations.append(f"p = {spec.p} is not an odd integer >= 3")
    if spec.w1 <= 0 or spec.w2 <= 0:
        violations.append(f"weights ({spec.w1}, {spec.w2}) must be positive")
    coeffs = dict(spec.coeffs)
    if not coeffs:
        violations.append("f is zero")
        return violations
    bad_support = [i for i in coeffs if i < -spec.p + 1 or i > spec.p]
    if bad_support:
        violations.append(f"exponents {sorted(bad_support)} outside [{-spec.p + 1}, {spec.p}]")
    if coeffs.get(spec.p, 0) == 0:
        violations.append(f"a_p = a_{spec.p} must be nonzero")
    q = spec.pole_order()
    if q is None or not (2 <= q <= spec.p - 1):
        violations.append(
            f"pole order q = {q} fails 2 <= q <= p-1 (no a_-q with q >= 2)"
        )
    elif spec.w1 > 0 and spec.w2 > 0:
        ratio = Fraction(spec.w2, spec.w1)
        if not (q < ratio < spec.p):
            violations.append(f"weight ratio w2/w1 = {ratio} outside ({q}, {spec.p})")
    return violations


@dataclass
class FamilyInstance:
    spec: FamilySpec
    delta1: SubstitutedWeightedDegree
    delta2: SubstitutedWeightedDegree
    delta_max: MaxDegree
    degenerate: bool

    def to_json(self):
        return {
            "spec": self.spec.to_json(),
            "delta1": self.delta1.to_json(),
            "delta2": self.delta2.to_json(),
            "delta": self.delta_max.to_json(),
            "degenerate": self.degenerate,
        }


def instantiate_family(spec: FamilySpec) -> FamilyInstance:
    """Degree-function triple for a valid family member.

    A member whose f is even in x gives delta1 == delta2; such instances are
    flagged degenerate and carry no intersection-growth expectations.
    """
    violations = validate_family(spec)
    if violations:
        raise InvalidFamilyError("; ".join(violations))
    f1 = spec.shift_poly(conjugated=False)
    f2 = spec.shift_poly(conjugated=True)
    delta1 = SubstitutedWeightedDegree(spec.w1, spec.w2, f1)
    delta2 = SubstitutedWeightedDegree(spec.w1, spec.w2, f2)
    return FamilyInstance(
        spec=spec,
        delta1=delta1,
        delta2=delta2,
        delta_max=MaxDegree((delta1, delta2)),
        degenerate=f1 == f2,
    )


def main_family_spec() -> FamilySpec:
    """The quintic member reproducing the hard-coded degree pair."""
    return FamilySpec.make(p=5, coeffs={5: 1, -2: 1}, w1=1, w2=3)


# ---------------------------------------------------------------------------
# Conjugation and the even subring
# ---------------------------------------------------------------------------


def conjugate(f: LaurentPolynomial) -> LaurentPolynomial:
    """f(-x, y); an involutive ring automorphism of Q[x, 1/x, y]."""
    if f.ctx != XY_RING:
        raise PolyError("conjugation lives on the (x, y) context")
    return LaurentPolynomial(
        XY_RING, {e: c * (-1) ** (e[0] % 2) for e, c in f.terms.items()}
    )


@dataclass(frozen=True)
class ConjugatePair:
    """A polynomial together with its x -> -x conjugate."""

    f: LaurentPolynomial
    f_bar: LaurentPolynomial

    @staticmethod
    def of(f: LaurentPolynomial) -> "ConjugatePair":
        return ConjugatePair(f=f, f_bar=conjugate(f))

    def trace_and_norm(self) -> Tuple[LaurentPolynomial, LaurentPolynomial]:
        """(g1, g2) with T^2 + g1*T + g2 = (T - f)(T - f_bar)."""
        return -(self.f + self.f_bar), self.f * self.f_bar


def even_x_rewrite(f: LaurentPolynomial) -> LaurentPolynomial:
    """Rewrite a polynomial even in x through x^2 -> u; error if odd terms."""
    if f.ctx != XY_RING:
        raise PolyError("expected the (x, y) context")
    terms = {}
    for (a, b), c in f.terms.items():
        if a % 2:
            raise PolyError(f"term with odd x-exponent {a} has no even rewrite")
        terms[(a // 2, b)] = c
    return LaurentPolynomial(UV_RING, terms)


def pullback_to_xy(h: LaurentPolynomial) -> LaurentPolynomial:
    """h(x^2, y) for h in Q[u, 1/u, v]."""
    if h.ctx != UV_RING:
        raise PolyError("expected the (u, v) context")
    return LaurentPolynomial(XY_RING, {(2 * a, b): c for (a, b), c in h.terms.items()})


def pullback_eta(
    h: LaurentPolynomial,
    delta1: SubstitutedWeightedDegree = DELTA1,
    delta2: SubstitutedWeightedDegree = DELTA2,
    cross_check: Optional[PuiseuxDegree] = None,
):
    """Degree of h downstairs, via the pullback along u -> x^2, v -> y.

    Both conjugate rewrites are evaluated; a disagreement would falsify the
    conjugation symmetry and raises immediately.  When a Puiseux evaluator
    is supplied its value is required to agree as well.
    """
    fx = pullback_to_xy(h)
    d1 = delta1.eval(fx)
    d2 = delta2.eval(fx)
    if d1 != d2:
        raise PolyError(
            f"conjugate degrees disagree on {format_poly(h)}: {d1} vs {d2}"
        )
    if cross_check is not None:
        de = cross_check.eval(h)
        if de != d1:
            raise PolyError(
                f"series evaluation {de} disagrees with pullback {d1} on {format_poly(h)}"
            )
    return d1


@dataclass
class IntegralityReport:
    """Outcome of the monic-quadratic degree-bound check for one f."""

    f: str
    d_prime: object
    rows: list = field(default_factory=list)
    ok: bool = True

    def to_json(self):
        return {"f": self.f, "dPrime": str(self.d_prime), "rows": self.rows, "ok": self.ok}


def integral_closure_check(
    f: LaurentPolynomial,
    delta1: SubstitutedWeightedDegree = DELTA1,
    delta2: SubstitutedWeightedDegree = DELTA2,
    eta: Optional[PuiseuxDegree] = ETA,
) -> IntegralityReport:
    """Check eta(g_e) <= e * d' for the coefficients of (T - f)(T - f_bar).

    d' = max(delta1(f), delta2(f)).  Both coefficients are even in x by
    construction and are evaluated downstairs through the pullback (with the
    Puiseux evaluator as cross-check when supplied).
    """
    if f.is_zero:
        raise PolyError("integrality check needs a nonzero polynomial")
    pair = ConjugatePair.of(f)
    g1, g2 = pair.trace_and_norm()
    d_prime = max(delta1.eval(f), delta2.eval(f))
    report = IntegralityReport(f=format_poly(f), d_prime=d_prime)
    for e, g in ((1, g1), (2, g2)):
        if g.is_zero:
            report.rows.append({"e": e, "g": "0", "eta": None, "bound": e * d_prime, "ok": True})
            continue
        downstairs = even_x_rewrite(g)
        value = pullback_eta(downstairs, delta1, delta2, cross_check=eta)
        ok = value <= e * d_prime
        report.rows.append(
            {
                "e": e,
                "g": format_poly(downstairs),
                "eta": value,
                "bound": e * d_prime,
                "ok": ok,
            }
        )
        report.ok = report.ok and ok
    return report

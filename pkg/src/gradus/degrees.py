"""Degree-like functions on Laurent-polynomial rings.

Four kinds are implemented, all evaluating to an integer or NEG_INF
(the value reserved for the zero polynomial):

* WeightedDegree           -- max over terms of <exponents, weights>;
* SubstitutedWeightedDegree -- rewrite y as Y + shift(x), then take the
  weighted degree with weights (x_weight, -y_weight_neg).  These are exact
  semidegrees: additive on products, so their negatives are discrete
  valuations;
* MaxDegree                -- pointwise maximum of finitely many degree
  functions sharing one domain;
* PuiseuxDegree            -- substitute a finite fractional-power series
  (ramified through w = u^(1/e), generic coefficient xi) for v and read the
  top w-exponent, rescaled by scale/e.

A seeded sparse-polynomial sampler and a property checker for the
subadditivity/submultiplicativity axioms and the semidegree equality live
here as well; reports are plain data, serializable to JSON.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Tuple, Union

from .rings import (
    NEG_INF,
    LaurentPolynomial,
    PolyError,
    RingContext,
    format_poly,
    parse_poly,
    ring_context,
)

# Shared domain contexts.
XY_RING = ring_context("x", "y", invertible=("x",))
UV_RING = ring_context("u", "v", invertible=("u",))
W_RING = ring_context("w", invertible=("w",), xi=True)

# Internal rewrite target for substituted weighted degrees: x stays, the
# shifted variable Y = y - shift(x) gets the negative weight.
REWRITE_RING = ring_context("x", "Y", invertible=("x",))


@dataclass(frozen=True)
class WeightedDegree:
    """Plain weighted degree for a fixed weight vector."""

    weights: Tuple[int, ...]

    def eval(self, f: LaurentPolynomial):
        return f.weighted_degree(self.weights)

    def to_json(self):
        return {"kind": "weighted", "weights": list(self.weights)}


@dataclass(frozen=True)
class SubstitutedWeightedDegree:
    """Weighted degree read off after the rewrite y = Y + shift(x).

    ``shift`` is a Laurent polynomial in x alone (XY_RING); x carries weight
    ``x_weight`` > 0 and Y carries weight ``-y_weight_neg`` < 0.
    """

    x_weight: int
    y_weight_neg: int
    shift: LaurentPolynomial

    def __post_init__(self):
        if self.x_weight <= 0 or self.y_weight_neg <= 0:
            raise PolyError("weights must be positive integers")
        if self.shift.ctx != XY_RING:
            raise PolyError("shift must live in the (x, y) context")
        y_idx = XY_RING.index("y")
        if any(e[y_idx] != 0 for e in self.shift.terms):
            raise PolyError("shift must involve x only")

    def rewrite(self, f: LaurentPolynomial) -> LaurentPolynomial:
        """Image of f in REWRITE_RING under x -> x, y -> Y + shift."""
        if f.ctx != XY_RING:
            raise PolyError("substituted degree expects the (x, y) context")
        y_idx = XY_RING.index("y")
        if any(e[y_idx] < 0 for e in f.terms):
            raise PolyError("y-exponents must be nonnegative")
        shift_rw = LaurentPolynomial(
            REWRITE_RING, {(e[0], 0): c for e, c in self.shift.terms.items()}
        )
        images = {
            "x": LaurentPolynomial.variable(REWRITE_RING, "x"),
            "y": LaurentPolynomial.variable(REWRITE_RING, "Y") + shift_rw,
        }
        return f.apply_map(REWRITE_RING, images)

    def eval(self, f: LaurentPolynomial):
        return self.rewrite(f).weighted_degree((self.x_weight, -self.y_weight_neg))

    def to_json(self):
        return {
            "kind": "substituted",
            "xWeight": self.x_weight,
            "yWeightNeg": self.y_weight_neg,
            "shift": format_poly(self.shift),
        }


@dataclass(frozen=True)
class PuiseuxDegree:
    """Degree from a finite generic fractional-power series substitution.

    ``series`` lives in W_RING (w = u^(1/ramification), coefficients in
    Q[xi]).  Evaluation maps u -> w^ramification, v -> series and returns
    scale/ramification times the top surviving w-exponent.
    """

    ramification: int
    scale: int
    series: LaurentPolynomial

    def __post_init__(self):
        if self.ramification <= 0 or self.scale <= 0:
            raise PolyError("ramification and scale must be positive")
        if self.series.ctx != W_RING:
            raise PolyError("series must live in the w context")

    def substituted(self, h: LaurentPolynomial) -> LaurentPolynomial:
        """The w-expansion of h under u -> w^e, v -> series."""
        if h.ctx != UV_RING:
            raise PolyError("Puiseux degree expects the (u, v) context")
        v_idx = UV_RING.index("v")
        if any(e[v_idx] < 0 for e in h.terms):
            raise PolyError("v-exponents must be nonnegative")
        images = {
            "u": LaurentPolynomial.variable(W_RING, "w", self.ramification),
            "v": self.series,
        }
        return h.apply_map(W_RING, images)

    def eval(self, h: LaurentPolynomial):
        expansion = self.substituted(h)
        if expansion.is_zero:
            return NEG_INF
        top = max(e[0] for e in expansion.terms)
        value = Fraction(self.scale * top, self.ramification)
        if value.denominator != 1:
            raise PolyError(f"non-integral Puiseux degree {value}")
        return int(value)

    def to_json(self):
        return {
            "kind": "puiseux",
            "ramification": self.ramification,
            "scale": self.scale,
            "series": format_poly(self.series),
        }


@dataclass(frozen=True)
class MaxDegree:
    """Pointwise maximum of finitely many degree functions."""

    components: Tuple["DegreeFunction", ...]

    def __post_init__(self):
        if not self.components:
            raise PolyError("MaxDegree needs at least one component")

    def eval(self, f: LaurentPolynomial):
        return max(c.eval(f) for c in self.components)

    def to_json(self):
        return {"kind": "max", "components": [c.to_json() for c in self.components]}


DegreeFunction = Union[WeightedDegree, SubstitutedWeightedDegree, PuiseuxDegree, MaxDegree]


def degree_from_json(data) -> DegreeFunction:
    kind = data.get("kind")
    if kind == "weighted":
        return WeightedDegree(tuple(data["weights"]))
    if kind == "substituted":
        return SubstitutedWeightedDegree(
            data["xWeight"], data["yWeightNeg"], parse_poly(data["shift"], XY_RING)
        )
    if kind == "puiseux":
        return PuiseuxDegree(
            data["ramification"], data["scale"], parse_poly(data["series"], W_RING)
        )
    if kind == "max":
        return MaxDegree(tuple(degree_from_json(c) for c in data["components"]))
    raise PolyError(f"unknown degree-function kind {kind!r}")


# ---------------------------------------------------------------------------
# The quintic counterexample instance, hard-coded.
# ---------------------------------------------------------------------------

DELTA1 = SubstitutedWeightedDegree(1, 3, parse_poly("x^5 + x^-2", XY_RING))
DELTA2 = SubstitutedWeightedDegree(1, 3, parse_poly("-x^5 + x^-2", XY_RING))
DELTA_MAX = MaxDegree((DELTA1, DELTA2))
ETA = PuiseuxDegree(2, 2, parse_poly("w^5 + w^-2 + xi*w^-3", W_RING))

# Key forms of the valuation -ETA, as elements of Q[u, 1/u, v]; the last one
# is genuinely non-polynomial in u, which is the non-projectivity witness.
KEY_FORMS = tuple(
    parse_poly(s, UV_RING)
    for s in ("u", "v", "v^2 - u^5", "v^2 - u^5 - 2*u^-1*v")
)


def is_polynomial_in(f: LaurentPolynomial, var: str) -> bool:
    rng = f.exponent_range(var)
    return rng is None or rng[0] >= 0


# ---------------------------------------------------------------------------
# Sampling and property checking
# ---------------------------------------------------------------------------


@dataclass
class PolySampler:
    """Deterministic sparse-polynomial source with small integer coefficients.

    Coefficient numerators are drawn from [-9, 9] \\ {0}; monomial total
    degrees stay within ``degree_bound``.  Exponents are nonnegative (the
    sampled values are honest polynomials even in invertible variables).
    """

    ctx: RingContext
    seed: int
    degree_bound: int = 6
    max_terms: int = 4

    def __post_init__(self):
        self.rng = random.Random(self.seed)

    def poly(self) -> LaurentPolynomial:
        """One random nonzero polynomial."""
        while True:
            nterms = self.rng.randint(1, self.max_terms)
            terms = {}
            for _ in range(nterms):
                total = self.rng.randint(0, self.degree_bound)
                exps = [0] * self.ctx.nvars
                for _ in range(total):
                    exps[self.rng.randrange(self.ctx.nvars)] += 1
                coeff = self.rng.choice([c for c in range(-9, 10) if c])
                key = tuple(exps)
                terms[key] = terms.get(key, 0) + coeff
            f = LaurentPolynomial(self.ctx, terms)
            if not f.is_zero:
                return f

    def pair(self):
        return self.poly(), self.poly()


@dataclass
class DegreePropertyReport:
    """Outcome of the subadditivity / submultiplicativity sampling run."""

    kind: str
    seed: int
    count: int
    semidegree_required: bool
    p1_violations: list = field(default_factory=list)
    p2_violations: list = field(default_factory=list)
    equality_violations: list = field(default_factory=list)
    strict_p2_witnesses: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        if self.p1_violations or self.p2_violations:
            return False
        if self.semidegree_required and self.equality_violations:
            return False
        return True

    def to_json(self):
        return {
            "kind": self.kind,
            "seed": self.seed,
            "count": self.count,
            "semidegreeRequired": self.semidegree_required,
            "p1Violations": self.p1_violations,
            "p2Violations": self.p2_violations,
            "equalityViolations": self.equality_violations,
            "strictP2Witnesses": self.strict_p2_witnesses[:5],
            "ok": self.ok,
        }


def check_degree_properties(
    delta: DegreeFunction, sampler: PolySampler, n: int
) -> DegreePropertyReport:
    """Check delta(f+g) <= max and delta(fg) <= sum on n sampled pairs.

    Semidegree equality (delta(fg) == delta(f) + delta(g)) is required for
    every kind except MaxDegree, for which strict submultiplicativity
    witnesses are recorded instead of flagged.
    """
    require_equality = not isinstance(delta, MaxDegree)
    report = DegreePropertyReport(
        kind=delta.to_json()["kind"],
        seed=sampler.seed,
        count=n,
        semidegree_required=require_equality,
    )
    for k in range(n):
        f, g = sampler.pair()
        df, dg = delta.eval(f), delta.eval(g)
        dsum = delta.eval(f + g)
        dprod = delta.eval(f * g)
        tag = f"sample {k}: f={format_poly(f)}, g={format_poly(g)}"
        if dsum > max(df, dg):
            report.p1_violations.append(f"{tag}: {dsum} > max({df}, {dg})")
        if dprod > df + dg:
            report.p2_violations.append(f"{tag}: {dprod} > {df} + {dg}")
        elif dprod < df + dg:
            entry = f"{tag}: {dprod} < {df} + {dg}"
            if require_equality:
                report.equality_violations.append(entry)
            else:
                report.strict_p2_witnesses.append(entry)
    return report


def valuation_axiom_check(
    delta: SubstitutedWeightedDegree, sampler: PolySampler, n: int
) -> list:
    """Violations of the discrete-valuation axioms for -delta on samples."""
    failures = []
    for k in range(n):
        f, g = sampler.pair()
        vf, vg = -delta.eval(f), -delta.eval(g)
        if not isinstance(vf, int) or not isinstance(vg, int):
            failures.append(f"sample {k}: non-integer value on nonzero input")
            continue
        if -delta.eval(f * g) != vf + vg:
            failures.append(f"sample {k}: v(fg) != v(f) + v(g)")
        s = f + g
        if not s.is_zero and -delta.eval(s) < min(vf, vg):
            failures.append(f"sample {k}: v(f+g) < min(v(f), v(g))")
    return failures

"""Presentation machinery for the two shifted-weight degree functions.

Everything here works over S = Q[x, y, z1, z2] with the weight vector
omega = (1, 5, -2, -1).  For i in {1, 2} (sign s = +1, -1):

* ``apply_pi``        -- the algebra map fixing Q[x, y] with
  z1 -> y - s*x^5 and z2 -> x^2*(y - s*x^5) - 1;
* ``ideal_membership`` -- decides membership in the ideal generated by
  y - s*x^5 and x^2*z1 - 1 by mapping onto the quotient Q[x, 1/x, z2]
  (y -> s*x^5, z1 -> x^-2) and testing for zero.  The quotient map is an
  isomorphism onto its image, so the test is complete for these ideals;
* ``decompose_leading`` -- writes a weighted-homogeneous member H as
  H1*(y - s*x^5) + H2*(x^2*z1 - 1), first by exact division (synthetic
  division in y, then coefficient recursion in z1 over the x-localized
  ring), with a bounded linear solve as fallback;
* ``descend_lift``    -- lowers a lift's omega-degree step by step until it
  matches the shifted-weight degree of its image, replacing leading forms
  via decompose_leading;
* ``drop_equivalence_scan`` -- samples weighted-homogeneous F and checks
  the biconditional [omega(F) > delta_i(pi_i(F))] <=> membership.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple

from . import linalg
from .degrees import DELTA1, DELTA2, XY_RING, SubstitutedWeightedDegree
from .rings import (
    LaurentPolynomial,
    PolyError,
    format_poly,
    parse_poly,
    ring_context,
)

S_RING = ring_context("x", "y", "z1", "z2")
SX_RING = ring_context("x", "y", "z1", "z2", invertible=("x",))
QUOTIENT_RING = ring_context("x", "z2", invertible=("x",))

OMEGA = (1, 5, -2, -1)


class NonMemberError(PolyError):
    """decompose_leading was handed a polynomial outside the ideal."""


class DecompositionError(PolyError):
    """No cofactor pair found within the current search bound."""


def _convert(f: LaurentPolynomial, target) -> LaurentPolynomial:
    # Positional reinterpretation between S_RING and SX_RING.
    return LaurentPolynomial(target, dict(f.terms))


@dataclass(frozen=True)
class SContext:
    """Pins the index i, its sign, and the matching shifted-weight degree."""

    i: int

    def __post_init__(self):
        if self.i not in (1, 2):
            raise PolyError("index must be 1 or 2")

    @property
    def sign(self) -> int:
        return 1 if self.i == 1 else -1

    @property
    def delta(self) -> SubstitutedWeightedDegree:
        return DELTA1 if self.i == 1 else DELTA2

    @property
    def g1(self) -> LaurentPolynomial:
        return parse_poly("y - x^5" if self.i == 1 else "y + x^5", S_RING)

    @property
    def g2(self) -> LaurentPolynomial:
        return parse_poly("x^2*z1 - 1", S_RING)

    def pi_images(self) -> Dict[str, LaurentPolynomial]:
        s = "-" if self.i == 1 else "+"
        return {
            "x": parse_poly("x", XY_RING),
            "y": parse_poly("y", XY_RING),
            "z1": parse_poly(f"y {s} x^5", XY_RING),
            "z2": parse_poly(f"x^2*(y {s} x^5) - 1", XY_RING),
        }

    def quotient_images(self) -> Dict[str, LaurentPolynomial]:
        sgn = "" if self.i == 1 else "-"
        return {
            "x": parse_poly("x", QUOTIENT_RING),
            "y": parse_poly(f"{sgn}x^5" if sgn else "x^5", QUOTIENT_RING),
            "z1": parse_poly("x^-2", QUOTIENT_RING),
            "z2": parse_poly("z2", QUOTIENT_RING),
        }


def xy_to_s(f: LaurentPolynomial) -> LaurentPolynomial:
    """Embed a polynomial from Q[x, y] into S; rejects negative x-powers."""
    if f.ctx != XY_RING:
        raise PolyError("expected the (x, y) context")
    rng = f.exponent_range("x")
    if rng is not None and rng[0] < 0:
        raise PolyError("only polynomials embed into S")
    return LaurentPolynomial(S_RING, {(e[0], e[1], 0, 0): c for e, c in f.terms.items()})


def apply_pi(ctx: SContext, F: LaurentPolynomial) -> LaurentPolynomial:
    """Image in Q[x, y] under z1, z2 -> their defining polynomials."""
    if F.ctx != S_RING:
        raise PolyError("expected a polynomial in S")
    return F.apply_map(XY_RING, ctx.pi_images())


def ideal_membership(ctx: SContext, F: LaurentPolynomial) -> bool:
    """Exact membership test via the graded quotient isomorphism."""
    if F.ctx != S_RING:
        raise PolyError("expected a polynomial in S")
    return F.apply_map(QUOTIENT_RING, ctx.quotient_images()).is_zero


def _y_synthetic_division(
    ctx: SContext, H: LaurentPolynomial
) -> Tuple[LaurentPolynomial, LaurentPolynomial]:
    """H = Q*(y - s*x^5) + R with R free of y; divisor is monic in y."""
    root = parse_poly("x^5" if ctx.i == 1 else "-x^5", S_RING)
    by_y: Dict[int, LaurentPolynomial] = {}
    for exps, c in H.terms.items():
        j = exps[1]
        stripped = (exps[0], 0, exps[2], exps[3])
        by_y[j] = by_y.get(j, LaurentPolynomial.zero(S_RING)) + LaurentPolynomial(
            S_RING, {stripped: c}
        )
    top = max(by_y) if by_y else 0
    if top == 0:
        return LaurentPolynomial.zero(S_RING), H
    zero = LaurentPolynomial.zero(S_RING)
    b: Dict[int, LaurentPolynomial] = {top - 1: by_y.get(top, zero)}
    for k in range(top - 1, 0, -1):
        b[k - 1] = by_y.get(k, zero) + root * b[k]
    remainder = by_y.get(0, zero) + root * b[0]
    y_var = LaurentPolynomial.variable(S_RING, "y")
    quotient = zero
    for k, coeff in b.items():
        quotient = quotient + coeff * y_var**k
    return quotient, remainder


def _z1_exact_division(remainder: LaurentPolynomial) -> Optional[LaurentPolynomial]:
    """Q with remainder == Q*(x^2*z1 - 1), or None if division leaves x-poles."""
    r = _convert(remainder, SX_RING)
    by_z1: Dict[int, LaurentPolynomial] = {}
    for exps, c in r.terms.items():
        k = exps[2]
        stripped = (exps[0], exps[1], 0, exps[3])
        by_z1[k] = by_z1.get(k, LaurentPolynomial.zero(SX_RING)) + LaurentPolynomial(
            SX_RING, {stripped: c}
        )
    if not by_z1:
        return LaurentPolynomial.zero(S_RING)
    m = max(by_z1)
    zero = LaurentPolynomial.zero(SX_RING)
    if m == 0:
        return LaurentPolynomial.zero(S_RING) if remainder.is_zero else None
    x_inv_sq = parse_poly("x^-2", SX_RING)
    q: Dict[int, LaurentPolynomial] = {m - 1: by_z1.get(m, zero) * x_inv_sq}
    for k in range(m - 1, 0, -1):
        q[k - 1] = (by_z1.get(k, zero) + q[k]) * x_inv_sq
    if by_z1.get(0, zero) + q[0] != zero:
        return None
    z1_var = LaurentPolynomial.variable(SX_RING, "z1")
    quotient = zero
    for k, coeff in q.items():
        quotient = quotient + coeff * z1_var**k
    rng = quotient.exponent_range("x")
    if rng is not None and rng[0] < 0:
        return None
    return _convert(quotient, S_RING)


# Monomial supports for weighted-homogeneous sampling and the solve fallback.
_support_cache: Dict[Tuple[int, int], List[Tuple[int, int, int, int]]] = {}


def homogeneous_support(omega_degree: int, total_degree_bound: int):
    """All S-monomials of the given omega-degree and bounded total degree."""
    key = (omega_degree, total_degree_bound)
    if key not in _support_cache:
        out = []
        B = total_degree_bound
        for l in range(B + 1):
            for m1 in range(B + 1 - l):
                for m2 in range(B + 1 - l - m1):
                    k = omega_degree - 5 * l + 2 * m1 + m2
                    if k >= 0 and k + l + m1 + m2 <= B:
                        out.append((k, l, m1, m2))
        out.sort()
        _support_cache[key] = out
    return _support_cache[key]


def _fallback_decompose(
    ctx: SContext, H: LaurentPolynomial, max_bound: int = 64
) -> Tuple[LaurentPolynomial, LaurentPolynomial]:
    """Cofactors by a linear solve over a bounded monomial support.

    The support bound doubles on failure; mixed-sign weights make the
    homogeneous support infinite, so some bound is unavoidable.
    """
    omega_H = H.weighted_degree(OMEGA)
    bound = max(int(H.total_degree()), 6)
    while bound <= max_bound:
        unknowns: List[Tuple[int, LaurentPolynomial]] = []
        for mono in homogeneous_support(omega_H - 5, bound):
            unknowns.append((1, LaurentPolynomial(S_RING, {mono: 1})))
        for mono in homogeneous_support(omega_H, bound):
            unknowns.append((2, LaurentPolynomial(S_RING, {mono: 1})))
        columns: Dict[Tuple[int, ...], int] = {}
        rows_by_unknown = []
        for which, mono in unknowns:
            g = ctx.g1 if which == 1 else ctx.g2
            prod = mono * g
            entry = {}
            for exps, c in prod.terms.items():
                col = columns.setdefault(exps, len(columns))
                entry[col] = c
            rows_by_unknown.append(entry)
        denom_lcm = 1
        for c in H.terms.values():
            d = Fraction(c).denominator
            denom_lcm = denom_lcm // gcd(denom_lcm, d) * d
        rhs_dense: Dict[int, int] = {}
        for exps, c in H.terms.items():
            col = columns.setdefault(exps, len(columns))
            rhs_dense[col] = int(Fraction(c) * denom_lcm)
        nrows = len(columns)
        rows: List[Dict[int, int]] = [{} for _ in range(nrows)]
        for j, entry in enumerate(rows_by_unknown):
            for col, c in entry.items():
                num = Fraction(c)
                rows[col][j] = int(num)
        rhs = [rhs_dense.get(r, 0) for r in range(nrows)]
        sol = linalg.solve(rows, rhs, len(unknowns))
        if sol is not None:
            den = sol.pop(-1) * denom_lcm
            H1 = LaurentPolynomial.zero(S_RING)
            H2 = LaurentPolynomial.zero(S_RING)
            for j, num in sol.items():
                which, mono = unknowns[j]
                scaled = mono * Fraction(num, den)
                if which == 1:
                    H1 = H1 + scaled
                else:
                    H2 = H2 + scaled
            return H1, H2
        bound *= 2
    raise DecompositionError(
        f"no cofactor pair with support bound {max_bound} for {format_poly(H)}"
    )


def decompose_leading(
    ctx: SContext, H: LaurentPolynomial
) -> Tuple[LaurentPolynomial, LaurentPolynomial]:
    """Write a weighted-homogeneous member H as H1*g1 + H2*g2.

    The result re-expands to H exactly (verified before returning) and both
    cofactors are weighted-homogeneous of the forced degrees.
    """
    if H.is_zero:
        raise PolyError("cannot decompose the zero polynomial")
    if not H.is_weighted_homogeneous(OMEGA):
        raise PolyError("decompose_leading needs a weighted-homogeneous input")
    if not ideal_membership(ctx, H):
        raise NonMemberError(f"{format_poly(H)} is not in the ideal for i={ctx.i}")
    H1, remainder = _y_synthetic_division(ctx, H)
    H2 = _z1_exact_division(remainder)
    if H2 is None:
        H1, H2 = _fallback_decompose(ctx, H)
    if H1 * ctx.g1 + H2 * ctx.g2 != H:
        raise DecompositionError(
            f"re-expansion check failed for {format_poly(H)}"
        )
    return H1, H2


@dataclass
class LiftResult:
    lift: LaurentPolynomial
    omega_degree: int
    delta_value: int
    steps: int


def descend_lift(
    ctx: SContext, f: LaurentPolynomial, F0: Optional[LaurentPolynomial] = None
) -> LiftResult:
    """Produce F in S with pi_i(F) = f and omega(F) = delta_i(f).

    Starts from F0 (default: f itself) and replaces the leading weighted
    form through the ideal decomposition until the degree matches; both
    postconditions are re-checked on every call.
    """
    if f.ctx != XY_RING or f.is_zero:
        raise PolyError("descend_lift needs a nonzero polynomial in Q[x, y]")
    target = ctx.delta.eval(f)
    F = xy_to_s(f) if F0 is None else F0
    if apply_pi(ctx, F) != f:
        raise PolyError("starting lift does not map onto f")
    z1_var = LaurentPolynomial.variable(S_RING, "z1")
    z2_var = LaurentPolynomial.variable(S_RING, "z2")
    steps = 0
    guard = F.weighted_degree(OMEGA) - target + 1
    while F.weighted_degree(OMEGA) > target:
        H = F.leading_form(OMEGA)
        H1, H2 = decompose_leading(ctx, H)
        F = (F - H) + H1 * z1_var + H2 * z2_var
        steps += 1
        if steps > guard:
            raise PolyError("descent failed to terminate")
    if apply_pi(ctx, F) != f or F.weighted_degree(OMEGA) != target:
        raise PolyError("descent postcondition violated")
    return LiftResult(F, F.weighted_degree(OMEGA), target, steps)


def random_homogeneous(
    rng: random.Random, omega_degree: int, total_degree_bound: int, max_terms: int = 3
) -> LaurentPolynomial:
    """Random omega-homogeneous element of S; zero if the support is empty."""
    support = homogeneous_support(omega_degree, total_degree_bound)
    if not support:
        return LaurentPolynomial.zero(S_RING)
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        mono = support[rng.randrange(len(support))]
        coeff = rng.choice([c for c in range(-9, 10) if c])
        terms[mono] = terms.get(mono, 0) + coeff
    return LaurentPolynomial(S_RING, terms)


@dataclass
class ScanReport:
    """Result of sampling the degree-drop / membership biconditional."""

    i: int
    seed: int
    count: int
    omega_bound: int
    total_degree_bound: int
    disagreements: list = field(default_factory=list)
    member_samples: int = 0

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def to_json(self):
        return {
            "i": self.i,
            "seed": self.seed,
            "count": self.count,
            "omegaBound": self.omega_bound,
            "totalDegreeBound": self.total_degree_bound,
            "memberSamples": self.member_samples,
            "disagreements": self.disagreements,
            "ok": self.ok,
        }


def drop_equivalence_scan(
    ctx: SContext,
    n: int,
    seed: int,
    omega_bound: int = 20,
    total_degree_bound: int = 12,
) -> ScanReport:
    """Check [omega(F) > delta_i(pi_i(F))] <=> membership on n samples.

    Half the samples are constructed inside the ideal so both directions of
    the biconditional get exercised.  Samples with pi_i(F) = 0 are
    discarded (the degree comparison is degenerate there).
    """
    rng = random.Random(seed)
    report = ScanReport(ctx.i, seed, n, omega_bound, total_degree_bound)
    produced = 0
    while produced < n:
        D = rng.randint(-omega_bound, omega_bound)
        if rng.random() < 0.5:
            A = random_homogeneous(rng, D - 5, total_degree_bound - 5)
            B = random_homogeneous(rng, D, total_degree_bound - 3)
            F = A * ctx.g1 + B * ctx.g2
        else:
            F = random_homogeneous(rng, D, total_degree_bound)
        if F.is_zero:
            continue
        image = apply_pi(ctx, F)
        if image.is_zero:
            continue
        produced += 1
        member = ideal_membership(ctx, F)
        drop = F.weighted_degree(OMEGA) > ctx.delta.eval(image)
        if member:
            report.member_samples += 1
        if member != drop:
            report.disagreements.append(
                f"F={format_poly(F)}: member={member}, strict drop={drop}"
            )
    return report

"""Sparse exact arithmetic for multivariate Laurent polynomials.

A ring element is a map from exponent tuples to coefficients; no zero
coefficient is ever stored, so two values are equal iff their term maps
are equal.  Exponents may be negative exactly in the positions a ring
context flags as invertible.  Coefficients are exact rationals
(fractions.Fraction), or dense univariate polynomials in a generic
scalar ``xi`` (XiPoly) for contexts created with ``xi=True``.  Degree
computations never look inside a XiPoly: a term counts as present iff
its coefficient polynomial is nonzero.

Expression strings use the ASCII grammar

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := var ('^' int)? | int ('/' posint)? | '(' expr ')'

with insignificant whitespace; ``xi`` is accepted as a factor only in
xi-coefficient contexts.  Printing is canonical: terms are ordered by
graded-lexicographic comparison of exponent vectors (descending), so
``parse_poly(format_poly(f), f.ctx) == f`` always holds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Tuple, Union

# Degree of the zero polynomial; absorbing under + and max.
NEG_INF = float("-inf")

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


class PolyError(Exception):
    """Base class for all errors raised by this module."""


class ContextMismatchError(PolyError):
    """Two operands live in different ring contexts."""


class ParseError(PolyError):
    """Malformed expression string; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SubstitutionError(PolyError):
    """Substitution that would require localization or xi-division."""


@dataclass(frozen=True)
class XiPoly:
    """Polynomial in the generic scalar xi with Fraction coefficients.

    Stored densely by xi-exponent with no trailing zeros; the zero
    polynomial is the empty tuple.
    """

    coeffs: Tuple[Fraction, ...] = ()

    @staticmethod
    def const(value) -> "XiPoly":
        q = Fraction(value)
        return XiPoly(() if q == 0 else (q,))

    @staticmethod
    def gen() -> "XiPoly":
        return XiPoly((Fraction(0), Fraction(1)))

    @staticmethod
    def _trim(coeffs: Sequence[Fraction]) -> "XiPoly":
        n = len(coeffs)
        while n and coeffs[n - 1] == 0:
            n -= 1
        return XiPoly(tuple(coeffs[:n]))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: "XiPoly") -> "XiPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return XiPoly._trim(out)

    def __neg__(self) -> "XiPoly":
        return XiPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "XiPoly") -> "XiPoly":
        return self + (-other)

    def __mul__(self, other: "XiPoly") -> "XiPoly":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return XiPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    if cb:
                        out[i + j] += ca * cb
        return XiPoly._trim(out)

    def scale(self, q: Fraction) -> "XiPoly":
        if q == 0:
            return XiPoly()
        return XiPoly(tuple(c * q for c in self.coeffs))

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def inverse(self) -> "XiPoly":
        if self.degree() != 0:
            raise SubstitutionError("cannot invert a coefficient involving xi")
        return XiPoly((1 / self.coeffs[0],))


Coefficient = Union[Fraction, XiPoly]


@dataclass(frozen=True)
class RingContext:
    """Ordered variable names with per-variable invertibility flags."""

    names: Tuple[str, ...]
    invertible: Tuple[bool, ...]
    coeff_xi: bool = False
    xi_name: str = "xi"

    def __post_init__(self):
        if len(self.names) != len(self.invertible):
            raise PolyError("names and invertibility flags differ in length")
        if len(set(self.names)) != len(self.names):
            raise PolyError("duplicate variable names")
        for name in self.names:
            if not _NAME_RE.match(name):
                raise PolyError(f"bad variable name {name!r}")
            if name == self.xi_name:
                raise PolyError(f"{name!r} collides with the coefficient generator")

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise PolyError(f"undeclared variable {name!r}") from None

    def coerce(self, value) -> Coefficient:
        """Bring an int/Fraction/XiPoly into this context's coefficient ring."""
        if isinstance(value, XiPoly):
            if not self.coeff_xi:
                raise PolyError("xi coefficient in a plain rational context")
            return value
        q = Fraction(value)
        return XiPoly.const(q) if self.coeff_xi else q

    def zero_coeff(self) -> Coefficient:
        return XiPoly() if self.coeff_xi else Fraction(0)


def ring_context(*names: str, invertible: Iterable[str] = (), xi: bool = False) -> RingContext:
    inv = set(invertible)
    unknown = inv.difference(names)
    if unknown:
        raise PolyError(f"invertible flag for undeclared variable(s) {sorted(unknown)}")
    return RingContext(tuple(names), tuple(n in inv for n in names), coeff_xi=xi)


def _grlex_key(exps: Tuple[int, ...]):
    return (sum(exps), exps)


class LaurentPolynomial:
    """Immutable sparse Laurent polynomial over a ring context."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: RingContext, terms: Union[Mapping, Iterable] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        norm: dict = {}
        for exps, coeff in items:
            exps = tuple(exps)
            if len(exps) != ctx.nvars:
                raise PolyError(
                    f"exponent tuple {exps} has length {len(exps)}, expected {ctx.nvars}"
                )
            for e, flag, name in zip(exps, ctx.invertible, ctx.names):
                if e < 0 and not flag:
                    raise PolyError(f"negative exponent on non-invertible variable {name!r}")
            c = ctx.coerce(coeff)
            if exps in norm:
                c = norm[exps] + c
            if c:
                norm[exps] = c
            elif exps in norm:
                del norm[exps]
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "terms", norm)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, ctx: RingContext, terms: dict) -> "LaurentPolynomial":
        # Internal: terms already normalized (no zeros, valid exponents).
        self = object.__new__(cls)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_hash", None)
        return self

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, ctx: RingContext) -> "LaurentPolynomial":
        return cls._raw(ctx, {})

    @classmethod
    def constant(cls, ctx: RingContext, value) -> "LaurentPolynomial":
        c = ctx.coerce(value)
        if not c:
            return cls.zero(ctx)
        return cls._raw(ctx, {(0,) * ctx.nvars: c})

    @classmethod
    def one(cls, ctx: RingContext) -> "LaurentPolynomial":
        return cls.constant(ctx, 1)

    @classmethod
    def variable(cls, ctx: RingContext, name: str, power: int = 1) -> "LaurentPolynomial":
        exps = [0] * ctx.nvars
        exps[ctx.index(name)] = power
        return cls(ctx, {tuple(exps): 1})

    @classmethod
    def xi(cls, ctx: RingContext) -> "LaurentPolynomial":
        if not ctx.coeff_xi:
            raise PolyError("context has no xi coefficient ring")
        return cls._raw(ctx, {(0,) * ctx.nvars: XiPoly.gen()})

    # -- basic protocol ----------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentPolynomial.constant(self.ctx, other)
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.ctx, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        return f"<{format_poly(self)}>"

    def sorted_terms(self):
        """Terms in canonical (graded-lex descending) order."""
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    # -- arithmetic ---------------------------------------------------

    def _check_ctx(self, other: "LaurentPolynomial"):
        if self.ctx != other.ctx:
            raise ContextMismatchError(
                f"operands in different contexts {self.ctx.names} vs {other.ctx.names}"
            )

    def _coerce_operand(self, other):
        if isinstance(other, (int, Fraction, XiPoly)):
            return LaurentPolynomial.constant(self.ctx, other)
        return other

    def __add__(self, other):
        other = self._coerce_operand(other)
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        self._check_ctx(other)
        out = dict(self.terms)
        for exps, c in other.terms.items():
            s = out.get(exps)
            s = c if s is None else s + c
            if s:
                out[exps] = s
            elif exps in out:
                del out[exps]
        return LaurentPolynomial._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial._raw(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce_operand(other)
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce_operand(other)
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        self._check_ctx(other)
        if not self.terms or not other.terms:
            return LaurentPolynomial.zero(self.ctx)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                s = out.get(e)
                s = c if s is None else s + c
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        return LaurentPolynomial._raw(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise PolyError("polynomial powers must be nonnegative integers")
        result = LaurentPolynomial.one(self.ctx)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- structure queries ---------------------------------------------

    def coefficient(self, exps: Sequence[int]) -> Coefficient:
        return self.terms.get(tuple(exps), self.ctx.zero_coeff())

    def total_degree(self):
        if not self.terms:
            return NEG_INF
        return max(sum(e) for e in self.terms)

    def exponent_range(self, var: str):
        """(min, max) exponent of ``var`` over stored terms; None if zero."""
        if not self.terms:
            return None
        i = self.ctx.index(var)
        exps = [e[i] for e in self.terms]
        return (min(exps), max(exps))

    def variables_used(self):
        used = set()
        for e in self.terms:
            for i, v in enumerate(e):
                if v:
                    used.add(self.ctx.names[i])
        return used

    # -- weighted-degree primitives -------------------------------------

    def weighted_degree(self, weights: Sequence[int]):
        """Max over stored terms of <exponents, weights>; NEG_INF on zero."""
        if len(weights) != self.ctx.nvars:
            raise PolyError("weight vector length does not match context")
        if not self.terms:
            return NEG_INF
        return max(sum(e * w for e, w in zip(exps, weights)) for exps in self.terms)

    def weighted_components(self, weights: Sequence[int]) -> dict:
        """Split into weighted-homogeneous components keyed by degree."""
        if len(weights) != self.ctx.nvars:
            raise PolyError("weight vector length does not match context")
        buckets: dict = {}
        for exps, c in self.terms.items():
            d = sum(e * w for e, w in zip(exps, weights))
            buckets.setdefault(d, {})[exps] = c
        return {
            d: LaurentPolynomial._raw(self.ctx, part) for d, part in sorted(buckets.items())
        }

    def leading_form(self, weights: Sequence[int]) -> "LaurentPolynomial":
        """Sum of the terms attaining the weighted degree; input must be nonzero."""
        if not self.terms:
            raise PolyError("leading form of the zero polynomial is undefined")
        top = self.weighted_degree(weights)
        part = {
            exps: c
            for exps, c in self.terms.items()
            if sum(e * w for e, w in zip(exps, weights)) == top
        }
        return LaurentPolynomial._raw(self.ctx, part)

    def is_weighted_homogeneous(self, weights: Sequence[int]) -> bool:
        return len(self.weighted_components(weights)) <= 1

    # -- ring maps -------------------------------------------------------

    def _unit_monomial_inverse(self) -> "LaurentPolynomial":
        if len(self.terms) != 1:
            raise SubstitutionError("inverse exists only for single-term monomials")
        (exps, c), = self.terms.items()
        for e, flag, name in zip(exps, self.ctx.invertible, self.ctx.names):
            if e != 0 and not flag:
                raise SubstitutionError(
                    f"cannot invert monomial: variable {name!r} is not invertible"
                )
        inv_c = c.inverse() if isinstance(c, XiPoly) else 1 / c
        return LaurentPolynomial._raw(self.ctx, {tuple(-e for e in exps): inv_c})

    def apply_map(
        self, target: RingContext, images: Mapping[str, "LaurentPolynomial"]
    ) -> "LaurentPolynomial":
        """Image under the ring map sending each variable to ``images[name]``.

        Every variable actually occurring in ``self`` must have an image in
        the target context.  A negative exponent requires the image to be an
        invertible single-term monomial.
        """
        for name, img in images.items():
            if img.ctx != target:
                raise ContextMismatchError(f"image of {name!r} is not in the target context")
        if self.ctx.coeff_xi and not target.coeff_xi:
            raise PolyError("cannot map xi coefficients into a plain rational context")
        result = LaurentPolynomial.zero(target)
        pow_cache: dict = {}
        for exps, c in self.terms.items():
            term = LaurentPolynomial.constant(target, c)
            for i, e in enumerate(exps):
                if e == 0:
                    continue
                name = self.ctx.names[i]
                if name not in images:
                    raise SubstitutionError(f"no image given for variable {name!r}")
                key = (name, e)
                if key not in pow_cache:
                    img = images[name]
                    if e < 0:
                        pow_cache[key] = img._unit_monomial_inverse() ** (-e)
                    else:
                        pow_cache[key] = img ** e
                term = term * pow_cache[key]
            result = result + term
        return result

    def substitute(self, var: str, value: "LaurentPolynomial") -> "LaurentPolynomial":
        """Image under the same-context map fixing all variables but ``var``.

        If ``var`` occurs with a negative exponent, ``value`` must be an
        invertible single-term monomial.
        """
        self._check_ctx(value)
        idx = self.ctx.index(var)
        if any(e[idx] < 0 for e in self.terms) and len(value.terms) != 1:
            raise SubstitutionError(
                f"negative exponent of {var!r} with a multi-term value"
            )
        images = {
            name: LaurentPolynomial.variable(self.ctx, name) for name in self.ctx.names
        }
        images[var] = value
        return self.apply_map(self.ctx, images)


# ---------------------------------------------------------------------------
# parsing / printing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\^|\*|\+|-|/|\(|\))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), pos))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), pos))
        else:
            tokens.append(("op", m.group(3), pos))
        pos = m.end()
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str, ctx: RingContext):
        self.tokens = _tokenize(text)
        self.ctx = ctx
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, symbol: str):
        kind, value, pos = self.advance()
        if kind != "op" or value != symbol:
            raise ParseError(f"expected {symbol!r}", pos)

    def parse(self) -> LaurentPolynomial:
        poly = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ParseError("trailing input", pos)
        return poly

    def expr(self) -> LaurentPolynomial:
        kind, value, _ = self.peek()
        negate = False
        if kind == "op" and value in "+-":
            self.advance()
            negate = value == "-"
        poly = self.term()
        if negate:
            poly = -poly
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                poly = poly - rhs if value == "-" else poly + rhs
            else:
                return poly

    def term(self) -> LaurentPolynomial:
        poly = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "*":
                self.advance()
                poly = poly * self.factor()
            else:
                return poly

    def factor(self) -> LaurentPolynomial:
        kind, value, pos = self.advance()
        if kind == "int":
            num = value
            kind2, _, _ = self.peek()
            if kind2 == "op" and self.peek()[1] == "/":
                self.advance()
                dkind, dval, dpos = self.advance()
                if dkind != "int" or dval == 0:
                    raise ParseError("expected positive integer denominator", dpos)
                return LaurentPolynomial.constant(self.ctx, Fraction(num, dval))
            return LaurentPolynomial.constant(self.ctx, num)
        if kind == "name":
            if value == self.ctx.xi_name:
                if not self.ctx.coeff_xi:
                    raise ParseError(
                        f"coefficient generator {value!r} not available here", pos
                    )
                exp = self.maybe_exponent()
                if exp < 0:
                    raise ParseError("negative power of the coefficient generator", pos)
                return LaurentPolynomial.xi(self.ctx) ** exp
            if value not in self.ctx.names:
                raise ParseError(f"undeclared variable {value!r}", pos)
            exp = self.maybe_exponent()
            if exp < 0 and not self.ctx.invertible[self.ctx.index(value)]:
                raise ParseError(
                    f"negative exponent on non-invertible variable {value!r}", pos
                )
            return LaurentPolynomial.variable(self.ctx, value, exp)
        if kind == "op" and value == "(":
            poly = self.expr()
            self.expect_op(")")
            return poly
        raise ParseError("expected a factor", pos)

    def maybe_exponent(self) -> int:
        kind, value, _ = self.peek()
        if not (kind == "op" and value == "^"):
            return 1
        self.advance()
        sign = 1
        kind, value, pos = self.advance()
        if kind == "op" and value == "-":
            sign = -1
            kind, value, pos = self.advance()
        if kind != "int":
            raise ParseError("expected integer exponent", pos)
        return sign * value


def parse_poly(text: str, ctx: RingContext) -> LaurentPolynomial:
    """Parse an expression string into canonical sparse form."""
    return _Parser(text, ctx).parse()


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _format_one_term(ctx: RingContext, exps, xi_power: int, q: Fraction):
    """(sign, magnitude string) for a single printed term."""
    sign = "-" if q < 0 else "+"
    mag = abs(q)
    factors = []
    if xi_power == 1:
        factors.append(ctx.xi_name)
    elif xi_power > 1:
        factors.append(f"{ctx.xi_name}^{xi_power}")
    for name, e in zip(ctx.names, exps):
        if e == 1:
            factors.append(name)
        elif e != 0:
            factors.append(f"{name}^{e}")
    if not factors:
        return sign, _format_rational(mag)
    if mag != 1:
        factors.insert(0, _format_rational(mag))
    return sign, "*".join(factors)


def format_poly(f: LaurentPolynomial) -> str:
    """Canonical string; round-trips through parse_poly."""
    if f.is_zero:
        return "0"
    parts = []
    for exps, coeff in f.sorted_terms():
        if isinstance(coeff, XiPoly):
            printed = [
                (j, q) for j, q in enumerate(coeff.coeffs) if q != 0
            ]
        else:
            printed = [(0, coeff)]
        for xi_power, q in printed:
            parts.append(_format_one_term(f.ctx, exps, xi_power, q))
    sign, mag = parts[0]
    out = [mag if sign == "+" else f"-{mag}"]
    for sign, mag in parts[1:]:
        out.append(f" {sign} {mag}")
    return "".join(out)

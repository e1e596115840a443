"""Fraction-free sparse linear algebra over the rationals.

Vectors are dicts mapping column ids (ints) to nonzero integers; a row is
normalized by dividing out the gcd and making its leading entry positive,
so echelon forms are fully deterministic.  Elimination is fraction-free
(cross-multiplication followed by gcd reduction), which keeps every
intermediate value an exact integer of controlled size.  Kernels and
linear solves do one exact rational back-substitution at the end and
return integer vectors with cleared denominators.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional

Row = Dict[int, int]


def normalize(row: Row) -> Row:
    """Divide by the gcd of the entries; make the leading entry positive."""
    if not row:
        return row
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    lead = min(row)
    if row[lead] < 0:
        g = -g
    if g != 1:
        return {c: v // g for c, v in row.items()}
    return row


def _eliminate(row: Row, pivot_row: Row, col: int) -> Row:
    """Return a*row - b*pivot_row with the ``col`` entry cancelled."""
    a = pivot_row[col]
    b = row[col]
    out: Row = {}
    for c, v in row.items():
        out[c] = a * v
    for c, v in pivot_row.items():
        w = out.get(c, 0) - b * v
        if w:
            out[c] = w
        elif c in out:
            del out[c]
    return out


class Echelon:
    """Incremental row-echelon accumulator keyed by pivot column."""

    def __init__(self):
        self.pivots: Dict[int, Row] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Row) -> Row:
        """Fully reduce a copy of ``row`` against the stored pivots."""
        row = dict(row)
        while row:
            lead = min(row)
            pivot_row = self.pivots.get(lead)
            if pivot_row is None:
                return normalize(row)
            row = _eliminate(row, pivot_row, lead)
        return row

    def insert(self, row: Row) -> bool:
        """Reduce and keep ``row`` if independent; return True if rank grew."""
        return self.insert_with_pivot(row) is not None

    def insert_with_pivot(self, row: Row) -> Optional[int]:
        """Like insert, but return the new pivot column (None if dependent)."""
        residual = self.reduce(row)
        if not residual:
            return None
        col = min(residual)
        self.pivots[col] = residual
        return col

    def contains(self, row: Row) -> bool:
        return not self.reduce(row)


def echelon_of(rows: Iterable[Row]) -> Echelon:
    ech = Echelon()
    for row in rows:
        ech.insert(row)
    return ech


def rank(rows: Iterable[Row]) -> int:
    return echelon_of(rows).rank


def _clear_denominators(vec: Dict[int, Fraction]) -> Row:
    lcm = 1
    for q in vec.values():
        d = q.denominator
        lcm = lcm // gcd(lcm, d) * d
    out = {c: int(q * lcm) for c, q in vec.items() if q}
    return normalize(out)


def kernel(rows: Iterable[Row], ncols: int) -> List[Row]:
    """Basis of the right kernel of the matrix with the given rows.

    Columns are 0..ncols-1.  One integer basis vector is returned per free
    column, in ascending free-column order; each has a positive entry at
    its free column.
    """
    ech = echelon_of(rows)
    pivot_cols = sorted(ech.pivots)
    pivot_set = set(pivot_cols)
    basis: List[Row] = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec: Dict[int, Fraction] = {free: Fraction(1)}
        for pc in reversed(pivot_cols):
            if pc > free:
                continue
            prow = ech.pivots[pc]
            acc = Fraction(0)
            for c, v in prow.items():
                if c != pc and c in vec:
                    acc += v * vec[c]
            if acc:
                vec[pc] = -acc / prow[pc]
        basis.append(_clear_denominators(vec))
    return basis


def solve(rows: List[Row], rhs: List[int], ncols: int) -> Optional[Row]:
    """One particular integer-cleared solution of A x = b, or None.

    Free variables are set to zero.  The returned dict maps column id to an
    integer numerator; the shared denominator is returned under key -1
    (always positive), so x[c] = sol[c] / sol[-1].
    """
    aug_col = ncols
    ech = Echelon()
    for row, b in zip(rows, rhs):
        full = dict(row)
        if b:
            full[aug_col] = b
        ech.insert(full)
    if aug_col in ech.pivots:
        return None
    pivot_cols = sorted(ech.pivots)
    vec: Dict[int, Fraction] = {}
    for pc in reversed(pivot_cols):
        # Row encodes sum(row[c] * x[c]) == row[aug_col].
        prow = ech.pivots[pc]
        acc = -Fraction(prow.get(aug_col, 0))
        for c, v in prow.items():
            if c != pc and c != aug_col and c in vec:
                acc += v * vec[c]
        vec[pc] = -acc / prow[pc] if acc else Fraction(0)
    lcm = 1
    for q in vec.values():
        d = q.denominator
        lcm = lcm // gcd(lcm, d) * d
    sol = {c: int(q * lcm) for c, q in vec.items() if q}
    sol[-1] = lcm
    return sol

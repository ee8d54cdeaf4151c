"""Exact two-phase simplex over ``Fraction`` (Bland's rule, no tolerances).

Only small problems are expected here (tens of variables), so a dense
tableau is used.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .rational import to_fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    objective: Fraction | None = None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


class _Tableau:
    """Integer tableau; true entries are ``rows[i][j] / scale`` (integer-preserving pivots)."""

    def __init__(self, rows: list[list[int]], basis: list[int]):
        self.rows = rows
        self.basis = basis
        self.scale = 1

    def pivot(self, r: int, c: int) -> None:
        rows, old = self.rows, self.scale
        prow = rows[r]
        p = prow[c]
        nz = [j for j, v in enumerate(prow) if v]
        for i, row in enumerate(rows):
            if i == r:
                continue
            f = row[c]
            if f:
                new = [v * p for v in row]
                for j in nz:
                    new[j] -= f * prow[j]
                rows[i] = [v // old for v in new]
            elif p != old:
                rows[i] = [v * p // old for v in row]
        self.scale = p
        if p < 0:
            self.rows = [[-v for v in row] for row in self.rows]
            self.scale = -p
        self.basis[r] = c

    def simplex(self, allowed: int) -> bool:
        """Minimize the objective in the last row. Returns False if unbounded.

        Columns ``>= allowed`` never enter the basis.
        """
        m = len(self.rows) - 1
        while True:
            obj = self.rows[-1]
            enter = next((j for j in range(allowed) if obj[j] < 0), None)
            if enter is None:
                return True
            leave = None
            for i in range(m):
                a = self.rows[i][enter]
                if a > 0:
                    if leave is None:
                        leave = i
                        continue
                    b = self.rows[leave][enter]
                    lhs, rhs = self.rows[i][-1] * b, self.rows[leave][-1] * a
                    if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[leave]):
                        leave = i
            if leave is None:
                return False
            self.pivot(leave, enter)

    def value(self, i: int, j: int) -> Fraction:
        return Fraction(self.rows[i][j], self.scale)


def _integer_row(values: Sequence[Fraction]) -> list[int]:
    den = 1
    for v in values:
        den = den * v.denominator // gcd(den, v.denominator)
    return [int(v * den) for v in values]


def solve_lp(
    c: Sequence | None,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    nvars: int | None = None,
) -> LPResult:
    """Minimize ``c . x`` over free ``x`` with ``A_ub x <= b_ub`` and ``A_eq x = b_eq``.

    ``c=None`` asks only for a feasible point.
    """
    A_ub = [[to_fraction(v) for v in r] for r in A_ub]
    A_eq = [[to_fraction(v) for v in r] for r in A_eq]
    b_ub = [to_fraction(v) for v in b_ub]
    b_eq = [to_fraction(v) for v in b_eq]
    if nvars is None:
        rows = A_ub or A_eq
        nvars = len(rows[0]) if rows else (len(c) if c is not None else 0)
    cost = [to_fraction(v) for v in c] if c is not None else [Fraction(0)] * nvars
    n_ub, n_eq = len(A_ub), len(A_eq)
    m = n_ub + n_eq
    if m == 0:
        if any(v != 0 for v in cost):
            return LPResult(UNBOUNDED, tuple(Fraction(0) for _ in range(nvars)))
        return LPResult(OPTIMAL, tuple(Fraction(0) for _ in range(nvars)), Fraction(0))

    # columns: x+ (nvars), x- (nvars), slacks (n_ub), artificials (m), rhs
    n_struct = 2 * nvars + n_ub
    width = n_struct + m + 1
    rows: list[list[int]] = []
    for i in range(m):
        if i < n_ub:
            a, b = A_ub[i], b_ub[i]
        else:
            a, b = A_eq[i - n_ub], b_eq[i - n_ub]
        scaled = _integer_row([*a, b])
        slack = 1
        if scaled[-1] < 0:
            scaled = [-v for v in scaled]
            slack = -1
        row = [0] * width
        for j in range(nvars):
            row[j] = scaled[j]
            row[nvars + j] = -scaled[j]
        if i < n_ub:
            row[2 * nvars + i] = slack
        row[n_struct + i] = 1
        row[-1] = scaled[-1]
        rows.append(row)
    tab = _Tableau(rows, [n_struct + i for i in range(m)])

    # phase 1: minimize the sum of artificials
    obj = [0] * width
    for row in rows:
        for j in range(n_struct):
            obj[j] -= row[j]
        obj[-1] -= row[-1]
    tab.rows.append(obj)
    tab.simplex(n_struct)
    if tab.rows[-1][-1] != 0:
        return LPResult(INFEASIBLE)

    # drive degenerate artificials out of the basis
    for i in range(m):
        if tab.basis[i] >= n_struct:
            j = next((j for j in range(n_struct) if tab.rows[i][j] != 0), None)
            if j is not None:
                tab.pivot(i, j)

    # phase 2: reduced costs c - c_B B^-1 A; scale is |det B|, so scaled values are integers
    cint = _integer_row(cost) if nvars else []
    full = [Fraction(0)] * width
    for j in range(nvars):
        full[j] = Fraction(cint[j])
        full[nvars + j] = Fraction(-cint[j])
    reduced = list(full)
    for i in range(m):
        f = full[tab.basis[i]]
        if f:
            reduced = [a - f * tab.value(i, j) for j, a in enumerate(reduced)]
    obj = []
    for v in reduced:
        scaled_v = v * tab.scale
        if scaled_v.denominator != 1:
            raise ArithmeticError("tableau scale lost integrality")
        obj.append(int(scaled_v))
    tab.rows[-1] = obj
    bounded = tab.simplex(n_struct)

    vals = [Fraction(0)] * width
    for i in range(m):
        vals[tab.basis[i]] = tab.value(i, -1)
    x = tuple(vals[j] - vals[nvars + j] for j in range(nvars))
    if not bounded:
        return LPResult(UNBOUNDED, x)
    return LPResult(OPTIMAL, x, sum((ci * xi for ci, xi in zip(cost, x)), Fraction(0)))


def strict_sign_feasible(rows: Sequence[Sequence], signs: Sequence[int], nvars: int) -> tuple[Fraction, ...] | None:
    """Find ``x`` with ``sign(row_k . x) == signs[k]`` for every k, or None.

    Strictness is handled by homogenization: ``row.x >= 1`` for ``+1``,
    ``<= -1`` for ``-1`` and ``= 0`` for ``0``. The cone of solutions is
    scale invariant so this loses nothing.
    """
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for row, s in zip(rows, signs):
        if s > 0:
            A_ub.append([-v for v in row])
            b_ub.append(-1)
        elif s < 0:
            A_ub.append(list(row))
            b_ub.append(-1)
        else:
            A_eq.append(list(row))
            b_eq.append(0)
    res = solve_lp(None, A_ub, b_ub, A_eq, b_eq, nvars=nvars)
    return res.x if res.feasible else None

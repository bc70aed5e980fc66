"""Exact Gaussian elimination over the rationals."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence


def _copy(rows):
    return [[Fraction(x) for x in r] for r in rows]


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = _copy(rows)
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def solve(columns: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One solution ``s`` of ``sum_j s_j * columns[j] = rhs``, or None.

    Free variables are set to zero, so the answer is a basic solution.
    """
    n = len(rhs)
    k = len(columns)
    aug = [[columns[j][i] for j in range(k)] + [rhs[i]] for i in range(n)]
    m, pivots = rref(aug)
    if k in pivots:
        return None
    s = [Fraction(0)] * k
    for row, col in zip(m, pivots):
        s[col] = row[k]
    return s


def nonnegative_solution(columns: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """A solution with all entries ``>= 0``, found among basic solutions.

    If ``{s >= 0 : A s = b}`` is nonempty it has a vertex, and every vertex
    is the solution on some set of linearly independent columns.  The search
    is exponential in the column count; use it on small systems only.
    """
    k = len(columns)
    if all(Fraction(x) == 0 for x in rhs):
        return [Fraction(0)] * k
    r = rank([list(c) for c in columns]) if columns else 0
    for size in range(1, r + 1):
        for subset in combinations(range(k), size):
            sub = [columns[j] for j in subset]
            if rank([list(c) for c in sub]) != size:
                continue
            s = solve(sub, rhs)
            if s is not None and all(x >= 0 for x in s):
                full = [Fraction(0)] * k
                for j, x in zip(subset, s):
                    full[j] = x
                return full
    return None

"""Zero-sum matrix games: exact rational simplex and fictitious play."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np


@dataclass
class MatrixSolution:
    value: Fraction | float
    row: list  # maximizer mixed strategy
    col: list  # minimizer mixed strategy
    exact: bool
    gap: float = 0.0
    iterations: int = 0


def _check(m: Sequence[Sequence]) -> list[list[Fraction]]:
    if not m or not m[0]:
        raise ValueError("payoff matrix must be nonempty")
    width = len(m[0])
    if any(len(r) != width for r in m):
        raise ValueError("payoff matrix must be rectangular")
    return [[Fraction(x) for x in r] for r in m]


def _simplex_max(A: list[list[Fraction]]):
    """max 1.y s.t. A y <= 1, y >= 0 with Bland's rule; returns primal y and dual x."""
    m, n = len(A), len(A[0])
    # tableau rows: [A | I | b], objective row holds reduced costs
    T = [A[i][:] + [Fraction(int(i == j)) for j in range(m)] + [Fraction(1)] for i in range(m)]
    obj = [Fraction(-1)] * n + [Fraction(0)] * m + [Fraction(0)]
    basis = [n + i for i in range(m)]
    while True:
        enter = next((j for j in range(n + m) if obj[j] < 0), None)
        if enter is None:
            break
        best, leave = None, None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise ArithmeticError("unbounded program")
        piv = T[leave][enter]
        T[leave] = [x / piv for x in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [x - f * y for x, y in zip(T[i], T[leave])]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, T[leave])]
        basis[leave] = enter
    y = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            y[b] = T[i][-1]
    x = [obj[n + i] for i in range(m)]
    return y, x


def solve_exact(m: Sequence[Sequence]) -> MatrixSolution:
    """Value and optimal strategies of the zero-sum game (rows maximize), in exact rationals."""
    M = _check(m)
    low = min(min(r) for r in M)
    shift = 1 - low
    A = [[x + shift for x in r] for r in M]
    y, x = _simplex_max(A)
    total = sum(y)
    v = 1 / total
    col = [yi * v for yi in y]
    row = [xi * v for xi in x]
    value = v - shift
    certify(M, value, row, col)
    return MatrixSolution(value, row, col, True)


def certify(M, value, row, col, tol=0) -> None:
    """Raise unless ``row`` guarantees at least ``value`` and ``col`` at most ``value``."""
    if abs(sum(row) - 1) > tol or abs(sum(col) - 1) > tol:
        raise ArithmeticError("strategies do not sum to one")
    if any(p < -tol for p in row) or any(p < -tol for p in col):
        raise ArithmeticError("negative probability")
    for j in range(len(M[0])):
        if sum(row[i] * M[i][j] for i in range(len(M))) < value - tol:
            raise ArithmeticError(f"row strategy fails against column {j}")
    for i in range(len(M)):
        if sum(M[i][j] * col[j] for j in range(len(M[0]))) > value + tol:
            raise ArithmeticError(f"column strategy fails against row {i}")


def fictitious_play(m: Sequence[Sequence], tolerance: float, max_iter: int = 1_000_000) -> MatrixSolution:
    """Brown's fictitious play until the duality gap is within ``tolerance``."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    M = np.array(_check(m), dtype=float)
    rows, cols = M.shape
    rc = np.zeros(rows)
    cc = np.zeros(cols)
    row_payoff = np.zeros(rows)  # payoff of each row against the column history
    col_payoff = np.zeros(cols)  # payoff of each column against the row history
    i, j = 0, 0
    gap = np.inf
    t = 0
    for t in range(1, max_iter + 1):
        rc[i] += 1
        cc[j] += 1
        col_payoff += M[i]
        row_payoff += M[:, j]
        upper = row_payoff.max() / t
        lower = col_payoff.min() / t
        gap = upper - lower
        if gap <= tolerance:
            break
        i = int(row_payoff.argmax())
        j = int(col_payoff.argmin())
    return MatrixSolution(
        float((upper + lower) / 2), list(rc / rc.sum()), list(cc / cc.sum()), False, float(gap), t
    )


def matrix_value(m: Sequence[Sequence], mode: str = "exact", tolerance: float | None = None) -> MatrixSolution:
    if mode == "exact":
        return solve_exact(m)
    if mode == "iterative":
        if tolerance is None or tolerance <= 0:
            raise ValueError("tolerance must be positive")
        return fictitious_play(m, tolerance)
    raise ValueError(f"unknown mode {mode!r}")


def _integral(M) -> np.ndarray:
    F = [[Fraction(x) for x in r] for r in M]
    den = math.lcm(*(x.denominator for r in F for x in r))
    ints = [[x.numerator * (den // x.denominator) for x in r] for r in F]
    big = max(abs(x) for r in ints for x in r)
    return np.array(ints, dtype=np.int64 if big < 2**62 else object)


def _survivors(A: np.ndarray) -> list[int]:
    """Rows of A not weakly dominated (from above) by another surviving row; first duplicate kept."""
    n = A.shape[0]
    alive = np.ones(n, dtype=bool)
    for i in range(n):
        if not alive[i]:
            continue
        geq = (A >= A[i]).all(axis=1)
        eq = (A == A[i]).all(axis=1)
        # rows equal to i and declared later go; rows strictly dominated by i go
        later = np.arange(n) > i
        alive &= ~((eq & later) | ((A <= A[i]).all(axis=1) & ~eq))
        if (geq & ~eq & alive).any():
            alive[i] = False
    return [i for i in range(n) if alive[i]]


def reduce_dominated(M) -> tuple[list[int], list[int]]:
    """Indices of rows and columns surviving iterated weak dominance (value is preserved)."""
    A = _integral(M)
    rows = list(range(A.shape[0]))
    cols = list(range(A.shape[1]))
    while True:
        sub = A[np.ix_(rows, cols)]
        r = [rows[i] for i in _survivors(sub)]
        sub = A[np.ix_(r, cols)]
        c = [cols[j] for j in _survivors(-sub.T)]
        if r == rows and c == cols:
            return rows, cols
        rows, cols = r, c

"""Exact two-phase simplex on integer data, using fraction-free pivoting.

All tableau entries stay integers: pivoting on ``p = T[r][s]`` replaces
every other row by ``(p * T[i] - T[i][s] * T[r]) // d`` where ``d`` is the
previous pivot, and the division is exact (Bareiss / Edmonds). The true
tableau is ``T / d``, and every basic column holds ``d`` in its own row.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class InfeasibleLP(ValueError):
    pass


class UnboundedLP(ValueError):
    pass


@dataclass(frozen=True)
class LPSolution:
    value: Fraction
    x: tuple[Fraction, ...]
    pivots: int


# consecutive degenerate pivots tolerated before switching to Bland's rule
_DEGENERATE_SWITCH = 30


class _Tableau:
    def __init__(self, rows: list[list[int]], basis: list[int], objectives: list[list[int]]):
        self.rows = rows
        self.basis = basis
        self.obj = objectives
        self.d = 1
        self.pivots = 0

    def pivot(self, r: int, s: int) -> None:
        T, d = self.rows, self.d
        pr = T[r]
        p = pr[s]
        if p < 0:
            pr = [-v for v in pr]
            T[r] = pr
            p = -p
        for i, row in enumerate(T):
            if i != r:
                f = row[s]
                T[i] = [(p * v - f * w) // d for v, w in zip(row, pr)]
        for k, row in enumerate(self.obj):
            f = row[s]
            self.obj[k] = [(p * v - f * w) // d for v, w in zip(row, pr)]
        self.d = p
        self.basis[r] = s
        self.pivots += 1

    def optimize(self, which: int, allowed: int) -> None:
        """Drive objective row ``which`` to optimality over columns < ``allowed``."""
        degenerate = 0
        bland = False
        while True:
            z = self.obj[which]
            cands = [j for j in range(allowed) if z[j] < 0]
            if not cands:
                return
            s = cands[0] if bland else min(cands, key=lambda j: (z[j], j))
            best = None
            for i, row in enumerate(self.rows):
                a = row[s]
                if a > 0:
                    if best is None:
                        best = i
                        continue
                    b = self.rows[best]
                    lhs, rhs = row[-1] * b[s], b[-1] * a
                    if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                        best = i
            if best is None:
                raise UnboundedLP("objective is unbounded")
            if self.rows[best][-1] == 0:
                degenerate += 1
                if degenerate > _DEGENERATE_SWITCH:
                    bland = True
            else:
                degenerate = 0
            self.pivot(best, s)


def maximize(
    c: Sequence[int],
    A: Sequence[Sequence[int]],
    b: Sequence[int],
    senses: Sequence[str],
) -> LPSolution:
    """Maximize ``c.x`` subject to ``A x (>= | ==) b``, ``x >= 0``.

    Every coefficient must be an integer and ``b >= 0``. Returns the exact
    optimum and an optimal basic solution.
    """
    m, n = len(A), len(c)
    if len(b) != m or len(senses) != m:
        raise ValueError("A, b and senses disagree in length")
    if any(v < 0 for v in b):
        raise ValueError("right-hand sides must be non-negative")
    n_surplus = sum(1 for s in senses if s == ">=")
    width = n + n_surplus + m  # structural | surplus | artificial
    rows: list[list[int]] = []
    k = 0
    for i, (row, s) in enumerate(zip(A, senses)):
        if len(row) != n:
            raise ValueError(f"row {i} has {len(row)} coefficients, expected {n}")
        if s not in (">=", "=="):
            raise ValueError(f"unsupported sense {s!r}")
        t = [int(v) for v in row] + [0] * (n_surplus + m) + [int(b[i])]
        if s == ">=":
            t[n + k] = -1
            k += 1
        t[n + n_surplus + i] = 1
        rows.append(t)
    basis = [n + n_surplus + i for i in range(m)]

    # phase one maximizes minus the artificial sum, priced out against the basis
    phase1 = [0] * (width + 1)
    for t in rows:
        for j in range(n + n_surplus):
            phase1[j] -= t[j]
        phase1[-1] -= t[-1]
    phase2 = [-int(v) for v in c] + [0] * (n_surplus + m + 1)

    tab = _Tableau(rows, basis, [phase1, phase2])
    tab.optimize(0, n + n_surplus)
    if tab.obj[0][-1] != 0:
        raise InfeasibleLP("constraints admit no non-negative solution")

    # pivot remaining zero-level artificials out; drop rows that are redundant
    i = 0
    while i < len(tab.rows):
        if tab.basis[i] >= n + n_surplus:
            row = tab.rows[i]
            j = next((j for j in range(n + n_surplus) if row[j] != 0), None)
            if j is None:
                del tab.rows[i]
                del tab.basis[i]
                continue
            tab.pivot(i, j)
        i += 1

    tab.optimize(1, n + n_surplus)
    d = tab.d
    x = [Fraction(0)] * n
    for i, j in enumerate(tab.basis):
        if j < n:
            x[j] = Fraction(tab.rows[i][-1], d)
    value = Fraction(tab.obj[1][-1], d)
    assert value == sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPSolution(value, tuple(x), tab.pivots)

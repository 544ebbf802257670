import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from ete_assign.simplex import InfeasibleLP, UnboundedLP, maximize


def brute_force(c, A, b, senses):
    """Best basic feasible solution by trying every column basis."""
    m, n = len(A), len(c)
    rows = [list(map(Fraction, r)) for r in A]
    slack_cols = []
    for i, s in enumerate(senses):
        if s == ">=":
            slack_cols.append([Fraction(-1 if k == i else 0) for k in range(m)])
    cols = [[rows[i][j] for i in range(m)] for j in range(n)] + slack_cols
    best = None
    for basis in itertools.combinations(range(len(cols)), m):
        M = [[cols[j][i] for j in basis] + [Fraction(b[i])] for i in range(m)]
        x = _solve(M)
        if x is None or any(v < 0 for v in x):
            continue
        full = [Fraction(0)] * len(cols)
        for j, v in zip(basis, x):
            full[j] = v
        val = sum(Fraction(c[j]) * full[j] for j in range(n))
        best = val if best is None else max(best, val)
    return best


def _solve(M):
    m = len(M)
    M = [r[:] for r in M]
    for col in range(m):
        piv = next((r for r in range(col, m) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(m):
            if r != col and M[r][col]:
                f = M[r][col] / M[col][col]
                M[r] = [u - f * v for u, v in zip(M[r], M[col])]
    return [M[i][-1] / M[i][i] for i in range(m)]


def random_lp(rng):
    n = rng.randint(2, 6)
    m = rng.randint(1, 3)
    A = [[rng.randint(0, 3) for _ in range(n)] for _ in range(m)]
    b = [rng.randint(0, 4) for _ in range(m)]
    senses = [">="] * m
    # a bounding equality keeps the program bounded
    A.append([1] * n)
    b.append(rng.randint(1, 5))
    senses.append("==")
    c = [rng.randint(-4, 4) for _ in range(n)]
    return c, A, b, senses


@pytest.mark.parametrize("seed", range(150))
def test_matches_basis_enumeration(seed):
    rng = random.Random(seed)
    c, A, b, senses = random_lp(rng)
    expected = brute_force(c, A, b, senses)
    if expected is None:
        with pytest.raises(InfeasibleLP):
            maximize(c, A, b, senses)
        return
    sol = maximize(c, A, b, senses)
    assert sol.value == expected
    # the returned point is feasible
    for row, bi, s in zip(A, b, senses):
        lhs = sum(Fraction(a) * x for a, x in zip(row, sol.x))
        assert lhs == bi if s == "==" else lhs >= bi
    assert all(x >= 0 for x in sol.x)


@pytest.mark.parametrize("seed", range(40))
def test_matches_highs_on_larger_programs(seed):
    rng = random.Random(1000 + seed)
    n, m = rng.randint(10, 40), rng.randint(3, 10)
    A = [[rng.randint(0, 1) for _ in range(n)] for _ in range(m)]
    b = [rng.randint(0, 2) for _ in range(m)]
    A.append([1] * n)
    b.append(3)
    senses = [">="] * m + ["=="]
    c = [rng.randint(-5, 5) for _ in range(n)]
    ref = linprog(-np.array(c, float), A_ub=-np.array(A[:-1], float), b_ub=-np.array(b[:-1], float),
                  A_eq=np.array([A[-1]], float), b_eq=[b[-1]], bounds=(0, None), method="highs")
    if ref.status == 2:
        with pytest.raises(InfeasibleLP):
            maximize(c, A, b, senses)
        return
    sol = maximize(c, A, b, senses)
    assert abs(float(sol.value) - (-ref.fun)) < 1e-7


def test_unbounded():
    with pytest.raises(UnboundedLP):
        maximize([1, 0], [[1, -1]], [0], [">="])


def test_redundant_equalities_are_dropped():
    sol = maximize([1, 2], [[1, 1], [2, 2]], [1, 2], ["==", "=="])
    assert sol.value == 2


def test_rejects_negative_rhs():
    with pytest.raises(ValueError):
        maximize([1], [[1]], [-1], [">="])

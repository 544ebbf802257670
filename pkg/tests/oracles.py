"""Independent reference computations used to cross-check the library.

These share no code with the exact solvers: dominance and ordinal
efficiency are rebuilt from their definitions, and the LP goes through
scipy's HiGHS in floating point.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import numpy as np
from scipy.optimize import linprog

TOL = 1e-7


def rank_of(p, agent, bundle) -> int:
    return list(p.preferences[agent]).index(p.universe.index(bundle)) + 1


def bundle_probs(sigma, agent) -> dict:
    out = {}
    for y, pr in sigma.weights:
        out[y.rows[agent]] = out.get(y.rows[agent], 0) + pr
    return out


def cdf_by_rank(p, sigma, agent) -> list[Fraction]:
    """P(rank <= k) for k = 1..|U|, computed by counting ranks."""
    k = len(p.universe)
    mass = [Fraction(0)] * (k + 1)
    for y, pr in sigma.weights:
        mass[rank_of(p, agent, y.rows[agent])] += pr
    return [sum(mass[1:i + 1], Fraction(0)) for i in range(1, k + 1)]


def dominates(p, lam, sigma) -> bool:
    """``lam`` ordinally dominates ``sigma``: weakly everywhere, strictly somewhere."""
    strict = False
    for a in range(p.n_agents):
        hi, lo = cdf_by_rank(p, lam, a), cdf_by_rank(p, sigma, a)
        if any(h < l for h, l in zip(hi, lo)):
            return False
        strict = strict or hi != lo
    return strict


def oe_lp(sigma, Y) -> tuple[bool, float]:
    """Maximize total upper-CDF gain over lotteries weakly dominating ``sigma``."""
    p = sigma.problem
    k = len(p.universe)
    Y = list(Y)
    A_ub, b_ub, c = [], [], np.zeros(len(Y))
    for a in range(p.n_agents):
        target = cdf_by_rank(p, sigma, a)
        ranks = [rank_of(p, a, y.rows[a]) for y in Y]
        for i in range(1, k + 1):
            row = np.array([1.0 if r <= i else 0.0 for r in ranks])
            A_ub.append(-row)
            b_ub.append(-float(target[i - 1]))
            c -= row
    res = linprog(c, A_ub=np.array(A_ub), b_ub=np.array(b_ub),
                  A_eq=np.ones((1, len(Y))), b_eq=[1.0], bounds=(0, None), method="highs")
    assert res.status == 0, res.message
    base = sum(float(h) for a in range(p.n_agents) for h in cdf_by_rank(p, sigma, a))
    gain = -res.fun - base
    return gain <= TOL, gain


def pareto_brute(p, y, Y) -> bool:
    for z in Y:
        ranks_z = [rank_of(p, a, z.rows[a]) for a in range(p.n_agents)]
        ranks_y = [rank_of(p, a, y.rows[a]) for a in range(p.n_agents)]
        if all(u <= v for u, v in zip(ranks_z, ranks_y)) and ranks_z != ranks_y:
            return False
    return True


def min_rank_brute(p, Y) -> int:
    return min(sum(rank_of(p, a, y.rows[a]) for a in range(p.n_agents)) for y in Y)


def expected_rank(sigma) -> Fraction:
    p = sigma.problem
    return sum((pr * sum(rank_of(p, a, y.rows[a]) for a in range(p.n_agents))
                for y, pr in sigma.weights), Fraction(0))


def reassign_by_definition(sigma, partition) -> dict:
    """Average over every within-group permutation, straight from the definition."""
    n = sigma.problem.n_agents
    perms = [dict()]
    for g in partition:
        perms = [{**d, **dict(zip(g, img))} for d in perms for img in permutations(g)]
    out: dict = {}
    for y, pr in sigma.weights:
        for pi in perms:
            rows = [None] * n
            for a in range(n):
                rows[pi[a]] = y.rows[a]
            key = tuple(rows)
            out[key] = out.get(key, Fraction(0)) + pr / len(perms)
    return out


def sd_brute(p, order, Y):
    """Serial dictatorship by filtering ``Y`` agent by agent."""
    pool = list(Y)
    for a in order:
        best = min(rank_of(p, a, y.rows[a]) for y in pool)
        pool = [y for y in pool if rank_of(p, a, y.rows[a]) == best]
    # strict orders pin every row, so exactly one member survives
    assert len(pool) == 1
    return pool[0]

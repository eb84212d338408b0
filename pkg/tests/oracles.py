"""Brute-force reference computations on ``{outcome tuple: p}`` dictionaries.

Deliberately independent of the package: plain loops and ``math.log2``.
"""

import itertools
import math
from collections import defaultdict


def marginal(pmf, axes):
    out = defaultdict(float)
    for outcome, p in pmf.items():
        out[tuple(outcome[i] for i in axes)] += p
    return dict(out)


def H(pmf, axes):
    if not axes:
        return 0.0
    return -sum(p * math.log2(p) for p in marginal(pmf, axes).values() if p > 0)


def cmi(pmf, x, y, z=()):
    x, y, z = list(x), list(y), list(z)
    return H(pmf, x + z) + H(pmf, y + z) - H(pmf, z) - H(pmf, x + y + z)


def s_n(pmf, n):
    everyone = list(range(n))
    return sum(H(pmf, [j for j in everyone if j != i]) for i in everyone) - (n - 1) * H(pmf, everyone)


def t_n(pmf, n):
    return sum(H(pmf, [i]) for i in range(n)) - H(pmf, list(range(n)))


def push_through(pmf, axis, kernel):
    """Apply kernel[a][b] = P(b|a) to coordinate ``axis``."""
    out = defaultdict(float)
    for outcome, p in pmf.items():
        for b, k in enumerate(kernel[outcome[axis]]):
            if k:
                new = list(outcome)
                new[axis] = b
                out[tuple(new)] += p * k
    return dict(out)


def pmf_of(table):
    """dict view of a numpy table (test-side bridge only)."""
    return {tuple(int(i) for i in idx): float(table[idx]) for idx in itertools.product(*map(range, table.shape)) if table[idx] > 0}

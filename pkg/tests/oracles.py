"""Independent reference computations used only by the tests.

Nothing here imports the code paths it checks: distance variance is
evaluated from the three moments by summing over category triples, the
U-statistic by looping over ordered index tuples, and expectations by
enumerating every sample sequence.
"""

import itertools
import math
from fractions import Fraction

import mpmath


def moments_dvar_sq(probs, dist, mp=False):
    """E d^2 + (E d)^2 - 2 E[d12 d13] by brute force over category triples."""
    K = len(probs)
    fl = (lambda v: mpmath.mpf(v)) if mp else float
    p = [fl(v) for v in probs]
    d = [[fl(dist(a, b)) for b in range(K)] for a in range(K)]
    e_d2 = sum(p[a] * p[b] * d[a][b] ** 2 for a in range(K) for b in range(K))
    e_d = sum(p[a] * p[b] * d[a][b] for a in range(K) for b in range(K))
    e_dd = sum(p[a] * p[b] * p[c] * d[a][b] * d[a][c]
               for a in range(K) for b in range(K) for c in range(K))
    return e_d2 + e_d ** 2 - 2 * e_dd


def euclid(a, b):
    return 0.0 if a == b else math.sqrt(2.0)


def euclid_mp(a, b):
    return mpmath.mpf(0) if a == b else mpmath.sqrt(2)


def ustat_bruteforce(labels, dist=euclid):
    """Literal O(n^4) U-statistic over ordered tuples of distinct indices."""
    n = len(labels)
    d = [[dist(labels[i], labels[j]) for j in range(n)] for i in range(n)]
    s2 = sum(d[i][j] ** 2 for i, j in itertools.permutations(range(n), 2))
    s3 = sum(d[i][j] * d[i][k] for i, j, k in itertools.permutations(range(n), 3))
    s4 = sum(d[i][j] * d[k][l] for i, j, k, l in itertools.permutations(range(n), 4))
    ff = lambda r: math.prod(range(n - r + 1, n + 1))
    return s2 / ff(2) + s4 / ff(4) - 2 * s3 / ff(3)


def paper_formula_exact(labels):
    """The closed-form estimator (method "paper") in exact rational arithmetic."""
    n = len(labels)
    counts = {}
    for x in labels:
        counts[x] = counts.get(x, 0) + 1
    p = [Fraction(c, n) for c in counts.values()]
    s2 = sum(v ** 2 for v in p)
    s3 = sum(v ** 3 for v in p)
    N = Fraction(n)
    return (N ** 3 / ((N - 1) * (N - 2) * (N - 3)) * (1 - s2) ** 2
            - 2 * N ** 2 / ((N - 2) * (N - 3)) * s3
            - N * (N - 6) / ((N - 2) * (N - 3)) * s2
            - N * (N + 2) / ((N - 2) * (N - 3)))


def exhaustive_mean(probs, n, statistic):
    """Probability-weighted mean of ``statistic`` over all K^n sequences."""
    K = len(probs)
    total = 0.0
    weight = 0.0
    for seq in itertools.product(range(K), repeat=n):
        w = math.prod(probs[k] for k in seq)
        total += w * statistic(seq)
        weight += w
    return total / weight


def exhaustive_mean_exact(probs, n, statistic):
    K = len(probs)
    probs = [Fraction(p) for p in probs]
    total = Fraction(0)
    for seq in itertools.product(range(K), repeat=n):
        total += math.prod(probs[k] for k in seq) * statistic(seq)
    return total

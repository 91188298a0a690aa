"""Independent reference implementations used to check the library.

Deliberately naive: pure Python, exact rationals, explicit enumeration.
Nothing here imports tcva.
"""
from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from fractions import Fraction


def average_rank_table(values):
    """Rank of each element (1-based), ties get the mean of their positions."""
    ranks = []
    for v in values:
        below = sum(1 for u in values if u < v)
        equal = sum(1 for u in values if u == v)
        # positions below+1 .. below+equal, mean is below + (equal + 1) / 2
        ranks.append(Fraction(below) + Fraction(equal + 1, 2))
    return ranks


def spearman_bruteforce(x, y):
    rx, ry = average_rank_table(list(x)), average_rank_table(list(y))
    n = len(rx)
    mx, my = sum(rx) / n, sum(ry) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    if vx == 0 or vy == 0:
        return None
    r2 = cov * cov / (vx * vy)
    if cov == 0:
        return 0.0
    return math.copysign(math.sqrt(float(r2)), cov)


def kendall_bruteforce(x, y):
    x, y = list(x), list(y)
    n = len(x)
    conc = disc = tie_x = tie_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx, dy = x[i] - x[j], y[i] - y[j]
            if dx == 0:
                tie_x += 1
            if dy == 0:
                tie_y += 1
            if dx * dy > 0:
                conc += 1
            elif dx * dy < 0:
                disc += 1
    n0 = n * (n - 1) // 2
    den = (n0 - tie_x) * (n0 - tie_y)
    if den == 0:
        return None
    s = conc - disc
    if s == 0:
        return 0.0
    return math.copysign(math.sqrt(float(Fraction(s * s, den))), s)


def enumerate_bootstrap(xs, ys, stat):
    """Exact bootstrap distribution over all n**n index vectors."""
    n = len(xs)
    counts = Counter()
    for idx in itertools.product(range(n), repeat=n):
        counts[stat([xs[i] for i in idx], [ys[i] for i in idx])] += 1
    total = n**n
    return {v: Fraction(c, total) for v, c in counts.items()}


def inverse_cdf(dist, q):
    acc = Fraction(0)
    for v in sorted(dist):
        acc += dist[v]
        if acc >= q:
            return v
    return max(dist)


def mae_plain(xs, ys):
    return sum(abs(a - b) for a, b in zip(xs, ys)) / len(xs)


def paired_bootstrap_plain(a, b, h, corr, n_resamples, seed):
    """Second, independently coded paired resampler (stdlib RNG, nothing shared)."""
    rnd = random.Random(seed)
    n = len(a)
    le = ge = valid = 0
    for _ in range(n_resamples):
        idx = [rnd.randrange(n) for _ in range(n)]
        ca = corr([a[i] for i in idx], [h[i] for i in idx])
        cb = corr([b[i] for i in idx], [h[i] for i in idx])
        if ca is None or cb is None:
            continue
        d = ca - cb
        valid += 1
        le += d <= 0
        ge += d >= 0
    return min(1.0, 2 * min(le, ge) / valid)

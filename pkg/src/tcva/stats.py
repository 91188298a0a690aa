"""Agreement statistics between metric scores and human annotations.

Rank correlations are computed with exact integer arithmetic on doubled
average ranks, so the only rounding happens in the final square root and
results do not depend on input order. Bootstrap resample ``r`` draws its
indices from ``default_rng([seed, r])``, which makes serial and threaded
execution give identical results.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from operator import attrgetter
from typing import Callable, NamedTuple, Sequence, TypeVar

import numpy as np
from scipy.stats import rankdata

from .errors import (
    ContractViolation,
    DegenerateBootstrapError,
    EmptyInputError,
    UndefinedCorrelationError,
)

log = logging.getLogger(__name__)

MIN_VALID_RESAMPLES = 100

Item = TypeVar("Item")
Statistic = Callable[[np.ndarray, np.ndarray], float]


@dataclass(frozen=True)
class PairedScores:
    method_scores: tuple[float, ...]
    human_scores: tuple[float, ...]
    sample_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        m = tuple(float(v) for v in self.method_scores)
        h = tuple(float(v) for v in self.human_scores)
        ids = None if self.sample_ids is None else tuple(self.sample_ids)
        if len(m) != len(h) or (ids is not None and len(ids) != len(m)):
            raise ContractViolation("method, human and id lists must be aligned")
        if len(m) < 2:
            raise ContractViolation("need at least two paired scores")
        for v in m + h:
            if not 0.0 <= v <= 1.0:
                raise ContractViolation(f"score {v} outside [0, 1]")
        object.__setattr__(self, "method_scores", m)
        object.__setattr__(self, "human_scores", h)
        object.__setattr__(self, "sample_ids", ids)

    def __len__(self):
        return len(self.method_scores)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.method_scores), np.asarray(self.human_scores)


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ContractViolation(f"length mismatch: {x.size} vs {y.size}")
    return x, y


def _int_sum(a: np.ndarray) -> int:
    if a.size < 1 << 15:
        return int(a.sum())
    return sum(int(v) for v in a.tolist())


def _signed_sqrt_ratio(num: int, den: int) -> float:
    # sqrt(num**2 / den) carrying the sign of num; num**2/den is rounded once
    return math.copysign(math.sqrt(num * num / den), num) if num else 0.0


def spearman_rho(x, y) -> float:
    """Spearman's rho: Pearson correlation of average ranks."""
    x, y = _pair(x, y)
    n = x.size
    if n < 2:
        raise ContractViolation("spearman_rho needs at least two pairs")
    rx = np.rint(rankdata(x) * 2).astype(np.int64)
    ry = np.rint(rankdata(y) * 2).astype(np.int64)
    sx, sy = _int_sum(rx), _int_sum(ry)
    dx = n * _int_sum(rx * rx) - sx * sx
    dy = n * _int_sum(ry * ry) - sy * sy
    if dx == 0 or dy == 0:
        raise UndefinedCorrelationError("spearman_rho undefined for a constant input")
    num = n * _int_sum(rx * ry) - sx * sy
    return _signed_sqrt_ratio(num, dx * dy)


def kendall_tau(x, y) -> float:
    """Kendall's tau-b, tie corrected."""
    x, y = _pair(x, y)
    n = x.size
    if n < 2:
        raise ContractViolation("kendall_tau needs at least two pairs")
    i, j = np.triu_indices(n, k=1)
    sx = np.sign(x[i] - x[j]).astype(np.int64)
    sy = np.sign(y[i] - y[j]).astype(np.int64)
    n0 = n * (n - 1) // 2
    untied_x = n0 - int(np.count_nonzero(sx == 0))
    untied_y = n0 - int(np.count_nonzero(sy == 0))
    if untied_x == 0 or untied_y == 0:
        raise UndefinedCorrelationError("kendall_tau undefined: every pair is tied")
    s = int(np.dot(sx, sy))  # concordant minus discordant
    return _signed_sqrt_ratio(s, untied_x * untied_y)


def mae(x, y) -> float:
    x, y = _pair(x, y)
    if x.size == 0:
        raise EmptyInputError("mae of empty input")
    return math.fsum(np.abs(x - y)) / x.size


def stratified_sample(
    samples: Sequence[Item],
    per_bin: int,
    n_bins: int = 5,
    seed: int = 0,
    key: Callable[[Item], float] = attrgetter("human_score"),
) -> list[Item]:
    """Draw up to ``per_bin`` items from each equal-width score bin on [0, 1].

    The top bin is closed (a score of exactly 1.0 falls in the last bin).
    Bins with fewer than ``per_bin`` members contribute all of them. The
    result lists bins in ascending order, each in input order.
    """
    if not samples:
        raise EmptyInputError("no samples to stratify")
    if per_bin < 1 or n_bins < 1:
        raise ContractViolation("per_bin and n_bins must be >= 1")
    bins = assign_bins([key(s) for s in samples], n_bins)
    rng = np.random.default_rng(seed)
    out = []
    for b in range(n_bins):
        members = np.flatnonzero(bins == b)
        if members.size > per_bin:
            members = np.sort(rng.choice(members, size=per_bin, replace=False))
        out.extend(samples[k] for k in members)
    return out


def assign_bins(scores: Sequence[float | None], n_bins: int = 5) -> np.ndarray:
    if any(s is None for s in scores):
        raise ContractViolation("every sample needs a human score")
    arr = np.asarray(scores, dtype=float)
    if np.any((arr < 0) | (arr > 1)) or np.any(np.isnan(arr)):
        raise ContractViolation("human scores must lie in [0, 1]")
    return np.minimum((arr * n_bins).astype(int), n_bins - 1)


def resample_indices(seed: int, r: int, n: int) -> np.ndarray:
    return np.random.default_rng([seed, r]).integers(0, n, size=n)


def _safe(stat: Callable[..., float], *arrays) -> float:
    try:
        value = float(stat(*arrays))
    except UndefinedCorrelationError:
        return math.nan
    return value


def _run_resamples(fn: Callable[[int], float], n_resamples: int, n_jobs: int) -> np.ndarray:
    out = np.empty(n_resamples)
    if n_jobs <= 1:
        for r in range(n_resamples):
            out[r] = fn(r)
        return out

    def chunk(rs: range):
        for r in rs:
            out[r] = fn(r)

    step = math.ceil(n_resamples / n_jobs)
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        list(pool.map(chunk, [range(a, min(a + step, n_resamples)) for a in range(0, n_resamples, step)]))
    return out


def bootstrap_distribution(
    pairs: PairedScores,
    statistic: Statistic,
    n_resamples: int = 10_000,
    seed: int = 0,
    n_jobs: int = 1,
) -> np.ndarray:
    """Statistic on each resample; NaN marks resamples where it is undefined."""
    x, y = pairs.arrays()
    n = x.size

    def one(r: int) -> float:
        idx = resample_indices(seed, r, n)
        return _safe(statistic, x[idx], y[idx])

    return _run_resamples(one, n_resamples, n_jobs)


@dataclass(frozen=True)
class BootstrapReport:
    point_estimate: float
    ci_low: float
    ci_high: float
    n_resamples: int
    confidence_level: float
    seed: int
    n_valid: int


def bootstrap_ci(
    pairs: PairedScores,
    statistic: Statistic = spearman_rho,
    n_resamples: int = 10_000,
    level: float = 0.95,
    seed: int = 0,
    n_jobs: int = 1,
) -> BootstrapReport:
    """Percentile bootstrap confidence interval for ``statistic``."""
    if not 0.0 < level < 1.0:
        raise ContractViolation("confidence level must be in (0, 1)")
    values = bootstrap_distribution(pairs, statistic, n_resamples, seed, n_jobs)
    valid = values[~np.isnan(values)]
    dropped = values.size - valid.size
    if dropped:
        log.info("bootstrap: discarded %d of %d resamples with undefined statistic", dropped, values.size)
    if valid.size < MIN_VALID_RESAMPLES:
        raise DegenerateBootstrapError(
            f"only {valid.size} valid resamples (need {MIN_VALID_RESAMPLES})"
        )
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(valid, [alpha, 1.0 - alpha])
    return BootstrapReport(
        point_estimate=float(statistic(*pairs.arrays())),
        ci_low=float(lo),
        ci_high=float(hi),
        n_resamples=n_resamples,
        confidence_level=level,
        seed=seed,
        n_valid=int(valid.size),
    )


class PairedTest(NamedTuple):
    delta: float
    p_value: float


def paired_bootstrap_test(
    scores_a: Sequence[float],
    scores_b: Sequence[float],
    human: Sequence[float],
    correlation: Statistic = spearman_rho,
    n_resamples: int = 10_000,
    seed: int = 0,
    n_jobs: int = 1,
) -> PairedTest:
    """Two-sided paired bootstrap test of corr(a, human) - corr(b, human).

    All three series are resampled with one shared index vector per
    resample. ``p = 2 * min(P(delta_r <= 0), P(delta_r >= 0))``, capped at 1.
    """
    a = np.asarray(scores_a, dtype=float)
    b = np.asarray(scores_b, dtype=float)
    h = np.asarray(human, dtype=float)
    if not a.size == b.size == h.size:
        raise ContractViolation("scores_a, scores_b and human must be aligned")
    if a.size < 2:
        raise ContractViolation("need at least two paired scores")
    delta = float(correlation(a, h) - correlation(b, h))

    def one(r: int) -> float:
        idx = resample_indices(seed, r, a.size)
        ca = _safe(correlation, a[idx], h[idx])
        cb = _safe(correlation, b[idx], h[idx])
        return ca - cb

    deltas = _run_resamples(one, n_resamples, n_jobs)
    valid = deltas[~np.isnan(deltas)]
    if valid.size < MIN_VALID_RESAMPLES:
        raise DegenerateBootstrapError(
            f"only {valid.size} valid resamples (need {MIN_VALID_RESAMPLES})"
        )
    p = 2.0 * min(np.mean(valid <= 0), np.mean(valid >= 0))
    return PairedTest(delta, float(min(p, 1.0)))

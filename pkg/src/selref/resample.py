"""Seeded random streams and bootstrap evaluation.

Random-number contract
----------------------
All randomness in the toolkit flows through :func:`rng_stream`, which
wraps numpy's Philox bit generator: the Philox 4x64 counter-based block
cipher with 10 rounds, keyed here by the 128-bit pair ``(seed, stream)``.
Distinct ``(seed, stream)`` keys give statistically independent streams,
which is how bootstrap resamples and prediction sampling fan out without
sharing state.  The raw 64-bit output for a given key is fixed by the
algorithm itself (tests pin it against an independent transcription of
the published round function), so streams are identical on every
platform.

The bootstrap reports the mean and the population standard deviation of
the retained metric over B resamples of the test data, per referral
level.  Aggregation uses exactly rounded summation (math.fsum) so the
report does not depend on accumulation order.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidBError, SingleClassError
from .referral import _evaluate, refer
from .validation import check_uncertainty


def rng_stream(seed, stream=0):
    """Deterministic Generator for the (seed, stream) Philox key.

    seed and stream must fit in uint64.  Stream 0 is the default stream of
    a seed; callers that need several independent streams for one seed
    pass distinct stream indices (bootstrap resample b uses stream b).
    """
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class LevelStat:
    """Bootstrap summary for one referral level."""

    level: float
    mean: float  # None when no resample produced a value
    std: float
    n_valid: int
    n_skipped: int
    retained_count: int


@dataclass(frozen=True)
class BootstrapReport:
    n_resamples: int
    seed: int
    metric: str
    per_level: tuple  # of LevelStat


def _mean_std(values):
    """Population mean/std via exactly rounded sums (order-independent)."""
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def bootstrap(preds, u, levels, metric, n_resamples=100, seed=0):
    """Bootstrap the referral pipeline over resamples of the test set.

    Examples are first put into canonical order (lexicographic by id) so
    the report never depends on file ordering.  Each resample b draws n
    example indices with replacement from ``rng_stream(seed, b)``, carries
    the per-example uncertainty values along (they do not depend on the
    resample), re-runs referral at every level, and recomputes the metric
    on the retained subset.  Resamples where the metric is undefined at a
    level (e.g. a single-class AUC) count toward that level's
    ``n_skipped``.
    """
    if not isinstance(n_resamples, (int, np.integer)) or n_resamples < 1:
        raise InvalidBError(f"n_resamples must be a positive integer, got {n_resamples!r}")
    u = check_uncertainty(u, preds.n_examples)
    levels = [float(lv) for lv in levels]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly increasing")

    canonical = sorted(range(preds.n_examples), key=lambda i: preds.ids[i])
    preds = preds.take(canonical)
    u = u[canonical]
    n = preds.n_examples

    per_level_values = [[] for _ in levels]
    per_level_skipped = [0 for _ in levels]
    retained_counts = [None for _ in levels]
    for b in range(int(n_resamples)):
        idx = rng_stream(seed, b).integers(0, n, size=n)
        sample = preds.take(idx)
        sample_u = u[idx]
        for li, level in enumerate(levels):
            retained = refer(sample, sample_u, level)
            retained_counts[li] = retained.n_examples
            try:
                per_level_values[li].append(_evaluate(retained, metric))
            except SingleClassError:
                per_level_skipped[li] += 1

    stats = []
    for li, level in enumerate(levels):
        values = per_level_values[li]
        if values:
            mean, std = _mean_std(values)
        else:
            mean, std = None, None
        stats.append(
            LevelStat(
                level=level,
                mean=mean,
                std=std,
                n_valid=len(values),
                n_skipped=per_level_skipped[li],
                retained_count=retained_counts[li],
            )
        )
    return BootstrapReport(
        n_resamples=int(n_resamples),
        seed=int(seed),
        metric=metric,
        per_level=tuple(stats),
    )

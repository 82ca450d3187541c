"""Confusion matrices, quadratic weighted kappa, and rank-based ROC-AUC.

Both headline metrics are reported on a 0-100 scale by default (pass
``scale_100=False`` for the raw [0, 1] or [-1, 1] value).  The kappa and
AUC cores reduce to exact integer arithmetic before a single final float
division, so results are bit-identical across summation orders and
platforms.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateAgreementError,
    EmptyMatrixError,
    ShapeMismatchError,
    SingleClassError,
)


@dataclass(frozen=True)
class ConfusionMatrix:
    """M x M count matrix; counts[i][j] = cases predicted i with truth j."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ShapeMismatchError("confusion matrix must be square")
        if counts.shape[0] < 2:
            raise ShapeMismatchError("confusion matrix needs at least 2 classes")
        if not np.issubdtype(counts.dtype, np.integer):
            as_int = counts.astype(np.int64)
            if not np.array_equal(as_int, counts):
                raise ValueError("confusion counts must be integers")
            counts = as_int
        counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise ValueError("confusion counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n_classes(self):
        return self.counts.shape[0]

    @property
    def total(self):
        return int(self.counts.sum())


@dataclass(frozen=True)
class ExpectedAgreement:
    """Chance-agreement matrix E with E[i][j] = row_i * col_j / N."""

    values: np.ndarray

    @property
    def n_classes(self):
        return self.values.shape[0]


def confusion_from(preds):
    """Argmax decision rule -> confusion counts.

    Ties in a probability row break toward the lowest class index.
    """
    m = preds.n_classes
    predicted = np.argmax(preds.probs, axis=1)
    counts = np.zeros((m, m), dtype=np.int64)
    np.add.at(counts, (predicted, preds.labels), 1)
    return ConfusionMatrix(counts)


def expected_agreement(c):
    """Expected agreement under independent marginals, E = rows x cols / N."""
    total = c.total
    if total == 0:
        raise EmptyMatrixError("expected agreement of an empty matrix")
    rows = c.counts.sum(axis=1)
    cols = c.counts.sum(axis=0)
    return ExpectedAgreement(np.outer(rows, cols) / total)


def _sq_weights(m):
    idx = np.arange(m)
    return (idx[:, None] - idx[None, :]) ** 2


def _kappa_terms(counts):
    """Exact integer (numerator, denominator*N, total) of the kappa ratio.

    kappa = 1 - num / (den / N) = 1 - num * N / den, all three ints.
    """
    counts = np.asarray(counts, dtype=object)  # python ints: no overflow
    m = counts.shape[0]
    w = _sq_weights(m).astype(object)
    num = int((w * counts).sum())
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    den = int((w * np.outer(rows, cols)).sum())
    return num, den, int(counts.sum())


def kappa_unit(counts):
    """Quadratic weighted kappa of a count matrix, on the [-1, 1] scale.

    Integer matrices take an exact-arithmetic path (one final float
    division); float matrices (e.g. epsilon-smoothed counts) are computed
    directly in float64.  A zero denominator with a zero numerator is
    perfect agreement on a degenerate marginal and returns 1.0; a zero
    denominator with a positive numerator is impossible for valid counts
    and raises.
    """
    arr = np.asarray(counts)
    if np.issubdtype(arr.dtype, np.integer) or arr.dtype == object:
        num, den, total = _kappa_terms(arr)
    else:
        w = _sq_weights(arr.shape[0])
        num = float((w * arr).sum())
        den = float((w * np.outer(arr.sum(axis=1), arr.sum(axis=0))).sum())
        total = float(arr.sum())
    if total == 0:
        raise EmptyMatrixError("kappa of an empty matrix")
    if den == 0:
        if num == 0:
            return 1.0
        raise DegenerateAgreementError(
            "kappa denominator is zero but numerator is not; input is corrupted"
        )
    return 1.0 - (num * total) / den


def qwk(c, scale_100=True):
    """Quadratic weighted Cohen's kappa of a ConfusionMatrix.

    Returns the value on a 0-100 scale (the reporting convention) unless
    ``scale_100=False``.
    """
    value = kappa_unit(c.counts)
    return 100.0 * value if scale_100 else value


def _midranks_doubled(scores):
    """Integer 2x midranks of `scores` (average ranks, 1-based)."""
    scores = np.asarray(scores, dtype=np.float64)
    n = scores.shape[0]
    order = np.argsort(scores, kind="stable")
    ranked = scores[order]
    doubled = np.empty(n, dtype=np.int64)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and ranked[j + 1] == ranked[i]:
            j += 1
        doubled[i : j + 1] = i + j + 2  # 2 * ((i + j) / 2 + 1), zero-based i, j
        i = j + 1
    out = np.empty(n, dtype=np.int64)
    out[order] = doubled
    return out


def roc_auc(scores, labels, scale_100=True):
    """Mann-Whitney ROC-AUC with midranks for tied scores.

    `labels` must contain both classes {0, 1}; otherwise SingleClassError
    is raised and the caller decides the skip policy.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ShapeMismatchError("scores and labels must be aligned 1-D arrays")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = int(labels.shape[0] - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("roc_auc needs both a positive and a negative label")
    doubled = _midranks_doubled(scores)
    # 2*U = 2*sum(pos ranks) - n_pos*(n_pos+1), exact in integers
    u2 = int(doubled[pos].sum()) - n_pos * (n_pos + 1)
    value = u2 / (2 * n_pos * n_neg)
    return 100.0 * value if scale_100 else value

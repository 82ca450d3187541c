"""Domain data model: prediction sets, sample stacks, and their aggregation.

A :class:`PredictionSet` holds one posterior-predictive probability row per
example together with its integer label and an opaque string id.  A
:class:`SampleStack` holds the per-draw class probabilities (MC-dropout
draws, variational samples, or ensemble members) before averaging.

All types are immutable after construction and all operations are pure,
so everything here is safe to share across threads.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import EmptyStackError, ShapeMismatchError, WrongClassCountError
from .validation import (
    ROW_SUM_SKIP,
    check_ids,
    check_labels,
    check_prob_matrix,
    readonly,
)


@dataclass(frozen=True)
class PredictionSet:
    """Per-example class probabilities plus labels and ids.

    Parameters
    ----------
    probs : ndarray of shape (n_examples, n_classes)
        One probability row per example.  Rows must sum to 1 within 1e-6;
        rows off by more than 1e-12 are renormalized on construction.
    labels : ndarray of shape (n_examples,)
        Integer class indices in [0, n_classes).
    ids : sequence of str, optional
        Opaque example identifiers; defaults to "0", "1", ...
    """

    probs: np.ndarray
    labels: np.ndarray
    ids: tuple = None

    def __post_init__(self):
        probs = check_prob_matrix(self.probs)
        labels = check_labels(self.labels, probs.shape[1], probs.shape[0])
        ids = check_ids(self.ids, probs.shape[0])
        object.__setattr__(self, "probs", readonly(probs))
        object.__setattr__(self, "labels", readonly(labels))
        object.__setattr__(self, "ids", ids)

    @property
    def n_examples(self):
        return self.probs.shape[0]

    @property
    def n_classes(self):
        return self.probs.shape[1]

    def take(self, indices):
        """Subset (or resample) by example indices, keeping alignment."""
        indices = np.asarray(indices, dtype=np.int64)
        return PredictionSet(
            probs=self.probs[indices],
            labels=self.labels[indices],
            ids=tuple(self.ids[i] for i in indices),
        )


@dataclass(frozen=True)
class SampleStack:
    """S per-draw probability matrices over the same examples.

    `probs` has shape (n_samples, n_examples, n_classes); every slice
    along the first axis is validated like a PredictionSet matrix.
    """

    probs: np.ndarray
    labels: np.ndarray
    ids: tuple = None

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 3:
            raise ShapeMismatchError(f"stack must be 3-D (S, N, M), got {probs.ndim}-D")
        if probs.shape[0] > 0:
            probs = np.stack([check_prob_matrix(m) for m in probs])
        labels = check_labels(self.labels, probs.shape[2], probs.shape[1])
        ids = check_ids(self.ids, probs.shape[1])
        object.__setattr__(self, "probs", readonly(probs))
        object.__setattr__(self, "labels", readonly(labels))
        object.__setattr__(self, "ids", ids)

    @property
    def n_samples(self):
        return self.probs.shape[0]

    @property
    def n_examples(self):
        return self.probs.shape[1]

    @property
    def n_classes(self):
        return self.probs.shape[2]


@dataclass(frozen=True)
class ClassificationScheme:
    """Label scheme: the 5-grade ordinal scale, its binary referable
    derivation (positive iff grade >= rdr_threshold), or a generic M-class
    scheme."""

    kind: str
    n_classes: int
    rdr_threshold: int = 2

    _KINDS = ("pirc5", "rdr2", "generic")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind == "pirc5" and self.n_classes != 5:
            raise WrongClassCountError("pirc5 scheme has 5 classes")
        if self.kind == "rdr2" and self.n_classes != 2:
            raise WrongClassCountError("rdr2 scheme has 2 classes")
        if self.n_classes < 2:
            raise WrongClassCountError("need at least 2 classes")


def pirc5():
    return ClassificationScheme("pirc5", 5)


def rdr2(threshold=2):
    return ClassificationScheme("rdr2", 2, rdr_threshold=threshold)


def generic(n_classes):
    return ClassificationScheme("generic", n_classes)


def aggregate(stack):
    """Average a sample stack into a posterior-predictive PredictionSet.

    The result is the element-wise mean over the S matrices.  Rows are
    renormalized only if their sum drifts from 1 by more than 1e-12 (the
    mean of valid rows is valid up to rounding).  Labels and ids carry
    through unchanged.
    """
    if stack.n_samples == 0:
        raise EmptyStackError("cannot aggregate an empty stack")
    mean = stack.probs.mean(axis=0)
    sums = mean.sum(axis=1)
    drift = np.abs(sums - 1.0) > ROW_SUM_SKIP
    if np.any(drift):
        mean[drift] /= sums[drift, None]
    return PredictionSet(probs=mean, labels=stack.labels, ids=stack.ids)


def binarize_rdr(preds, scheme=None):
    """Collapse a 5-grade prediction set to the binary referable scheme.

    p(referable) is the sum of the probabilities of grades >= threshold;
    labels map through the same threshold.
    """
    if scheme is None:
        scheme = rdr2()
    if scheme.kind != "rdr2":
        raise WrongClassCountError("binarize_rdr needs an rdr2 scheme")
    if preds.n_classes != 5:
        raise WrongClassCountError(
            f"binarize_rdr expects 5 classes, got {preds.n_classes}"
        )
    t = scheme.rdr_threshold
    if not 1 <= t < 5:
        raise ValueError(f"rdr_threshold must be in [1, 5), got {t}")
    p_neg = preds.probs[:, :t].sum(axis=1)
    p_pos = preds.probs[:, t:].sum(axis=1)
    return PredictionSet(
        probs=np.column_stack([p_neg, p_pos]),
        labels=(preds.labels >= t).astype(np.int64),
        ids=preds.ids,
    )

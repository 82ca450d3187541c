"""Input validation helpers shared across the toolkit.

The probability-row tolerance is 1e-6 on ingestion: rows whose sum
deviates from 1 by more than that are rejected, rows within it are
renormalized by their sum.  Rows already within 1e-12 of 1 are kept
bit-for-bit so that save/load round trips are lossless.
"""

import numpy as np

from .exceptions import InvalidProbabilityRowError, ShapeMismatchError

ROW_SUM_TOL = 1e-6
ROW_SUM_SKIP = 1e-12


def check_prob_matrix(probs, tol=ROW_SUM_TOL):
    """Validate and normalize an (n, m) matrix of probability rows.

    Entries must lie in [0, 1] and every row must sum to 1 within `tol`.
    Rows off by more than ROW_SUM_SKIP but within `tol` are divided by
    their sum; rows already within ROW_SUM_SKIP are left untouched.

    Returns a float64 copy; raises InvalidProbabilityRowError otherwise.
    """
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 2:
        raise ShapeMismatchError(f"probability matrix must be 2-D, got {probs.ndim}-D")
    if probs.shape[1] < 2:
        raise ShapeMismatchError("need at least 2 classes")
    if not np.all(np.isfinite(probs)):
        row = int(np.where(~np.isfinite(probs).all(axis=1))[0][0])
        raise InvalidProbabilityRowError(f"non-finite probability in row {row}", line=row)
    out_of_range = (probs < 0.0) | (probs > 1.0)
    if np.any(out_of_range):
        bad = int(np.where(out_of_range.any(axis=1))[0][0])
        raise InvalidProbabilityRowError(
            f"probability outside [0, 1] in row {bad}", line=bad
        )
    sums = probs.sum(axis=1)
    off = np.abs(sums - 1.0)
    if np.any(off > tol):
        bad = int(np.argmax(off))
        raise InvalidProbabilityRowError(
            f"row {bad} sums to {sums[bad]:.9g}, outside 1 +/- {tol:g}", line=bad
        )
    probs = probs.copy()
    renorm = off > ROW_SUM_SKIP
    if np.any(renorm):
        probs[renorm] /= sums[renorm, None]
    return probs


def check_labels(labels, n_classes, n_examples=None):
    """Validate integer class labels in [0, n_classes)."""
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ShapeMismatchError("labels must be 1-D")
    if n_examples is not None and labels.shape[0] != n_examples:
        raise ShapeMismatchError(
            f"{labels.shape[0]} labels for {n_examples} examples"
        )
    if labels.size and not np.issubdtype(labels.dtype, np.integer):
        as_int = labels.astype(np.int64)
        if not np.array_equal(as_int, labels):
            raise ValueError("labels must be integers")
        labels = as_int
    labels = labels.astype(np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise ValueError(f"labels must lie in [0, {n_classes})")
    return labels


def check_ids(ids, n_examples):
    """Coerce ids to a tuple of strings, generating 0..n-1 when absent."""
    if ids is None:
        return tuple(str(i) for i in range(n_examples))
    ids = tuple(str(i) for i in ids)
    if len(ids) != n_examples:
        raise ShapeMismatchError(f"{len(ids)} ids for {n_examples} examples")
    return ids


def check_uncertainty(values, n_examples):
    """Validate an uncertainty vector aligned with a prediction set."""
    from .exceptions import MisalignedError

    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.shape[0] != n_examples:
        raise MisalignedError(
            f"uncertainty vector of length {values.shape[0] if values.ndim == 1 else values.shape} "
            f"for {n_examples} examples"
        )
    if not np.all(np.isfinite(values)):
        raise MisalignedError("uncertainty values must be finite")
    return values


def readonly(arr):
    """Return `arr` with the writeable flag cleared (shared, not copied)."""
    arr.setflags(write=False)
    return arr

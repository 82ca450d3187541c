"""Synthetic 2-D datasets for the toy classifiers.

Two flavors:

* Gaussian blobs: one isotropic cluster per class on a circle, with the
  cluster spread controlling how much neighboring classes overlap.
* Ordinal severity: classes 0..M-1 sit at unit intervals along one axis
  (plus a nuisance second axis), so most confusion happens between
  adjacent grades.  This gives the squared-distance-weighted kappa its
  ordinal structure: a two-grade miss costs four times a one-grade miss.
"""

import numpy as np

from ..exceptions import InvalidSpecError


def make_blobs(n_examples, n_classes, overlap=0.15, seed=0, rng=None):
    """Gaussian blobs on a circle; `overlap` is the cluster std dev
    relative to the inter-center distance (0 gives well-separated blobs)."""
    if n_classes < 2 or n_examples < n_classes:
        raise InvalidSpecError("need at least 2 classes and one example per class")
    if overlap < 0:
        raise InvalidSpecError("overlap must be >= 0")
    if rng is None:
        from ..resample import rng_stream

        rng = rng_stream(seed)
    angles = 2.0 * np.pi * np.arange(n_classes) / n_classes
    radius = 2.0 if n_classes > 2 else 1.25
    centers = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    spacing = np.linalg.norm(centers[1] - centers[0])
    std = max(overlap * spacing, 1e-12)
    labels = rng.integers(0, n_classes, size=n_examples)
    features = centers[labels] + std * rng.standard_normal((n_examples, 2))
    return features, labels.astype(np.int64)


def make_ordinal(n_examples, n_classes=5, noise=0.45, seed=0, rng=None):
    """Ordinal severity data: class k is N(k, noise^2) along the first
    axis with a standard-normal nuisance second axis."""
    if n_classes < 2 or n_examples < n_classes:
        raise InvalidSpecError("need at least 2 classes and one example per class")
    if noise <= 0:
        raise InvalidSpecError("noise must be > 0")
    if rng is None:
        from ..resample import rng_stream

        rng = rng_stream(seed)
    labels = rng.integers(0, n_classes, size=n_examples)
    severity = labels + noise * rng.standard_normal(n_examples)
    nuisance = rng.standard_normal(n_examples)
    return np.column_stack([severity, nuisance]), labels.astype(np.int64)


def split_indices(n_examples, fractions, rng):
    """Shuffled train/validation/test index split.

    Train and validation take floor(fraction * n) examples each, the test
    split takes the remainder.
    """
    f_train, f_val, f_test = fractions
    if min(fractions) < 0 or abs(f_train + f_val + f_test - 1.0) > 1e-9:
        raise InvalidSpecError("split fractions must be >= 0 and sum to 1")
    order = rng.permutation(n_examples)
    n_train = int(f_train * n_examples + 1e-9)
    n_val = int(f_val * n_examples + 1e-9)
    return (
        np.sort(order[:n_train]),
        np.sort(order[n_train : n_train + n_val]),
        np.sort(order[n_train + n_val :]),
    )

"""Uncertainty-ordered referral: drop the most uncertain fraction, re-score.

A referral level of 0.3 removes the 30% most uncertain examples from the
evaluation (they would be handed to a human grader) and evaluates the
retained rest.  The retained-performance curve over several levels is the
central evaluation object of the toolkit.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import SingleClassError, TooFewLevelsError, WrongClassCountError
from .metrics import confusion_from, qwk, roc_auc
from .validation import check_uncertainty

METRICS = ("qwk", "auc")

MARKER_UP = "up"
MARKER_EQUAL = "equal"
MARKER_DOWN = "down"

# Absolute slack when computing floor(level * n): the nearest float64 to a
# decimal level like 0.3 can fall just below it, and 0.3 * 10 must refer 3.
_FLOOR_SLACK = 1e-9


def referred_count(level, n):
    """Number of examples removed at `level`: floor(level * n)."""
    if not 0.0 <= level < 1.0:
        raise ValueError(f"referral level must be in [0, 1), got {level}")
    return int(math.floor(level * n + _FLOOR_SLACK))


def refer(preds, u, level):
    """Remove the floor(level * n) most uncertain examples.

    Ties in uncertainty break by original position: the earlier example is
    retained first.  The retained subset keeps its original order.
    """
    u = check_uncertainty(u, preds.n_examples)
    n = preds.n_examples
    k = referred_count(level, n)
    if k == 0:
        return preds
    # stable ascending sort: ties keep original order, so the removed top-k
    # block takes the latest-indexed among equal uncertainties
    order = np.argsort(u, kind="stable")
    retained = np.sort(order[: n - k])
    return preds.take(retained)


def _evaluate(preds, metric):
    if metric == "qwk":
        return qwk(confusion_from(preds))
    if metric == "auc":
        if preds.n_classes != 2:
            raise WrongClassCountError("auc metric needs a binary prediction set")
        return roc_auc(preds.probs[:, 1], preds.labels)
    raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")


@dataclass(frozen=True)
class ReferralCurve:
    """Retained metric per referral level (0-100 scale).

    `values[i]` is None when the metric was not computable at `levels[i]`
    (e.g. a single-class AUC after heavy referral); `reasons[i]` then holds
    a machine-readable reason code instead of being None.
    """

    levels: tuple
    values: tuple
    retained_counts: tuple
    reasons: tuple
    metric: str


def referral_curve(preds, u, levels, metric):
    """Evaluate the retained metric at each referral level.

    Levels must be strictly increasing, each in [0, 1).  Metric failures at
    a level are reported as explicit missing values with a reason code,
    never silently dropped.
    """
    levels = [float(lv) for lv in levels]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly increasing")
    u = check_uncertainty(u, preds.n_examples)
    values, counts, reasons = [], [], []
    for level in levels:
        retained = refer(preds, u, level)
        counts.append(retained.n_examples)
        try:
            values.append(_evaluate(retained, metric))
            reasons.append(None)
        except SingleClassError:
            values.append(None)
            reasons.append("single_class")
    return ReferralCurve(
        levels=tuple(levels),
        values=tuple(values),
        retained_counts=tuple(counts),
        reasons=tuple(reasons),
        metric=metric,
    )


def markers_from_values(values):
    """Up/equal/down marker per adjacent pair of metric values.

    Values equal after rounding to one decimal (the display precision of
    the report tables) count as equal; otherwise the raw comparison
    decides.  A pair with a missing side yields None.
    """
    if len(values) < 2:
        raise TooFewLevelsError("need at least two levels to compare")
    markers = []
    for prev, cur in zip(values, values[1:]):
        if prev is None or cur is None:
            markers.append(None)
        elif f"{cur:.1f}" == f"{prev:.1f}":
            markers.append(MARKER_EQUAL)
        elif cur > prev:
            markers.append(MARKER_UP)
        else:
            markers.append(MARKER_DOWN)
    return markers


def improvement_markers(curve):
    """Markers for a ReferralCurve, one per adjacent level pair."""
    return markers_from_values(curve.values)

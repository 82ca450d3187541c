"""Uncertainty measures as instances of the expected-conditional-risk frame.

Every measure maps a PredictionSet to one real score per example, higher
meaning more uncertain.  The generic form is the per-example risk

    R = sum_i L_row(i) * p_i

where L_row(i) is the loss of the row's predicted distribution against
target class i.  Plugging in the negative log-likelihood recovers
predictive entropy; plugging in the negative perturbed-kappa loss yields
the kappa-based risk used for ordinal grading; the classic reject rule
corresponds to 1 - max_i p_i.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .exceptions import EmptyInputError, ShapeMismatchError
from .metrics import ConfusionMatrix, kappa_unit

MEASURES = ("entropy", "max-prob", "qwk-risk", "nll-risk", "table-risk")


def entropy(preds):
    """Predictive entropy per example, in nats; 0*ln(0) counts as 0."""
    return -xlogy(preds.probs, preds.probs).sum(axis=1)


def max_prob_reject(preds):
    """Classic reject score 1 - max_i p_i.

    Thresholding at 1 - tau reproduces the rule that rejects when the top
    probability falls below tau, and ascending sort matches referral order.
    """
    return 1.0 - preds.probs.max(axis=1)


def expected_conditional_risk(preds, loss):
    """Expected risk per example under a loss.

    `loss` is either an (M, M) table with loss[j, i] = cost of predicting
    class j against target i (the per-target loss of a probability row is
    its expectation sum_j p_j * loss[j, i]), or the string "nll" for the
    negative log-likelihood, whose per-target loss is -ln p_i directly.
    """
    p = preds.probs
    if isinstance(loss, str):
        if loss != "nll":
            raise ValueError(f"unknown named loss {loss!r}")
        with np.errstate(divide="ignore"):
            loss_rows = -np.log(p)  # +inf where p == 0
        # 0 * inf := 0 so that impossible targets contribute no risk
        terms = np.where(p > 0.0, p * np.where(np.isinf(loss_rows), 0.0, loss_rows), 0.0)
        return terms.sum(axis=1)
    table = np.asarray(loss, dtype=np.float64)
    m = preds.n_classes
    if table.shape != (m, m):
        raise ShapeMismatchError(f"loss table must be ({m}, {m}), got {table.shape}")
    if not np.all(np.isfinite(table)):
        raise ValueError("loss table must be finite")
    # risk_n = sum_i (sum_j p_nj L_ji) p_ni
    return np.einsum("nj,ji,ni->n", p, table, p)


def qwk_kappa_table(c_val, smoothing=0.0):
    """Perturbed-kappa table K[j, i] = kappa(C + unit count at (j, i)).

    The M^2 kappa evaluations do not depend on the probability row, so
    they are computed once per validation confusion matrix and reused for
    every example.  Kappa is on the [-1, 1] scale here.  `smoothing`
    optionally adds a constant to every cell of C before perturbation
    (off by default; the perturbation itself always adds exactly 1).
    """
    m = c_val.n_classes
    if c_val.total == 0:
        raise ValueError("validation confusion matrix must have a positive total")
    base = c_val.counts.astype(np.float64) + smoothing if smoothing else c_val.counts
    table = np.empty((m, m), dtype=np.float64)
    for j in range(m):
        for i in range(m):
            perturbed = np.array(base, dtype=base.dtype if smoothing else np.int64)
            perturbed[j, i] += 1
            table[j, i] = kappa_unit(perturbed)
    return table


def qwk_risk(preds, c_val, smoothing=0.0):
    """Expected negative perturbed-kappa risk per example.

    For a probability row p, the risk is

        R = -sum_i p_i sum_j p_j K[j, i]

    with K the perturbed-kappa table of the validation confusion matrix.
    """
    if c_val.n_classes != preds.n_classes:
        raise ShapeMismatchError(
            f"confusion has {c_val.n_classes} classes, predictions {preds.n_classes}"
        )
    table = qwk_kappa_table(c_val, smoothing=smoothing)
    p = preds.probs
    return -np.einsum("nj,ni,ji->n", p, p, table)


def dataset_expected_risk(values):
    """Empirical expectation of a risk vector over the dataset."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyInputError("risk vector is empty")
    return float(values.mean())


@dataclass(frozen=True)
class UncertaintySpec:
    """Selection of an uncertainty measure plus its parameters.

    kind is one of "entropy", "max-prob", "qwk-risk", "nll-risk" (the
    generic risk with the NLL loss) or "table-risk" (generic risk with an
    explicit loss table).  qwk-risk requires `validation_confusion`;
    table-risk requires `loss_table`.
    """

    kind: str
    validation_confusion: ConfusionMatrix = None
    loss_table: np.ndarray = None
    smoothing: float = 0.0

    def __post_init__(self):
        if self.kind not in MEASURES:
            raise ValueError(f"unknown measure {self.kind!r}; choose from {MEASURES}")
        if self.kind == "qwk-risk":
            if self.validation_confusion is None:
                raise ValueError("qwk-risk requires a validation confusion matrix")
            if self.validation_confusion.total == 0:
                raise ValueError("validation confusion matrix must have counts")
        if self.kind == "table-risk":
            if self.loss_table is None:
                raise ValueError("table-risk requires a loss table")
            table = np.asarray(self.loss_table, dtype=np.float64)
            if not np.all(np.isfinite(table)):
                raise ValueError("loss table must be finite")

    def compute(self, preds):
        """Evaluate the selected measure on a prediction set."""
        if self.kind == "entropy":
            return entropy(preds)
        if self.kind == "max-prob":
            return max_prob_reject(preds)
        if self.kind == "qwk-risk":
            return qwk_risk(preds, self.validation_confusion, smoothing=self.smoothing)
        if self.kind == "nll-risk":
            return expected_conditional_risk(preds, "nll")
        return expected_conditional_risk(preds, self.loss_table)

"""selref: selective prediction with uncertainty-ordered referral.

The toolkit turns per-example class-probability predictions into
uncertainty scores (predictive entropy, max-probability reject score,
and a perturbed-kappa risk for ordinal grading), evaluates performance
when the most uncertain fraction is referred away, reports bootstrap
mean +/- std per referral level, and ships desk-scale approximate
Bayesian classifiers (MAP, MC dropout, mean-field/radial/generalized
variational inference, deep ensembles) that produce such predictions.
"""

from .exceptions import SelrefError
from .metrics import (
    ConfusionMatrix,
    ExpectedAgreement,
    confusion_from,
    expected_agreement,
    qwk,
    roc_auc,
)
from .predictions import (
    ClassificationScheme,
    PredictionSet,
    SampleStack,
    aggregate,
    binarize_rdr,
    generic,
    pirc5,
    rdr2,
)
from .referral import (
    ReferralCurve,
    improvement_markers,
    markers_from_values,
    refer,
    referral_curve,
)
from .resample import BootstrapReport, bootstrap, rng_stream
from .uncertainty import (
    UncertaintySpec,
    dataset_expected_risk,
    entropy,
    expected_conditional_risk,
    max_prob_reject,
    qwk_risk,
)
from .pipeline import RunConfig, generate_synthetic, run

__version__ = "0.1.0"

__all__ = [
    "BootstrapReport",
    "ClassificationScheme",
    "ConfusionMatrix",
    "ExpectedAgreement",
    "PredictionSet",
    "ReferralCurve",
    "RunConfig",
    "SampleStack",
    "SelrefError",
    "UncertaintySpec",
    "aggregate",
    "binarize_rdr",
    "bootstrap",
    "confusion_from",
    "dataset_expected_risk",
    "entropy",
    "expected_agreement",
    "expected_conditional_risk",
    "generate_synthetic",
    "generic",
    "improvement_markers",
    "markers_from_values",
    "max_prob_reject",
    "pirc5",
    "qwk",
    "qwk_risk",
    "rdr2",
    "refer",
    "referral_curve",
    "roc_auc",
    "rng_stream",
    "run",
]

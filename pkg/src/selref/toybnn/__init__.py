"""Desk-scale approximate-Bayesian engine on a tiny MLP."""

from dataclasses import dataclass

import numpy as np

from ..predictions import SampleStack
from .bundle import load_model, model_from_dict, model_to_dict, save_model
from .data import make_blobs, make_ordinal, split_indices
from .estimators import (
    METHODS,
    DeepEnsembleClassifier,
    GVIClassifier,
    MapClassifier,
    MCDropoutClassifier,
    MFVIClassifier,
    RadialClassifier,
)
from .network import ToyMlp, forward, init_mlp, sample_dropout_masks
from .objectives import (
    elbo_mfvi,
    grad_check,
    gvi_objective,
    map_loss,
    radial_objective,
    sample_gaussian_noise,
    sample_radial_noise,
)
from .variational import (
    gaussian_sample,
    kl_diag_gaussian,
    radial_sample,
    renyi_divergence_diag,
)

__all__ = [
    "DeepEnsembleClassifier",
    "GVIClassifier",
    "METHODS",
    "MCDropoutClassifier",
    "MFVIClassifier",
    "MapClassifier",
    "RadialClassifier",
    "ToyMlp",
    "TrainConfig",
    "elbo_mfvi",
    "forward",
    "gaussian_sample",
    "grad_check",
    "gvi_objective",
    "init_mlp",
    "kl_diag_gaussian",
    "load_model",
    "make_blobs",
    "make_ordinal",
    "map_loss",
    "model_from_dict",
    "model_to_dict",
    "predict_stack",
    "radial_objective",
    "radial_sample",
    "renyi_divergence_diag",
    "sample_dropout_masks",
    "sample_gaussian_noise",
    "sample_radial_noise",
    "save_model",
    "split_indices",
    "train",
]


@dataclass
class TrainConfig:
    """Declarative training configuration mapped onto the estimators."""

    method: str = "map"
    hidden_layer_sizes: tuple = (16, 16)
    epochs: int = 150
    batch_size: int = 32
    learning_rate: float = 0.01
    l2_weight: float = 1e-4
    dropout_rate: float = 0.1
    n_train_mc: int = 1
    alpha: float = 0.5
    n_members: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {sorted(METHODS)}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")

    def build(self):
        common = dict(
            hidden_layer_sizes=tuple(self.hidden_layer_sizes),
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            seed=self.seed,
        )
        if self.method in ("map", "mcdropout"):
            return METHODS[self.method](
                l2_weight=self.l2_weight, dropout_rate=self.dropout_rate, **common
            )
        if self.method == "mfvi":
            return MFVIClassifier(n_train_mc=self.n_train_mc, **common)
        if self.method == "radial":
            return RadialClassifier(n_train_mc=self.n_train_mc, **common)
        if self.method == "gvi":
            return GVIClassifier(n_train_mc=self.n_train_mc, alpha=self.alpha, **common)
        return DeepEnsembleClassifier(
            n_members=self.n_members,
            l2_weight=self.l2_weight,
            dropout_rate=self.dropout_rate,
            **common,
        )


def train(config, X, y, n_classes=None):
    """Fit the configured method; returns the fitted estimator."""
    return config.build().fit(X, y, n_classes=n_classes)


def predict_stack(model, X, y, n_samples=16, rng=None, ids=None):
    """Method-appropriate prediction samples as a SampleStack.

    For ensembles the stack holds one sample per member and `n_samples`
    is ignored; deterministic MAP models emit `n_samples` identical
    matrices so downstream aggregation is uniform across methods.
    """
    probs = model.sample_proba(X, n_samples=n_samples, rng=rng)
    return SampleStack(probs=probs, labels=np.asarray(y, dtype=np.int64), ids=ids)

"""End-to-end pipeline property: uncertainty referral helps every method.

Trains each approximate-Bayesian method on synthetic blob data whose
label noise concentrates near the class boundaries, refers the 30% most
entropy-uncertain test examples, and checks that retained accuracy
improves for a clear majority of seeds.
"""

import numpy as np
import pytest

from selref import aggregate, entropy, refer
from selref.resample import rng_stream
from selref.toybnn import TrainConfig, predict_stack, train
from selref.toybnn.data import make_blobs, split_indices

METHODS = ("mcdropout", "mfvi", "radial", "gvi", "ensemble")
N_SEEDS = 20


def accuracy(preds):
    return float((np.argmax(preds.probs, axis=1) == preds.labels).mean())


def retained_accuracies(method, seed):
    X, y = make_blobs(600, 3, overlap=0.35, seed=seed)
    tr, _, te = split_indices(600, (0.7, 0.1, 0.2), rng_stream(seed, 1))
    config = TrainConfig(method=method, epochs=50, batch_size=64, seed=seed)
    model = train(config, X[tr], y[tr], n_classes=3)
    stack = predict_stack(model, X[te], y[te], n_samples=16, rng=rng_stream(seed, 50))
    preds = aggregate(stack)
    u = entropy(preds)
    return accuracy(preds), accuracy(refer(preds, u, 0.3))


@pytest.mark.slow
@pytest.mark.parametrize("method", METHODS)
def test_entropy_referral_improves_majority_of_seeds(method):
    wins = 0
    for seed in range(N_SEEDS):
        base, referred = retained_accuracies(method, seed)
        wins += referred > base
    assert wins > N_SEEDS // 2, f"{method}: {wins}/{N_SEEDS} strict improvements"

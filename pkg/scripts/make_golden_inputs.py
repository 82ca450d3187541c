#!/usr/bin/env python3
"""Regenerate the frozen pipeline inputs under tests/data/.

Runs the package end to end (data generation, MC-dropout training,
prediction sampling, aggregation, binarization) with fixed seeds.  The
outputs are committed; this script only exists so the provenance of
those files is reproducible.
"""

import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.path.join(ROOT, "tests", "data")


def main():
    from selref import aggregate, binarize_rdr
    from selref.io import load_features, save_predictions
    from selref.pipeline import generate_synthetic
    from selref.resample import rng_stream
    from selref.toybnn import TrainConfig, predict_stack, train

    os.makedirs(DATA, exist_ok=True)
    paths = generate_synthetic(
        kind="ordinal", n_examples=1000, n_classes=5, outdir=DATA, seed=424242
    )
    X, y, _ = load_features(paths["train"])
    model = train(
        TrainConfig(method="mcdropout", epochs=60, batch_size=64, seed=424242),
        X,
        y,
        n_classes=5,
    )
    Xte, yte, ids = load_features(paths["test"])
    stack = predict_stack(
        model, Xte, yte, n_samples=16, rng=rng_stream(424242, 99), ids=ids
    )
    preds = aggregate(stack)
    save_predictions(preds, os.path.join(DATA, "preds_ordinal.csv"))
    save_predictions(binarize_rdr(preds), os.path.join(DATA, "preds_binary.csv"))
    # the train/val/test feature files are only intermediate products here
    for name in ("train", "val", "test"):
        os.unlink(paths[name])
    print(os.path.join(DATA, "preds_ordinal.csv"))
    print(os.path.join(DATA, "preds_binary.csv"))
    print(paths["confusion"])


if __name__ == "__main__":
    sys.exit(main())

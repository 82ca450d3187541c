"""Command-line surface.

Subcommands::

    selref analyze      run the uncertainty/referral/bootstrap pipeline
    selref aggregate    average a sample stack into an aggregated file
    selref gen-data     write a synthetic dataset (plus validation confusion)
    selref train-toy    fit one of the toy classifiers, save a model file
    selref predict-toy  sample a prediction stack from a saved model

Exit codes: 0 on success, 1 on any toolkit error (a machine-readable
JSON object ``{"error": {"type", "message"}}`` goes to stderr), 2 on
command-line usage errors (argparse).
"""

import argparse
import json
import sys

from . import io
from .exceptions import SelrefError
from .pipeline import RunConfig, generate_synthetic, run
from .predictions import aggregate
from .resample import rng_stream
from .toybnn import TrainConfig, load_model, predict_stack, save_model, train
from .uncertainty import MEASURES


def _levels(text):
    return tuple(float(tok) for tok in text.split(","))


def _fractions(text):
    parts = tuple(float(tok) for tok in text.split(","))
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated fractions")
    return parts


def _hidden(text):
    return tuple(int(tok) for tok in text.split(","))


def _add_analyze(sub):
    p = sub.add_parser("analyze", help="uncertainty-ordered referral evaluation")
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override")
    p.add_argument("--predictions", help="aggregated prediction file")
    p.add_argument("--stack", help="long-form sample stack file")
    p.add_argument("--confusion", help="validation confusion matrix (qwk-risk)")
    p.add_argument("--loss-table", dest="loss_table", help="loss table file (table-risk)")
    p.add_argument("--scheme", choices=("pirc5", "rdr2", "generic"))
    p.add_argument("--measure", choices=MEASURES)
    p.add_argument("--metric", choices=("qwk", "auc"))
    p.add_argument("--levels", type=_levels, help="comma-separated, e.g. 0,0.3,0.5")
    p.add_argument("--bootstrap", dest="n_resamples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--smoothing", type=float)
    p.add_argument("--output", help="report JSON path")
    p.add_argument("--plot-data", dest="plot_data", help="level,mean,std CSV path")
    return p


def _analyze(args):
    fields = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            fields.update(json.load(fh))
    for name in (
        "predictions",
        "stack",
        "confusion",
        "loss_table",
        "scheme",
        "measure",
        "metric",
        "levels",
        "n_resamples",
        "seed",
        "smoothing",
        "output",
        "plot_data",
    ):
        value = getattr(args, name)
        if value is not None:
            fields[name] = value
    if "levels" in fields:
        fields["levels"] = tuple(fields["levels"])
    config = RunConfig(**fields)
    run(config)
    print(config.output)


def _aggregate(args):
    stack = io.load_stack(args.stack)
    io.save_predictions(aggregate(stack), args.output)
    print(args.output)


def _gen_data(args):
    paths = generate_synthetic(
        kind=args.kind,
        n_examples=args.n,
        n_classes=args.classes,
        outdir=args.outdir,
        seed=args.seed,
        overlap=args.overlap,
        noise=args.noise,
        fractions=args.fractions,
    )
    for name in ("train", "val", "test", "confusion"):
        print(paths[name])


def _train_config(args):
    return TrainConfig(
        method=args.method,
        hidden_layer_sizes=args.hidden,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        l2_weight=args.l2_weight,
        dropout_rate=args.dropout_rate,
        n_train_mc=args.train_mc,
        alpha=args.alpha,
        n_members=args.members,
        seed=args.seed,
    )


def _train_toy(args):
    X, y, _ = io.load_features(args.features)
    model = train(_train_config(args), X, y, n_classes=args.classes)
    save_model(model, args.output)
    print(args.output)


def _predict_toy(args):
    model = load_model(args.model)
    X, y, ids = io.load_features(args.features)
    rng = rng_stream(args.seed) if args.seed is not None else None
    stack = predict_stack(model, X, y, n_samples=args.samples, rng=rng, ids=ids)
    io.save_stack(stack, args.output)
    print(args.output)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="selref",
        description="Selective-prediction toolkit: uncertainty scores, referral "
        "evaluation with bootstrap statistics, and toy Bayesian classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_analyze(sub)

    p = sub.add_parser("aggregate", help="average a sample stack")
    p.add_argument("--stack", required=True)
    p.add_argument("--output", required=True)

    p = sub.add_parser("gen-data", help="write a synthetic dataset")
    p.add_argument("--kind", choices=("blobs", "ordinal"), default="ordinal")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--overlap", type=float, default=0.15, help="blob spread")
    p.add_argument("--noise", type=float, default=0.45, help="ordinal grade overlap")
    p.add_argument("--fractions", type=_fractions, default=(0.7, 0.1, 0.2))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--outdir", required=True)

    p = sub.add_parser("train-toy", help="fit a toy classifier")
    p.add_argument("--features", required=True)
    p.add_argument(
        "--method",
        choices=("map", "mcdropout", "mfvi", "gvi", "radial", "ensemble"),
        default="map",
    )
    p.add_argument("--classes", type=int, help="class count when labels do not cover it")
    p.add_argument("--hidden", type=_hidden, default=(16, 16))
    p.add_argument("--epochs", type=int, default=150)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=32)
    p.add_argument("--learning-rate", dest="learning_rate", type=float, default=0.01)
    p.add_argument("--l2-weight", dest="l2_weight", type=float, default=1e-4)
    p.add_argument("--dropout-rate", dest="dropout_rate", type=float, default=0.1)
    p.add_argument("--train-mc", dest="train_mc", type=int, default=1)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--members", type=int, default=3)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", required=True)

    p = sub.add_parser("predict-toy", help="sample predictions from a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--seed", type=int, help="prediction sampling seed (default: model seed stream)")
    p.add_argument("--output", required=True)

    return parser


_HANDLERS = {
    "analyze": _analyze,
    "aggregate": _aggregate,
    "gen-data": _gen_data,
    "train-toy": _train_toy,
    "predict-toy": _predict_toy,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        _HANDLERS[args.command](args)
    except SelrefError as exc:
        json.dump(
            {"error": {"type": type(exc).__name__, "message": str(exc)}},
            sys.stderr,
        )
        sys.stderr.write("\n")
        return 1
    except OSError as exc:
        json.dump({"error": {"type": "OSError", "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

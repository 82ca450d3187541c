"""The analyze pipeline: load -> aggregate -> score -> refer -> bootstrap.

`run` is the library form of the ``selref analyze`` command: it resolves
a RunConfig, executes the pipeline, validates the report against the
published schema, and writes the report (and optional plot data)
atomically.  Running the same config twice produces byte-identical
output; the seed is mandatory for exactly that reason.
"""

import dataclasses
import json
import os
from dataclasses import dataclass
from importlib import resources

import jsonschema

from . import io
from .exceptions import InvalidSpecError, WrongClassCountError
from .metrics import confusion_from
from .predictions import PredictionSet, aggregate, binarize_rdr
from .referral import markers_from_values
from .resample import bootstrap, rng_stream
from .toybnn import TrainConfig, train
from .toybnn.data import make_blobs, make_ordinal, split_indices
from .uncertainty import UncertaintySpec

SCHEMES = ("pirc5", "rdr2", "generic")
REPORT_FORMAT = "selref-report/1"


@dataclass
class RunConfig:
    """Declarative description of one analyze run.

    Exactly one of `predictions` (aggregated file) or `stack` (long-form
    samples, aggregated on load) must be given.  `seed` has no default on
    purpose: reports must be byte-reproducible, so wall-clock seeding is
    not available.
    """

    predictions: str = None
    stack: str = None
    confusion: str = None
    loss_table: str = None
    scheme: str = "pirc5"
    measure: str = "entropy"
    metric: str = "qwk"
    levels: tuple = (0.0, 0.3, 0.5)
    n_resamples: int = 100
    seed: int = None
    smoothing: float = 0.0
    output: str = None
    plot_data: str = None

    def validate(self):
        if (self.predictions is None) == (self.stack is None):
            raise InvalidSpecError("give exactly one of predictions/stack")
        if self.seed is None:
            raise InvalidSpecError("seed is required (reports must be reproducible)")
        if self.scheme not in SCHEMES:
            raise InvalidSpecError(f"unknown scheme {self.scheme!r}")
        if self.metric not in ("qwk", "auc"):
            raise InvalidSpecError(f"unknown metric {self.metric!r}")
        if self.metric == "auc" and self.scheme != "rdr2":
            raise InvalidSpecError("auc metric requires the rdr2 scheme")
        if self.measure == "qwk-risk" and self.confusion is None:
            raise InvalidSpecError("qwk-risk needs a validation confusion file")
        if self.measure == "table-risk" and self.loss_table is None:
            raise InvalidSpecError("table-risk needs a loss table file")
        if self.output is None:
            raise InvalidSpecError("output path is required")
        if not self.levels:
            raise InvalidSpecError("need at least one referral level")


def _load_inputs(config):
    if config.predictions is not None:
        preds = io.load_predictions(config.predictions)
    else:
        preds = aggregate(io.load_stack(config.stack))
    if config.scheme == "pirc5" and preds.n_classes != 5:
        raise WrongClassCountError(
            f"pirc5 scheme expects 5 classes, file has {preds.n_classes}"
        )
    if config.scheme == "rdr2":
        if preds.n_classes == 5:
            preds = binarize_rdr(preds)
        elif preds.n_classes != 2:
            raise WrongClassCountError(
                f"rdr2 scheme expects 2 or 5 classes, file has {preds.n_classes}"
            )
    return preds


def _measure_spec(config):
    kwargs = {}
    if config.measure == "qwk-risk":
        kwargs["validation_confusion"] = io.load_confusion(config.confusion)
        kwargs["smoothing"] = config.smoothing
    if config.measure == "table-risk":
        kwargs["loss_table"] = io.load_loss_table(config.loss_table)
    return UncertaintySpec(kind=config.measure, **kwargs)


def _display(mean, std):
    if mean is None:
        return None
    return f"{mean:.1f} ± {std:.1f}"


def build_report(config, preds, report):
    """Assemble the JSON report document from a BootstrapReport."""
    means = [stat.mean for stat in report.per_level]
    markers = [None] + markers_from_values(means) if len(means) > 1 else [None]
    config_echo = dataclasses.asdict(config)
    config_echo["levels"] = list(config.levels)
    levels = []
    for stat, marker in zip(report.per_level, markers):
        levels.append(
            {
                "level": stat.level,
                "retained_count": stat.retained_count,
                "mean": stat.mean,
                "std": stat.std,
                "n_valid": stat.n_valid,
                "n_skipped": stat.n_skipped,
                "display": _display(stat.mean, stat.std),
                "marker": marker,
            }
        )
    return {
        "format": REPORT_FORMAT,
        "config": config_echo,
        "measure": config.measure,
        "metric": config.metric,
        "n_examples": preds.n_examples,
        "n_classes": preds.n_classes,
        "seed": int(config.seed),
        "n_resamples": int(config.n_resamples),
        "levels": levels,
    }


def report_schema():
    text = (
        resources.files("selref").joinpath("schemas/report.schema.json").read_text()
    )
    return json.loads(text)


def validate_report(report_dict):
    jsonschema.validate(report_dict, report_schema())


def run(config):
    """Execute the pipeline and write the report; returns the report dict."""
    config.validate()
    preds = _load_inputs(config)
    spec = _measure_spec(config)
    u = spec.compute(preds)
    levels = tuple(float(lv) for lv in config.levels)
    report = bootstrap(
        preds,
        u,
        levels,
        config.metric,
        n_resamples=config.n_resamples,
        seed=config.seed,
    )
    doc = build_report(config, preds, report)
    validate_report(doc)
    io.write_report(doc, config.output)
    if config.plot_data:
        io.write_plot_data(doc, config.plot_data)
    return doc


def generate_synthetic(
    kind,
    n_examples,
    n_classes,
    outdir,
    seed,
    overlap=0.15,
    noise=0.45,
    fractions=(0.7, 0.1, 0.2),
    model_config=None,
):
    """Write train/validation/test feature files plus a validation
    confusion matrix from a quickly trained point-estimate model (the
    starting point for the kappa-based risk measure).

    Returns a dict of the written paths.
    """
    if kind == "blobs":
        X, y = make_blobs(n_examples, n_classes, overlap=overlap, seed=seed)
    elif kind == "ordinal":
        X, y = make_ordinal(n_examples, n_classes, noise=noise, seed=seed)
    else:
        raise InvalidSpecError(f"unknown dataset kind {kind!r}")
    # split indices drawn on a dedicated stream so adding options upstream
    # never perturbs the feature draw
    tr, va, te = split_indices(n_examples, fractions, rng_stream(seed, 1))
    width = len(str(n_examples - 1))
    ids = [f"ex{str(i).zfill(width)}" for i in range(n_examples)]

    os.makedirs(outdir, exist_ok=True)
    paths = {}
    for name, idx in (("train", tr), ("val", va), ("test", te)):
        path = os.path.join(outdir, f"{name}.csv")
        io.save_features(X[idx], y[idx], [ids[i] for i in idx], path)
        paths[name] = path

    if model_config is None:
        model_config = TrainConfig(method="map", seed=seed)
    model = train(model_config, X[tr], y[tr], n_classes=n_classes)
    val_preds = PredictionSet(
        probs=model.predict_proba(X[va]),
        labels=y[va],
        ids=tuple(ids[i] for i in va),
    )
    confusion_path = os.path.join(outdir, "confusion_val.csv")
    io.save_confusion(confusion_from(val_preds), confusion_path)
    paths["confusion"] = confusion_path
    return paths

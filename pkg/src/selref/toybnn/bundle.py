"""Versioned JSON serialization for fitted toy models.

Format ``selref-model/1``: a single JSON document with the method tag,
the constructor parameters, the fitted layer sizes, and every parameter
array as a nested list (floats round-trip exactly through JSON's repr
encoding).  Ensembles nest one record per member.
"""

import json

import numpy as np

from ..exceptions import ParseError
from .estimators import METHODS, DeepEnsembleClassifier

FORMAT = "selref-model/1"


def _record(est):
    if isinstance(est, DeepEnsembleClassifier):
        return {
            "method": "ensemble",
            "params": est.get_params(),
            "members": [_record(m) for m in est.members_],
        }
    method = next(k for k, cls in METHODS.items() if type(est) is cls)
    return {
        "method": method,
        "params": est.get_params(),
        "layer_sizes": list(est.layer_sizes_),
        "arrays": [a.tolist() for a in est.params_],
    }


def model_to_dict(est):
    rec = _record(est)
    rec["format"] = FORMAT
    return rec


def _restore(rec):
    cls = METHODS.get(rec.get("method"))
    if cls is None:
        raise ParseError(f"unknown model method {rec.get('method')!r}")
    est = cls(**rec["params"])
    if rec["method"] == "ensemble":
        est.members_ = [_restore(m) for m in rec["members"]]
        est.classes_ = est.members_[0].classes_
        est.n_features_in_ = est.members_[0].n_features_in_
        return est
    est.layer_sizes_ = tuple(rec["layer_sizes"])
    est.params_ = [np.asarray(a, dtype=np.float64) for a in rec["arrays"]]
    est.classes_ = np.arange(est.layer_sizes_[-1])
    est.n_features_in_ = est.layer_sizes_[0]
    est.loss_curve_ = []
    return est


def model_from_dict(rec):
    if rec.get("format") != FORMAT:
        raise ParseError(f"expected format {FORMAT!r}, got {rec.get('format')!r}")
    return _restore(rec)


def save_model(est, path):
    from ..io import atomic_write_text

    atomic_write_text(path, json.dumps(model_to_dict(est), indent=1) + "\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        try:
            rec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: not valid JSON ({exc})") from exc
    return model_from_dict(rec)

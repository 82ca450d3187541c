"""File formats: predictions, stacks, confusion matrices, features, reports.

All tabular formats are UTF-8 comma-separated text with Unix newlines:

* aggregated predictions: header ``id,label,p0,...,p{M-1}``, one row per
  example;
* sample stacks (long form): header ``id,sample,label,p0,...,p{M-1}``,
  one row per (example, draw) pair, every pair present exactly once;
* confusion matrices: M headerless rows of M integers, row = predicted;
* features: header ``id,label,x0,...,x{D-1}``;
* loss tables: M headerless rows of M floats.

Probabilities and features are written with 17 significant digits, so a
save/load round trip reproduces the exact float64 values.  Parse errors
carry 1-based line numbers.  All writes are atomic (temp file + rename).
"""

import csv
import json
import os
import tempfile

import numpy as np

from .exceptions import (
    DuplicateIdError,
    InconsistentLabelError,
    InvalidProbabilityRowError,
    MissingCellError,
    ParseError,
)
from .metrics import ConfusionMatrix
from .predictions import PredictionSet, SampleStack
from .validation import ROW_SUM_TOL


def atomic_write_text(path, text):
    """Write text to `path` via a temp file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x):
    return format(float(x), ".17g")


def _check_id(ex_id):
    # ids are opaque but must survive the unquoted CSV encoding
    if any(ch in ex_id for ch in ",\n\r\""):
        raise ParseError(f"id {ex_id!r} contains a CSV delimiter or quote")
    return ex_id


def _parse_float(token, line, what):
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"line {line}: bad {what} {token!r}", line=line) from None


def _parse_int(token, line, what):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"line {line}: bad {what} {token!r}", line=line) from None


def _read_rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


def _check_prob_tokens(values, line):
    total = sum(values)
    if any(v < 0.0 or v > 1.0 for v in values):
        raise InvalidProbabilityRowError(
            f"line {line}: probability outside [0, 1]", line=line
        )
    if abs(total - 1.0) > ROW_SUM_TOL:
        raise InvalidProbabilityRowError(
            f"line {line}: probabilities sum to {total:.9g}", line=line
        )


# -- aggregated predictions ---------------------------------------------------


def save_predictions(preds, path):
    lines = ["id,label," + ",".join(f"p{k}" for k in range(preds.n_classes))]
    for i in range(preds.n_examples):
        row = ",".join(_fmt(p) for p in preds.probs[i])
        lines.append(f"{_check_id(preds.ids[i])},{preds.labels[i]},{row}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_predictions(path):
    """Parse an aggregated prediction file into a PredictionSet."""
    rows = _read_rows(path)
    if not rows:
        raise ParseError("empty prediction file", line=1)
    header = rows[0]
    if len(header) < 4 or header[:2] != ["id", "label"]:
        raise ParseError("expected header id,label,p0,...", line=1)
    m = len(header) - 2
    ids, labels, probs = [], [], []
    seen = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != m + 2:
            raise ParseError(f"line {lineno}: expected {m + 2} fields, got {len(row)}", line=lineno)
        ex_id = row[0]
        if ex_id in seen:
            raise DuplicateIdError(f"line {lineno}: duplicate id {ex_id!r}", line=lineno)
        seen.add(ex_id)
        label = _parse_int(row[1], lineno, "label")
        values = [_parse_float(tok, lineno, "probability") for tok in row[2:]]
        _check_prob_tokens(values, lineno)
        if not 0 <= label < m:
            raise ParseError(f"line {lineno}: label {label} outside [0, {m})", line=lineno)
        ids.append(ex_id)
        labels.append(label)
        probs.append(values)
    if not ids:
        raise ParseError("prediction file has no data rows", line=1)
    return PredictionSet(probs=np.array(probs), labels=np.array(labels), ids=tuple(ids))


# -- sample stacks -------------------------------------------------------------


def save_stack(stack, path):
    lines = ["id,sample,label," + ",".join(f"p{k}" for k in range(stack.n_classes))]
    for i in range(stack.n_examples):
        ex_id = _check_id(stack.ids[i])
        for s in range(stack.n_samples):
            row = ",".join(_fmt(p) for p in stack.probs[s, i])
            lines.append(f"{ex_id},{s},{stack.labels[i]},{row}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_stack(path):
    """Parse a long-form stack file into a SampleStack.

    Every (example, sample) pair must appear exactly once with sample
    indices 0..S-1, and an example's label must agree across its rows.
    Example order follows first appearance in the file.
    """
    rows = _read_rows(path)
    if not rows:
        raise ParseError("empty stack file", line=1)
    header = rows[0]
    if len(header) < 5 or header[:3] != ["id", "sample", "label"]:
        raise ParseError("expected header id,sample,label,p0,...", line=1)
    m = len(header) - 3
    order = []
    cells = {}
    labels = {}
    max_sample = -1
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != m + 3:
            raise ParseError(f"line {lineno}: expected {m + 3} fields, got {len(row)}", line=lineno)
        ex_id = row[0]
        sample = _parse_int(row[1], lineno, "sample index")
        label = _parse_int(row[2], lineno, "label")
        values = [_parse_float(tok, lineno, "probability") for tok in row[3:]]
        _check_prob_tokens(values, lineno)
        if sample < 0:
            raise ParseError(f"line {lineno}: negative sample index", line=lineno)
        if ex_id not in labels:
            order.append(ex_id)
            labels[ex_id] = label
        elif labels[ex_id] != label:
            raise InconsistentLabelError(
                f"line {lineno}: id {ex_id!r} has labels {labels[ex_id]} and {label}",
                line=lineno,
            )
        if (ex_id, sample) in cells:
            raise ParseError(
                f"line {lineno}: duplicate cell (id {ex_id!r}, sample {sample})",
                line=lineno,
            )
        cells[ex_id, sample] = values
        max_sample = max(max_sample, sample)
    n_samples = max_sample + 1
    probs = np.empty((n_samples, len(order), m))
    for i, ex_id in enumerate(order):
        for s in range(n_samples):
            values = cells.get((ex_id, s))
            if values is None:
                raise MissingCellError(f"missing cell (id {ex_id!r}, sample {s})")
            probs[s, i] = values
    return SampleStack(
        probs=probs,
        labels=np.array([labels[ex_id] for ex_id in order], dtype=np.int64),
        ids=tuple(order),
    )


# -- confusion matrices ---------------------------------------------------------


def save_confusion(c, path):
    lines = [",".join(str(int(v)) for v in row) for row in c.counts]
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_confusion(path):
    rows = _read_rows(path)
    if not rows:
        raise ParseError("empty confusion file", line=1)
    m = len(rows)
    counts = np.empty((m, m), dtype=np.int64)
    for lineno, row in enumerate(rows, start=1):
        if len(row) != m:
            raise ParseError(
                f"line {lineno}: expected {m} columns in a {m}x{m} matrix, got {len(row)}",
                line=lineno,
            )
        for j, tok in enumerate(row):
            counts[lineno - 1, j] = _parse_int(tok, lineno, "count")
    return ConfusionMatrix(counts)


# -- feature files ---------------------------------------------------------------


def save_features(X, y, ids, path):
    X = np.asarray(X, dtype=np.float64)
    lines = ["id,label," + ",".join(f"x{k}" for k in range(X.shape[1]))]
    for i in range(X.shape[0]):
        row = ",".join(_fmt(v) for v in X[i])
        lines.append(f"{_check_id(ids[i])},{int(y[i])},{row}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_features(path):
    rows = _read_rows(path)
    if not rows:
        raise ParseError("empty feature file", line=1)
    header = rows[0]
    if len(header) < 3 or header[:2] != ["id", "label"]:
        raise ParseError("expected header id,label,x0,...", line=1)
    d = len(header) - 2
    ids, labels, feats = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != d + 2:
            raise ParseError(f"line {lineno}: expected {d + 2} fields, got {len(row)}", line=lineno)
        ids.append(row[0])
        labels.append(_parse_int(row[1], lineno, "label"))
        feats.append([_parse_float(tok, lineno, "feature") for tok in row[2:]])
    return np.array(feats), np.array(labels, dtype=np.int64), tuple(ids)


# -- loss tables -------------------------------------------------------------------


def load_loss_table(path):
    rows = _read_rows(path)
    if not rows:
        raise ParseError("empty loss table", line=1)
    m = len(rows)
    table = np.empty((m, m))
    for lineno, row in enumerate(rows, start=1):
        if len(row) != m:
            raise ParseError(f"line {lineno}: expected {m} columns, got {len(row)}", line=lineno)
        for j, tok in enumerate(row):
            table[lineno - 1, j] = _parse_float(tok, lineno, "loss")
    if not np.all(np.isfinite(table)):
        raise ParseError("loss table has non-finite entries")
    return table


# -- reports --------------------------------------------------------------------


def write_report(report_dict, path):
    atomic_write_text(path, json.dumps(report_dict, indent=1) + "\n")


def write_plot_data(report_dict, path):
    """Level/mean/std triples, enough to redraw a retained-performance curve."""
    lines = ["level,mean,std"]
    for entry in report_dict["levels"]:
        mean = "" if entry["mean"] is None else _fmt(entry["mean"])
        std = "" if entry["std"] is None else _fmt(entry["std"])
        lines.append(f"{_fmt(entry['level'])},{mean},{std}")
    atomic_write_text(path, "\n".join(lines) + "\n")

#!/usr/bin/env python3
"""Independent reference implementation of the analyze pipeline.

Recomputes the golden bootstrap reports under tests/data/ from the
committed input files using nothing from the selref package: parsing,
uncertainty measures, referral, resampling, metrics and aggregation are
all reimplemented here in deliberately plain python.  The only shared
component is the documented random generator (numpy's Philox keyed by
(seed, resample)), because the draws themselves are part of the
contract.

Metric values reduce to exact integer arithmetic before one final float
expression, and means/stds use math.fsum, so the numbers written here
must match the package bit for bit.  The script also asserts that the
per-example uncertainty values are well separated: the package computes
them with vectorized numpy, this script with scalar loops, and the
referral ORDER (the only thing the scores feed) must not depend on
last-ulp differences.

Usage: python scripts/make_goldens.py [output_dir]
"""

import csv
import json
import math
import os
import sys

import numpy as np

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.path.join(ROOT, "tests", "data")

BOOT = 100
LEVELS = (0.0, 0.3, 0.5)

CONFIGS = (
    {"name": "entropy_qwk", "preds": "preds_ordinal.csv", "measure": "entropy",
     "metric": "qwk", "seed": 42},
    {"name": "qwkrisk_qwk", "preds": "preds_ordinal.csv", "measure": "qwk-risk",
     "metric": "qwk", "seed": 42, "confusion": "confusion_val.csv"},
    {"name": "maxprob_auc", "preds": "preds_binary.csv", "measure": "max-prob",
     "metric": "auc", "seed": 42},
)


def read_predictions(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    m = len(header) - 2
    ids, labels, probs = [], [], []
    for row in rows[1:]:
        ids.append(row[0])
        labels.append(int(row[1]))
        values = [float(tok) for tok in row[2:]]
        assert abs(sum(values) - 1.0) <= 1e-12, "inputs must be pre-normalized"
        probs.append(values)
    return ids, labels, probs, m


def read_confusion(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return [[int(tok) for tok in row] for row in csv.reader(fh)]


def kappa_terms(counts):
    m = len(counts)
    rows = [sum(counts[i][j] for j in range(m)) for i in range(m)]
    cols = [sum(counts[i][j] for i in range(m)) for j in range(m)]
    num, den = 0, 0
    for i in range(m):
        for j in range(m):
            w = (i - j) ** 2
            num += w * counts[i][j]
            den += w * rows[i] * cols[j]
    return num, den, sum(rows)


def kappa_unit(counts):
    num, den, total = kappa_terms(counts)
    if den == 0:
        assert num == 0
        return 1.0
    return 1.0 - (num * total) / den


def qwk_100(counts):
    num, den, total = kappa_terms(counts)
    if den == 0:
        assert num == 0
        return 100.0
    return 100.0 * (1.0 - (num * total) / den)


def auc_100(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    if not pos or not neg:
        return None
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return 100.0 * (wins / (len(pos) * len(neg)))


def argmax_lowest(row):
    best = 0
    for j in range(1, len(row)):
        if row[j] > row[best]:
            best = j
    return best


def measure_values(measure, probs, confusion):
    if measure == "entropy":
        return [-sum(p * math.log(p) for p in row if p > 0) for row in probs]
    if measure == "max-prob":
        return [1.0 - max(row) for row in probs]
    if measure == "qwk-risk":
        m = len(probs[0])
        table = [[0.0] * m for _ in range(m)]
        for j in range(m):
            for i in range(m):
                perturbed = [list(r) for r in confusion]
                perturbed[j][i] += 1
                table[j][i] = kappa_unit(perturbed)
        values = []
        for row in probs:
            acc = 0.0
            for i in range(m):
                for j in range(m):
                    acc += row[i] * row[j] * table[j][i]
            values.append(-acc)
        return values
    raise ValueError(measure)


def assert_separated(values, name, gap=1e-9):
    ordered = sorted(values)
    for a, b in zip(ordered, ordered[1:]):
        if b != a:
            assert b - a > gap, (
                f"{name}: uncertainty gap {b - a:.3e} below {gap:.0e}; "
                "referral order would be implementation-sensitive"
            )


def referred(level, n):
    return int(math.floor(level * n + 1e-9))


def retained_positions(u, level):
    n = len(u)
    k = referred(level, n)
    order = sorted(range(n), key=lambda i: (u[i], i))
    return sorted(order[: n - k])


def metric_on(metric, probs, labels, m):
    if metric == "qwk":
        counts = [[0] * m for _ in range(m)]
        for row, label in zip(probs, labels):
            counts[argmax_lowest(row)][label] += 1
        return qwk_100(counts)
    return auc_100([row[1] for row in probs], labels)


def bootstrap_report(ids, labels, probs, u, metric, seed):
    n = len(ids)
    m = len(probs[0])
    canonical = sorted(range(n), key=lambda i: ids[i])
    labels = [labels[i] for i in canonical]
    probs = [probs[i] for i in canonical]
    u = [u[i] for i in canonical]
    per_level = {lv: [] for lv in LEVELS}
    skipped = {lv: 0 for lv in LEVELS}
    retained_counts = {}
    for b in range(BOOT):
        key = np.array([seed, b], dtype=np.uint64)
        idx = np.random.Generator(np.random.Philox(key=key)).integers(0, n, size=n)
        idx = [int(v) for v in idx]
        s_probs = [probs[i] for i in idx]
        s_labels = [labels[i] for i in idx]
        s_u = [u[i] for i in idx]
        for lv in LEVELS:
            keep = retained_positions(s_u, lv)
            retained_counts[lv] = len(keep)
            value = metric_on(
                metric, [s_probs[i] for i in keep], [s_labels[i] for i in keep], m
            )
            if value is None:
                skipped[lv] += 1
            else:
                per_level[lv].append(value)
    out = []
    for lv in LEVELS:
        values = per_level[lv]
        if values:
            mean = math.fsum(values) / len(values)
            std = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / len(values))
        else:
            mean, std = None, None
        out.append(
            {
                "level": lv,
                "retained_count": retained_counts[lv],
                "mean": mean,
                "std": std,
                "n_valid": len(values),
                "n_skipped": skipped[lv],
            }
        )
    return out


def attach_markers(levels):
    for prev, cur in zip(levels, levels[1:]):
        a, b = prev["mean"], cur["mean"]
        if a is None or b is None:
            cur["marker"] = None
        elif f"{b:.1f}" == f"{a:.1f}":
            cur["marker"] = "equal"
        elif b > a:
            cur["marker"] = "up"
        else:
            cur["marker"] = "down"
    levels[0]["marker"] = None
    return levels


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else DATA
    os.makedirs(outdir, exist_ok=True)
    for config in CONFIGS:
        ids, labels, probs, m = read_predictions(os.path.join(DATA, config["preds"]))
        confusion = (
            read_confusion(os.path.join(DATA, config["confusion"]))
            if "confusion" in config
            else None
        )
        u = measure_values(config["measure"], probs, confusion)
        assert_separated(u, config["name"])
        levels = attach_markers(
            bootstrap_report(ids, labels, probs, u, config["metric"], config["seed"])
        )
        golden = {
            "input": config["preds"],
            "measure": config["measure"],
            "metric": config["metric"],
            "seed": config["seed"],
            "n_resamples": BOOT,
            "levels": levels,
        }
        path = os.path.join(outdir, f"golden_{config['name']}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(golden, fh, indent=1)
            fh.write("\n")
        print(path)


if __name__ == "__main__":
    main()

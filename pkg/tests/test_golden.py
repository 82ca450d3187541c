"""Pipeline output vs the committed reference-script goldens.

The goldens under tests/data/ were produced by scripts/make_goldens.py,
an independent reimplementation of the whole pipeline.  These tests
assert exact (not approximate) agreement: the metric cores reduce to
integer arithmetic and the aggregation uses exactly rounded sums, so any
drift is a real behavioral change, not float noise.
"""

import json
import os
import subprocess
import sys

import pytest

from selref import RunConfig, run

DATA = os.path.join(os.path.dirname(__file__), "data")

CONFIGS = {
    "entropy_qwk": dict(
        predictions=os.path.join(DATA, "preds_ordinal.csv"),
        measure="entropy",
        metric="qwk",
    ),
    "qwkrisk_qwk": dict(
        predictions=os.path.join(DATA, "preds_ordinal.csv"),
        measure="qwk-risk",
        metric="qwk",
        confusion=os.path.join(DATA, "confusion_val.csv"),
    ),
    "maxprob_auc": dict(
        predictions=os.path.join(DATA, "preds_binary.csv"),
        measure="max-prob",
        metric="auc",
        scheme="rdr2",
    ),
}


def load_golden(name):
    with open(os.path.join(DATA, f"golden_{name}.json"), encoding="utf-8") as fh:
        return json.load(fh)


@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_pipeline_matches_reference_exactly(tmp_path, name):
    golden = load_golden(name)
    out = tmp_path / "report.json"
    doc = run(
        RunConfig(
            levels=(0.0, 0.3, 0.5),
            n_resamples=golden["n_resamples"],
            seed=golden["seed"],
            output=str(out),
            **CONFIGS[name],
        )
    )
    assert len(doc["levels"]) == len(golden["levels"])
    for got, want in zip(doc["levels"], golden["levels"]):
        assert got["level"] == want["level"]
        assert got["retained_count"] == want["retained_count"]
        assert got["mean"] == want["mean"], f"{name} level {want['level']}"
        assert got["std"] == want["std"], f"{name} level {want['level']}"
        assert got["n_valid"] == want["n_valid"]
        assert got["n_skipped"] == want["n_skipped"]
        assert got["marker"] == want["marker"]


def test_reports_byte_identical_across_runs(tmp_path):
    out = tmp_path / "report.json"
    config = RunConfig(
        levels=(0.0, 0.3, 0.5),
        n_resamples=100,
        seed=42,
        output=str(out),
        **CONFIGS["entropy_qwk"],
    )
    run(config)
    first = out.read_bytes()
    run(config)
    assert out.read_bytes() == first


def test_reference_script_regenerates_committed_goldens(tmp_path):
    script = os.path.join(os.path.dirname(DATA), "..", "scripts", "make_goldens.py")
    subprocess.run(
        [sys.executable, os.path.abspath(script), str(tmp_path)],
        check=True,
        capture_output=True,
    )
    for name in CONFIGS:
        fresh = json.loads((tmp_path / f"golden_{name}.json").read_text())
        assert fresh == load_golden(name)

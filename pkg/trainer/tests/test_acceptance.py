"""Acceptance gate for the trainer.

The literal desk-scale criteria need datasets emitted from the ingested
L=4 symbol archive; when those files are not staged the criteria skip
with a message and the same harness is exercised on a synthetic
classification task of identical shape.
"""

import os
from pathlib import Path

import pytest

from conftest import classification_rows, write_dataset
from fftrainer.config import TrainConfig
from fftrainer.train import train


def staged_dataset(name):
    root = Path(os.environ.get("FFSYMBOL_DATA_DIR", "data"))
    train_file = root / f"{name}.train.tsv"
    test_file = root / f"{name}.test.tsv"
    if not train_file.exists() or not test_file.exists():
        pytest.skip(
            f"dataset {name} not staged under {root} "
            "(emit it with the toolkit CLI from an ingested archive)"
        )
    return train_file, test_file


class TestDeskScaleClassification:
    def test_l4_zero_nonzero_95_percent(self, tmp_path):
        train_file, test_file = staged_dataset("zero-nonzero-l4")
        cfg = TrainConfig(layers=1, d_model=256, heads=8, epochs=10,
                          epoch_size=22_416, batch_size=64, seed=0)
        metrics = train(cfg, train_file, test_file, tmp_path / "run")
        assert max(m.test_accuracy for m in metrics) >= 0.95

    def test_standin_same_harness_95_percent(self, tmp_path):
        # identical task shape on a synthetic rule: binary label from the
        # word's first and last letters
        rows = classification_rows(1800, seed=9)
        train_file = tmp_path / "train.tsv"
        test_file = tmp_path / "test.tsv"
        write_dataset(train_file, rows[:1500])
        write_dataset(test_file, rows[1500:])
        cfg = TrainConfig(layers=1, d_model=256, heads=8, lr=5e-4, epochs=5,
                          epoch_size=1500, batch_size=64, seed=0)
        metrics = train(cfg, train_file, test_file, tmp_path / "run")
        assert max(m.test_accuracy for m in metrics) >= 0.95

    def test_accuracy_matches_primary_scorer(self, tmp_path):
        # per-element accuracy agrees with the evaluator over shared files
        evaluate = pytest.importorskip("ffsymbol.evaluate")
        ingest = pytest.importorskip("ffsymbol.ingest")
        rows = classification_rows(120, seed=2)
        train_file = tmp_path / "train.tsv"
        test_file = tmp_path / "test.tsv"
        write_dataset(train_file, rows[:100])
        write_dataset(test_file, rows[100:])
        cfg = TrainConfig(layers=1, d_model=256, heads=8, epochs=2,
                          epoch_size=200, batch_size=32, seed=0)
        metrics = train(cfg, train_file, test_file, tmp_path / "run")
        truth = {"".join(inp): int(tgt[1]) for inp, tgt in rows[100:]}
        preds = ingest.read_predictions(tmp_path / "run" / "epoch2.tsv")
        scored = evaluate.score_predictions(truth, preds, sorted(truth))
        assert scored.element_accuracy == pytest.approx(metrics[-1].test_accuracy)


class TestTwoPhaseSignature:
    def test_magnitudes_before_signs(self, tmp_path):
        train_file, test_file = staged_dataset("coeff-l4")
        evaluate = pytest.importorskip("ffsymbol.evaluate")
        ingest = pytest.importorskip("ffsymbol.ingest")
        cfg = TrainConfig(layers=2, d_model=512, heads=8, epochs=30,
                          epoch_size=22_416, batch_size=64, seed=0)
        train(cfg, train_file, test_file, tmp_path / "run")
        _, examples = __import__("fftrainer.data", fromlist=["read_dataset"]).read_dataset(test_file)
        truth = {}
        for ex in examples:
            sign = -1 if ex.target[0] == "-" else 1
            value = 0
            for chunk in ex.target[1:]:
                value = value * 1000 + int(chunk)
            truth[ex.example_id] = sign * value
        ids = sorted(truth)
        two_phase = False
        for epoch in range(1, cfg.epochs + 1):
            preds = ingest.read_predictions(tmp_path / "run" / f"epoch{epoch}.tsv")
            m = evaluate.score_predictions(truth, preds, ids)
            if m.magnitude_accuracy > 0.90 and m.sign_accuracy <= 0.55:
                two_phase = True
                break
        assert two_phase, "no epoch with magnitudes learned before signs"

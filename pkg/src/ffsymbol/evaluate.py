"""Scoring of predictions, magnitude histograms, relation-accuracy
curves over training epochs, and letter-embedding angle analysis."""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ffsymbol.ingest import INVALID, read_predictions
from ffsymbol.keys import is_trivial_zero
from ffsymbol.relations import RelationInstance, score_instances
from ffsymbol.symbol import Symbol

log = logging.getLogger(__name__)

# triangles of letter embeddings whose internal angles are compared to 60
ANGLE_TRIANGLES = ("abc", "def", "abf", "bcd", "ace")


@dataclass(frozen=True)
class PredictionMetrics:
    element_accuracy: float
    magnitude_accuracy: float
    sign_accuracy: float
    sign_balance: float
    interval: float
    n_test: int
    n_invalid: int


def _sign(value: int) -> str:
    return "-" if value < 0 else "+"


def confidence_interval(accuracy: float, n: int) -> float:
    """Half-width of the 95% interval, 2*sqrt((1-a)/N)."""
    if n <= 0:
        raise ValueError("empty test set")
    return 2.0 * math.sqrt((1.0 - accuracy) / n)


def score_predictions(
    truth, predictions: Mapping[str, object], ids: Sequence[str]
) -> PredictionMetrics:
    """Element, magnitude, and sign accuracy over the given test ids.

    Truth is a Symbol or mapping looked up by id.  Invalid predictions
    count as wrong everywhere and carry no sign for the balance figure.
    The sign of zero is '+'.
    """
    if not ids:
        raise ValueError("empty test set")
    element = magnitude = sign = 0
    plus = nonzero_signs = invalid = 0
    for example_id in ids:
        try:
            pred = predictions[example_id]
        except KeyError:
            raise ValueError(f"no prediction for test id {example_id!r}") from None
        true = truth[example_id]
        if pred is INVALID or not isinstance(pred, int):
            invalid += 1
            continue
        element += pred == true
        magnitude += abs(pred) == abs(true)
        sign += _sign(pred) == _sign(true)
        if pred != 0:
            nonzero_signs += 1
            plus += pred > 0
    n = len(ids)
    acc = element / n
    return PredictionMetrics(
        element_accuracy=acc,
        magnitude_accuracy=magnitude / n,
        sign_accuracy=sign / n,
        sign_balance=plus / nonzero_signs if nonzero_signs else 0.0,
        interval=confidence_interval(acc, n),
        n_test=n,
        n_invalid=invalid,
    )


def magnitude_histogram(
    symbol: Symbol, n_bins: int = 40
) -> tuple[np.ndarray, np.ndarray]:
    """Counts of nonzero coefficients binned over log10 magnitude.

    Returns (bin edges, counts); counts sum to the nonzero element
    count.
    """
    logs = np.array([math.log10(abs(c)) for _, c in symbol.items()])
    if logs.size == 0:
        raise ValueError("symbol has no nonzero elements")
    lo, hi = logs.min(), logs.max()
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    counts, edges = np.histogram(logs, bins=n_bins, range=(lo, hi))
    return edges, counts


def histogram_rows(edges: np.ndarray, counts: np.ndarray) -> list[tuple[float, float, int]]:
    """Plot-ready (bin lower, bin upper, count) rows."""
    return [
        (float(edges[i]), float(edges[i + 1]), int(counts[i]))
        for i in range(len(counts))
    ]


def embedding_angles(vectors: Mapping[str, Sequence[float]]) -> dict:
    """Pairwise angles between the six letter embeddings, in degrees.

    Returns the 15 pairwise angles plus, per reference triangle, the
    maximum deviation of its three internal angles from 60 degrees.
    """
    arrays = {}
    for letter in "abcdef":
        v = np.asarray(vectors[letter], dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError(f"zero-norm embedding for letter {letter!r}")
        arrays[letter] = v / norm
    pairs = {}
    letters = "abcdef"
    for i, x in enumerate(letters):
        for y in letters[i + 1 :]:
            cos = float(np.clip(np.dot(arrays[x], arrays[y]), -1.0, 1.0))
            pairs[x + y] = math.degrees(math.acos(cos))
    triangles = {}
    for tri in ANGLE_TRIANGLES:
        devs = []
        for i in range(3):
            x, y = sorted((tri[i], tri[(i + 1) % 3]))
            devs.append(abs(pairs[x + y] - 60.0))
        triangles[tri] = max(devs)
    return {"pairs": pairs, "triangles": triangles}


_EPOCH_RE = re.compile(r"(\d+)")


def epoch_prediction_files(directory) -> dict[int, Path]:
    """Epoch-indexed prediction files found in a directory.

    The epoch is the last integer in the file stem; other files are
    ignored.
    """
    found: dict[int, Path] = {}
    for path in sorted(Path(directory).iterdir()):
        if not path.is_file():
            continue
        numbers = _EPOCH_RE.findall(path.stem)
        if not numbers:
            continue
        epoch = int(numbers[-1])
        if epoch in found:
            raise ValueError(f"duplicate epoch {epoch}: {found[epoch]} and {path}")
        found[epoch] = path
    return found


def relation_curves(
    directory,
    instances: Sequence[RelationInstance],
    truth,
    zero_trivial: bool = False,
) -> list[tuple[int, float, float, float, float]]:
    """Per-epoch four-metric rows from a directory of prediction files.

    Gaps in the epoch sequence are skipped with a warning, never
    interpolated.  With zero_trivial, predictions for trivially zero
    member keys are forced to 0 before scoring.
    """
    files = epoch_prediction_files(directory)
    if not files:
        raise ValueError(f"no epoch-indexed prediction files in {directory}")
    epochs = sorted(files)
    expected = set(range(epochs[0], epochs[-1] + 1))
    missing = expected - set(epochs)
    if missing:
        log.warning("missing epochs skipped: %s", sorted(missing))
    rows = []
    for epoch in epochs:
        preds = read_predictions(files[epoch])

        def predict(key):
            if zero_trivial and is_trivial_zero(key):
                return 0
            value = preds.get(key, 0)
            return None if value is INVALID else value

        rows.append((epoch, *score_instances(instances, truth, predict)))
    return rows

"""Encoder-decoder transformer harness for symbol coefficient datasets.

Consumes the toolkit's canonical dataset files and emits prediction and
embedding files in the formats its evaluator scores.
"""

from fftrainer.config import TrainConfig, load_config, save_config
from fftrainer.data import Example, Vocabulary, read_dataset, write_predictions
from fftrainer.embed import export_embeddings
from fftrainer.model import Seq2Seq
from fftrainer.train import EpochMetrics, load_checkpoint, predict, save_checkpoint, train

__all__ = [
    "TrainConfig",
    "load_config",
    "save_config",
    "Example",
    "Vocabulary",
    "read_dataset",
    "write_predictions",
    "Seq2Seq",
    "EpochMetrics",
    "train",
    "predict",
    "save_checkpoint",
    "load_checkpoint",
    "export_embeddings",
]

"""Training loop: Adam at a flat learning rate, cross-entropy on target
tokens, fixed examples-per-epoch accounting, per-epoch prediction files."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn

from fftrainer.config import TrainConfig
from fftrainer.data import Example, Vocabulary, read_dataset, write_predictions
from fftrainer.model import Seq2Seq


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    loss: float
    test_accuracy: float
    sign_balance: float
    examples_seen: int


def _pad(rows: list[list[int]], device) -> torch.Tensor:
    width = max(len(r) for r in rows)
    out = torch.zeros(len(rows), width, dtype=torch.long, device=device)
    for i, row in enumerate(rows):
        out[i, : len(row)] = torch.tensor(row, device=device)
    return out


def _batch(examples: list[Example], vocab: Vocabulary, device):
    src = _pad([vocab.encode(ex.input) for ex in examples], device)
    tgt = _pad([[1] + vocab.encode(ex.target) + [2] for ex in examples], device)
    return src, tgt


class _EpochStream:
    """Yields examples cyclically, reshuffling on every pass."""

    def __init__(self, examples: list[Example], seed: int):
        self._examples = list(examples)
        self._rng = random.Random(seed)
        self._queue: list[Example] = []

    def take(self, n: int) -> list[Example]:
        out = []
        while len(out) < n:
            if not self._queue:
                self._queue = self._examples[:]
                self._rng.shuffle(self._queue)
            out.append(self._queue.pop())
        return out


def evaluate(
    model: Seq2Seq, vocab: Vocabulary, examples: list[Example], batch_size: int, device
) -> tuple[float, float, dict[str, str]]:
    """Greedy-decode accuracy, sign balance, and the prediction rows."""
    correct = plus = nonzero = 0
    rows: dict[str, str] = {}
    max_len = max(len(ex.target) for ex in examples) + 2
    for start in range(0, len(examples), batch_size):
        chunk = examples[start : start + batch_size]
        src = _pad([vocab.encode(ex.input) for ex in chunk], device)
        decoded = model.greedy_decode(src, max_len)
        for ex, indices in zip(chunk, decoded):
            tokens = vocab.decode(indices)
            rows[ex.example_id] = " ".join(tokens)
            correct += tuple(tokens) == ex.target
            signs = [t for t in tokens if t in "+-"]
            if signs and tokens != ["+", "0"]:
                nonzero += 1
                plus += signs[0] == "+"
    accuracy = correct / len(examples)
    balance = plus / nonzero if nonzero else 0.0
    return accuracy, balance, rows


def train(
    config: TrainConfig, train_path, test_path, out_dir
) -> list[EpochMetrics]:
    """Train on one dataset file, scoring and exporting every epoch.

    Writes epoch<N>.tsv prediction files in the canonical format plus a
    final checkpoint.pt holding config, vocabulary, and weights.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(config.seed)
    _, train_examples = read_dataset(train_path)
    _, test_examples = read_dataset(test_path)
    if not train_examples or not test_examples:
        raise ValueError("empty train or test split")
    vocab = Vocabulary.from_examples(train_examples + test_examples)
    device = "cpu"
    model = Seq2Seq(config, len(vocab)).to(device)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr)
    loss_fn = nn.CrossEntropyLoss(ignore_index=0)
    stream = _EpochStream(train_examples, config.seed)
    metrics = []
    for epoch in range(1, config.epochs + 1):
        model.train()
        seen = 0
        total_loss = 0.0
        batches = 0
        while seen < config.epoch_size:
            n = min(config.batch_size, config.epoch_size - seen)
            src, tgt = _batch(stream.take(n), vocab, device)
            logits = model(src, tgt[:, :-1])
            loss = loss_fn(logits.reshape(-1, logits.size(-1)), tgt[:, 1:].reshape(-1))
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            seen += n
            total_loss += float(loss)
            batches += 1
        accuracy, balance, rows = evaluate(
            model, vocab, test_examples, config.batch_size, device
        )
        write_predictions(rows, out_dir / f"epoch{epoch}.tsv")
        metrics.append(
            EpochMetrics(epoch, total_loss / batches, accuracy, balance, seen)
        )
    save_checkpoint(model, config, vocab, out_dir / "checkpoint.pt")
    return metrics


def save_checkpoint(model: Seq2Seq, config: TrainConfig, vocab: Vocabulary, path) -> None:
    torch.save(
        {
            "config": config.__dict__,
            "tokens": vocab.tokens,
            "state": model.state_dict(),
        },
        path,
    )


def load_checkpoint(path) -> tuple[Seq2Seq, TrainConfig, Vocabulary]:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    config = TrainConfig(**payload["config"])
    vocab = Vocabulary(payload["tokens"])
    # specials must land at the reserved slots for decode to be valid
    if vocab.tokens != payload["tokens"]:
        raise ValueError(f"{path}: checkpoint vocabulary is not in canonical order")
    model = Seq2Seq(config, len(vocab))
    model.load_state_dict(payload["state"])
    return model, config, vocab


def predict(checkpoint_path, dataset_path, out_path, batch_size: int = 64) -> float:
    """Greedy-decode a dataset with a saved model; returns accuracy."""
    model, _, vocab = load_checkpoint(checkpoint_path)
    _, examples = read_dataset(dataset_path)
    if not examples:
        raise ValueError(f"{dataset_path}: no examples")
    accuracy, _, rows = evaluate(model, vocab, examples, batch_size, "cpu")
    write_predictions(rows, out_path)
    return accuracy

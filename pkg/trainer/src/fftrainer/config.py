"""Training configuration: a flat key=value file mirrored by CLI flags."""

from __future__ import annotations

from dataclasses import dataclass, fields

LAYER_RANGE = range(1, 9)
MODEL_DIMS = (256, 512, 1024)
HEAD_COUNTS = (8, 16)

# one epoch is a fixed pass over this many examples, independent of
# dataset size; small datasets are cycled with reshuffling
EPOCH_EXAMPLES = 300_000


@dataclass(frozen=True)
class TrainConfig:
    layers: int = 1
    d_model: int = 256
    heads: int = 8
    lr: float = 1e-4
    epochs: int = 10
    epoch_size: int = EPOCH_EXAMPLES
    batch_size: int = 64
    seed: int = 0
    sign_position: str = "first"

    def __post_init__(self):
        if self.layers not in LAYER_RANGE:
            raise ValueError(f"layers must be in 1..8, got {self.layers}")
        if self.d_model not in MODEL_DIMS:
            raise ValueError(f"d_model must be one of {MODEL_DIMS}, got {self.d_model}")
        if self.heads not in HEAD_COUNTS:
            raise ValueError(f"heads must be one of {HEAD_COUNTS}, got {self.heads}")
        if self.lr <= 0 or self.epoch_size <= 0 or self.batch_size <= 0:
            raise ValueError("lr, epoch_size, and batch_size must be positive")
        if self.sign_position not in ("first", "last"):
            raise ValueError(f"bad sign_position {self.sign_position!r}")

    # the feed-forward width follows the conventional 4x model dimension
    @property
    def ff_width(self) -> int:
        return 4 * self.d_model


def load_config(path) -> TrainConfig:
    """Parse `key=value` lines; unknown keys are an error."""
    known = {f.name: f.type for f in fields(TrainConfig)}
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise ValueError(f"{path}:{lineno}: unknown config line {line!r}")
            if key == "sign_position":
                values[key] = value.strip()
            elif key == "lr":
                values[key] = float(value)
            else:
                values[key] = int(value)
    return TrainConfig(**values)


def save_config(config: TrainConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for f in fields(TrainConfig):
            fh.write(f"{f.name}={getattr(config, f.name)}\n")

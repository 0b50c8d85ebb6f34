"""Canonical dataset file parsing and vocabulary construction.

The trainer talks to the symbol toolkit only through its file formats:
dataset files (`#task=...` header then `<input>\\t<target>` token lines),
prediction files (`<id>\\t<tokens>`), and embedding text files.
"""

from __future__ import annotations

from dataclasses import dataclass

PAD, BOS, EOS = "<pad>", "<bos>", "<eos>"
SPECIALS = (PAD, BOS, EOS)


@dataclass(frozen=True)
class Example:
    input: tuple[str, ...]
    target: tuple[str, ...]

    @property
    def example_id(self) -> str:
        # inputs are unique after dataset dedup, so their concatenation
        # names the example; for key-indexed tasks this is the key itself
        return "".join(self.input)


def read_dataset(path) -> tuple[dict[str, str], list[Example]]:
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline().rstrip("\n")
        if not header_line.startswith("#"):
            raise ValueError(f"{path}: missing #task=... header")
        header = {}
        for field in header_line[1:].split():
            key, sep, value = field.partition("=")
            if not sep:
                raise ValueError(f"{path}: bad header field {field!r}")
            header[key] = value
        examples = []
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected <input>\\t<target>")
            examples.append(Example(tuple(parts[0].split()), tuple(parts[1].split())))
    return header, examples


class Vocabulary:
    """Token <-> index map with pad/bos/eos reserved at 0/1/2."""

    def __init__(self, tokens):
        ordered = list(SPECIALS) + sorted(set(tokens) - set(SPECIALS))
        self.index = {tok: i for i, tok in enumerate(ordered)}
        self.tokens = ordered

    def __len__(self) -> int:
        return len(self.tokens)

    def encode(self, tokens) -> list[int]:
        try:
            return [self.index[t] for t in tokens]
        except KeyError as exc:
            raise ValueError(f"token {exc.args[0]!r} absent from vocabulary") from None

    def decode(self, indices) -> list[str]:
        return [self.tokens[i] for i in indices]

    @classmethod
    def from_examples(cls, examples) -> "Vocabulary":
        tokens = set()
        for ex in examples:
            tokens.update(ex.input)
            tokens.update(ex.target)
        return cls(tokens)


def write_predictions(rows: dict[str, str], path) -> None:
    """`<id>\\t<decoded tokens>` lines, id-sorted for reproducibility."""
    with open(path, "w", encoding="utf-8") as fh:
        for example_id in sorted(rows):
            fh.write(f"{example_id}\t{rows[example_id]}\n")

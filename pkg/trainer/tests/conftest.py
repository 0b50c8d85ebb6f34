import random

import pytest


def write_dataset(path, rows, task="zero-nonzero", loop=4, seed=0, variant="plain"):
    """Rows are (input tokens, target tokens) pairs."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#task={task} loop={loop} seed={seed} variant={variant}\n")
        for inp, tgt in rows:
            fh.write(f"{' '.join(inp)}\t{' '.join(tgt)}\n")


def classification_rows(n, seed, length=8):
    """Learnable binary stand-in: does the word start in abc and end in def."""
    rng = random.Random(seed)
    rows, seen = [], set()
    while len(rows) < n:
        word = "".join(rng.choice("abcdef") for _ in range(length))
        if word in seen:
            continue
        seen.add(word)
        label = "1" if word[0] in "abc" and word[-1] in "def" else "0"
        rows.append((tuple(word), ("+", label)))
    return rows


@pytest.fixture
def toy_splits(tmp_path):
    train = tmp_path / "train.tsv"
    test = tmp_path / "test.tsv"
    rows = classification_rows(80, seed=1)
    write_dataset(train, rows[:64])
    write_dataset(test, rows[64:])
    return train, test

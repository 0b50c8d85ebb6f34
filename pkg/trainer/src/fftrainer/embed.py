"""Letter-embedding export for the angle analysis."""

from __future__ import annotations

import numpy as np

from fftrainer.train import load_checkpoint

LETTERS = "abcdef"


def export_embeddings(checkpoint_path, out_path, pca_path=None) -> None:
    """Write six labeled d-dimensional rows, one per alphabet letter.

    Optionally also writes the top-3 PCA projection of the six rows for
    external plotting.
    """
    model, _, vocab = load_checkpoint(checkpoint_path)
    weight = model.embed.weight.detach().numpy()
    rows = {}
    for letter in LETTERS:
        if letter not in vocab.index:
            raise ValueError(f"letter {letter!r} absent from checkpoint vocabulary")
        rows[letter] = weight[vocab.index[letter]]
    with open(out_path, "w", encoding="utf-8") as fh:
        for letter in LETTERS:
            values = " ".join(f"{v:.8g}" for v in rows[letter])
            fh.write(f"{letter} {values}\n")
    if pca_path is not None:
        matrix = np.stack([rows[letter] for letter in LETTERS])
        centered = matrix - matrix.mean(axis=0)
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        projected = centered @ vt[:3].T
        with open(pca_path, "w", encoding="utf-8") as fh:
            for letter, row in zip(LETTERS, projected):
                values = " ".join(f"{v:.8g}" for v in row)
                fh.write(f"{letter} {values}\n")

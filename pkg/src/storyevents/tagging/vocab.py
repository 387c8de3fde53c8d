"""Word/character vocabularies and text-format embedding tables."""
from __future__ import annotations

import numpy as np

from ..corpus.types import Corpus

PAD = "<pad>"
UNK = "<unk>"


class Vocabulary:
    """Token -> index with reserved padding (0) and unknown (1) rows."""

    def __init__(self, tokens: list[str]):
        self.itos = [PAD, UNK] + tokens
        self.stoi = {t: i for i, t in enumerate(self.itos)}

    def __len__(self) -> int:
        return len(self.itos)

    def index(self, token: str) -> int:
        return self.stoi.get(token, 1)

    @classmethod
    def from_corpus(cls, corpus: Corpus, split: str | None = "train", lowercase: bool = True) -> "Vocabulary":
        seen: dict[str, None] = {}
        for _, _, sentence in corpus.iter_sentences(split):
            for surface, _, _ in sentence.tokens:
                key = surface.lower() if lowercase else surface
                seen.setdefault(key, None)
        return cls(sorted(seen))

    @classmethod
    def chars_from_corpus(cls, corpus: Corpus, split: str | None = "train") -> "Vocabulary":
        seen: dict[str, None] = {}
        for _, _, sentence in corpus.iter_sentences(split):
            for surface, _, _ in sentence.tokens:
                for ch in surface.lower():
                    seen.setdefault(ch, None)
        return cls(sorted(seen))


def load_embedding_table(path: str) -> dict[str, np.ndarray]:
    """Read a whitespace-separated text embedding file (token then floats)."""
    table: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            parts = line.rstrip("\n").split()
            if len(parts) < 2:
                continue
            table[parts[0]] = np.asarray([float(x) for x in parts[1:]], dtype=np.float32)
    return table


def build_embedding_matrix(
    vocab: Vocabulary,
    dim: int,
    table: dict[str, np.ndarray] | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Random-normal rows, overwritten by pretrained vectors where available.

    The padding row is zero; the unknown row stays random and is trained.
    """
    rng = np.random.default_rng(seed)
    matrix = rng.normal(0.0, 0.1, size=(len(vocab), dim)).astype(np.float32)
    matrix[0] = 0.0
    if table:
        for token, row in table.items():
            idx = vocab.stoi.get(token)
            if idx is not None and row.shape[0] == dim:
                matrix[idx] = row
    return matrix

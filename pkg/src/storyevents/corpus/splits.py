"""Train/dev/test split assignment and manifest I/O."""
from __future__ import annotations

import os
from typing import Iterable, Sequence

from ..errors import SplitError
from .types import Corpus


def split_corpus(
    corpus: Corpus,
    train_ids: Iterable[str],
    dev_ids: Iterable[str],
    test_ids: Iterable[str],
) -> Corpus:
    """Return a corpus with the split map assigned.

    The three id lists must be disjoint and every id must exist in the corpus;
    stories not listed stay unassigned.
    """
    train, dev, test = set(train_ids), set(dev_ids), set(test_ids)
    overlap = (train & dev) | (train & test) | (dev & test)
    if overlap:
        raise SplitError(f"story ids assigned to multiple splits: {sorted(overlap)}")
    known = {s.id for s in corpus.stories}
    missing = (train | dev | test) - known
    if missing:
        raise SplitError(f"split references unknown story ids: {sorted(missing)}")

    split: dict[str, str] = {}
    for ids, name in ((train, "train"), (dev, "dev"), (test, "test")):
        for story_id in ids:
            split[story_id] = name
    return Corpus(stories=corpus.stories, split=split)


def read_manifest(path: str) -> list[str]:
    """One story id per line; blank lines ignored."""
    with open(path, encoding="utf-8") as handle:
        return [line.strip() for line in handle if line.strip()]


def write_manifest(path: str, ids: Sequence[str]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for story_id in ids:
            handle.write(story_id + "\n")


def load_split_manifests(corpus: Corpus, directory: str) -> Corpus:
    """Read train.txt/dev.txt/test.txt from ``directory`` and assign splits."""
    parts = {}
    for name in ("train", "dev", "test"):
        path = os.path.join(directory, f"{name}.txt")
        parts[name] = read_manifest(path) if os.path.exists(path) else []
    return split_corpus(corpus, parts["train"], parts["dev"], parts["test"])

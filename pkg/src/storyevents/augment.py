"""Model-assisted dataset expansion: label unlabeled stories with a trained
model, export them for human review as BRAT files, merge corrections back,
and re-benchmark against the fixed dev/test splits.

Provenance is tracked per story ("synthetic" or "human-reviewed") and is
monotone: a merge never flips a reviewed story back to synthetic. Dev and
test stories never enter a synthetic training pool; the benchmark aborts if
the id sets intersect.
"""
from __future__ import annotations

import json
import logging
import os
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .corpus.align import build_sentences
from .corpus.brat import parse_brat, write_brat
from .corpus.splits import split_corpus
from .corpus.types import Corpus, EventMention, Story, infer_source
from .corpus.validate import validate_story
from .errors import ConfigError, MergeError
from .evaluation import EvaluationResult, MatchCriterion, evaluate

log = logging.getLogger(__name__)

SYNTHETIC = "synthetic"
HUMAN_REVIEWED = "human-reviewed"

MANIFEST_NAME = "manifest.json"


@dataclass
class AugmentConfig:
    source_dir: Optional[str] = None  # directory of unlabeled .txt stories
    output_dir: Optional[str] = None
    score_threshold: float = 0.0  # emit every non-invalid span by default
    sample_sizes: tuple[int, ...] = (120, 500)
    seed: int = 42


@dataclass
class ReviewBatch:
    story_ids: list[str]
    provenance: dict[str, str]
    emitted_at: float = field(default_factory=time.time)

    def to_manifest(self, files: dict[str, list[str]]) -> list[dict]:
        return [
            {
                "story_id": story_id,
                "provenance": self.provenance[story_id],
                "files": files[story_id],
            }
            for story_id in self.story_ids
        ]


def read_unlabeled_dir(directory: str) -> list[tuple[str, str]]:
    """(story_id, text) for every .txt in the directory (no .ann needed)."""
    stories = []
    for name in sorted(os.listdir(directory)):
        if not name.endswith(".txt"):
            continue
        story_id = name[: -len(".txt")]
        with open(os.path.join(directory, name), encoding="utf-8") as handle:
            stories.append((story_id, handle.read()))
    return stories


def label_unlabeled(
    model,
    stories: Iterable[tuple[str, str]],
    score_threshold: float = 0.0,
) -> Corpus:
    """Run the model over plain-text stories, producing a synthetic corpus.

    ``model`` is anything with ``predict_story(story) -> {index: mentions}``
    (a trained tagger or prompt model). Per-story failures are logged and the
    batch continues.
    """
    labeled: list[Story] = []
    for story_id, text in stories:
        try:
            bare = Story(
                id=story_id,
                source=infer_source(story_id),
                text=text,
                sentences=build_sentences(text, []),
                provenance=SYNTHETIC,
            )
            predicted = model.predict_story(bare)
            mentions: list[EventMention] = []
            for per_sentence in predicted.values():
                for mention in per_sentence:
                    if mention.score is None or mention.score >= score_threshold:
                        mentions.append(mention)
            mentions.sort(key=lambda m: (m.span.start_char, m.span.end_char))
            labeled.append(
                Story(
                    id=story_id,
                    source=bare.source,
                    text=text,
                    sentences=build_sentences(text, mentions),
                    provenance=SYNTHETIC,
                )
            )
        except Exception:
            log.exception("labeling failed for story %s; skipping", story_id)
    return Corpus(stories=tuple(labeled))


def export_for_review(corpus: Corpus, out_dir: str) -> ReviewBatch:
    """One .txt/.ann pair per story plus a manifest, editable in standard
    annotation tools."""
    os.makedirs(out_dir, exist_ok=True)
    batch = ReviewBatch(
        story_ids=[s.id for s in corpus.stories],
        provenance={s.id: s.provenance for s in corpus.stories},
    )
    files: dict[str, list[str]] = {}
    for story in corpus.stories:
        text, ann = write_brat(story)
        txt_name, ann_name = f"{story.id}.txt", f"{story.id}.ann"
        with open(os.path.join(out_dir, txt_name), "w", encoding="utf-8") as handle:
            handle.write(text)
        with open(os.path.join(out_dir, ann_name), "w", encoding="utf-8") as handle:
            handle.write(ann)
        files[story.id] = [txt_name, ann_name]
    with open(os.path.join(out_dir, MANIFEST_NAME), "w", encoding="utf-8") as handle:
        json.dump(batch.to_manifest(files), handle, indent=2)
    return batch


def merge_reviewed(original: Corpus, reviewed_dir: str) -> Corpus:
    """Replace stories with their reviewed versions, flipping provenance to
    human-reviewed. Validation failures raise MergeError listing violations."""
    merged = original
    violations = []
    replacements: list[Story] = []
    for name in sorted(os.listdir(reviewed_dir)):
        if not name.endswith(".ann"):
            continue
        story_id = name[: -len(".ann")]
        txt_path = os.path.join(reviewed_dir, f"{story_id}.txt")
        ann_path = os.path.join(reviewed_dir, name)
        with open(txt_path, encoding="utf-8") as handle:
            text = handle.read()
        with open(ann_path, encoding="utf-8") as handle:
            ann = handle.read()
        story = parse_brat(text, ann, story_id=story_id).with_provenance(HUMAN_REVIEWED)
        found = validate_story(story)
        violations.extend(found)
        replacements.append(story)
    if violations:
        raise MergeError(
            f"{len(violations)} validation violations in reviewed annotations",
            violations,
        )
    known = {s.id for s in merged.stories}
    stories = list(merged.stories)
    for story in replacements:
        if story.id in known:
            stories = [story if s.id == story.id else s for s in stories]
        else:
            stories.append(story)
    return Corpus(stories=tuple(stories), split=dict(merged.split))


@dataclass
class ExpansionReport:
    rows: list[dict]  # label, sample size, dev/test EvaluationResult dicts

    def to_dict(self) -> dict:
        return {"rows": self.rows}

    def table(self) -> str:
        lines = [
            f"{'RUN':34s} {'DEV det-F1':>10s} {'DEV macro':>10s} {'TEST det-F1':>11s} {'TEST macro':>10s}"
        ]
        for row in self.rows:
            lines.append(
                f"{row['label']:34s} {row['dev']['detection']['f1']:10.3f} "
                f"{row['dev']['macro_f1']:10.3f} {row['test']['detection']['f1']:11.3f} "
                f"{row['test']['macro_f1']:10.3f}"
            )
        return "\n".join(lines)


def _evaluate_model(model, corpus: Corpus, split: str) -> EvaluationResult:
    predictions = {}
    for story in corpus.stories_in_split(split):
        for index, mentions in model.predict_story(story).items():
            predictions[(story.id, index)] = mentions
    return evaluate(corpus, predictions, MatchCriterion(), split=split)


def benchmark_expansion(
    synthetic: Corpus,
    base: Corpus,
    train_fn,
    sample_sizes: Sequence[int],
    seed: int = 42,
    baseline_model=None,
) -> ExpansionReport:
    """Train on seeded synthetic subsets, evaluate on the original dev/test.

    ``train_fn(corpus) -> model`` trains a fresh model on the given corpus
    (whose train split is the synthetic sample and whose dev split mirrors the
    base corpus). ``baseline_model``, when given, contributes a comparison row
    without retraining.
    """
    base_eval_ids = {
        s.id for s in base.stories if base.split.get(s.id) in ("dev", "test")
    }
    synthetic_ids = [s.id for s in synthetic.stories]
    leaked = base_eval_ids & set(synthetic_ids)
    if leaked:
        raise ConfigError(f"synthetic pool contains dev/test stories: {sorted(leaked)}")

    rows = []
    if baseline_model is not None:
        rows.append(
            {
                "label": "baseline (human-annotated train)",
                "sample_size": None,
                "dev": _evaluate_model(baseline_model, base, "dev").to_dict(),
                "test": _evaluate_model(baseline_model, base, "test").to_dict(),
            }
        )

    for size in sample_sizes:
        if size > len(synthetic_ids):
            raise ConfigError(
                f"sample size {size} exceeds the synthetic pool of {len(synthetic_ids)}"
            )
        rng = random.Random(seed + size)
        sample = rng.sample(synthetic_ids, size)
        log.info("expansion run: %d synthetic stories, seed %d", size, seed + size)
        stories = tuple(
            [synthetic.story(story_id) for story_id in sample]
            + [s for s in base.stories if base.split.get(s.id) in ("dev", "test")]
        )
        merged = Corpus(stories=stories)
        merged = split_corpus(
            merged,
            sample,
            [s.id for s in base.stories if base.split.get(s.id) == "dev"],
            [s.id for s in base.stories if base.split.get(s.id) == "test"],
        )
        model = train_fn(merged)
        rows.append(
            {
                "label": f"trained on {size} (synthetic)",
                "sample_size": size,
                "dev": _evaluate_model(model, merged, "dev").to_dict(),
                "test": _evaluate_model(model, merged, "test").to_dict(),
            }
        )
    return ExpansionReport(rows)

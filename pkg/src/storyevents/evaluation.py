"""Span-level scoring: P/R/F1 per class and overall, macro-F1, confusion matrix.

Matching is exact on character spans (both boundaries), the strictest and
fully deterministic criterion; a token-overlap relaxation is available behind
a flag but is never the default. Zero denominators yield 0 for every metric.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .corpus.types import Corpus, EventClass, EventMention
from .errors import DataError

EXACT_SPAN = "exact_span"
EXACT_SPAN_AND_CLASS = "exact_span_and_class"

CLASS_ORDER = list(EventClass)


@dataclass(frozen=True)
class MatchCriterion:
    mode: str = EXACT_SPAN_AND_CLASS
    overlap: bool = False  # relaxed: any character overlap counts as span identity

    def __post_init__(self):
        if self.mode not in (EXACT_SPAN, EXACT_SPAN_AND_CLASS):
            raise ValueError(f"unknown match mode: {self.mode!r}")


@dataclass
class ClassMetrics:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


def compute_prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """Precision, recall, F1 with zero-denominator guards."""
    m = ClassMetrics(tp, fp, fn)
    return m.precision, m.recall, m.f1


def _spans_match(gold: EventMention, pred: EventMention, overlap: bool) -> bool:
    if overlap:
        return gold.span.overlaps(pred.span)
    return (gold.span.start_char, gold.span.end_char) == (
        pred.span.start_char,
        pred.span.end_char,
    )


def match_spans(
    gold: Sequence[EventMention],
    pred: Sequence[EventMention],
    criterion: MatchCriterion = MatchCriterion(),
) -> tuple[list[tuple[EventMention, EventMention]], list[EventMention], list[EventMention]]:
    """Greedy one-to-one matching within one sentence or story.

    Returns (matches, misses, spurious). Under exact_span the pairing ignores
    the class; exact_span_and_class additionally requires class equality.
    """
    matches: list[tuple[EventMention, EventMention]] = []
    used = [False] * len(pred)
    misses: list[EventMention] = []
    for g in sorted(gold, key=lambda m: (m.span.start_char, m.span.end_char)):
        found = None
        for i, p in enumerate(pred):
            if used[i]:
                continue
            if not _spans_match(g, p, criterion.overlap):
                continue
            if criterion.mode == EXACT_SPAN_AND_CLASS and g.event_class is not p.event_class:
                continue
            found = i
            break
        if found is None:
            misses.append(g)
        else:
            used[found] = True
            matches.append((g, pred[found]))
    spurious = [p for i, p in enumerate(pred) if not used[i]]
    return matches, misses, spurious


@dataclass
class EvaluationResult:
    criterion: MatchCriterion
    per_class: dict[EventClass, ClassMetrics]
    overall: ClassMetrics  # micro counts under the criterion's own mode
    detection: ClassMetrics  # span-only matching, classes ignored
    confusion: list[list[int]]  # rows gold, columns predicted, CLASS_ORDER
    missed_per_class: dict[EventClass, int] = field(default_factory=dict)
    spurious_per_class: dict[EventClass, int] = field(default_factory=dict)

    @property
    def macro_f1(self) -> float:
        return sum(m.f1 for m in self.per_class.values()) / len(self.per_class)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion.mode,
            "overlap": self.criterion.overlap,
            "per_class": {
                cls.name: {
                    "tp": m.tp, "fp": m.fp, "fn": m.fn,
                    "p": m.precision, "r": m.recall, "f1": m.f1,
                }
                for cls, m in self.per_class.items()
            },
            "overall": {
                "tp": self.overall.tp, "fp": self.overall.fp, "fn": self.overall.fn,
                "p": self.overall.precision, "r": self.overall.recall,
                "f1": self.overall.f1,
            },
            "detection": {
                "tp": self.detection.tp, "fp": self.detection.fp, "fn": self.detection.fn,
                "p": self.detection.precision, "r": self.detection.recall,
                "f1": self.detection.f1,
            },
            "macro_f1": self.macro_f1,
            "confusion": self.confusion,
            "missed": {c.name: n for c, n in self.missed_per_class.items()},
            "spurious": {c.name: n for c, n in self.spurious_per_class.items()},
        }


#: Predictions: (story_id, sentence_index) -> mentions. Sentences without an
#: entry count as empty predictions.
Predictions = Mapping[tuple[str, int], Sequence[EventMention]]


def evaluate(
    corpus: Corpus,
    predictions: Predictions,
    criterion: MatchCriterion = MatchCriterion(),
    split: Optional[str] = None,
) -> EvaluationResult:
    """Score predictions against gold over ``split`` (or the whole corpus)."""
    keys = {(story.id, index) for story, index, _ in corpus.iter_sentences(split)}
    story_ids = {s.id for s in corpus.stories}
    for key in predictions:
        if key[0] not in story_ids:
            raise DataError(f"prediction references unknown story {key[0]!r}")
        if key not in keys and (split is None or corpus.split.get(key[0]) == split):
            raise DataError(f"prediction references unknown sentence {key!r}")

    per_class = {cls: ClassMetrics() for cls in CLASS_ORDER}
    overall = ClassMetrics()
    detection = ClassMetrics()
    confusion = [[0] * len(CLASS_ORDER) for _ in CLASS_ORDER]
    missed = {cls: 0 for cls in CLASS_ORDER}
    spurious = {cls: 0 for cls in CLASS_ORDER}
    index = {cls: i for i, cls in enumerate(CLASS_ORDER)}

    for story, sentence_index, sentence in corpus.iter_sentences(split):
        gold = list(sentence.mentions)
        pred = list(predictions.get((story.id, sentence_index), ()))

        # Per-class and overall counts under the requested criterion.
        matches, misses_list, spurious_list = match_spans(gold, pred, criterion)
        for g, p in matches:
            per_class[g.event_class].tp += 1
            overall.tp += 1
        for g in misses_list:
            per_class[g.event_class].fn += 1
            overall.fn += 1
            missed[g.event_class] += 1
        for p in spurious_list:
            per_class[p.event_class].fp += 1
            overall.fp += 1
            spurious[p.event_class] += 1

        # Detection counts and the confusion matrix come from span-only pairing.
        span_matches, span_misses, span_spurious = match_spans(
            gold, pred, MatchCriterion(EXACT_SPAN, criterion.overlap)
        )
        detection.tp += len(span_matches)
        detection.fn += len(span_misses)
        detection.fp += len(span_spurious)
        for g, p in span_matches:
            confusion[index[g.event_class]][index[p.event_class]] += 1

    return EvaluationResult(
        criterion=criterion,
        per_class=per_class,
        overall=overall,
        detection=detection,
        confusion=confusion,
        missed_per_class=missed,
        spurious_per_class=spurious,
    )


def report_json(result: EvaluationResult) -> str:
    return json.dumps(result.to_dict(), indent=2)


def report_table(result: EvaluationResult) -> str:
    """Aligned plain-text table, one row per class plus overall rows."""
    lines = [f"{'CLASS':24s} {'TP':>6s} {'FP':>6s} {'FN':>6s} {'P':>8s} {'R':>8s} {'F1':>8s}"]
    for cls in CLASS_ORDER:
        m = result.per_class[cls]
        lines.append(
            f"{cls.full_name:24s} {m.tp:6d} {m.fp:6d} {m.fn:6d} "
            f"{m.precision:8.3f} {m.recall:8.3f} {m.f1:8.3f}"
        )
    o, d = result.overall, result.detection
    lines.append(
        f"{'overall':24s} {o.tp:6d} {o.fp:6d} {o.fn:6d} "
        f"{o.precision:8.3f} {o.recall:8.3f} {o.f1:8.3f}"
    )
    lines.append(
        f"{'detection (span only)':24s} {d.tp:6d} {d.fp:6d} {d.fn:6d} "
        f"{d.precision:8.3f} {d.recall:8.3f} {d.f1:8.3f}"
    )
    lines.append(f"macro-F1: {result.macro_f1:.4f}")
    return "\n".join(lines)


def confusion_csv(result: EvaluationResult) -> str:
    """7x7 confusion matrix as CSV (rows gold, columns predicted)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["gold\\pred"] + [cls.name for cls in CLASS_ORDER])
    for cls, row in zip(CLASS_ORDER, result.confusion):
        writer.writerow([cls.name] + row)
    return buffer.getvalue()


def export_report(result: EvaluationResult, directory: str, prefix: str = "eval") -> dict[str, str]:
    """Write JSON, text, and confusion CSV; returns the file paths."""
    import os

    os.makedirs(directory, exist_ok=True)
    paths = {
        "json": os.path.join(directory, f"{prefix}.json"),
        "txt": os.path.join(directory, f"{prefix}.txt"),
        "csv": os.path.join(directory, f"{prefix}_confusion.csv"),
    }
    with open(paths["json"], "w", encoding="utf-8") as f:
        f.write(report_json(result))
    with open(paths["txt"], "w", encoding="utf-8") as f:
        f.write(report_table(result) + "\n")
    with open(paths["csv"], "w", encoding="utf-8") as f:
        f.write(confusion_csv(result))
    return paths

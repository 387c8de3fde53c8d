"""Corpus summary statistics and the trigger/event-rate table.

Token identity is case-insensitive here (so "Said" and "said" pool), which is
what makes the event rate of a trigger word meaningful at sentence starts.
"""
from __future__ import annotations

from collections import Counter

from ..errors import EmptyCorpusError
from .types import Corpus, DatasetStats, EventClass, TriggerStat


def _multiword_occurrences(corpus: Corpus, surface_tokens: tuple[str, ...]) -> int:
    """Occurrences of a lowercased token sequence across all sentences."""
    n = len(surface_tokens)
    count = 0
    for _, _, sentence in corpus.iter_sentences():
        lowered = [t[0].lower() for t in sentence.tokens]
        count += sum(
            1 for i in range(len(lowered) - n + 1) if tuple(lowered[i : i + n]) == surface_tokens
        )
    return count


def compute_stats(corpus: Corpus, top_k: int = 15) -> DatasetStats:
    """All corpus-level counts plus the top-k trigger table."""
    if not corpus.stories:
        raise EmptyCorpusError("cannot compute statistics of an empty corpus")

    token_counts: Counter[str] = Counter()
    trigger_counts: Counter[str] = Counter()
    total_sentences = 0
    total_events = 0
    per_class = {cls: 0 for cls in EventClass}
    per_split_class = {
        split: {cls: 0 for cls in EventClass} for split in ("train", "dev", "test")
    }
    per_source: Counter[str] = Counter()

    for story in corpus.stories:
        split = corpus.split.get(story.id)
        total_sentences += len(story.sentences)
        for sentence in story.sentences:
            for surface, _, _ in sentence.tokens:
                token_counts[surface.lower()] += 1
            for mention in sentence.mentions:
                total_events += 1
                per_class[mention.event_class] += 1
                per_source[story.source] += 1
                trigger_counts[mention.span.surface.lower()] += 1
                if split in per_split_class:
                    per_split_class[split][mention.event_class] += 1

    total_tokens = sum(token_counts.values())
    n_stories = len(corpus.stories)

    top = []
    for surface, count in trigger_counts.most_common(top_k):
        parts = tuple(surface.split())
        if len(parts) == 1:
            occurrences = token_counts.get(surface, 0)
        else:
            occurrences = _multiword_occurrences(corpus, parts)
        top.append(TriggerStat(surface, count, max(occurrences, count)))

    return DatasetStats(
        total_tokens=total_tokens,
        unique_tokens=len(token_counts),
        total_sentences=total_sentences,
        avg_tokens_per_story=total_tokens / n_stories,
        avg_sentences_per_story=total_sentences / n_stories,
        avg_tokens_per_sentence=total_tokens / total_sentences if total_sentences else 0.0,
        total_events=total_events,
        avg_events_per_story=total_events / n_stories,
        per_class_counts=per_class,
        per_split_class_counts=per_split_class,
        per_source_counts=dict(per_source),
        top_triggers=top,
    )

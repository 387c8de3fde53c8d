"""BIO label sequences for the sequence-labeling baselines.

``detect`` mode uses {B-EVT, I-EVT, O}; ``classify`` mode uses {B-<code>,
I-<code>, O} over the seven class codes. Encoding then decoding recovers the
aligned token spans exactly for non-overlapping mentions. Decoding repairs
illegal I-x tags (after O or after a different class) by treating them as B-x.
"""
from __future__ import annotations

from typing import Optional

from ..errors import AlignmentError, OverlapError
from .types import AnnotatedSentence, EventClass, EventMention, TriggerSpan

DETECT = "detect"
CLASSIFY = "classify"

OUTSIDE = "O"


def label_set(mode: str) -> list[str]:
    """All labels for a mode, O first (index 0 is the safe default)."""
    if mode == DETECT:
        return [OUTSIDE, "B-EVT", "I-EVT"]
    if mode == CLASSIFY:
        labels = [OUTSIDE]
        for cls in EventClass:
            labels.extend([f"B-{cls.name}", f"I-{cls.name}"])
        return labels
    raise ValueError(f"unknown label mode: {mode!r}")


def to_label_sequence(
    sentence: AnnotatedSentence, mode: str, single_token: bool = False
) -> list[str]:
    """Encode a sentence's aligned mentions as one label per token.

    ``single_token=True`` labels only each mention's first token (the earlier
    single-word setting); the default BIO2 encoding covers whole spans.
    """
    labels = [OUTSIDE] * len(sentence.tokens)
    occupied = [False] * len(sentence.tokens)
    for mention in sentence.mentions:
        if not mention.aligned:
            raise AlignmentError(f"mention {mention.span.surface!r} is not aligned")
        first, last = mention.token_start, mention.token_end
        if single_token:
            last = first
        if any(occupied[first : last + 1]):
            raise OverlapError(
                f"mention {mention.span.surface!r} overlaps a previously labeled span"
            )
        tag = "EVT" if mode == DETECT else mention.event_class.name
        labels[first] = f"B-{tag}"
        for i in range(first + 1, last + 1):
            labels[i] = f"I-{tag}"
        for i in range(first, last + 1):
            occupied[i] = True
    return labels


def decode_labels(labels: list[str]) -> list[tuple[int, int, Optional[EventClass]]]:
    """Decode BIO labels to inclusive token spans (class is None for EVT)."""
    spans: list[tuple[int, int, Optional[EventClass]]] = []
    current: Optional[tuple[int, str]] = None  # (start index, tag)

    def flush(end_index: int) -> None:
        nonlocal current
        if current is not None:
            start, tag = current
            cls = None if tag == "EVT" else EventClass[tag]
            spans.append((start, end_index, cls))
            current = None

    for i, label in enumerate(labels):
        if label == OUTSIDE:
            flush(i - 1)
            continue
        prefix, tag = label.split("-", 1)
        if prefix == "B" or current is None or current[1] != tag:
            # I-x after O or after a different tag: repaired to B-x.
            flush(i - 1)
            current = (i, tag)
    flush(len(labels) - 1)
    return spans


def spans_to_mentions(
    sentence: AnnotatedSentence,
    spans: list[tuple[int, int, Optional[EventClass]]],
    default_class: EventClass = EventClass.OTH,
    score: Optional[float] = None,
) -> list[EventMention]:
    """Turn decoded token spans back into character-offset mentions."""
    mentions = []
    for first, last, cls in spans:
        start, end = sentence.token_char_span(first, last)
        surface = sentence.token_span_text(first, last)
        mentions.append(
            EventMention(
                TriggerSpan(start, end, surface),
                cls if cls is not None else default_class,
                token_start=first,
                token_end=last,
                score=score,
            )
        )
    return mentions

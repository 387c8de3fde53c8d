"""Structural validation of annotated stories.

Violations are data, not exceptions: the validator never raises and never
mutates. Only machine-checkable constraints are covered; judgment calls made
by human annotators (which events count as real) are out of reach here.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..errors import AlignmentError
from .align import align_spans
from .types import Corpus, EventMention, Story


@dataclass(frozen=True)
class Violation:
    kind: str  # offset | surface | duplicate | overlap | sentence_boundary | alignment | order
    story_id: str
    message: str
    mention: Optional[EventMention] = None

    def __str__(self) -> str:
        return f"[{self.kind}] {self.story_id}: {self.message}"


def validate_story(story: Story) -> list[Violation]:
    """Check one story; an empty list means structurally clean."""
    violations: list[Violation] = []
    text = story.text

    def add(kind: str, message: str, mention: Optional[EventMention] = None) -> None:
        violations.append(Violation(kind, story.id, message, mention))

    mentions = story.mentions
    for mention in mentions:
        span = mention.span
        if not (0 <= span.start_char < span.end_char <= len(text)):
            add("offset", f"span ({span.start_char}, {span.end_char}) out of bounds", mention)
            continue
        actual = text[span.start_char : span.end_char]
        if actual != span.surface:
            add(
                "surface",
                f"surface {span.surface!r} != text {actual!r} at ({span.start_char}, {span.end_char})",
                mention,
            )

    starts = [m.span.start_char for m in mentions]
    if starts != sorted(starts):
        add("order", "mentions are not sorted by start offset")

    seen: set[tuple[int, int, str]] = set()
    for mention in mentions:
        key = (mention.span.start_char, mention.span.end_char, mention.event_class.name)
        if key in seen:
            add("duplicate", f"duplicate mention {mention.span.surface!r} at {key[:2]}", mention)
        seen.add(key)

    for a, b in zip(mentions, mentions[1:]):
        if a.span.overlaps(b.span) and (a.span, a.event_class) != (b.span, b.event_class):
            add(
                "overlap",
                f"{a.span.surface!r} ({a.span.start_char},{a.span.end_char}) overlaps "
                f"{b.span.surface!r} ({b.span.start_char},{b.span.end_char})",
                b,
            )

    for sentence in story.sentences:
        for mention in sentence.mentions:
            if mention.span.end_char > sentence.end_offset:
                add(
                    "sentence_boundary",
                    f"mention {mention.span.surface!r} crosses the sentence ending at "
                    f"{sentence.end_offset}",
                    mention,
                )
        try:
            align_spans(sentence)
        except AlignmentError as exc:
            add("alignment", str(exc))

    return violations


def validate_corpus(corpus: Corpus) -> list[Violation]:
    out: list[Violation] = []
    for story in corpus.stories:
        out.extend(validate_story(story))
    return out

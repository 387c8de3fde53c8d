"""Core data model: event classes, trigger spans, stories, and corpora.

All character offsets are 0-based with exclusive ends, and always index the
*story* text (sentences carry their own offset into it). Objects are frozen
after construction and safe to share across threads.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, Optional, Sequence

from ..errors import DataError, OffsetError, SurfaceMismatchError, UnknownClassError


class EventClass(enum.Enum):
    """The seven event classes, keyed by their short codes."""

    CMS = "COGNITIVE-MENTAL-STATE"
    COM = "COMMUNICATION"
    CON = "CONFLICT"
    GA = "GENERAL-ACTIVITY"
    LE = "LIFE-EVENT"
    MOV = "MOVEMENT"
    OTH = "OTHERS"

    @property
    def full_name(self) -> str:
        return self.value

    @classmethod
    def parse(cls, label: str) -> "EventClass":
        """Accept either the short code ("COM") or the full name ("COMMUNICATION")."""
        key = label.strip().upper()
        if key in cls.__members__:
            return cls[key]
        for member in cls:
            if member.value == key:
                return member
        raise UnknownClassError(f"unknown event class: {label!r}")

    def __str__(self) -> str:
        return self.name


#: Story sources, inferred from file names; UNKNOWN when no prefix matches.
SOURCES = ("PT", "CP", "TR", "AB", "BP", "HP", "JT", "SB", "UNKNOWN")

SPLITS = ("train", "dev", "test")


def infer_source(name: str) -> str:
    """Guess the story source from a directory or file-name prefix."""
    head = name.replace("-", "_").split("_")[0].upper()
    return head if head in SOURCES[:-1] else "UNKNOWN"


@dataclass(frozen=True, order=True)
class TriggerSpan:
    """A trigger's character span: [start_char, end_char) plus the exact surface."""

    start_char: int
    end_char: int
    surface: str

    def validate_against(self, text: str) -> None:
        if not (0 <= self.start_char < self.end_char <= len(text)):
            raise OffsetError(
                f"span ({self.start_char}, {self.end_char}) out of bounds for text of length {len(text)}"
            )
        actual = text[self.start_char : self.end_char]
        if actual != self.surface:
            raise SurfaceMismatchError(
                f"surface {self.surface!r} != text slice {actual!r} at ({self.start_char}, {self.end_char})"
            )

    def overlaps(self, other: "TriggerSpan") -> bool:
        return self.start_char < other.end_char and other.start_char < self.end_char


@dataclass(frozen=True)
class EventMention:
    """A trigger span labeled with one event class.

    ``token_start``/``token_end`` are sentence-local token indices (inclusive)
    filled in by alignment; ``score`` is attached to model predictions.
    Equality and hashing consider only the span and the class, so a scored
    prediction can be compared directly against gold.
    """

    span: TriggerSpan
    event_class: EventClass
    token_start: Optional[int] = None
    token_end: Optional[int] = None
    score: Optional[float] = None

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventMention):
            return NotImplemented
        return self.span == other.span and self.event_class is other.event_class

    def __hash__(self) -> int:
        return hash((self.span, self.event_class))

    @property
    def aligned(self) -> bool:
        return self.token_start is not None and self.token_end is not None

    def with_alignment(self, token_start: int, token_end: int) -> "EventMention":
        return replace(self, token_start=token_start, token_end=token_end)


#: One token: (surface, start_char, end_char).
Token = tuple[str, int, int]


@dataclass(frozen=True)
class AnnotatedSentence:
    """One sentence with its tokens and the mentions that start inside it.

    ``char_offset`` locates ``text`` within the story; tokens and mentions use
    story-level character offsets throughout.
    """

    text: str
    char_offset: int
    tokens: tuple[Token, ...]
    mentions: tuple[EventMention, ...] = ()

    @property
    def end_offset(self) -> int:
        return self.char_offset + len(self.text)

    def token_char_span(self, token_start: int, token_end: int) -> tuple[int, int]:
        """Story-level character span covered by an inclusive token range."""
        return (self.tokens[token_start][1], self.tokens[token_end][2])

    def token_span_text(self, token_start: int, token_end: int) -> str:
        """The raw text covered by an inclusive token range."""
        start, end = self.token_char_span(token_start, token_end)
        return self.text[start - self.char_offset : end - self.char_offset]


@dataclass(frozen=True)
class Story:
    """A story: raw text plus sentence segmentation and gold mentions."""

    id: str
    source: str
    text: str
    sentences: tuple[AnnotatedSentence, ...]
    provenance: str = "human"

    @property
    def mentions(self) -> list[EventMention]:
        out: list[EventMention] = []
        for sentence in self.sentences:
            out.extend(sentence.mentions)
        return out

    def with_provenance(self, provenance: str) -> "Story":
        return replace(self, provenance=provenance)


@dataclass(frozen=True)
class Corpus:
    """An immutable collection of stories plus an optional split assignment."""

    stories: tuple[Story, ...]
    split: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        ids = [s.id for s in self.stories]
        if len(set(ids)) != len(ids):
            raise DataError("duplicate story ids in corpus")
        unknown = set(self.split) - set(ids)
        if unknown:
            raise DataError(f"split references unknown story ids: {sorted(unknown)}")

    def story(self, story_id: str) -> Story:
        for s in self.stories:
            if s.id == story_id:
                return s
        raise DataError(f"no story with id {story_id!r}")

    def stories_in_split(self, split: str) -> list[Story]:
        return [s for s in self.stories if self.split.get(s.id) == split]

    def iter_sentences(self, split: Optional[str] = None) -> Iterator[tuple[Story, int, AnnotatedSentence]]:
        for s in self.stories:
            if split is not None and self.split.get(s.id) != split:
                continue
            for i, sentence in enumerate(s.sentences):
                yield s, i, sentence

    def mention_count(self, split: Optional[str] = None) -> int:
        return sum(len(sent.mentions) for _, _, sent in self.iter_sentences(split))

    def replace_story(self, story: Story) -> "Corpus":
        stories = tuple(story if s.id == story.id else s for s in self.stories)
        return Corpus(stories=stories, split=dict(self.split))


@dataclass(frozen=True)
class TriggerStat:
    """How often a surface form is annotated, against how often it occurs at all."""

    surface: str
    trigger_count: int
    total_occurrences: int

    @property
    def event_rate(self) -> float:
        if self.total_occurrences == 0:
            return 0.0
        return self.trigger_count / self.total_occurrences


@dataclass(frozen=True)
class DatasetStats:
    """Corpus-level summary counts."""

    total_tokens: int
    unique_tokens: int
    total_sentences: int
    avg_tokens_per_story: float
    avg_sentences_per_story: float
    avg_tokens_per_sentence: float
    total_events: int
    avg_events_per_story: float
    per_class_counts: Mapping[EventClass, int]
    per_split_class_counts: Mapping[str, Mapping[EventClass, int]]
    per_source_counts: Mapping[str, int]
    top_triggers: Sequence[TriggerStat]

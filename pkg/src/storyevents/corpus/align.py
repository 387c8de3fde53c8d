"""Sentence assembly and mention-to-token alignment."""
from __future__ import annotations

import bisect

from ..errors import AlignmentError
from .tokenization import split_sentences, tokenize
from .types import AnnotatedSentence, EventMention


def build_sentences(
    text: str, mentions: list[EventMention]
) -> tuple[AnnotatedSentence, ...]:
    """Segment and tokenize ``text``, attaching each mention to the sentence
    that contains its start character.

    Mentions must be sorted by start offset. A mention whose start falls into
    inter-sentence whitespace (impossible for surfaces that verify against the
    text) would be dropped; the validator flags mentions that cross a sentence
    boundary.
    """
    pieces = split_sentences(text)
    starts = [offset for _, offset in pieces]
    buckets: list[list[EventMention]] = [[] for _ in pieces]
    for mention in mentions:
        idx = bisect.bisect_right(starts, mention.span.start_char) - 1
        if idx < 0:
            idx = 0
        if pieces:
            buckets[idx].append(mention)

    sentences = []
    for (sentence_text, offset), bucket in zip(pieces, buckets):
        tokens = tuple(
            (surface, start + offset, end + offset)
            for surface, start, end in tokenize(sentence_text)
        )
        sentences.append(
            AnnotatedSentence(
                text=sentence_text,
                char_offset=offset,
                tokens=tokens,
                mentions=tuple(bucket),
            )
        )
    return tuple(sentences)


def align_spans(sentence: AnnotatedSentence) -> AnnotatedSentence:
    """Attach (first_token_index, last_token_index) to every mention.

    Raises AlignmentError when a mention boundary splits a token, naming the
    offending mention.
    """
    aligned = tuple(_align_one(sentence, m) for m in sentence.mentions)
    return AnnotatedSentence(
        text=sentence.text,
        char_offset=sentence.char_offset,
        tokens=sentence.tokens,
        mentions=aligned,
    )


def _align_one(sentence: AnnotatedSentence, mention: EventMention) -> EventMention:
    span = mention.span
    first = last = None
    for i, (_, start, end) in enumerate(sentence.tokens):
        if start == span.start_char:
            first = i
        if end == span.end_char:
            last = i
            break
    if first is None or last is None or last < first:
        raise AlignmentError(
            f"mention {span.surface!r} at ({span.start_char}, {span.end_char}) "
            f"does not align with token boundaries"
        )
    return mention.with_alignment(first, last)


def align_story_sentences(
    sentences: tuple[AnnotatedSentence, ...]
) -> tuple[AnnotatedSentence, ...]:
    return tuple(align_spans(s) for s in sentences)

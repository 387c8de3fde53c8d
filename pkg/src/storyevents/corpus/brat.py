"""BRAT standoff reader/writer for trigger annotations.

Only text-bound T-records of the form ``T<n>\\t<CLASS> <start> <end>\\t<surface>``
are consumed; any other record type (E, A, R, #, ...) is skipped with a
warning. Writing numbers records ``T1..`` in span order, so a parse/write
round trip is the identity modulo T-id renumbering.
"""
from __future__ import annotations

import logging
import re
from typing import Optional

from ..errors import BratFormatError, DataError, OffsetError, SurfaceMismatchError
from .align import build_sentences
from .types import EventClass, EventMention, Story, TriggerSpan, infer_source

log = logging.getLogger(__name__)

_TRIGGER_LINE_RE = re.compile(r"^(T\d+)\t(\S+) (\d+) (\d+)\t(.*)$")


def parse_ann(ann_content: str, text: str) -> list[EventMention]:
    """Parse .ann content into mentions, verifying spans against ``text``."""
    mentions: list[EventMention] = []
    for line_number, line in enumerate(ann_content.splitlines(), start=1):
        if not line.strip():
            continue
        if not line.startswith("T"):
            log.warning("line %d: skipping non-trigger record %r", line_number, line[:40])
            continue
        match = _TRIGGER_LINE_RE.match(line)
        if match is None:
            raise BratFormatError(f"line {line_number}: malformed trigger record: {line!r}")
        _, class_str, start_str, end_str, surface = match.groups()
        span = TriggerSpan(int(start_str), int(end_str), surface)
        try:
            span.validate_against(text)
        except OffsetError as exc:
            raise OffsetError(f"line {line_number}: {exc}") from None
        except SurfaceMismatchError as exc:
            raise SurfaceMismatchError(f"line {line_number}: {exc}", line_number) from None
        mentions.append(EventMention(span, EventClass.parse(class_str)))

    mentions.sort(key=lambda m: (m.span.start_char, m.span.end_char))
    seen = set()
    for mention in mentions:
        key = (mention.span.start_char, mention.span.end_char, mention.event_class)
        if key in seen:
            raise DataError(
                f"duplicate mention {mention.span.surface!r} at "
                f"({mention.span.start_char}, {mention.span.end_char})"
            )
        seen.add(key)
    return mentions


def parse_brat(
    text_content: str,
    ann_content: str,
    story_id: str = "",
    source: Optional[str] = None,
) -> Story:
    """Build a segmented, tokenized Story from a .txt/.ann pair."""
    mentions = parse_ann(ann_content, text_content)
    sentences = build_sentences(text_content, mentions)
    return Story(
        id=story_id,
        source=source if source is not None else infer_source(story_id),
        text=text_content,
        sentences=sentences,
    )


def write_brat(story: Story) -> tuple[str, str]:
    """Serialize a story back to (text_content, ann_content)."""
    lines = []
    for i, mention in enumerate(story.mentions, start=1):
        span = mention.span
        lines.append(
            f"T{i}\t{mention.event_class.full_name} {span.start_char} {span.end_char}\t{span.surface}"
        )
    ann_content = "".join(line + "\n" for line in lines)
    return story.text, ann_content

"""One-record-per-sentence JSON-lines interchange.

Record fields: story_id, source, provenance, sentence_index, char_offset,
sentence_text, mentions[], and optionally predicted_mentions[] with scores.
Mention offsets are story-level, matching the .ann records.
"""
from __future__ import annotations

import json
from typing import Iterable, Iterator, Optional, TextIO

from .align import build_sentences
from .types import Corpus, EventClass, EventMention, Story, TriggerSpan


def mention_to_dict(mention: EventMention, with_score: bool = False) -> dict:
    out = {
        "start_char": mention.span.start_char,
        "end_char": mention.span.end_char,
        "surface": mention.span.surface,
        "event_class": mention.event_class.name,
    }
    if with_score and mention.score is not None:
        out["score"] = mention.score
    return out


def mention_from_dict(record: dict) -> EventMention:
    return EventMention(
        TriggerSpan(record["start_char"], record["end_char"], record["surface"]),
        EventClass.parse(record["event_class"]),
        score=record.get("score"),
    )


def story_records(
    story: Story,
    predictions: Optional[dict[int, list[EventMention]]] = None,
    split: Optional[str] = None,
) -> Iterator[dict]:
    for index, sentence in enumerate(story.sentences):
        record = {
            "story_id": story.id,
            "source": story.source,
            "provenance": story.provenance,
            "sentence_index": index,
            "char_offset": sentence.char_offset,
            "sentence_text": sentence.text,
            "mentions": [mention_to_dict(m) for m in sentence.mentions],
        }
        if split is not None:
            record["split"] = split
        if predictions is not None:
            record["predicted_mentions"] = [
                mention_to_dict(m, with_score=True) for m in predictions.get(index, [])
            ]
        yield record


def write_jsonl(corpus: Corpus, handle: TextIO) -> int:
    """Write every sentence of every story; returns the record count."""
    count = 0
    for story in corpus.stories:
        for record in story_records(story, split=corpus.split.get(story.id)):
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    return count


def read_jsonl(lines: Iterable[str]) -> Corpus:
    """Rebuild a corpus from sentence records.

    Story text is reconstructed by placing sentences at their offsets; gaps
    are filled with newlines (hard sentence boundaries), so offsets, surfaces,
    and the segmentation stay valid even though the original inter-sentence
    whitespace is not preserved.
    """
    by_story: dict[str, list[dict]] = {}
    meta: dict[str, dict] = {}
    for line in lines:
        if not line.strip():
            continue
        record = json.loads(line)
        by_story.setdefault(record["story_id"], []).append(record)
        meta[record["story_id"]] = record

    stories = []
    split: dict[str, str] = {}
    for story_id, records in by_story.items():
        records.sort(key=lambda r: r["sentence_index"])
        length = max(r["char_offset"] + len(r["sentence_text"]) for r in records)
        chars = ["\n"] * length
        mentions = []
        for record in records:
            offset = record["char_offset"]
            for i, ch in enumerate(record["sentence_text"]):
                chars[offset + i] = ch
            mentions.extend(mention_from_dict(m) for m in record["mentions"])
        text = "".join(chars)
        mentions.sort(key=lambda m: (m.span.start_char, m.span.end_char))
        story = Story(
            id=story_id,
            source=meta[story_id]["source"],
            text=text,
            sentences=build_sentences(text, mentions),
            provenance=meta[story_id].get("provenance", "human"),
        )
        stories.append(story)
        if "split" in meta[story_id]:
            split[story_id] = meta[story_id]["split"]

    stories.sort(key=lambda s: s.id)
    return Corpus(stories=tuple(stories), split=split)

"""Stats, splits, validation, and JSONL interchange."""
import io

import pytest

from storyevents.corpus.brat import parse_brat
from storyevents.corpus.jsonl import read_jsonl, story_records, write_jsonl
from storyevents.corpus.splits import split_corpus
from storyevents.corpus.stats import compute_stats
from storyevents.corpus.types import Corpus, EventClass, EventMention, Story, TriggerSpan, infer_source
from storyevents.corpus.validate import validate_story
from storyevents.errors import EmptyCorpusError, SplitError


def small_story(story_id="PT_0", text="Raju said hello. Meena went home."):
    ann = "T1\tCOMMUNICATION 5 9\tsaid\nT2\tMOVEMENT 23 27\twent\n"
    return parse_brat(text, ann, story_id=story_id)


def test_stats_single_story():
    corpus = Corpus(stories=(small_story(),))
    stats = compute_stats(corpus)
    assert stats.total_events == 2
    assert stats.avg_events_per_story == 2
    assert stats.total_sentences == 2
    assert stats.per_class_counts[EventClass.COM] == 1
    assert stats.per_class_counts[EventClass.MOV] == 1


def test_stats_empty_corpus():
    with pytest.raises(EmptyCorpusError):
        compute_stats(Corpus(stories=()))


def test_stats_event_rate():
    text = "Raju said hello. Meena had said that before, they say."
    story = parse_brat(text, "T1\tCOMMUNICATION 5 9\tsaid\n", story_id="PT_0")
    stats = compute_stats(Corpus(stories=(story,)))
    top = stats.top_triggers[0]
    assert top.surface == "said"
    assert top.trigger_count == 1
    assert top.total_occurrences == 2
    assert top.event_rate == 0.5


def test_per_class_totals_sum_over_stories(toy_corpus):
    stats = compute_stats(toy_corpus)
    by_hand = {cls: 0 for cls in EventClass}
    for story in toy_corpus.stories:
        for mention in story.mentions:
            by_hand[mention.event_class] += 1
    assert stats.per_class_counts == by_hand
    assert sum(stats.per_class_counts.values()) == stats.total_events
    for cls in EventClass:
        split_sum = sum(
            stats.per_split_class_counts[s][cls] for s in ("train", "dev", "test")
        )
        assert split_sum == stats.per_class_counts[cls]


def test_split_corpus_basic():
    stories = tuple(small_story(f"PT_{i}") for i in range(3))
    corpus = Corpus(stories=stories)
    corpus = split_corpus(corpus, ["PT_0"], ["PT_1"], ["PT_2"])
    assert [s.id for s in corpus.stories_in_split("train")] == ["PT_0"]
    assert [s.id for s in corpus.stories_in_split("dev")] == ["PT_1"]
    assert [s.id for s in corpus.stories_in_split("test")] == ["PT_2"]


def test_split_overlap_rejected():
    corpus = Corpus(stories=tuple(small_story(f"PT_{i}") for i in range(2)))
    with pytest.raises(SplitError, match="multiple"):
        split_corpus(corpus, ["PT_0"], ["PT_0"], ["PT_1"])


def test_split_missing_id_rejected():
    corpus = Corpus(stories=(small_story("PT_0"),))
    with pytest.raises(SplitError, match="unknown"):
        split_corpus(corpus, ["PT_0"], ["PT_9"], [])


def test_infer_source():
    assert infer_source("PT_003") == "PT"
    assert infer_source("JT-12") == "JT"
    assert infer_source("mystery") == "UNKNOWN"


def test_validator_clean_story():
    assert validate_story(small_story()) == []


def test_validator_flags_surface_mismatch():
    story = small_story()
    bad = EventMention(TriggerSpan(5, 9, "SAID"), EventClass.COM)
    sentence = story.sentences[0]
    corrupted = Story(
        id=story.id,
        source=story.source,
        text=story.text,
        sentences=(
            type(sentence)(sentence.text, sentence.char_offset, sentence.tokens, (bad,)),
        )
        + story.sentences[1:],
    )
    kinds = [v.kind for v in validate_story(corrupted)]
    assert kinds == ["surface"]


def test_validator_flags_duplicates_and_overlap():
    text = "He was shot dead there."
    mentions = [
        EventMention(TriggerSpan(7, 16, "shot dead"), EventClass.CON),
        EventMention(TriggerSpan(7, 16, "shot dead"), EventClass.CON),
        EventMention(TriggerSpan(12, 16, "dead"), EventClass.LE),
    ]
    from storyevents.corpus.align import build_sentences

    story = Story(
        id="PT_x", source="PT", text=text, sentences=build_sentences(text, mentions)
    )
    kinds = {v.kind for v in validate_story(story)}
    assert "duplicate" in kinds
    assert "overlap" in kinds


def test_jsonl_round_trip(toy_corpus):
    buffer = io.StringIO()
    count = write_jsonl(toy_corpus, buffer)
    assert count == sum(len(s.sentences) for s in toy_corpus.stories)
    buffer.seek(0)
    again = read_jsonl(buffer)
    assert len(again.stories) == len(toy_corpus.stories)
    assert dict(again.split) == dict(toy_corpus.split)
    for original in toy_corpus.stories:
        loaded = again.story(original.id)
        assert loaded.mentions == original.mentions
        assert [s.text for s in loaded.sentences] == [s.text for s in original.sentences]
        assert [s.char_offset for s in loaded.sentences] == [
            s.char_offset for s in original.sentences
        ]


def test_prediction_records_carry_scores():
    story = small_story()
    predicted = {
        0: [EventMention(TriggerSpan(5, 9, "said"), EventClass.COM, score=0.93)]
    }
    records = list(story_records(story, predictions=predicted))
    assert records[0]["predicted_mentions"][0]["score"] == 0.93
    assert records[1]["predicted_mentions"] == []

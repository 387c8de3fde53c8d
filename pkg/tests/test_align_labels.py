import random

import pytest

from storyevents.corpus.align import align_spans, build_sentences
from storyevents.corpus.brat import parse_brat
from storyevents.corpus.labels import (
    decode_labels,
    label_set,
    spans_to_mentions,
    to_label_sequence,
)
from storyevents.corpus.types import EventClass, EventMention, TriggerSpan
from storyevents.errors import AlignmentError, OverlapError


def story_with(text, *spans):
    ann = "".join(
        f"T{i}\t{cls} {start} {end}\t{text[start:end]}\n"
        for i, (cls, start, end) in enumerate(spans, start=1)
    )
    return parse_brat(text, ann, story_id="PT_t")


def test_single_token_alignment():
    story = story_with("The old king said nothing.", ("COMMUNICATION", 13, 17))
    sentence = align_spans(story.sentences[0])
    mention = sentence.mentions[0]
    assert (mention.token_start, mention.token_end) == (3, 3)


def test_multiword_alignment():
    story = story_with("Gandhiji was shot dead by Godse.", ("CONFLICT", 13, 22))
    sentence = align_spans(story.sentences[0])
    mention = sentence.mentions[0]
    assert mention.span.surface == "shot dead"
    assert (mention.token_start, mention.token_end) == (2, 3)


def test_boundary_inside_token_raises():
    text = "He painted the fence."
    sentence = build_sentences(
        text, [EventMention(TriggerSpan(3, 7, "pain"), EventClass.GA)]
    )[0]
    with pytest.raises(AlignmentError, match="pain"):
        align_spans(sentence)


def test_detect_labels():
    story = story_with("He painted the fence.", ("GENERAL-ACTIVITY", 3, 10))
    sentence = align_spans(story.sentences[0])
    assert to_label_sequence(sentence, "detect") == ["O", "B-EVT", "O", "O", "O"]
    assert to_label_sequence(sentence, "classify") == ["O", "B-GA", "O", "O", "O"]


def test_multiword_labels():
    story = story_with("Gandhiji was shot dead by Godse.", ("CONFLICT", 13, 22))
    sentence = align_spans(story.sentences[0])
    labels = to_label_sequence(sentence, "classify")
    assert labels[2:4] == ["B-CON", "I-CON"]


def test_single_token_mode():
    story = story_with("Gandhiji was shot dead by Godse.", ("CONFLICT", 13, 22))
    sentence = align_spans(story.sentences[0])
    labels = to_label_sequence(sentence, "classify", single_token=True)
    assert labels[2:4] == ["B-CON", "O"]


def test_overlap_raises():
    text = "He was shot dead there."
    sentence = build_sentences(
        text,
        [
            EventMention(TriggerSpan(7, 16, "shot dead"), EventClass.CON),
            EventMention(TriggerSpan(12, 16, "dead"), EventClass.LE),
        ],
    )[0]
    sentence = align_spans(sentence)
    with pytest.raises(OverlapError):
        to_label_sequence(sentence, "classify")


def test_illegal_inside_tag_repaired():
    spans = decode_labels(["O", "I-GA", "I-GA", "O", "I-COM"])
    assert spans == [(1, 2, EventClass.GA), (4, 4, EventClass.COM)]


def test_label_sets():
    assert label_set("detect") == ["O", "B-EVT", "I-EVT"]
    classify = label_set("classify")
    assert len(classify) == 15 and classify[0] == "O"


def test_round_trip_random_sentences(toy_corpus):
    rng = random.Random(0)
    sentences = [align_spans(s) for _, _, s in toy_corpus.iter_sentences()]
    for sentence in rng.sample(sentences, min(150, len(sentences))):
        labels = to_label_sequence(sentence, "classify")
        spans = decode_labels(labels)
        expected = [(m.token_start, m.token_end, m.event_class) for m in sentence.mentions]
        assert sorted(spans) == sorted(expected)
        mentions = spans_to_mentions(sentence, spans)
        assert {(m.span, m.event_class) for m in mentions} == {
            (m.span, m.event_class) for m in sentence.mentions
        }


def test_all_corpus_mentions_align(toy_corpus):
    count = 0
    for _, _, sentence in toy_corpus.iter_sentences():
        count += len(align_spans(sentence).mentions)
    assert count == toy_corpus.mention_count()

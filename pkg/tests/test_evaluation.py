import json
import random

import pytest

from storyevents.corpus.brat import parse_brat
from storyevents.corpus.types import Corpus, EventClass, EventMention, TriggerSpan
from storyevents.errors import DataError
from storyevents.evaluation import (
    EXACT_SPAN,
    EXACT_SPAN_AND_CLASS,
    ClassMetrics,
    MatchCriterion,
    compute_prf,
    confusion_csv,
    evaluate,
    match_spans,
    report_table,
)


def mention(start, end, cls, text="x" * 80):
    return EventMention(TriggerSpan(start, end, text[start:end]), cls)


def test_identical_sets_fully_match():
    gold = [mention(0, 4, EventClass.COM), mention(10, 14, EventClass.GA)]
    matches, misses, spurious = match_spans(gold, list(gold))
    assert len(matches) == 2 and not misses and not spurious


def test_empty_predictions_all_missed():
    gold = [mention(0, 4, EventClass.COM)]
    matches, misses, spurious = match_spans(gold, [])
    assert not matches and misses == gold and not spurious


def test_off_by_one_is_no_match():
    gold = [mention(0, 4, EventClass.COM)]
    pred = [mention(0, 5, EventClass.COM)]
    matches, misses, spurious = match_spans(gold, pred)
    assert not matches and len(misses) == 1 and len(spurious) == 1


def test_span_mode_ignores_class():
    gold = [mention(0, 4, EventClass.COM)]
    pred = [mention(0, 4, EventClass.GA)]
    assert match_spans(gold, pred, MatchCriterion(EXACT_SPAN))[0]
    assert not match_spans(gold, pred, MatchCriterion(EXACT_SPAN_AND_CLASS))[0]


def test_overlap_relaxation_flag():
    gold = [mention(0, 4, EventClass.COM)]
    pred = [mention(2, 6, EventClass.COM)]
    assert not match_spans(gold, pred)[0]
    assert match_spans(gold, pred, MatchCriterion(overlap=True))[0]


def test_compute_prf_basics():
    assert compute_prf(1, 0, 0) == (1.0, 1.0, 1.0)
    assert compute_prf(0, 0, 0) == (0.0, 0.0, 0.0)


def test_compute_prf_matches_published_f1():
    # tp=1617, fp=231, fn=133 gives P=0.875 and R=0.924 exactly.
    p, r, f1 = compute_prf(1617, 231, 133)
    assert p == pytest.approx(0.875)
    assert r == pytest.approx(0.924)
    assert abs(f1 - 0.899) < 0.0005


def make_eval_corpus():
    text = "Raju said hello. Meena went home. Hari smiled today."
    ann = (
        "T1\tCOMMUNICATION 5 9\tsaid\n"
        "T2\tMOVEMENT 23 27\twent\n"
        "T3\tCOGNITIVE-MENTAL-STATE 39 45\tsmiled\n"
    )
    story = parse_brat(text, ann, story_id="PT_0")
    return Corpus(stories=(story,)), text


def test_hand_built_fixture():
    corpus, text = make_eval_corpus()
    predictions = {
        # said correct; went predicted with wrong class; smiled missed; one spurious
        ("PT_0", 0): [mention(5, 9, EventClass.COM, text)],
        ("PT_0", 1): [
            mention(23, 27, EventClass.GA, text),
            mention(29, 33, EventClass.LE, text),
        ],
        ("PT_0", 2): [],
    }
    result = evaluate(corpus, predictions)
    assert (result.per_class[EventClass.COM].tp,
            result.per_class[EventClass.COM].fp,
            result.per_class[EventClass.COM].fn) == (1, 0, 0)
    assert (result.per_class[EventClass.MOV].tp,
            result.per_class[EventClass.MOV].fn) == (0, 1)
    assert result.per_class[EventClass.GA].fp == 1
    assert result.per_class[EventClass.LE].fp == 1
    assert result.per_class[EventClass.CMS].fn == 1
    assert (result.overall.tp, result.overall.fp, result.overall.fn) == (1, 2, 2)
    # span-only detection sees said and went as hits
    assert (result.detection.tp, result.detection.fp, result.detection.fn) == (2, 1, 1)
    # confusion: gold MOV predicted as GA
    i_mov = list(EventClass).index(EventClass.MOV)
    i_ga = list(EventClass).index(EventClass.GA)
    assert result.confusion[i_mov][i_ga] == 1
    p, r, f1 = compute_prf(1, 2, 2)
    assert result.overall.precision == p and result.overall.recall == r


def test_gold_vs_gold_is_perfect(toy_corpus):
    predictions = {
        (story.id, i): list(sentence.mentions)
        for story, i, sentence in toy_corpus.iter_sentences()
    }
    result = evaluate(toy_corpus, predictions)
    assert result.overall.f1 == 1.0
    assert result.macro_f1 == 1.0
    for i, row in enumerate(result.confusion):
        for j, cell in enumerate(row):
            assert (cell == 0) or (i == j)


def test_macro_is_mean_of_class_f1(toy_corpus):
    rng = random.Random(1)
    predictions = {}
    for story, i, sentence in toy_corpus.iter_sentences():
        kept = [m for m in sentence.mentions if rng.random() < 0.7]
        predictions[(story.id, i)] = kept
    result = evaluate(toy_corpus, predictions)
    mean = sum(result.per_class[c].f1 for c in EventClass) / 7
    assert abs(result.macro_f1 - mean) < 1e-9


def test_count_identities_random(toy_corpus):
    rng = random.Random(2)
    predictions = {}
    n_pred = 0
    for story, i, sentence in toy_corpus.iter_sentences():
        kept = [m for m in sentence.mentions if rng.random() < 0.5]
        extra = []
        if sentence.tokens and rng.random() < 0.3:
            surface, start, end = sentence.tokens[0]
            extra = [EventMention(TriggerSpan(start, end, surface), EventClass.OTH)]
        predictions[(story.id, i)] = kept + extra
        n_pred += len(kept) + len(extra)
    result = evaluate(toy_corpus, predictions)
    n_gold = toy_corpus.mention_count()
    assert result.overall.tp + result.overall.fn == n_gold
    assert result.overall.tp + result.overall.fp == n_pred


def test_permutation_invariance():
    corpus, text = make_eval_corpus()
    mentions = [mention(5, 9, EventClass.COM, text)]
    base = {("PT_0", 0): mentions, ("PT_0", 1): [], ("PT_0", 2): []}
    r1 = evaluate(corpus, base)
    gold_story = corpus.stories[0]
    shuffled = Corpus(stories=(gold_story,), split={})
    r2 = evaluate(shuffled, dict(reversed(list(base.items()))))
    assert r1.to_dict() == r2.to_dict()


def test_unknown_sentence_raises():
    corpus, text = make_eval_corpus()
    with pytest.raises(DataError):
        evaluate(corpus, {("PT_0", 99): []})
    with pytest.raises(DataError):
        evaluate(corpus, {("ghost", 0): []})


def test_report_exports():
    corpus, text = make_eval_corpus()
    predictions = {
        (s.id, i): list(sent.mentions) for s, i, sent in corpus.iter_sentences()
    }
    result = evaluate(corpus, predictions)
    payload = json.loads(json.dumps(result.to_dict()))
    assert payload == result.to_dict()
    table = report_table(result)
    assert len([l for l in table.splitlines() if l.strip()]) == 1 + 7 + 2 + 1
    rows = confusion_csv(result).strip().splitlines()
    assert len(rows) == 8
    grid = [row.split(",")[1:] for row in rows[1:]]
    assert all(len(r) == 7 and all(c.isdigit() for c in r) for r in grid)


def test_zero_denominator_guards():
    m = ClassMetrics(0, 0, 5)
    assert m.precision == 0.0 and m.f1 == 0.0
    assert m.recall == 0.0

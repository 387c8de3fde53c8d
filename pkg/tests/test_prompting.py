import pytest
import torch

from storyevents.corpus.synth import build_toy_corpus
from storyevents.corpus.types import EventClass
from storyevents.errors import ConfigError, DataError
from storyevents.prompting import (
    INVALID_SPAN,
    PROMPT_CLASS_ORDER,
    PromptModel,
    PromptModelConfig,
    SlotSpan,
    SpanSelector,
    build_prompt,
    create_backbone,
    extract_events,
    select_span,
    slot_feature,
    span_logits,
    span_loss,
)
from storyevents.prompting.selector import SpanPrediction


@pytest.fixture(scope="module")
def corpus():
    return build_toy_corpus(seed=0, split_sizes=(3, 1, 1))


@pytest.fixture(scope="module")
def adapter(corpus):
    return create_backbone("toy", corpus, seed=0)


# --- prompt templates ---

def test_classify_prompt_slots(adapter):
    template = build_prompt(adapter, "classify")
    assert len(template.slots) == 7
    assert template.slots[0].event_class is EventClass.CON
    assert template.slots[-1].event_class is EventClass.OTH
    assert [s.event_class for s in template.slots] == PROMPT_CLASS_ORDER
    assert "COGNITIVE-MENTAL-STATE" in template.text


def test_detect_prompt_single_slot(adapter):
    template = build_prompt(adapter, "detect")
    assert len(template.slots) == 1
    assert template.text == "EVENT"
    slot = template.slots[0]
    assert (slot.start_tok, slot.end_tok) == (0, len(template.token_ids) - 1)


def test_slots_tile_without_overlap(adapter):
    template = build_prompt(adapter, "classify")
    covered = []
    for slot in template.slots:
        covered.extend(range(slot.start_tok, slot.end_tok + 1))
    assert len(covered) == len(set(covered))
    assert max(covered) < len(template.token_ids)


def test_prompt_over_decoder_cap_rejected(adapter):
    with pytest.raises(ConfigError, match="decoder cap"):
        build_prompt(adapter, "classify", max_len=3)


# --- slot features ---

def test_slot_feature_single_row():
    states = torch.arange(12.0).reshape(4, 3)
    lam = slot_feature(states, SlotSpan(None, 2, 2))
    assert torch.equal(lam, states[2])


def test_slot_feature_mean_of_rows():
    a = torch.tensor([1.0, 3.0, -2.0])
    b = torch.tensor([5.0, -1.0, 4.0])
    states = torch.stack([torch.zeros(3), a, b])
    lam = slot_feature(states, SlotSpan(None, 1, 2))
    assert torch.allclose(lam, (a + b) / 2)


def test_slot_feature_identical_rows():
    v = torch.tensor([2.0, -1.0, 0.5])
    states = v.repeat(5, 1)
    assert torch.allclose(slot_feature(states, SlotSpan(None, 1, 4)), v)


def test_slot_feature_linear_and_permutation_invariant():
    torch.manual_seed(0)
    states = torch.randn(6, 4)
    slot = SlotSpan(None, 1, 4)
    lam = slot_feature(states, slot)
    assert torch.allclose(slot_feature(3.0 * states, slot), 3.0 * lam, atol=1e-6)
    permuted = states.clone()
    permuted[1:5] = states[[4, 2, 1, 3]]
    assert torch.allclose(slot_feature(permuted, slot), lam, atol=1e-6)


def test_slot_feature_out_of_range():
    with pytest.raises(DataError):
        slot_feature(torch.zeros(3, 4), SlotSpan(None, 2, 5))


# --- span logits ---

def test_span_logits_identity_mask():
    torch.manual_seed(0)
    selector = SpanSelector(4)
    with torch.no_grad():
        selector.w_start.fill_(1.0)
    lam = torch.randn(4)
    h_x = torch.randn(5, 4)
    logit_start, _ = span_logits(lam, selector, h_x)
    assert torch.allclose(logit_start, h_x @ lam, atol=1e-6)


def test_span_logits_zero_feature():
    selector = SpanSelector(4)
    logit_start, logit_end = span_logits(torch.zeros(4), selector, torch.randn(5, 4))
    assert torch.equal(logit_start, torch.zeros(5))
    assert torch.equal(logit_end, torch.zeros(5))


def test_span_logits_match_scalar_loop():
    torch.manual_seed(3)
    h, length = 4, 5
    selector = SpanSelector(h)
    lam = torch.randn(h)
    h_x = torch.randn(length, h)
    logit_start, logit_end = span_logits(lam, selector, h_x)
    w_start = selector.w_start.detach()
    w_end = selector.w_end.detach()
    for i in range(length):
        expected_start = sum(
            float(lam[d]) * float(w_start[d]) * float(h_x[i, d]) for d in range(h)
        )
        expected_end = sum(
            float(lam[d]) * float(w_end[d]) * float(h_x[i, d]) for d in range(h)
        )
        assert abs(float(logit_start[i]) - expected_start) < 1e-6
        assert abs(float(logit_end[i]) - expected_end) < 1e-6


# --- span loss ---

def test_span_loss_uniform():
    logits = [(torch.zeros(10), torch.zeros(10))]
    loss = span_loss(logits, [(3, 4)])
    assert float(loss) == pytest.approx(2 * torch.log(torch.tensor(10.0)).item(), abs=1e-6)


def test_span_loss_peaked_goes_to_zero():
    start = torch.full((10,), -40.0)
    end = torch.full((10,), -40.0)
    start[3] = 40.0
    end[4] = 40.0
    loss = span_loss([(start, end)], [(3, 4)])
    assert float(loss) < 1e-6


def test_span_loss_monotone_in_gold_logit():
    torch.manual_seed(0)
    base = torch.randn(8)
    end = torch.randn(8)
    previous = None
    for bump in (0.0, 0.5, 1.0, 2.0, 4.0):
        start = base.clone()
        start[2] += bump
        loss = float(span_loss([(start, end)], [(2, 3)]))
        if previous is not None:
            assert loss < previous
        previous = loss


def test_span_loss_gold_out_of_range():
    with pytest.raises(DataError):
        span_loss([(torch.zeros(5), torch.zeros(5))], [(0, 5)])


def test_span_loss_sums_over_slots():
    logits = [(torch.zeros(4), torch.zeros(4)), (torch.zeros(4), torch.zeros(4))]
    loss = span_loss(logits, [(0, 0), (1, 2)])
    single = span_loss([(torch.zeros(4), torch.zeros(4))], [(0, 0)])
    assert float(loss) == pytest.approx(2 * float(single), abs=1e-6)


# --- span selection ---

def enumeration_oracle(starts, ends, alpha):
    """Mirror of the spec's candidate set, scanned in lexicographic order."""
    length = len(starts)
    best, best_score = (0, 0), starts[0] + ends[0]
    for i in range(length):
        for j in range(length):
            if 0 < j - i <= alpha and starts[i] + ends[j] > best_score:
                best, best_score = (i, j), starts[i] + ends[j]
    return best


def test_select_span_peaked():
    start = torch.full((12,), -5.0)
    end = torch.full((12,), -5.0)
    start[3] = 5.0
    end[5] = 5.0
    prediction = select_span(start, end, alpha=10)
    assert (prediction.start_index, prediction.end_index) == (3, 5)
    assert not prediction.is_invalid


def test_select_span_invalid_when_mass_on_zero():
    start = torch.full((12,), -5.0)
    end = torch.full((12,), -5.0)
    start[0] = 9.0
    end[0] = 9.0
    prediction = select_span(start, end, alpha=10)
    assert prediction.is_invalid
    assert (prediction.start_index, prediction.end_index) == INVALID_SPAN


def test_select_span_respects_alpha():
    start = torch.full((30,), -5.0)
    end = torch.full((30,), -5.0)
    start[2] = 10.0
    end[20] = 10.0  # distance 18 > alpha
    end[5] = 4.0
    prediction = select_span(start, end, alpha=10)
    assert (prediction.start_index, prediction.end_index) == (2, 5)


def test_select_span_matches_enumeration():
    generator = torch.Generator().manual_seed(7)
    for trial in range(200):
        if trial % 2 == 0:
            start = torch.randn(30, generator=generator)
            end = torch.randn(30, generator=generator)
        else:  # integer logits force ties; tie-breaks must agree too
            start = torch.randint(-2, 3, (30,), generator=generator).float()
            end = torch.randint(-2, 3, (30,), generator=generator).float()
        prediction = select_span(start, end, alpha=10)
        assert (prediction.start_index, prediction.end_index) == enumeration_oracle(
            start.tolist(), end.tolist(), 10
        )


def test_select_span_probability_normalized():
    torch.manual_seed(0)
    start = torch.randn(15)
    end = torch.randn(15)
    prediction = select_span(start, end, alpha=10)
    assert 0.0 <= prediction.probability <= 1.0


# --- prompt model ---

def test_encode_and_decode_shapes(adapter, corpus):
    config = PromptModelConfig(mode="classify", epochs=1)
    model = PromptModel(adapter, config, torch.Generator().manual_seed(0))
    sentence = corpus.stories[0].sentences[0]
    ids, offsets = adapter.encode_context(sentence.text)
    ids = torch.tensor(ids)
    h_x, h_p = model.encode_and_decode(ids)
    assert h_x.shape == (len(offsets), adapter.hidden_size)
    assert h_p.shape == (len(model.template.token_ids), adapter.hidden_size)


def test_prompt_representation_depends_on_context(adapter, corpus):
    config = PromptModelConfig(mode="classify", epochs=1)
    model = PromptModel(adapter, config, torch.Generator().manual_seed(0))
    model.eval()
    s1 = corpus.stories[0].sentences[0]
    s2 = corpus.stories[0].sentences[1]
    with torch.no_grad():
        _, h_p_1 = model.encode_and_decode(torch.tensor(adapter.encode_context(s1.text)[0]))
        _, h_p_2 = model.encode_and_decode(torch.tensor(adapter.encode_context(s2.text)[0]))
        _, h_p_1_again = model.encode_and_decode(torch.tensor(adapter.encode_context(s1.text)[0]))
    assert not torch.allclose(h_p_1, h_p_2)
    assert torch.equal(h_p_1, h_p_1_again)


def test_extraction_deterministic(adapter, corpus):
    config = PromptModelConfig(mode="classify", epochs=1)
    model = PromptModel(adapter, config, torch.Generator().manual_seed(0))
    sentence = corpus.stories[0].sentences[0]
    first = extract_events(model, sentence)
    second = extract_events(model, sentence)
    assert first == second
    assert [m.score for m in first] == [m.score for m in second]


def test_extraction_at_most_one_mention_per_class(adapter, corpus):
    config = PromptModelConfig(mode="classify", epochs=1)
    model = PromptModel(adapter, config, torch.Generator().manual_seed(1))
    for story, _, sentence in corpus.iter_sentences():
        mentions = extract_events(model, sentence)
        classes = [m.event_class for m in mentions]
        assert len(classes) == len(set(classes))


def test_extraction_spans_inside_sentence_and_capped(adapter, corpus):
    config = PromptModelConfig(mode="classify", epochs=1, max_span_length=10)
    model = PromptModel(adapter, config, torch.Generator().manual_seed(2))
    for story, _, sentence in corpus.iter_sentences():
        for mention in extract_events(model, sentence):
            assert sentence.char_offset <= mention.span.start_char
            assert mention.span.end_char <= sentence.end_offset
            n_tokens = len(mention.span.surface.split())
            assert n_tokens <= config.max_span_length
            assert story.text[
                mention.span.start_char : mention.span.end_char
            ] == mention.span.surface


def test_all_invalid_slots_yield_empty_list(adapter, corpus, monkeypatch):
    config = PromptModelConfig(mode="classify", epochs=1)
    model = PromptModel(adapter, config, torch.Generator().manual_seed(0))
    invalid = [
        SpanPrediction(slot, 0, 0, 0.0, 1.0) for slot in model.template.slots
    ]
    monkeypatch.setattr(PromptModel, "predict_slots", lambda self, ids: invalid)
    assert extract_events(model, corpus.stories[0].sentences[0]) == []


def test_detect_mode_iterates_with_masking(adapter, corpus):
    config = PromptModelConfig(mode="detect", epochs=1, detect_iteration_cap=5)
    model = PromptModel(adapter, config, torch.Generator().manual_seed(3))
    sentence = corpus.stories[0].sentences[0]
    mentions = extract_events(model, sentence)
    assert len(mentions) <= config.detect_iteration_cap
    spans = [(m.span.start_char, m.span.end_char) for m in mentions]
    assert len(spans) == len(set(spans))

"""The prompt model: context through the encoder, the class-slot prompt
through the decoder, shared span selectors over every slot, and thresholded
brute-force span inference."""
from __future__ import annotations

import logging

import torch
from torch import Tensor, nn

from ..corpus.types import AnnotatedSentence, EventClass, EventMention, TriggerSpan
from ..errors import AlignmentError
from .adapters import BackboneAdapter, Offsets
from .config import PromptModelConfig
from .prompts import PromptTemplate, build_prompt
from .selector import SpanPrediction, SpanSelector, select_span, slot_feature, span_logits

log = logging.getLogger(__name__)


def encode_sentence(
    adapter: BackboneAdapter, text: str, max_encoder_len: int
) -> tuple[Tensor, Offsets]:
    """Tokenize context text, truncating (with a warning) past the cap."""
    ids, offsets = adapter.encode_context(text)
    if len(ids) > max_encoder_len:
        log.warning("truncating context of %d subwords to %d", len(ids), max_encoder_len)
        ids = ids[: max_encoder_len - 1] + [ids[-1]]
        offsets = offsets[: max_encoder_len - 1] + [None]
    return torch.tensor(ids, dtype=torch.long), offsets


class PromptModel(nn.Module):
    """Backbone adapter + prompt template + span selector(s)."""

    def __init__(self, adapter: BackboneAdapter, config: PromptModelConfig,
                 generator: torch.Generator | None = None):
        super().__init__()
        if not isinstance(adapter, nn.Module):
            raise TypeError("adapter must be an nn.Module")
        self.adapter = adapter
        self.config = config
        self.template: PromptTemplate = build_prompt(adapter, config.mode, config.max_decoder_len)
        self.register_buffer(
            "prompt_ids", torch.tensor(self.template.token_ids, dtype=torch.long)
        )
        if config.per_slot_selectors:
            self.selectors = nn.ModuleList(
                SpanSelector(adapter.hidden_size, generator) for _ in self.template.slots
            )
        else:
            shared = SpanSelector(adapter.hidden_size, generator)
            self.selectors = nn.ModuleList([shared])
        if config.freeze_backbone:
            for parameter in self.adapter.parameters():
                parameter.requires_grad_(False)

    def selector_for(self, slot_index: int) -> SpanSelector:
        if self.config.per_slot_selectors:
            return self.selectors[slot_index]
        return self.selectors[0]

    def encode_and_decode(self, context_ids: Tensor) -> tuple[Tensor, Tensor]:
        """H_X (decoder-contextualized context) and H_P (context-oriented
        prompt representation). The prompt and the context are never
        concatenated; they interact only through cross-attention."""
        memory = self.adapter.encode(context_ids)
        h_x = self.adapter.decode(memory, memory)
        h_p = self.adapter.decode(self.prompt_ids, memory)
        return h_x, h_p

    def slot_logits(self, context_ids: Tensor) -> list[tuple[Tensor, Tensor]]:
        """One (logit_start, logit_end) pair per slot, each over the context."""
        h_x, h_p = self.encode_and_decode(context_ids)
        out = []
        for k, slot in enumerate(self.template.slots):
            lam = slot_feature(h_p, slot)
            out.append(span_logits(lam, self.selector_for(k), h_x))
        return out

    def predict_slots(self, context_ids: Tensor) -> list[SpanPrediction]:
        with torch.no_grad():
            logits = self.slot_logits(context_ids)
        return [
            select_span(ls, le, self.config.max_span_length, slot)
            for (ls, le), slot in zip(logits, self.template.slots)
        ]


def _span_to_chars(
    prediction: SpanPrediction, offsets: Offsets
) -> tuple[int, int] | None:
    """Map a subword span [start, end) to a character span; None if the span
    touches only special positions."""
    positions = [
        offsets[i]
        for i in range(prediction.start_index, prediction.end_index)
        if 0 <= i < len(offsets) and offsets[i] is not None
    ]
    if not positions:
        return None
    return positions[0][0], positions[-1][1]


def extract_events(model: PromptModel, sentence: AnnotatedSentence) -> list[EventMention]:
    """Predict mentions for one sentence, in story-level character offsets.

    Classification runs one span selection per class slot (at most one mention
    per class). Detection iterates its single EVENT slot, masking each found
    span before the next pass, until the invalid span or the iteration cap.
    """
    model.eval()
    adapter = model.adapter
    config = model.config
    context_ids, offsets = encode_sentence(adapter, sentence.text, config.max_encoder_len)

    mentions: list[EventMention] = []
    if config.mode == "classify":
        for prediction in model.predict_slots(context_ids):
            if prediction.is_invalid:
                continue
            chars = _span_to_chars(prediction, offsets)
            if chars is None:
                log.debug("span %s covers only special tokens; dropped",
                          (prediction.start_index, prediction.end_index))
                continue
            mention = _make_mention(sentence, chars, prediction.slot.event_class,
                                    prediction.probability)
            if mention is not None:
                mentions.append(mention)
    else:
        working = context_ids.clone()
        seen: set[tuple[int, int]] = set()
        for _ in range(config.detect_iteration_cap):
            prediction = model.predict_slots(working)[0]
            key = (prediction.start_index, prediction.end_index)
            if prediction.is_invalid or key in seen:
                break
            seen.add(key)
            chars = _span_to_chars(prediction, offsets)
            if chars is not None:
                mention = _make_mention(sentence, chars, EventClass.OTH,
                                        prediction.probability)
                if mention is not None:
                    mentions.append(mention)
            working = working.clone()
            working[prediction.start_index : prediction.end_index] = adapter.mask_token_id

    mentions.sort(key=lambda m: (m.span.start_char, m.span.end_char))
    return mentions


def _make_mention(
    sentence: AnnotatedSentence,
    chars: tuple[int, int],
    event_class: EventClass,
    score: float,
) -> EventMention | None:
    start, end = chars[0] + sentence.char_offset, chars[1] + sentence.char_offset
    if not (sentence.char_offset <= start < end <= sentence.end_offset):
        raise AlignmentError(
            f"predicted span ({start}, {end}) maps outside the sentence "
            f"[{sentence.char_offset}, {sentence.end_offset})"
        )
    surface = sentence.text[start - sentence.char_offset : end - sentence.char_offset]
    return EventMention(TriggerSpan(start, end, surface), event_class, score=score)

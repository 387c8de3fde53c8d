"""Span-selector math: slot features, start/end logits, loss, and inference.

The selector is a pair of h-dim vectors (w_start, w_end). For a slot feature
lam (the mean-pooled decoder states of one prompt slot):

    logit_start = (lam * w_start) @ H_X.T        (elementwise mask, then matmul)
    logit_end   = (lam * w_end)   @ H_X.T

Training minimizes -(log softmax(logit_start)[st] + log softmax(logit_end)[ed])
summed over slots and instances. Inference scores every candidate (i, j) with
logit_start[i] + logit_end[j] over the set

    S = {(i, j) : 0 < j - i <= alpha} U {(0, 0)}

where (0, 0) means "no event for this slot". End indices are exclusive (the
position after the last subword), which keeps single-subword spans inside S;
index 0 can never be a real start because context position 0 is the
sequence-start sentinel.
"""
from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import Tensor, nn

from ..errors import DataError
from .prompts import SlotSpan

INVALID_SPAN = (0, 0)


class SpanSelector(nn.Module):
    """The trainable (w_start, w_end) pair, randomly initialized."""

    def __init__(self, hidden_size: int, generator: torch.Generator | None = None):
        super().__init__()
        w_start = torch.empty(hidden_size)
        w_end = torch.empty(hidden_size)
        w_start.normal_(0.0, 0.2, generator=generator)
        w_end.normal_(0.0, 0.2, generator=generator)
        self.w_start = nn.Parameter(w_start)
        self.w_end = nn.Parameter(w_end)


def slot_feature(decoder_states: Tensor, slot: SlotSpan) -> Tensor:
    """Mean-pool the decoder rows of one slot: (T, h) -> (h,)."""
    if slot.end_tok >= decoder_states.shape[0]:
        raise DataError(
            f"slot range ({slot.start_tok}, {slot.end_tok}) exceeds decoder "
            f"length {decoder_states.shape[0]}"
        )
    return decoder_states[slot.start_tok : slot.end_tok + 1].mean(dim=0)


def span_logits(lam: Tensor, selector: SpanSelector, context_states: Tensor) -> tuple[Tensor, Tensor]:
    """Start and end logits over the context tokens: each (L,)."""
    logit_start = (lam * selector.w_start) @ context_states.T
    logit_end = (lam * selector.w_end) @ context_states.T
    return logit_start, logit_end


def span_loss(
    logits_per_slot: list[tuple[Tensor, Tensor]],
    gold_per_slot: list[tuple[int, int]],
) -> Tensor:
    """Summed start/end cross-entropy over all slots of one instance."""
    if len(logits_per_slot) != len(gold_per_slot):
        raise DataError("one gold span is required per slot")
    total = None
    for (logit_start, logit_end), (st, ed) in zip(logits_per_slot, gold_per_slot):
        length = logit_start.shape[0]
        if not (0 <= st < length and 0 <= ed < length):
            raise DataError(f"gold span ({st}, {ed}) out of range for context length {length}")
        loss = -(
            torch.log_softmax(logit_start, dim=0)[st]
            + torch.log_softmax(logit_end, dim=0)[ed]
        )
        total = loss if total is None else total + loss
    return total


@dataclass(frozen=True)
class SpanPrediction:
    slot: SlotSpan
    start_index: int
    end_index: int  # exclusive; (0, 0) marks "no event"
    score: float
    probability: float  # p_start[start] * p_end[end]

    @property
    def is_invalid(self) -> bool:
        return (self.start_index, self.end_index) == INVALID_SPAN


def select_span(
    logit_start: Tensor,
    logit_end: Tensor,
    alpha: int,
    slot: SlotSpan | None = None,
) -> SpanPrediction:
    """Argmax of logit_start[i] + logit_end[j] over S; ties break to the
    lexicographically smallest (i, j). (0, 0) is returned only when it attains
    the maximum, signaling that the slot has no event."""
    starts = logit_start.detach().cpu().tolist()
    ends = logit_end.detach().cpu().tolist()
    length = len(starts)
    best = INVALID_SPAN
    best_score = starts[0] + ends[0]
    for i in range(length):
        j_hi = min(i + alpha, length - 1)
        for j in range(i + 1, j_hi + 1):
            score = starts[i] + ends[j]
            if score > best_score:
                best_score = score
                best = (i, j)

    p_start = torch.softmax(logit_start, dim=0)
    p_end = torch.softmax(logit_end, dim=0)
    probability = float(p_start[best[0]] * p_end[best[1]])
    if slot is None:
        slot = SlotSpan(None, 0, 0)
    return SpanPrediction(slot, best[0], best[1], best_score, probability)

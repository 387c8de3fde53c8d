"""Decoder-side prompts and their per-class slots.

Detection uses the single-slot prompt "EVENT". Classification concatenates
the seven class names in a fixed order; each slot is the contiguous subword
range of one class name under the backbone's tokenizer.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..corpus.types import EventClass
from ..errors import ConfigError

#: Fixed slot order for the classification prompt.
PROMPT_CLASS_ORDER = [
    EventClass.CON,
    EventClass.COM,
    EventClass.LE,
    EventClass.MOV,
    EventClass.CMS,
    EventClass.GA,
    EventClass.OTH,
]

DETECT_PROMPT = "EVENT"
CLASSIFY_PROMPT = " ".join(cls.full_name for cls in PROMPT_CLASS_ORDER)


@dataclass(frozen=True)
class SlotSpan:
    """Inclusive subword-token range of one class slot inside the prompt."""

    event_class: EventClass | None  # None for the detection EVENT slot
    start_tok: int
    end_tok: int

    def __post_init__(self):
        if not (0 <= self.start_tok <= self.end_tok):
            raise ConfigError(f"bad slot range ({self.start_tok}, {self.end_tok})")


@dataclass(frozen=True)
class PromptTemplate:
    text: str
    mode: str
    token_ids: tuple[int, ...]
    slots: tuple[SlotSpan, ...]


def build_prompt(adapter, mode: str, max_len: int | None = None) -> PromptTemplate:
    """Tokenize the prompt for ``mode`` and locate each slot's subword range."""
    if mode == "detect":
        text = DETECT_PROMPT
        pieces = [(None, 0, len(text))]
    elif mode == "classify":
        text = CLASSIFY_PROMPT
        pieces = []
        cursor = 0
        for cls in PROMPT_CLASS_ORDER:
            start = text.index(cls.full_name, cursor)
            pieces.append((cls, start, start + len(cls.full_name)))
            cursor = start + len(cls.full_name)
    else:
        raise ConfigError(f"unknown prompt mode: {mode!r}")

    token_ids, offsets = adapter.encode_prompt(text)
    if max_len is not None and len(token_ids) > max_len:
        raise ConfigError(
            f"prompt tokenizes to {len(token_ids)} subwords, over the decoder cap {max_len}"
        )
    slots = []
    for cls, char_start, char_end in pieces:
        indices = [
            i
            for i, span in enumerate(offsets)
            if span is not None and span[0] >= char_start and span[1] <= char_end
        ]
        if not indices:
            raise ConfigError(f"slot {cls} tokenized to no subwords")
        if indices != list(range(indices[0], indices[-1] + 1)):
            raise ConfigError(f"slot {cls} is not contiguous under this tokenizer")
        slots.append(SlotSpan(cls, indices[0], indices[-1]))

    for a, b in zip(slots, slots[1:]):
        if b.start_tok <= a.end_tok:
            raise ConfigError("prompt slots overlap")
    return PromptTemplate(text=text, mode=mode, token_ids=tuple(token_ids), slots=tuple(slots))

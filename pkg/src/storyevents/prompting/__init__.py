"""Prompt-based event extraction: class-name slots decoded against the
encoded context, with start/end span selectors shared across slots."""

from .adapters import (
    BackboneAdapter,
    HFBackbone,
    ToyBackbone,
    WordTokenizer,
    adapter_from_spec,
    create_backbone,
    register_backbone,
)
from .config import PromptModelConfig
from .model import PromptModel, encode_sentence, extract_events
from .prompts import (
    CLASSIFY_PROMPT,
    DETECT_PROMPT,
    PROMPT_CLASS_ORDER,
    PromptTemplate,
    SlotSpan,
    build_prompt,
)
from .selector import (
    INVALID_SPAN,
    SpanPrediction,
    SpanSelector,
    select_span,
    slot_feature,
    span_logits,
    span_loss,
)
from .train import (
    TrainedPromptModel,
    build_instances,
    load_prompt_model,
    save_prompt_model,
    train_prompt_model,
)

__all__ = [
    "BackboneAdapter",
    "CLASSIFY_PROMPT",
    "DETECT_PROMPT",
    "HFBackbone",
    "INVALID_SPAN",
    "PROMPT_CLASS_ORDER",
    "PromptModel",
    "PromptModelConfig",
    "PromptTemplate",
    "SlotSpan",
    "SpanPrediction",
    "SpanSelector",
    "ToyBackbone",
    "TrainedPromptModel",
    "WordTokenizer",
    "adapter_from_spec",
    "build_instances",
    "build_prompt",
    "create_backbone",
    "encode_sentence",
    "extract_events",
    "load_prompt_model",
    "register_backbone",
    "save_prompt_model",
    "select_span",
    "slot_feature",
    "span_logits",
    "span_loss",
    "train_prompt_model",
]

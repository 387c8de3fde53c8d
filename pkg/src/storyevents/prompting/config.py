"""Configuration for the prompt-based span-selection model."""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigError


@dataclass
class PromptModelConfig:
    """Defaults are the published training settings: 1000 epochs, batch 4,
    AdamW at 4e-5 with 0.01 weight decay, linear schedule with 10% warmup,
    span length cap 10, gradient-norm clip 5, encoder/decoder length caps
    500/80, seed 42."""

    mode: str = "classify"  # detect | classify
    epochs: int = 1000
    batch_size: int = 4
    learning_rate: float = 4e-5
    weight_decay: float = 0.01
    warmup_fraction: float = 0.1
    max_span_length: int = 10  # alpha
    max_grad_norm: float = 5.0
    max_encoder_len: int = 500
    max_decoder_len: int = 80
    seed: int = 42
    per_slot_selectors: bool = False
    freeze_backbone: bool = False
    detect_iteration_cap: int = 16
    eval_every: int = 1

    def __post_init__(self):
        if self.mode not in ("detect", "classify"):
            raise ConfigError(f"mode must be detect or classify, got {self.mode!r}")
        if self.max_span_length < 1:
            raise ConfigError("max_span_length must be at least 1")
        if self.max_encoder_len <= 0 or self.max_decoder_len <= 0:
            raise ConfigError("sequence length caps must be positive")

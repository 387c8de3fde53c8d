"""Configuration for the sequence-labeling baselines."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError


@dataclass
class TaggerConfig:
    """Defaults follow the published training recipe: 100-dim recurrent states
    per direction, Adam, 1000 epochs, batch size 16, BCE for detection and
    categorical cross-entropy for classification, ReLU convolutions."""

    label_scheme: str = "detect"  # detect | classify
    hidden_dim: int = 100
    embedding_dim: int = 100
    bidirectional: bool = True
    use_char_cnn: bool = False
    use_sentence_cnn: bool = False
    use_crf: bool = False
    use_document_context: bool = False
    single_token_spans: bool = False
    epochs: int = 1000
    batch_size: int = 16
    learning_rate: float = 1e-3
    max_sequence_length: int = 2048
    char_embedding_dim: int = 30
    embedding_file: str | None = None
    eval_every: int = 1
    seed: int = 42

    def __post_init__(self):
        if self.hidden_dim <= 0:
            raise ConfigError("hidden_dim must be positive")
        if self.label_scheme not in ("detect", "classify"):
            raise ConfigError(f"label_scheme must be detect or classify, got {self.label_scheme!r}")
        if self.max_sequence_length <= 0:
            raise ConfigError("max_sequence_length must be positive")

    @property
    def binary_head(self) -> bool:
        """Detection without a CRF uses a per-token sigmoid (event vs not)."""
        return self.label_scheme == "detect" and not self.use_crf

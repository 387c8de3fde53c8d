"""Neural taggers: (Bi)LSTM encoders with optional character-level and
sentence-level convolutions and an optional CRF head.

Architecture notes:
  * Character CNN: four banks of 25 ReLU filters over character 2/3/4/5-grams,
    each max-pooled, concatenated into a 100-dim word representation that is
    appended to the word embedding. Words are padded to five characters.
  * Sentence CNN: for a target position i, signed-bucket distance embeddings
    (dim 5) are concatenated to every token's input representation, then
    bi-gram and tri-gram banks of 100 ReLU filters are max-pooled into c_i,
    which is concatenated to the recurrent output o_i before the dense layer.
  * Document context: the caller concatenates all sentences of a story into
    one sequence; beyond ``max_sequence_length`` tokens the input is truncated
    with a warning.
"""
from __future__ import annotations

import logging

import numpy as np
import torch
import torch.nn.functional as F
from torch import Tensor, nn

from .buckets import N_BUCKETS, bucket_index
from .config import TaggerConfig
from .crf import make_transitions

log = logging.getLogger(__name__)

CHAR_PAD_LEN = 5  # widest character kernel


class CharCNN(nn.Module):
    def __init__(self, n_chars: int, char_dim: int = 30, filters: int = 25,
                 widths: tuple[int, ...] = (2, 3, 4, 5)):
        super().__init__()
        self.embedding = nn.Embedding(n_chars, char_dim, padding_idx=0)
        self.convs = nn.ModuleList(
            [nn.Conv1d(char_dim, filters, width) for width in widths]
        )
        self.output_dim = filters * len(widths)

    def forward(self, char_ids: Tensor) -> Tensor:
        """(n_words, n_chars) int -> (n_words, 100)."""
        if char_ids.shape[1] < CHAR_PAD_LEN:
            pad = char_ids.new_zeros(char_ids.shape[0], CHAR_PAD_LEN - char_ids.shape[1])
            char_ids = torch.cat([char_ids, pad], dim=1)
        embedded = self.embedding(char_ids).transpose(1, 2)  # (W, dim, C)
        pooled = [F.relu(conv(embedded)).max(dim=2).values for conv in self.convs]
        return torch.cat(pooled, dim=1)


class SentenceCNN(nn.Module):
    def __init__(self, input_dim: int, bucket_dim: int = 5, filters: int = 100,
                 kernels: tuple[int, ...] = (2, 3)):
        super().__init__()
        self.bucket_embedding = nn.Embedding(N_BUCKETS, bucket_dim)
        self.convs = nn.ModuleList(
            [nn.Conv1d(input_dim + bucket_dim, filters, k, padding=k - 1) for k in kernels]
        )
        self.output_dim = filters * len(kernels)

    def forward(self, token_reprs: Tensor) -> Tensor:
        """(T, D) -> (T, 200): one pooled feature vector per target position."""
        n = token_reprs.shape[0]
        positions = torch.arange(n)
        distances = positions.unsqueeze(0) - positions.unsqueeze(1)  # (target, j)
        buckets = distances.clone().apply_(lambda d: bucket_index(int(d))).long()
        bucket_vecs = self.bucket_embedding(buckets)  # (T, T, 5)
        expanded = token_reprs.unsqueeze(0).expand(n, -1, -1)  # (T, T, D)
        stacked = torch.cat([expanded, bucket_vecs], dim=2).transpose(1, 2)  # (T, D+5, T)
        pooled = [F.relu(conv(stacked)).max(dim=2).values for conv in self.convs]
        return torch.cat(pooled, dim=1)


class TaggerNet(nn.Module):
    def __init__(self, config: TaggerConfig, n_words: int, n_chars: int,
                 n_labels: int, pretrained: np.ndarray | None = None):
        super().__init__()
        self.config = config
        self.n_labels = n_labels
        self.word_embedding = nn.Embedding(n_words, config.embedding_dim, padding_idx=0)
        if pretrained is not None:
            self.word_embedding.weight.data.copy_(torch.from_numpy(pretrained))

        input_dim = config.embedding_dim
        self.char_cnn = None
        if config.use_char_cnn:
            self.char_cnn = CharCNN(n_chars, config.char_embedding_dim)
            input_dim += self.char_cnn.output_dim

        self.lstm = nn.LSTM(
            input_dim, config.hidden_dim, batch_first=True,
            bidirectional=config.bidirectional,
        )
        lstm_out = config.hidden_dim * (2 if config.bidirectional else 1)

        self.sentence_cnn = None
        head_in = lstm_out
        if config.use_sentence_cnn:
            self.sentence_cnn = SentenceCNN(input_dim)
            head_in += self.sentence_cnn.output_dim

        self.head = nn.Linear(head_in, 1 if config.binary_head else n_labels)
        self.transitions = make_transitions(n_labels) if config.use_crf else None

    def token_representations(self, word_ids: Tensor, char_ids: Tensor | None) -> Tensor:
        reprs = self.word_embedding(word_ids)
        if self.char_cnn is not None:
            reprs = torch.cat([reprs, self.char_cnn(char_ids)], dim=1)
        return reprs

    def encode_sequence(self, word_ids: Tensor, char_ids: Tensor | None = None) -> Tensor:
        """(T,) token ids -> (T, hidden) recurrent states, plus sentence-CNN
        features when enabled."""
        if word_ids.shape[0] > self.config.max_sequence_length:
            log.warning(
                "truncating sequence of %d tokens to %d",
                word_ids.shape[0], self.config.max_sequence_length,
            )
            word_ids = word_ids[: self.config.max_sequence_length]
            if char_ids is not None:
                char_ids = char_ids[: self.config.max_sequence_length]
        reprs = self.token_representations(word_ids, char_ids)
        states, _ = self.lstm(reprs.unsqueeze(0))
        states = states.squeeze(0)
        if self.sentence_cnn is not None:
            states = torch.cat([states, self.sentence_cnn(reprs)], dim=1)
        return states

    def emissions(self, word_ids: Tensor, char_ids: Tensor | None = None) -> Tensor:
        """Per-token scores: (T, n_labels), or (T,) for the binary detect head."""
        scores = self.head(self.encode_sequence(word_ids, char_ids))
        return scores.squeeze(1) if self.config.binary_head else scores

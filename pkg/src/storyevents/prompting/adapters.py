"""Encoder-decoder backbones behind a small adapter interface.

An adapter supplies a subword tokenizer with character-offset mapping plus two
forward passes:

    encode(context_ids)        -> memory          (L, h)
    decode(input, memory)      -> hidden states   (T, h)

``decode`` accepts either token ids (the prompt) or ready embeddings (the
encoder memory itself, which yields the decoder-contextualized context
representation). Every adapter guarantees a sequence-start sentinel at context
position 0 so that the reserved (0, 0) span can never collide with a real
token.

The "toy" backbone is a tiny randomly initialized transformer with a
word-level tokenizer; it is fully deterministic given a seed and exists so
tests and offline runs need no pretrained weights. "hf:<model-id>" loads a
pretrained encoder-decoder (e.g. hf:facebook/bart-base) when the transformers
package and weights are available.
"""
from __future__ import annotations

import abc
from typing import Callable, Optional

import torch
from torch import Tensor, nn

from ..corpus.tokenization import tokenize
from ..corpus.types import Corpus
from ..errors import ConfigError

#: (start, end) character span of each subword, None for special tokens.
Offsets = list[Optional[tuple[int, int]]]


class BackboneAdapter(abc.ABC):
    hidden_size: int
    mask_token_id: int

    @abc.abstractmethod
    def encode_context(self, text: str) -> tuple[list[int], Offsets]:
        """Tokenize context text, sentinel first."""

    @abc.abstractmethod
    def encode_prompt(self, text: str) -> tuple[list[int], Offsets]:
        """Tokenize prompt text for the decoder side."""

    @abc.abstractmethod
    def encode(self, ids: Tensor) -> Tensor:
        """(L,) -> encoder states (L, h)."""

    @abc.abstractmethod
    def decode(self, decoder_input: Tensor, memory: Tensor) -> Tensor:
        """(T,) ids or (T, h) embeddings -> decoder states (T, h)."""

    @abc.abstractmethod
    def spec(self) -> dict:
        """Enough to rebuild this adapter (minus learned weights)."""


class WordTokenizer:
    """Word-level subword tokenizer with exact character offsets.

    Specials: <pad>=0, <s>=1, </s>=2, <unk>=3, <mask>=4. Lookup is
    case-insensitive; unknown words map to <unk> but keep their offsets, so
    span-to-character mapping never breaks.
    """

    SPECIALS = ("<pad>", "<s>", "</s>", "<unk>", "<mask>")
    PAD, BOS, EOS, UNK, MASK = range(5)

    def __init__(self, words: list[str]):
        self.itos = list(self.SPECIALS) + sorted({w.lower() for w in words})
        self.stoi = {w: i for i, w in enumerate(self.itos)}

    def __len__(self) -> int:
        return len(self.itos)

    def encode_context(self, text: str) -> tuple[list[int], Offsets]:
        ids = [self.BOS]
        offsets: Offsets = [None]
        for surface, start, end in tokenize(text):
            ids.append(self.stoi.get(surface.lower(), self.UNK))
            offsets.append((start, end))
        ids.append(self.EOS)
        offsets.append(None)
        return ids, offsets

    def encode_prompt(self, text: str) -> tuple[list[int], Offsets]:
        ids = []
        offsets: Offsets = []
        for surface, start, end in tokenize(text):
            ids.append(self.stoi.get(surface.lower(), self.UNK))
            offsets.append((start, end))
        return ids, offsets


class ToyBackbone(nn.Module, BackboneAdapter):
    """A deterministic few-layer transformer encoder-decoder."""

    def __init__(
        self,
        words: list[str],
        hidden_size: int = 64,
        layers: int = 2,
        heads: int = 4,
        ffn_size: int = 128,
        max_positions: int = 512,
        seed: int = 0,
    ):
        super().__init__()
        self.tokenizer = WordTokenizer(words)
        self.hidden_size = hidden_size
        self.mask_token_id = WordTokenizer.MASK
        self._init_args = dict(
            hidden_size=hidden_size, layers=layers, heads=heads,
            ffn_size=ffn_size, max_positions=max_positions, seed=seed,
        )
        with torch.random.fork_rng():
            torch.manual_seed(seed)
            self.embedding = nn.Embedding(len(self.tokenizer), hidden_size)
            self.positions = nn.Embedding(max_positions, hidden_size)
            self.encoder = nn.TransformerEncoder(
                nn.TransformerEncoderLayer(
                    hidden_size, heads, ffn_size, dropout=0.0, batch_first=True
                ),
                layers,
            )
            self.decoder = nn.TransformerDecoder(
                nn.TransformerDecoderLayer(
                    hidden_size, heads, ffn_size, dropout=0.0, batch_first=True
                ),
                layers,
            )

    def encode_context(self, text: str) -> tuple[list[int], Offsets]:
        return self.tokenizer.encode_context(text)

    def encode_prompt(self, text: str) -> tuple[list[int], Offsets]:
        return self.tokenizer.encode_prompt(text)

    def _embed(self, ids: Tensor) -> Tensor:
        pos = torch.arange(ids.shape[0], device=ids.device)
        return self.embedding(ids) + self.positions(pos)

    def encode(self, ids: Tensor) -> Tensor:
        return self.encoder(self._embed(ids).unsqueeze(0)).squeeze(0)

    def decode(self, decoder_input: Tensor, memory: Tensor) -> Tensor:
        if decoder_input.dtype in (torch.long, torch.int):
            target = self._embed(decoder_input)
        else:
            target = decoder_input
        return self.decoder(target.unsqueeze(0), memory.unsqueeze(0)).squeeze(0)

    def spec(self) -> dict:
        return {"kind": "toy", "words": self.tokenizer.itos[5:], **self._init_args}


class HFBackbone(nn.Module, BackboneAdapter):
    """A pretrained encoder-decoder from the transformers hub (BART family)."""

    def __init__(self, model_id: str):
        super().__init__()
        try:
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:  # pragma: no cover
            raise ConfigError("the transformers package is required for hf: backbones") from exc
        self.model_id = model_id
        self.hf_tokenizer = AutoTokenizer.from_pretrained(model_id, use_fast=True)
        self.model = AutoModel.from_pretrained(model_id)
        self.hidden_size = self.model.config.d_model
        self.mask_token_id = self.hf_tokenizer.mask_token_id

    def _encode_text(self, text: str, specials: bool) -> tuple[list[int], Offsets]:
        enc = self.hf_tokenizer(
            text, return_offsets_mapping=True, add_special_tokens=specials
        )
        ids = enc["input_ids"]
        special_ids = set(self.hf_tokenizer.all_special_ids)
        offsets: Offsets = []
        for token_id, (start, end) in zip(ids, enc["offset_mapping"]):
            if token_id in special_ids or start == end:
                offsets.append(None)
            else:
                offsets.append((start, end))
        return ids, offsets

    def encode_context(self, text: str) -> tuple[list[int], Offsets]:
        return self._encode_text(text, specials=True)

    def encode_prompt(self, text: str) -> tuple[list[int], Offsets]:
        return self._encode_text(text, specials=False)

    def encode(self, ids: Tensor) -> Tensor:
        out = self.model.encoder(input_ids=ids.unsqueeze(0))
        return out.last_hidden_state.squeeze(0)

    def decode(self, decoder_input: Tensor, memory: Tensor) -> Tensor:
        kwargs = {"encoder_hidden_states": memory.unsqueeze(0)}
        if decoder_input.dtype in (torch.long, torch.int):
            out = self.model.decoder(input_ids=decoder_input.unsqueeze(0), **kwargs)
        else:
            out = self.model.decoder(inputs_embeds=decoder_input.unsqueeze(0), **kwargs)
        return out.last_hidden_state.squeeze(0)

    def spec(self) -> dict:
        return {"kind": "hf", "model_id": self.model_id}


def _toy_factory(corpus: Optional[Corpus] = None, **kwargs) -> ToyBackbone:
    from .prompts import CLASSIFY_PROMPT, DETECT_PROMPT

    words = [t[0] for t in tokenize(CLASSIFY_PROMPT + " " + DETECT_PROMPT)]
    if corpus is not None:
        for _, _, sentence in corpus.iter_sentences():
            words.extend(surface for surface, _, _ in sentence.tokens)
    return ToyBackbone(words, **kwargs)


_REGISTRY: dict[str, Callable[..., BackboneAdapter]] = {"toy": _toy_factory}


def register_backbone(name: str, factory: Callable[..., BackboneAdapter]) -> None:
    _REGISTRY[name] = factory


def create_backbone(name: str, corpus: Optional[Corpus] = None, **kwargs) -> BackboneAdapter:
    """Instantiate a registered backbone, or ``hf:<model-id>`` for a
    pretrained one."""
    if name in _REGISTRY:
        return _REGISTRY[name](corpus=corpus, **kwargs)
    if name.startswith("hf:"):
        return HFBackbone(name[3:])
    raise ConfigError(f"unknown backbone {name!r}; registered: {sorted(_REGISTRY)}")


def adapter_from_spec(spec: dict) -> BackboneAdapter:
    kind = spec.get("kind")
    if kind == "toy":
        args = {k: v for k, v in spec.items() if k not in ("kind", "words")}
        return ToyBackbone(spec["words"], **args)
    if kind == "hf":
        return HFBackbone(spec["model_id"])
    raise ConfigError(f"unknown adapter spec kind {kind!r}")

"""Training and checkpointing for the prompt-based span selector.

Gold spans are subword index pairs (first subword, last subword + 1), so a
single-subword trigger is (i, i+1) and always lies inside the candidate set;
a class with no mention in the sentence gets the invalid span (0, 0).

Detection training expands each sentence into one instance per trigger (all
earlier triggers masked in the context) plus a terminal instance with every
trigger masked and gold (0, 0), mirroring the iterative inference loop.
"""
from __future__ import annotations

import copy
import logging
import random
from dataclasses import asdict, dataclass, field

import numpy as np
import torch
from torch import Tensor

from ..corpus.types import AnnotatedSentence, Corpus, EventMention, Story
from ..errors import ConfigError
from ..evaluation import EXACT_SPAN, MatchCriterion, evaluate
from .adapters import BackboneAdapter, Offsets, adapter_from_spec
from .config import PromptModelConfig
from .model import PromptModel, encode_sentence, extract_events
from .prompts import PROMPT_CLASS_ORDER
from .selector import INVALID_SPAN, span_loss

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "storyevents-prompt-v1"


@dataclass
class PromptInstance:
    story_id: str
    sentence_index: int
    context_ids: Tensor
    gold: list[tuple[int, int]]  # one (start, end-exclusive) pair per slot


@dataclass
class TrainedPromptModel:
    model: PromptModel
    config: PromptModelConfig
    history: list[dict] = field(default_factory=list)

    def predict_sentence(self, sentence: AnnotatedSentence) -> list[EventMention]:
        return extract_events(self.model, sentence)

    def predict_story(self, story: Story) -> dict[int, list[EventMention]]:
        return {i: self.predict_sentence(s) for i, s in enumerate(story.sentences)}


def _subword_span(
    mention: EventMention, offsets: Offsets, char_offset: int
) -> tuple[int, int] | None:
    """Context indices of a mention: (first subword, last subword + 1)."""
    start = mention.span.start_char - char_offset
    end = mention.span.end_char - char_offset
    covered = [
        i
        for i, span in enumerate(offsets)
        if span is not None and span[0] < end and start < span[1]
    ]
    if not covered:
        return None
    return covered[0], covered[-1] + 1


def build_classify_instance(
    sentence: AnnotatedSentence,
    story_id: str,
    sentence_index: int,
    adapter: BackboneAdapter,
    config: PromptModelConfig,
) -> PromptInstance:
    context_ids, offsets = encode_sentence(adapter, sentence.text, config.max_encoder_len)
    by_class: dict = {}
    for mention in sentence.mentions:
        span = _subword_span(mention, offsets, sentence.char_offset)
        if span is None:
            log.warning(
                "%s[%d]: mention %r lies beyond the encoder cap; excluded",
                story_id, sentence_index, mention.span.surface,
            )
            continue
        if mention.event_class in by_class:
            # The architecture allows one span per class slot; keep the earliest.
            log.warning(
                "%s[%d]: second %s mention %r in one sentence; excluded",
                story_id, sentence_index, mention.event_class.name, mention.span.surface,
            )
            continue
        by_class[mention.event_class] = span
    gold = [by_class.get(cls, INVALID_SPAN) for cls in PROMPT_CLASS_ORDER]
    return PromptInstance(story_id, sentence_index, context_ids, gold)


def build_detect_instances(
    sentence: AnnotatedSentence,
    story_id: str,
    sentence_index: int,
    adapter: BackboneAdapter,
    config: PromptModelConfig,
) -> list[PromptInstance]:
    context_ids, offsets = encode_sentence(adapter, sentence.text, config.max_encoder_len)
    spans = []
    for mention in sentence.mentions:
        span = _subword_span(mention, offsets, sentence.char_offset)
        if span is not None:
            spans.append(span)
    spans.sort()

    instances = []
    working = context_ids
    for span in spans:
        instances.append(PromptInstance(story_id, sentence_index, working, [span]))
        working = working.clone()
        working[span[0] : span[1]] = adapter.mask_token_id
    instances.append(PromptInstance(story_id, sentence_index, working, [INVALID_SPAN]))
    return instances


def build_instances(
    corpus: Corpus, split: str, adapter: BackboneAdapter, config: PromptModelConfig
) -> list[PromptInstance]:
    instances: list[PromptInstance] = []
    for story, index, sentence in corpus.iter_sentences(split):
        if config.mode == "classify":
            instances.append(
                build_classify_instance(sentence, story.id, index, adapter, config)
            )
        else:
            instances.extend(
                build_detect_instances(sentence, story.id, index, adapter, config)
            )
    return instances


def _linear_warmup(step: int, total: int, warmup: int) -> float:
    if step < warmup:
        return step / max(1, warmup)
    return max(0.0, (total - step) / max(1, total - warmup))


def dev_metric(trained: TrainedPromptModel, corpus: Corpus) -> float:
    predictions = {}
    for story in corpus.stories_in_split("dev"):
        for index, mentions in trained.predict_story(story).items():
            predictions[(story.id, index)] = mentions
    if trained.config.mode == "detect":
        result = evaluate(corpus, predictions, MatchCriterion(EXACT_SPAN), split="dev")
        return result.detection.f1
    result = evaluate(corpus, predictions, MatchCriterion(), split="dev")
    return result.macro_f1


def train_prompt_model(
    config: PromptModelConfig,
    corpus: Corpus,
    adapter: BackboneAdapter,
    progress: bool = False,
) -> TrainedPromptModel:
    """Fine-tune selectors (and, unless frozen, the backbone) on the train
    split, keeping the best dev-metric checkpoint."""
    if not corpus.stories_in_split("train"):
        raise ConfigError("corpus has no train split assigned")
    random.seed(config.seed)
    np.random.seed(config.seed)
    torch.manual_seed(config.seed)

    generator = torch.Generator().manual_seed(config.seed)
    model = PromptModel(adapter, config, generator)
    trained = TrainedPromptModel(model, config)

    instances = build_instances(corpus, "train", adapter, config)
    has_dev = bool(corpus.stories_in_split("dev"))

    parameters = [p for p in model.parameters() if p.requires_grad]
    optimizer = torch.optim.AdamW(
        parameters, lr=config.learning_rate, weight_decay=config.weight_decay
    )
    steps_per_epoch = max(1, (len(instances) + config.batch_size - 1) // config.batch_size)
    total_steps = steps_per_epoch * config.epochs
    warmup_steps = int(config.warmup_fraction * total_steps)
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda step: _linear_warmup(step, total_steps, warmup_steps)
    )

    best_metric = -1.0
    best_state = copy.deepcopy(model.state_dict())
    order = list(range(len(instances)))
    rng = random.Random(config.seed)

    for epoch in range(config.epochs):
        model.train()
        rng.shuffle(order)
        total_loss = 0.0
        for batch_start in range(0, len(order), config.batch_size):
            batch = order[batch_start : batch_start + config.batch_size]
            optimizer.zero_grad()
            losses = []
            for i in batch:
                instance = instances[i]
                logits = model.slot_logits(instance.context_ids)
                losses.append(span_loss(logits, instance.gold))
            loss = torch.stack(losses).sum()
            loss.backward()
            torch.nn.utils.clip_grad_norm_(parameters, config.max_grad_norm)
            optimizer.step()
            scheduler.step()
            total_loss += float(loss.item())

        entry = {"epoch": epoch, "loss": total_loss}
        if has_dev and (epoch % config.eval_every == 0 or epoch == config.epochs - 1):
            metric = dev_metric(trained, corpus)
            entry["dev_metric"] = metric
            if metric > best_metric:
                best_metric = metric
                best_state = copy.deepcopy(model.state_dict())
        trained.history.append(entry)
        if progress:
            log.info(
                "epoch %d loss %.4f dev %.4f",
                epoch, total_loss, entry.get("dev_metric", float("nan")),
            )

    if has_dev:
        model.load_state_dict(best_state)
    return trained


def save_prompt_model(trained: TrainedPromptModel, path: str) -> None:
    torch.save(
        {
            "format": CHECKPOINT_FORMAT,
            "config": asdict(trained.config),
            "adapter_spec": trained.model.adapter.spec(),
            "state_dict": trained.model.state_dict(),
            "history": trained.history,
        },
        path,
    )


def load_prompt_model(path: str) -> TrainedPromptModel:
    payload = torch.load(path, weights_only=False)
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise ConfigError(f"not a prompt-model checkpoint: {path}")
    config = PromptModelConfig(**payload["config"])
    adapter = adapter_from_spec(payload["adapter_spec"])
    model = PromptModel(adapter, config)
    model.load_state_dict(payload["state_dict"])
    return TrainedPromptModel(model, config, payload["history"])

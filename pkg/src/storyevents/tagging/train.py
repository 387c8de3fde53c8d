"""Training, prediction, and checkpointing for the sequence-labeling taggers."""
from __future__ import annotations

import copy
import logging
import random
from dataclasses import asdict, dataclass, field

import numpy as np
import torch
import torch.nn.functional as F
from torch import Tensor

from ..corpus.align import align_spans
from ..corpus.labels import decode_labels, label_set, spans_to_mentions, to_label_sequence
from ..corpus.types import AnnotatedSentence, Corpus, EventClass, EventMention, Story
from ..errors import ConfigError
from ..evaluation import EXACT_SPAN, MatchCriterion, evaluate
from .config import TaggerConfig
from .crf import crf_decode, crf_neg_log_likelihood
from .model import CHAR_PAD_LEN, TaggerNet
from .vocab import Vocabulary, build_embedding_matrix, load_embedding_table

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "storyevents-tagger-v1"


def set_seed(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)


@dataclass
class Instance:
    story_id: str
    sentence_index: int | None  # None for document-context sequences
    view: AnnotatedSentence  # the tokens/labels the model sees
    word_ids: Tensor
    char_ids: Tensor
    labels: Tensor


@dataclass
class TrainedTagger:
    net: TaggerNet
    config: TaggerConfig
    word_vocab: Vocabulary
    char_vocab: Vocabulary
    labels: list[str]
    history: list[dict] = field(default_factory=list)

    def predict_sentence(self, sentence: AnnotatedSentence) -> list[EventMention]:
        return predict_tags(self, sentence)

    def predict_story(self, story: Story) -> dict[int, list[EventMention]]:
        """Per-sentence predictions; document mode runs the whole story at once."""
        if not self.config.use_document_context:
            return {i: predict_tags(self, s) for i, s in enumerate(story.sentences)}
        view = _story_view(story)
        mentions = predict_tags(self, view)
        out: dict[int, list[EventMention]] = {i: [] for i in range(len(story.sentences))}
        for mention in mentions:
            for i, sentence in enumerate(story.sentences):
                if sentence.char_offset <= mention.span.start_char < sentence.end_offset:
                    out[i].append(mention)
                    break
        return out


def _story_view(story: Story) -> AnnotatedSentence:
    """All sentences of a story concatenated into one labeling sequence."""
    tokens: list = []
    mentions: list[EventMention] = []
    for sentence in story.sentences:
        tokens.extend(sentence.tokens)
        mentions.extend(sentence.mentions)
    return AnnotatedSentence(
        text=story.text, char_offset=0, tokens=tuple(tokens), mentions=tuple(mentions)
    )


def _encode_tokens(
    view: AnnotatedSentence, word_vocab: Vocabulary, char_vocab: Vocabulary
) -> tuple[Tensor, Tensor]:
    words = [surface.lower() for surface, _, _ in view.tokens]
    word_ids = torch.tensor([word_vocab.index(w) for w in words], dtype=torch.long)
    width = max(CHAR_PAD_LEN, max((len(w) for w in words), default=CHAR_PAD_LEN))
    char_ids = torch.zeros(len(words), width, dtype=torch.long)
    for i, word in enumerate(words):
        for j, ch in enumerate(word):
            char_ids[i, j] = char_vocab.index(ch)
    return word_ids, char_ids


def _gold_tensor(view: AnnotatedSentence, config: TaggerConfig, labels: list[str]) -> Tensor:
    strings = to_label_sequence(
        align_spans(view), config.label_scheme, single_token=config.single_token_spans
    )
    if config.binary_head:
        return torch.tensor([0.0 if s == "O" else 1.0 for s in strings])
    index = {label: i for i, label in enumerate(labels)}
    return torch.tensor([index[s] for s in strings], dtype=torch.long)


def build_instances(
    corpus: Corpus,
    split: str,
    config: TaggerConfig,
    word_vocab: Vocabulary,
    char_vocab: Vocabulary,
    labels: list[str],
) -> list[Instance]:
    instances = []
    if config.use_document_context:
        for story in corpus.stories_in_split(split):
            view = _story_view(story)
            word_ids, char_ids = _encode_tokens(view, word_vocab, char_vocab)
            instances.append(
                Instance(story.id, None, view, word_ids, char_ids,
                         _gold_tensor(view, config, labels))
            )
    else:
        for story, index, sentence in corpus.iter_sentences(split):
            word_ids, char_ids = _encode_tokens(sentence, word_vocab, char_vocab)
            instances.append(
                Instance(story.id, index, sentence, word_ids, char_ids,
                         _gold_tensor(sentence, config, labels))
            )
    return instances


def _instance_loss(net: TaggerNet, instance: Instance) -> Tensor:
    config = net.config
    gold = instance.labels
    length = min(instance.word_ids.shape[0], config.max_sequence_length)
    emissions = net.emissions(instance.word_ids, instance.char_ids)
    gold = gold[:length]
    if config.use_crf:
        return crf_neg_log_likelihood(emissions, net.transitions, gold)
    if config.binary_head:
        return F.binary_cross_entropy_with_logits(emissions, gold, reduction="sum")
    return F.cross_entropy(emissions, gold, reduction="sum")


def _decode_emissions(net: TaggerNet, emissions: Tensor, labels: list[str]) -> list[str]:
    config = net.config
    if config.use_crf:
        return [labels[i] for i in crf_decode(emissions, net.transitions)]
    if config.binary_head:
        flags = (torch.sigmoid(emissions) > 0.5).tolist()
        out = []
        previous = False
        for flag in flags:
            out.append(("I-EVT" if previous else "B-EVT") if flag else "O")
            previous = flag
        return out
    return [labels[int(i)] for i in emissions.argmax(dim=1)]


def predict_tags(trained: TrainedTagger, view: AnnotatedSentence) -> list[EventMention]:
    """Decode one token sequence into character-offset mentions.

    In detect mode spans carry no class; they are emitted as OTHERS and are
    meant to be scored span-only.
    """
    if not view.tokens:
        return []
    net = trained.net
    net.eval()
    with torch.no_grad():
        word_ids, char_ids = _encode_tokens(view, trained.word_vocab, trained.char_vocab)
        emissions = net.emissions(word_ids, char_ids)
        strings = _decode_emissions(net, emissions, trained.labels)
    truncated = view
    if len(strings) < len(view.tokens):
        truncated = AnnotatedSentence(
            view.text, view.char_offset, view.tokens[: len(strings)], view.mentions
        )
    spans = decode_labels(strings)
    return spans_to_mentions(truncated, spans, default_class=EventClass.OTH)


def _dev_metric(trained: TrainedTagger, corpus: Corpus) -> float:
    predictions = {}
    for story in corpus.stories_in_split("dev"):
        for index, mentions in trained.predict_story(story).items():
            predictions[(story.id, index)] = mentions
    if trained.config.label_scheme == "detect":
        result = evaluate(corpus, predictions, MatchCriterion(EXACT_SPAN), split="dev")
        return result.detection.f1
    result = evaluate(corpus, predictions, MatchCriterion(), split="dev")
    return result.macro_f1


def train_tagger(
    config: TaggerConfig,
    corpus: Corpus,
    progress: bool = False,
) -> TrainedTagger:
    """Train on the corpus train split, keeping the best dev-metric checkpoint."""
    if not corpus.stories_in_split("train"):
        raise ConfigError("corpus has no train split assigned")
    set_seed(config.seed)

    word_vocab = Vocabulary.from_corpus(corpus, "train")
    char_vocab = Vocabulary.chars_from_corpus(corpus, "train")
    labels = label_set(config.label_scheme)

    table = load_embedding_table(config.embedding_file) if config.embedding_file else None
    pretrained = build_embedding_matrix(word_vocab, config.embedding_dim, table, config.seed)

    net = TaggerNet(config, len(word_vocab), len(char_vocab), len(labels), pretrained)
    trained = TrainedTagger(net, config, word_vocab, char_vocab, labels)

    instances = build_instances(corpus, "train", config, word_vocab, char_vocab, labels)
    has_dev = bool(corpus.stories_in_split("dev"))
    optimizer = torch.optim.Adam(net.parameters(), lr=config.learning_rate)

    best_metric = -1.0
    best_state = copy.deepcopy(net.state_dict())
    order = list(range(len(instances)))
    rng = random.Random(config.seed)

    for epoch in range(config.epochs):
        net.train()
        rng.shuffle(order)
        total_loss = 0.0
        for batch_start in range(0, len(order), config.batch_size):
            batch = order[batch_start : batch_start + config.batch_size]
            optimizer.zero_grad()
            loss = torch.stack([_instance_loss(net, instances[i]) for i in batch]).sum()
            loss.backward()
            optimizer.step()
            total_loss += float(loss.item())

        entry = {"epoch": epoch, "loss": total_loss}
        if has_dev and (epoch % config.eval_every == 0 or epoch == config.epochs - 1):
            metric = _dev_metric(trained, corpus)
            entry["dev_metric"] = metric
            if metric > best_metric:
                best_metric = metric
                best_state = copy.deepcopy(net.state_dict())
        trained.history.append(entry)
        if progress:
            log.info("epoch %d loss %.4f dev %.4f", epoch, total_loss, entry.get("dev_metric", float("nan")))

    if has_dev:
        net.load_state_dict(best_state)
    return trained


def save_tagger(trained: TrainedTagger, path: str) -> None:
    torch.save(
        {
            "format": CHECKPOINT_FORMAT,
            "config": asdict(trained.config),
            "word_itos": trained.word_vocab.itos,
            "char_itos": trained.char_vocab.itos,
            "labels": trained.labels,
            "state_dict": trained.net.state_dict(),
            "history": trained.history,
        },
        path,
    )


def load_tagger(path: str) -> TrainedTagger:
    payload = torch.load(path, weights_only=False)
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise ConfigError(f"not a tagger checkpoint: {path}")
    config = TaggerConfig(**payload["config"])
    word_vocab = Vocabulary.__new__(Vocabulary)
    word_vocab.itos = payload["word_itos"]
    word_vocab.stoi = {t: i for i, t in enumerate(word_vocab.itos)}
    char_vocab = Vocabulary.__new__(Vocabulary)
    char_vocab.itos = payload["char_itos"]
    char_vocab.stoi = {t: i for i, t in enumerate(char_vocab.itos)}
    net = TaggerNet(config, len(word_vocab), len(char_vocab), len(payload["labels"]))
    net.load_state_dict(payload["state_dict"])
    return TrainedTagger(net, config, word_vocab, char_vocab, payload["labels"], payload["history"])

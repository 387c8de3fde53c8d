"""Deterministic synthetic corpora for offline tests and demos.

``build_reference_corpus`` produces a 200-story corpus whose headline
statistics reproduce the released annotated dataset: 11,272 mentions with the
published per-class and per-split totals, 25 stories from each of the eight
sources, 10,259 sentences, ~174.5k tokens, and the published top-15 trigger
table including event rates. It is a stand-in for environments where the real
release is not on disk; everything is generated from a seed, so two calls are
byte-identical.

``build_toy_corpus`` is the same machinery at a few-hundred-mention scale for
fast training tests.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .brat import parse_brat
from .splits import split_corpus
from .types import SOURCES, Corpus, EventClass, Story

CMS, COM, CON, GA, LE, MOV, OTH = (
    EventClass.CMS,
    EventClass.COM,
    EventClass.CON,
    EventClass.GA,
    EventClass.LE,
    EventClass.MOV,
    EventClass.OTH,
)

# (surface, class, trigger count, event rate %) for the released corpus's
# fifteen most frequent triggers. Extra unlabeled occurrences are generated
# so each word's corpus-wide event rate rounds to the published percentage.
TOP_TRIGGERS = [
    ("said", COM, 1298, 96),
    ("asked", COM, 415, 98),
    ("went", MOV, 409, 95),
    ("came", MOV, 291, 82),
    ("told", COM, 190, 92),
    ("saw", GA, 179, 92),
    ("replied", COM, 170, 98),
    ("thought", CMS, 148, 81),
    ("took", GA, 142, 78),
    ("hearing", GA, 113, 92),
    ("saying", COM, 96, 67),
    ("heard", GA, 92, 74),
    ("brought", GA, 81, 86),
    ("returned", MOV, 76, 94),
    ("answered", COM, 75, 91),
]

# Lower-frequency trigger vocabulary per class; counts are spread evenly so
# none of these ever enters the top-15 table.
FILLER_TRIGGERS: dict[EventClass, list[str]] = {
    COM: [
        "announced", "called", "shouted", "whispered", "declared", "explained",
        "warned", "begged", "praised", "scolded", "promised", "thanked",
        "greeted", "complained", "muttered", "narrated", "proclaimed",
        "requested", "apologized", "informed", "urged", "pleaded", "advised",
        "reminded", "questioned", "responded", "exclaimed", "repeated",
        "boasted", "admitted",
    ],
    GA: [
        "ate", "drank", "slept", "met", "gave", "used", "tried", "helped",
        "watched", "played", "danced", "cooked", "cleaned", "washed",
        "carried", "lifted", "caught", "held", "found", "kept", "shared",
        "bought", "sold", "picked", "gathered", "counted", "opened", "closed",
        "built", "repaired", "painted", "dug", "fetched", "swept", "baked",
        "fed", "hunted", "fished", "bathed", "worked", "studied", "listened",
        "woke up",
    ],
    MOV: [
        "walked", "ran", "flew", "traveled", "arrived", "departed", "climbed",
        "crossed", "jumped", "rode", "sailed", "swam", "wandered", "marched",
        "hurried", "rushed", "crawled", "entered", "escaped", "followed",
        "descended", "galloped", "leaped", "strolled", "trotted",
    ],
    CMS: [
        "decided", "smiled", "laughed", "wanted", "knew", "remembered",
        "wondered", "feared", "loved", "hated", "hoped", "believed",
        "realized", "understood", "forgot", "imagined", "worried", "rejoiced",
        "admired", "trusted", "doubted", "dreamed", "grieved", "wept",
        "sighed",
    ],
    LE: [
        "born", "died", "killed", "married", "lived", "wounded", "hurt",
        "injured", "buried", "recovered", "healed", "survived", "grew",
        "bloomed", "engaged", "divorced", "passed away",
    ],
    OTH: [
        "rained", "snowed", "thundered", "burned", "glowed", "happened",
        "collapsed", "flooded", "vanished", "erupted", "sparkled", "rang",
        "cracked", "melted", "froze", "shattered", "rusted", "faded",
    ],
    CON: [
        "fought", "attacked", "battle", "struck", "quarreled", "wrestled",
        "argued", "invaded", "ambushed", "raided", "rebelled", "dueled",
        "clashed", "broke out",
    ],
}

# Published per-class (train, dev, test) mention totals of the release.
RELEASE_CLASS_SPLITS: dict[EventClass, tuple[int, int, int]] = {
    COM: (2052, 447, 957),
    GA: (1837, 325, 789),
    MOV: (1329, 294, 569),
    CMS: (849, 178, 501),
    LE: (314, 60, 161),
    OTH: (295, 55, 140),
    CON: (62, 30, 28),
}

NAMES = [
    "Raju", "Meena", "Birbal", "Akbar", "Tenali", "Rama", "Sita", "Gopal",
    "Lakshmi", "Vikram", "Chandu", "Radha", "Mohan", "Kavita", "Arjun",
    "Devi", "Hari", "Ganga", "Kiran", "Amar",
]
NOUNS = [
    "village", "forest", "river", "palace", "market", "tiger", "crow",
    "farmer", "pot", "tree", "mango", "temple", "road", "field", "mountain",
    "lamp", "basket", "well", "garden", "bridge", "cart", "drum", "kitchen",
    "courtyard", "parrot", "monkey", "elephant", "peacock", "lotus", "hut",
]
ADJECTIVES = [
    "old", "wise", "clever", "young", "hungry", "golden", "quiet", "brave",
    "gentle", "proud", "humble", "bright", "heavy", "little", "shady",
]

_PUNCT = {",", ".", "!", "?"}


def _assert_vocab_disjoint() -> None:
    triggers: set[str] = set()
    for word, _, _, _ in TOP_TRIGGERS:
        triggers.add(word)
    for words in FILLER_TRIGGERS.values():
        for phrase in words:
            assert phrase not in triggers, phrase
            triggers.add(phrase)
    template_words = {
        "then", "the", "near", "while", "waited", "under", "by", "and",
        "before", "of", "was", "lay", "had", "not", "about", "since", "that",
        "morning", "they", "say",
    }
    trigger_tokens = {tok for phrase in triggers for tok in phrase.split()}
    safe = {w.lower() for w in NAMES + NOUNS + ADJECTIVES} | template_words
    assert not (safe & trigger_tokens), sorted(safe & trigger_tokens)


_assert_vocab_disjoint()


@dataclass
class _Sentence:
    parts: list  # str, or (surface, EventClass) for a trigger slot


def _one_mention(rng, surface, cls) -> _Sentence:
    n, n2, n3, n4 = rng.sample(NOUNS, 4)
    return _Sentence([
        "Then", rng.choice(NAMES), (surface, cls), "the", rng.choice(ADJECTIVES),
        n, "near", "the", n2, "while", "the", n3, "waited", "under", "the",
        n4, ".",
    ])


def _two_mentions(rng, first, second) -> _Sentence:
    n, n2, n3, n4 = rng.sample(NOUNS, 4)
    return _Sentence([
        rng.choice(NAMES), first, "the", n, "by", "the", n2, ",", "and",
        rng.choice(NAMES), second, "the", rng.choice(ADJECTIVES), n3,
        "before", "the", n4, ".",
    ])


def _filler(rng) -> _Sentence:
    n, n2, n3 = rng.sample(NOUNS, 3)
    a, a2 = rng.sample(ADJECTIVES, 2)
    return _Sentence([
        "The", a, n, "of", "the", n2, "was", a2, "and", "quiet", "near",
        "the", n3, ".",
    ])


def _unlabeled(rng, word) -> _Sentence:
    return _Sentence([
        rng.choice(NAMES), "had", "not", word, "about", "the",
        rng.choice(ADJECTIVES), rng.choice(NOUNS), "since", "that", "morning",
        ",", "they", "say", ".",
    ])


def _class_streams(split_totals: dict[EventClass, tuple[int, int, int]], rng) -> dict[EventClass, list[str]]:
    """One shuffled surface per future mention, per class."""
    streams: dict[EventClass, list[str]] = {}
    for cls, per_split in split_totals.items():
        total = sum(per_split)
        surfaces: list[str] = []
        for word, word_cls, count, _ in TOP_TRIGGERS:
            if word_cls is cls:
                surfaces.extend([word] * min(count, total - len(surfaces)))
        remaining = total - len(surfaces)
        fillers = FILLER_TRIGGERS[cls]
        base, extra = divmod(max(remaining, 0), len(fillers))
        for i, word in enumerate(fillers):
            surfaces.extend([word] * (base + (1 if i < extra else 0)))
        assert len(surfaces) == total
        rng.shuffle(surfaces)
        streams[cls] = surfaces
    return streams


def _quota(total: int, n_stories: int, j: int) -> int:
    base, extra = divmod(total, n_stories)
    return base + (1 if j < extra else 0)


def _render(sentences: list[_Sentence], rng) -> tuple[str, list[tuple[int, int, str, EventClass]]]:
    """Join sentences into story text, recording trigger offsets."""
    chunks: list[str] = []
    pos = 0
    mentions: list[tuple[int, int, str, EventClass]] = []
    for i, sentence in enumerate(sentences):
        if i > 0:
            sep = "\n" if i % 12 == 0 else " "
            chunks.append(sep)
            pos += 1
        first = True
        for part in sentence.parts:
            text = part if isinstance(part, str) else part[0]
            if not first and text not in _PUNCT:
                chunks.append(" ")
                pos += 1
            chunks.append(text)
            if isinstance(part, tuple):
                mentions.append((pos, pos + len(text), text, part[1]))
            pos += len(text)
            first = False
    return "".join(chunks), mentions


def generate_brat_files(
    split_sizes: tuple[int, int, int] = (120, 20, 60),
    split_totals: dict[EventClass, tuple[int, int, int]] | None = None,
    total_sentences: int = 10259,
    seed: int = 0,
) -> list[tuple[str, str, str, str]]:
    """Generate (story_id, split, text_content, ann_content) tuples."""
    if split_totals is None:
        split_totals = RELEASE_CLASS_SPLITS
    rng = random.Random(seed)
    n_stories = sum(split_sizes)
    streams = _class_streams(split_totals, rng)
    cursors = {cls: 0 for cls in streams}

    # Unlabeled occurrences of the top triggers, dealt round-robin.
    extras: list[str] = []
    for word, _, count, rate in TOP_TRIGGERS:
        total_occurrences = round(count * 100 / rate)
        extras.extend([word] * (total_occurrences - count))
    per_story_extras: list[list[str]] = [[] for _ in range(n_stories)]
    for i, word in enumerate(extras):
        per_story_extras[i % n_stories].append(word)

    base_sentences, spare = divmod(total_sentences, n_stories)

    split_starts = (0, split_sizes[0], split_sizes[0] + split_sizes[1])
    out = []
    for k in range(n_stories):
        split_index = 2 if k >= split_starts[2] else (1 if k >= split_starts[1] else 0)
        split = ("train", "dev", "test")[split_index]
        j = k - split_starts[split_index]
        quotas = {
            cls: _quota(split_totals[cls][split_index], split_sizes[split_index], j)
            for cls in split_totals
        }

        drawn: dict[EventClass, list[str]] = {}
        for cls, need in quotas.items():
            drawn[cls] = streams[cls][cursors[cls] : cursors[cls] + need]
            cursors[cls] += need

        n_mentions = sum(quotas.values())
        s_target = base_sentences + (1 if k < spare else 0)
        min_fillers = 2 + len(per_story_extras[k])
        n_two = min(max(0, n_mentions - (s_target - min_fillers)), n_mentions // 2)

        remaining = {cls: list(words) for cls, words in drawn.items() if words}
        sentences: list[_Sentence] = []
        for _ in range(n_two):
            # Pair the two currently most frequent classes so a sentence never
            # holds two mentions of the same class.
            ordered = sorted(remaining, key=lambda c: len(remaining[c]), reverse=True)
            a, b = ordered[0], ordered[1]
            first = (remaining[a].pop(), a)
            second = (remaining[b].pop(), b)
            for cls in (a, b):
                if not remaining[cls]:
                    del remaining[cls]
            sentences.append(_two_mentions(rng, first, second))
        for cls, words in remaining.items():
            for word in words:
                sentences.append(_one_mention(rng, word, cls))
        for word in per_story_extras[k]:
            sentences.append(_unlabeled(rng, word))
        while len(sentences) < s_target:
            sentences.append(_filler(rng))
        rng.shuffle(sentences)

        text, mention_records = _render(sentences, rng)
        mention_records.sort(key=lambda m: m[:2])
        ann_lines = [
            f"T{i}\t{cls.full_name} {start} {end}\t{surface}"
            for i, (start, end, surface, cls) in enumerate(mention_records, start=1)
        ]
        source = SOURCES[k % 8]
        story_id = f"{source}_{k:03d}"
        out.append((story_id, split, text, "".join(line + "\n" for line in ann_lines)))
    return out


def _files_to_corpus(files: list[tuple[str, str, str, str]]) -> Corpus:
    stories: list[Story] = []
    splits: dict[str, list[str]] = {"train": [], "dev": [], "test": []}
    for story_id, split, text, ann in files:
        stories.append(parse_brat(text, ann, story_id=story_id))
        splits[split].append(story_id)
    corpus = Corpus(stories=tuple(stories))
    return split_corpus(corpus, splits["train"], splits["dev"], splits["test"])


def build_reference_corpus(seed: int = 0) -> Corpus:
    """The full 200-story replica with release-matching statistics."""
    return _files_to_corpus(generate_brat_files(seed=seed))


TOY_CLASS_SPLITS: dict[EventClass, tuple[int, int, int]] = {
    COM: (30, 10, 12),
    GA: (26, 8, 10),
    MOV: (20, 6, 8),
    CMS: (14, 5, 6),
    LE: (6, 2, 3),
    OTH: (5, 2, 3),
    CON: (3, 2, 2),
}


def build_toy_corpus(seed: int = 0, split_sizes: tuple[int, int, int] = (8, 3, 4)) -> Corpus:
    """A small corpus (~180 mentions) for fast training tests."""
    files = generate_brat_files(
        split_sizes=split_sizes,
        split_totals=TOY_CLASS_SPLITS,
        total_sentences=14 * sum(split_sizes),
        seed=seed,
    )
    return _files_to_corpus(files)


def write_corpus_files(files: list[tuple[str, str, str, str]], directory) -> None:
    """Write .txt/.ann pairs plus splits/{train,dev,test}.txt manifests."""
    import os

    os.makedirs(os.path.join(directory, "splits"), exist_ok=True)
    manifests: dict[str, list[str]] = {"train": [], "dev": [], "test": []}
    for story_id, split, text, ann in files:
        with open(os.path.join(directory, f"{story_id}.txt"), "w", encoding="utf-8") as f:
            f.write(text)
        with open(os.path.join(directory, f"{story_id}.ann"), "w", encoding="utf-8") as f:
            f.write(ann)
        manifests[split].append(story_id)
    for split, ids in manifests.items():
        path = os.path.join(directory, "splits", f"{split}.txt")
        with open(path, "w", encoding="utf-8") as f:
            f.write("".join(story_id + "\n" for story_id in ids))

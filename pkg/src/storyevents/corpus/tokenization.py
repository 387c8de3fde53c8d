"""Deterministic rule-based tokenizer and sentence splitter.

Both functions are pure: the same input always yields byte-identical output.

Tokenizer rules: words are maximal runs of word characters, with a single
internal apostrophe allowed ("don't" stays whole); every other non-space
character becomes its own token. Hyphenated words therefore split into
three tokens.

Sentence rules: a sentence ends at a run of ``.!?`` (plus any closing
quotes/brackets) followed by whitespace and an upper-case letter, digit, or
opening quote. A short abbreviation guard list and single-initial detection
("J. Smith") suppress false boundaries. Newlines are hard boundaries.
"""
from __future__ import annotations

import re

from .types import Token

_TOKEN_RE = re.compile(r"\w+(?:['’]\w+)?|[^\w\s]")

# Trailer of closing quotes/brackets that stay attached to the sentence.
_CLOSERS = "\"'’”)]"

_TERMINALS = ".!?"

_ABBREVIATIONS = frozenset(
    {
        "mr", "mrs", "ms", "dr", "st", "prof", "rev", "hon", "sr", "jr",
        "etc", "vs", "eg", "ie", "cf", "no", "pp", "vol", "fig", "al",
    }
)


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into (surface, start_char, end_char) tokens."""
    return [(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def _word_before(text: str, index: int) -> str:
    """The alphabetic run immediately preceding ``index``."""
    end = index
    start = end
    while start > 0 and text[start - 1].isalpha():
        start -= 1
    return text[start:end]


def _is_boundary(text: str, punct_start: int, after: int) -> bool:
    """Does the terminal run starting at punct_start end a sentence?"""
    rest = text[after:]
    stripped = rest.lstrip()
    if not stripped:
        return True
    if rest[0] == "\n" or (rest and rest[0] != stripped[0] and "\n" in rest[: len(rest) - len(stripped)]):
        return True
    if rest == stripped:
        # No whitespace after the punctuation: not a boundary ("3.5", "e.g.x").
        return False
    head = stripped[0]
    if not (head.isupper() or head.isdigit() or head in "\"'‘“("):
        return False
    if text[punct_start] == ".":
        word = _word_before(text, punct_start)
        if word.lower() in _ABBREVIATIONS:
            return False
        if len(word) == 1 and word.isupper():
            return False
    return True


def split_sentences(text: str) -> list[tuple[str, int]]:
    """Split ``text`` into (sentence_text, char_offset) pairs.

    Offsets index the original text; inter-sentence whitespace belongs to no
    sentence, so ``text[offset:offset + len(sentence)] == sentence`` always
    holds.
    """
    boundaries: list[int] = []  # exclusive end of each sentence
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            boundaries.append(i)
            i += 1
            continue
        if ch in _TERMINALS:
            punct_start = i
            while i < n and text[i] in _TERMINALS:
                i += 1
            while i < n and text[i] in _CLOSERS:
                i += 1
            if i >= n or _is_boundary(text, punct_start, i):
                boundaries.append(i)
            continue
        i += 1
    boundaries.append(n)

    sentences: list[tuple[str, int]] = []
    start = 0
    for end in boundaries:
        raw = text[start:end]
        stripped = raw.strip()
        if stripped:
            offset = start + raw.index(stripped[0])
            sentences.append((text[offset : offset + len(stripped)], offset))
        start = end
    return sentences

"""Shared text preprocessing: sentences, tokens, stems and syllables."""
from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources
from typing import Iterable

from .porter import porter_stem

__all__ = [
    "ABBREVIATIONS",
    "count_syllables",
    "default_stopwords",
    "porter_stem",
    "read_word_file",
    "split_sentences",
    "stem_tokens",
    "tokenize",
    "words_for_readability",
]

# Lowercase, without the trailing period. Single letters are handled separately.
ABBREVIATIONS = frozenset(
    """
    al approx cf dr e.g eg etc eq eqs fig figs i.e ie jr mr mrs ms no nos
    prof resp sec sect sr st vol vs viz
    """.split()
)

_TERMINATOR = re.compile(r"[.!?]+(?=\s|$)")
_TOKEN = re.compile(r"[^\W_]+")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")


def _ends_with_abbreviation(prefix: str) -> bool:
    last = prefix.rsplit(None, 1)[-1] if prefix.strip() else ""
    last = last.lstrip("([{\"'").lower()
    if len(last) == 1 and last.isalpha():
        return True
    return last in ABBREVIATIONS


def split_sentences(text: str) -> list[str]:
    """Split on ``.``, ``!`` or ``?`` followed by whitespace or end of text.

    A period after a single-letter initial ("J.") or a listed abbreviation
    ("e.g.", "Fig.") does not end a sentence. Terminators are not part of
    the returned spans, which are whitespace-stripped and never empty.
    """
    sentences = []
    start = 0
    for match in _TERMINATOR.finditer(text):
        if match.group() == "." and _ends_with_abbreviation(text[start : match.start()]):
            continue
        span = text[start : match.start()].strip()
        if span:
            sentences.append(span)
        start = match.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def tokenize(
    text: str,
    drop_single_char: bool = True,
    stopwords: Iterable[str] | None = None,
) -> list[str]:
    """Lowercase word tokens split on every non-alphanumeric character.

    Tokens containing a digit are dropped entirely (formula variables,
    years, numbered items).
    """
    tokens = [t for t in _TOKEN.findall(text.lower()) if not any(c.isdigit() for c in t)]
    if drop_single_char:
        tokens = [t for t in tokens if len(t) > 1]
    if stopwords is not None:
        stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
        tokens = [t for t in tokens if t not in stop]
    return tokens


def stem_tokens(tokens: Iterable[str]) -> list[str]:
    return [porter_stem(t) for t in tokens]


@lru_cache(maxsize=65536)
def count_syllables(word: str) -> int:
    """Vowel-group syllable estimate.

    Counts maximal runs of a/e/i/o/u/y, subtracts one for a final silent
    ``e`` (but not for consonant + ``le``), and never returns less than 1.
    """
    word = word.lower()
    n = len(_VOWEL_GROUP.findall(word))
    if word.endswith("e") and not (
        word.endswith("le") and len(word) >= 3 and word[-3] not in "aeiouy"
    ):
        n -= 1
    return max(n, 1)


_WORD_CHUNK = re.compile(r"[a-z]+(?:['’-][a-z]+)*")


def words_for_readability(sentence: str) -> list[str]:
    """Whitespace-delimited alphabetic words of one sentence, lowercased.

    Surrounding punctuation is stripped; internal hyphens and apostrophes
    are kept so "state-of-the-art" counts as one word. Chunks containing
    anything else (digits, symbols) are not words.
    """
    words = []
    for chunk in sentence.lower().split():
        chunk = chunk.strip(".,;:!?\"'()[]{}<>“”‘’*")
        if chunk and _WORD_CHUNK.fullmatch(chunk):
            words.append(chunk)
    return words


def read_word_file(path) -> list[str]:
    """Lines of a word-per-line file, lowercased, without blanks or ``#`` comments."""
    with open(path, encoding="utf-8") as fh:
        return _parse_word_lines(fh)


def _parse_word_lines(lines) -> list[str]:
    words = []
    for line in lines:
        line = line.split("#", 1)[0].strip().lower()
        if line:
            words.append(line)
    return words


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    text = resources.files("peerscope.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(_parse_word_lines(text.splitlines()))

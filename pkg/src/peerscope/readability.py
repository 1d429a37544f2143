"""Flesch Reading Ease, New Dale-Chall and jargon proportions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import NoText
from .lexicons import WordList
from .textprep import count_syllables, split_sentences, tokenize, words_for_readability


@dataclass(frozen=True)
class FormulaConstants:
    fre_base: float = 206.835
    fre_sentence_length: float = 1.015
    fre_syllables_per_word: float = 84.6
    ndc_difficult: float = 15.79
    ndc_sentence_length: float = 0.0496
    ndc_threshold: float = 0.05
    ndc_adjustment: float = 3.6365


CONSTANTS = FormulaConstants()


@dataclass(frozen=True)
class TextCounts:
    n_words: int
    n_sentences: int
    n_syllables: int
    words: tuple[str, ...]


@dataclass(frozen=True)
class ReadabilityScores:
    fre: float
    ndc: float
    jargon_general: float
    jargon_science_specific: float
    jargon_ai: float
    n_words: int
    n_sentences: int
    n_syllables: int
    n_difficult: int


def word_syllables(word: str) -> int:
    # hyphenated compounds are counted part by part
    return sum(count_syllables(part.replace("'", "").replace("’", "")) for part in word.split("-"))


def text_counts(text: str) -> TextCounts:
    words: list[str] = []
    n_sentences = 0
    for sentence in split_sentences(text):
        found = words_for_readability(sentence)
        if found:
            n_sentences += 1
            words.extend(found)
    if not words:
        raise NoText("no words in text")
    return TextCounts(
        n_words=len(words),
        n_sentences=n_sentences,
        n_syllables=sum(word_syllables(w) for w in words),
        words=tuple(words),
    )


def fre_from_counts(n_words: int, n_sentences: int, n_syllables: int, c: FormulaConstants = CONSTANTS) -> float:
    if n_words < 1:
        raise NoText("no words in text")
    return (
        c.fre_base
        - c.fre_sentence_length * (n_words / n_sentences)
        - c.fre_syllables_per_word * (n_syllables / n_words)
    )


def ndc_from_counts(n_words: int, n_sentences: int, n_difficult: int, c: FormulaConstants = CONSTANTS) -> float:
    if n_words < 1:
        raise NoText("no words in text")
    frac = n_difficult / n_words
    score = c.ndc_difficult * frac + c.ndc_sentence_length * (n_words / n_sentences)
    if frac > c.ndc_threshold:
        score += c.ndc_adjustment
    return score


def fre(text: str) -> float:
    counts = text_counts(text)
    return fre_from_counts(counts.n_words, counts.n_sentences, counts.n_syllables)


def count_difficult(words: Sequence[str], common: WordList) -> int:
    return sum(1 for w in words if w not in common)


def ndc(text: str, common: WordList) -> float:
    counts = text_counts(text)
    return ndc_from_counts(counts.n_words, counts.n_sentences, count_difficult(counts.words, common))


def jargon_ratio(tokens: Sequence[str], jargon: WordList) -> float:
    """Fraction of tokens that belong to the jargon list."""
    if not tokens:
        raise NoText("empty token stream")
    return sum(1 for t in tokens if t in jargon) / len(tokens)


def readability_scores(
    text: str,
    common: WordList,
    general_jargon: WordList,
    science_common: WordList,
    ai_jargon: WordList,
) -> ReadabilityScores:
    counts = text_counts(text)
    n_difficult = count_difficult(counts.words, common)
    tokens = tokenize(text, drop_single_char=True)
    return ReadabilityScores(
        fre=fre_from_counts(counts.n_words, counts.n_sentences, counts.n_syllables),
        ndc=ndc_from_counts(counts.n_words, counts.n_sentences, n_difficult),
        jargon_general=jargon_ratio(tokens, general_jargon),
        jargon_science_specific=jargon_ratio(tokens, science_common),
        jargon_ai=jargon_ratio(tokens, ai_jargon),
        n_words=counts.n_words,
        n_sentences=counts.n_sentences,
        n_syllables=counts.n_syllables,
        n_difficult=n_difficult,
    )

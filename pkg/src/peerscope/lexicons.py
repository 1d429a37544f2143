"""Word-norm tables and flat word lists."""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError
from .textprep import read_word_file

log = logging.getLogger(__name__)

# Frequency norms are stored as log(count + 1) with this base.
LOG_BASE = "e"


class NormKind(str, enum.Enum):
    LOG_FREQUENCY = "log_frequency"
    CONCRETENESS = "concreteness"
    AGE_OF_ACQUISITION = "aoa"


class ListTag(str, enum.Enum):
    NDC_COMMON = "ndc_common"
    GENERAL_SCIENCE_JARGON = "general_science_jargon"
    SCIENCE_SPECIFIC_COMMON = "science_specific_common"
    AI_JARGON = "ai_jargon"
    STOPWORDS = "stopwords"


@dataclass(frozen=True)
class WordList:
    words: frozenset[str]
    tag: ListTag
    source: str = ""

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class PsycholingLexicon:
    entries: dict[str, float]
    kind: NormKind
    source: str = ""

    def lookup(self, word: str) -> float | None:
        return self.entries.get(word.lower())

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def load_wordlist(path: str | Path, tag: ListTag | str) -> WordList:
    try:
        words = frozenset(read_word_file(path))
    except OSError as exc:
        raise DataError(f"cannot read word list {path}: {exc}") from exc
    if not words:
        raise DataError(f"word list {path} is empty")
    return WordList(words=words, tag=ListTag(tag), source=str(path))


def wordlist_from_words(words, tag: ListTag | str) -> WordList:
    words = frozenset(w.strip().lower() for w in words if w.strip())
    if not words:
        raise DataError("word list is empty")
    return WordList(words=words, tag=ListTag(tag))


def _parse_value(raw: str) -> float | None:
    try:
        value = float(raw)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def load_psycholing_lexicon(path: str | Path, kind: NormKind | str) -> PsycholingLexicon:
    """Load a ``word<TAB>value`` table.

    The first row is treated as a header when its value field is not
    numeric. Later non-numeric rows are skipped with a warning, and the
    first occurrence of a duplicated word wins. Frequency counts are
    stored as ``log(count + 1)``.
    """
    kind = NormKind(kind)
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read lexicon {path}: {exc}") from exc

    entries: dict[str, float] = {}
    bad = 0
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        word = fields[0].strip().lower()
        value = _parse_value(fields[1].strip()) if len(fields) > 1 else None
        if value is None:
            if lineno > 1:
                log.warning("%s:%d: skipping row with non-numeric value", path, lineno)
                bad += 1
            continue
        if not word or word in entries:
            continue
        if kind is NormKind.LOG_FREQUENCY:
            if value < 0:
                log.warning("%s:%d: skipping negative frequency count", path, lineno)
                bad += 1
                continue
            value = math.log1p(value)
        entries[word] = value
    if not entries:
        raise DataError(f"lexicon {path} has no usable rows")
    return PsycholingLexicon(entries=entries, kind=kind, source=str(path))


def lookup(lex: PsycholingLexicon, word: str) -> float | None:
    return lex.lookup(word)

"""Token/type counts and psycholinguistic averages for one section."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import NoCoverage, NoText
from .lexicons import NormKind, PsycholingLexicon

# Sections whose lexicon coverage falls below this are left out of comparisons.
DEFAULT_MIN_COVERAGE = 0.5


@dataclass(frozen=True)
class LexicalStats:
    n_tokens: int
    n_types: int
    ttr: float


@dataclass(frozen=True)
class PsychAverage:
    kind: NormKind
    mean_over_tokens: float
    mean_over_types: float
    coverage: float


def lexical_stats(tokens: Sequence[str]) -> LexicalStats:
    if not tokens:
        raise NoText("empty token stream")
    n_types = len(set(tokens))
    return LexicalStats(n_tokens=len(tokens), n_types=n_types, ttr=n_types / len(tokens))


def psych_averages(tokens: Sequence[str], lex: PsycholingLexicon) -> PsychAverage:
    """Mean norm value over covered token occurrences and over covered types.

    Out-of-vocabulary tokens are skipped; ``coverage`` is the fraction of
    token occurrences that were found.
    """
    if not tokens:
        raise NoText("empty token stream")
    found = [v for v in (lex.lookup(t) for t in tokens) if v is not None]
    if not found:
        raise NoCoverage(f"no token found in {lex.kind.value} lexicon")
    type_values = [v for v in (lex.lookup(t) for t in sorted(set(tokens))) if v is not None]
    return PsychAverage(
        kind=lex.kind,
        mean_over_tokens=sum(found) / len(found),
        mean_over_types=sum(type_values) / len(type_values),
        coverage=len(found) / len(tokens),
    )

"""tf-idf document vectors and pairwise cosine similarity.

Weights are raw term counts times the smoothed idf
``ln((1 + N) / (1 + df)) + 1``, L2-normalised per document.
"""
from __future__ import annotations

import enum
import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy import sparse

from .corpus import Corpus, Manuscript, Outcome, Section
from .errors import DataError
from .parallel import ordered_map
from .textprep import default_stopwords, stem_tokens, tokenize

log = logging.getLogger(__name__)

TFIDF_VARIANT = "raw count x (ln((1+N)/(1+df)) + 1), L2-normalised"


class PairCategory(str, enum.Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    MIXED = "mixed"


def categorize_pair(a: Outcome, b: Outcome) -> PairCategory:
    if a is Outcome.UNKNOWN or b is Outcome.UNKNOWN:
        raise ValueError("cannot categorize a pair with an unknown outcome")
    if a is b:
        return PairCategory.ACCEPTED if a is Outcome.ACCEPTED else PairCategory.REJECTED
    return PairCategory.MIXED


def section_stems(text: str, stopwords=None) -> list[str]:
    """Lowercase, drop punctuation, single characters and stopwords, then stem."""
    if stopwords is None:
        stopwords = default_stopwords()
    return stem_tokens(tokenize(text, drop_single_char=True, stopwords=stopwords))


@dataclass(frozen=True)
class TfIdfModel:
    vocabulary: dict[str, int]
    idf: np.ndarray
    n_docs: int
    section: Section | None = None
    min_df: int = 1

    @property
    def terms(self) -> list[str]:
        return sorted(self.vocabulary, key=self.vocabulary.__getitem__)


@dataclass(frozen=True)
class DocVector:
    indices: tuple[int, ...]
    weights: tuple[float, ...]

    @property
    def is_empty(self) -> bool:
        return not self.indices

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.indices, self.weights))


def fit_tfidf_tokens(docs: Sequence[Sequence[str]], min_df: int = 1, section: Section | None = None) -> TfIdfModel:
    """Fit vocabulary and idf on already-preprocessed documents.

    Empty documents do not count towards N.
    """
    usable = [d for d in docs if d]
    if len(docs) - len(usable):
        log.warning("tf-idf: %d empty documents excluded", len(docs) - len(usable))
    if len(usable) < 2:
        raise DataError(f"tf-idf needs at least 2 non-empty documents, got {len(usable)}")
    df = Counter()
    for doc in usable:
        df.update(set(doc))
    n = len(usable)
    terms = sorted(t for t, c in df.items() if c >= min_df)
    vocabulary = {t: i for i, t in enumerate(terms)}
    idf = np.array([math.log((1 + n) / (1 + df[t])) + 1.0 for t in terms], dtype=float)
    return TfIdfModel(vocabulary=vocabulary, idf=idf, n_docs=n, section=section, min_df=min_df)


def fit_tfidf(
    corpus: Corpus | Iterable[Manuscript],
    section: Section | str,
    min_df: int = 1,
    stopwords=None,
) -> TfIdfModel:
    section = Section(section)
    docs = [section_stems(m.section(section), stopwords) for m in corpus]
    return fit_tfidf_tokens(docs, min_df=min_df, section=section)


def vectorize(model: TfIdfModel, tokens: Sequence[str]) -> DocVector:
    """tf-idf weights for one document; out-of-vocabulary stems are ignored."""
    counts = Counter(t for t in tokens if t in model.vocabulary)
    if not counts:
        return DocVector((), ())
    weighted = sorted((model.vocabulary[t], c * float(model.idf[model.vocabulary[t]])) for t, c in counts.items())
    norm = math.sqrt(math.fsum(w * w for _, w in weighted))
    return DocVector(tuple(i for i, _ in weighted), tuple(w / norm for _, w in weighted))


def cosine(u: DocVector, v: DocVector) -> float | None:
    """Dot product of two normalised vectors; ``None`` if either is empty."""
    if u.is_empty or v.is_empty:
        return None
    wv = v.as_dict()
    return math.fsum(w * wv[i] for i, w in zip(u.indices, u.weights) if i in wv)


def to_matrix(vectors: Sequence[DocVector], n_terms: int) -> sparse.csr_matrix:
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for v in vectors:
        indices.extend(v.indices)
        data.extend(v.weights)
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.asarray(data, dtype=float), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(vectors), n_terms),
    )


@dataclass(frozen=True)
class SimilarityPair:
    id_a: str
    id_b: str
    cosine: float
    category: PairCategory


@dataclass
class PairStream:
    rows: Iterator[SimilarityPair]
    n_docs: int
    n_excluded_docs: int
    model: TfIdfModel


BLOCK_ROWS = 64

_STATE: dict = {}


def _init_state(matrix: sparse.csr_matrix) -> None:
    _STATE["matrix"] = matrix
    _STATE["transpose"] = matrix.T.tocsr()


def _similarity_block(bounds: tuple[int, int]) -> list[np.ndarray]:
    i0, i1 = bounds
    x = _STATE["matrix"]
    block = (x[i0:i1] @ _STATE["transpose"]).toarray()
    return [block[r, i0 + r + 1 :].copy() for r in range(i1 - i0)]


def _blocks(n: int, size: int) -> list[tuple[int, int]]:
    return [(i, min(i + size, n)) for i in range(0, n, size)]


def pairwise_similarity(
    corpus: Corpus,
    section: Section | str,
    min_df: int = 1,
    stopwords=None,
    workers: int = 1,
    model: TfIdfModel | None = None,
) -> PairStream:
    """Cosine similarity of every unordered pair of eligible manuscripts.

    The model is fitted on every manuscript with text in ``section``.
    A manuscript is eligible when its outcome is known and its vector is
    not empty. Rows come out sorted by ``(id_a, id_b)`` whatever the
    worker count.
    """
    section = Section(section)
    stems = {m.id: section_stems(m.section(section), stopwords) for m in corpus}
    if model is None:
        model = fit_tfidf_tokens([stems[m.id] for m in corpus], min_df=min_df, section=section)

    eligible: list[tuple[str, Outcome, DocVector]] = []
    for m in corpus:
        if m.outcome is Outcome.UNKNOWN:
            continue
        vec = vectorize(model, stems[m.id])
        if vec.is_empty:
            continue
        eligible.append((m.id, m.outcome, vec))
    eligible.sort(key=lambda e: e[0])
    n_excluded = len(corpus) - len(eligible)
    if n_excluded:
        log.info("similarity/%s: %d manuscripts not eligible (unknown outcome or empty)", section.value, n_excluded)

    ids = [e[0] for e in eligible]
    outcomes = [e[1] for e in eligible]
    matrix = to_matrix([e[2] for e in eligible], len(model.vocabulary))

    def rows() -> Iterator[SimilarityPair]:
        if len(ids) < 2:
            return
        results = ordered_map(
            _similarity_block,
            _blocks(len(ids), BLOCK_ROWS),
            workers=workers,
            initializer=_init_state,
            initargs=(matrix,),
        )
        i = 0
        for block in results:
            for sims in block:
                for offset, value in enumerate(sims.tolist()):
                    j = i + 1 + offset
                    yield SimilarityPair(ids[i], ids[j], value, categorize_pair(outcomes[i], outcomes[j]))
                i += 1

    return PairStream(rows=rows(), n_docs=len(ids), n_excluded_docs=n_excluded, model=model)

"""Reference disambiguation and bibliographic coupling.

Two cited references are taken to be the same work when they share the
publication year and the number of authors, and both the author string
and the title reach the fuzzy token-set threshold. Matches are closed
transitively with a disjoint-set union, so group identity does not depend
on the order in which references are compared.
"""
from __future__ import annotations

import logging
import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
from scipy import sparse

from .corpus import Corpus, Manuscript, Outcome, ReferenceRecord
from .parallel import ordered_map
from .similarity import PairCategory, categorize_pair

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.7

HISTOGRAM_BUCKETS = (
    ("1", 1, 1),
    ("2", 2, 2),
    ("3", 3, 3),
    ("4", 4, 4),
    ("5-9", 5, 9),
    ("10-19", 10, 19),
    ("20-29", 20, 29),
    ("30-39", 30, 39),
    ("40-49", 40, 49),
    ("50-59", 50, 59),
    ("60-80", 60, 80),
)
OVERFLOW_BUCKET = "81+"

_NON_ALNUM = re.compile(r"[^\w]|_")


def normalize_tokens(text: str) -> frozenset[str]:
    """Lowercased token set with punctuation treated as whitespace."""
    return frozenset(_NON_ALNUM.sub(" ", text.lower()).split())


def lcs_length(a: str, b: str) -> int:
    """Length of the longest common subsequence (bit-parallel, Hyyrö 2004)."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return 0
    masks: dict[str, int] = {}
    for i, ch in enumerate(a):
        masks[ch] = masks.get(ch, 0) | (1 << i)
    full = (1 << len(a)) - 1
    v = full
    for ch in b:
        u = v & masks.get(ch, 0)
        v = ((v + u) | (v - u)) & full
    return len(a) - bin(v).count("1")


def indel_distance(a: str, b: str) -> int:
    """Edit distance with insertions and deletions only."""
    return len(a) + len(b) - 2 * lcs_length(a, b)


def indel_similarity(a: str, b: str) -> float:
    total = len(a) + len(b)
    if total == 0:
        return 1.0
    return (total - indel_distance(a, b)) / total


def _ratio_from_tokens(ta: frozenset[str], tb: frozenset[str], cutoff: float = 0.0) -> float:
    if not ta and not tb:
        return 1.0
    if not ta or not tb:
        return 0.0
    inter = sorted(ta & tb)
    sect = " ".join(inter)
    sa = " ".join(inter + sorted(ta - tb))
    sb = " ".join(inter + sorted(tb - ta))
    candidates = ((sect, sa), (sect, sb), (sa, sb))
    if cutoff > 0.0:
        # indel similarity can never exceed 2*min(len)/(sum of lengths)
        bound = max(
            2 * min(len(x), len(y)) / (len(x) + len(y)) if x or y else 1.0 for x, y in candidates
        )
        if bound < cutoff:
            return 0.0
    return max(indel_similarity(x, y) for x, y in candidates)


def token_set_ratio(a: str, b: str) -> float:
    """Fuzzy similarity in [0, 1] that ignores token order and duplication."""
    return _ratio_from_tokens(normalize_tokens(a), normalize_tokens(b))


def author_string(ref: ReferenceRecord) -> str:
    return " ".join(ref.authors)


def match_references(r1: ReferenceRecord, r2: ReferenceRecord, threshold: float = DEFAULT_THRESHOLD) -> bool:
    return (
        r1.year == r2.year
        and r1.n_authors == r2.n_authors
        and token_set_ratio(author_string(r1), author_string(r2)) >= threshold
        and token_set_ratio(r1.title, r2.title) >= threshold
    )


class DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return
        if self.rank[ri] < self.rank[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        if self.rank[ri] == self.rank[rj]:
            self.rank[ri] += 1


_BLOCK_THRESHOLD: list[float] = [DEFAULT_THRESHOLD]


def _set_threshold(threshold: float) -> None:
    _BLOCK_THRESHOLD[0] = threshold


def _match_block(keys: list[tuple[frozenset, frozenset]]) -> list[tuple[int, int]]:
    """Matching pairs (local indices) inside one (year, author count) block."""
    threshold = _BLOCK_THRESHOLD[0]
    edges = []
    for i in range(len(keys)):
        ai, ti = keys[i]
        for j in range(i + 1, len(keys)):
            aj, tj = keys[j]
            if (
                _ratio_from_tokens(ai, aj, threshold) >= threshold
                and _ratio_from_tokens(ti, tj, threshold) >= threshold
            ):
                edges.append((i, j))
    return edges


def group_references(
    refs: Sequence[ReferenceRecord],
    threshold: float = DEFAULT_THRESHOLD,
    workers: int = 1,
) -> list[int]:
    """Dense group id for every reference, aligned with ``refs``.

    References are blocked by (year, author count) since no match can
    cross blocks. Within a block, references with identical author and
    title token sets are collapsed before the pairwise comparison. Group
    ids are numbered by first appearance in ``refs``.
    """
    # unique comparison keys per block; identical keys always match when threshold <= 1
    key_ids: dict[tuple, int] = {}
    key_of_ref: list[int] = []
    blocks: dict[tuple[int, int], list[int]] = defaultdict(list)
    keys: list[tuple[frozenset, frozenset]] = []
    collapse = threshold <= 1.0
    for n, ref in enumerate(refs):
        key = (normalize_tokens(author_string(ref)), normalize_tokens(ref.title))
        full = (ref.year, ref.n_authors) + key
        if not collapse:
            full = full + (n,)
        if full not in key_ids:
            key_ids[full] = len(keys)
            keys.append(key)
            blocks[ref.year, ref.n_authors].append(key_ids[full])
        key_of_ref.append(key_ids[full])

    block_list = [blocks[b] for b in sorted(blocks)]
    dsu = DisjointSet(len(keys))
    edge_lists = ordered_map(
        _match_block,
        ([keys[k] for k in members] for members in block_list),
        workers=workers,
        initializer=_set_threshold,
        initargs=(threshold,),
    )
    for members, edges in zip(block_list, edge_lists):
        for i, j in edges:
            dsu.union(members[i], members[j])

    dense: dict[int, int] = {}
    out = []
    for k in key_of_ref:
        root = dsu.find(k)
        if root not in dense:
            dense[root] = len(dense)
        out.append(dense[root])
    return out


def manuscript_groups(corpus: Iterable[Manuscript], threshold: float = DEFAULT_THRESHOLD, workers: int = 1) -> dict[str, frozenset[int]]:
    """Reference group-id set of every manuscript."""
    manuscripts = list(corpus)
    refs = [r for m in manuscripts for r in m.references]
    ids = group_references(refs, threshold=threshold, workers=workers)
    out = {}
    pos = 0
    for m in manuscripts:
        out[m.id] = frozenset(ids[pos : pos + len(m.references)])
        pos += len(m.references)
    return out


@dataclass(frozen=True)
class CouplingScore:
    intersection: int
    jaccard: float


def coupling_sets(a: frozenset[int] | set[int], b: frozenset[int] | set[int]) -> CouplingScore | None:
    """Shared-reference count and Jaccard index; ``None`` when both sets are empty."""
    union = len(a | b)
    if union == 0:
        return None
    inter = len(a & b)
    return CouplingScore(intersection=inter, jaccard=inter / union)


def coupling(m_a: Manuscript, m_b: Manuscript, groups: Mapping[str, frozenset[int]]) -> CouplingScore | None:
    return coupling_sets(groups[m_a.id], groups[m_b.id])


@dataclass(frozen=True)
class CouplingPair:
    id_a: str
    id_b: str
    intersection: int
    jaccard: float
    category: PairCategory | None


_MATRIX: dict = {}


def _init_incidence(matrix: sparse.csr_matrix) -> None:
    _MATRIX["m"] = matrix
    _MATRIX["t"] = matrix.T.tocsr()


def _coupling_block(bounds: tuple[int, int]) -> list[tuple[np.ndarray, np.ndarray]]:
    i0, i1 = bounds
    prod = (_MATRIX["m"][i0:i1] @ _MATRIX["t"]).tocsr()
    prod.sort_indices()
    out = []
    for r in range(i1 - i0):
        lo, hi = prod.indptr[r], prod.indptr[r + 1]
        cols = prod.indices[lo:hi]
        vals = prod.data[lo:hi]
        keep = cols > i0 + r
        out.append((cols[keep].copy(), vals[keep].astype(np.int64)))
    return out


def coupling_table(
    corpus: Corpus | Iterable[Manuscript],
    groups: Mapping[str, frozenset[int]],
    workers: int = 1,
    block_rows: int = 256,
) -> Iterator[CouplingPair]:
    """Every manuscript pair sharing at least one reference group, sorted by ids.

    Pairs involving a manuscript of unknown outcome carry ``category=None``.
    """
    manuscripts = sorted(corpus, key=lambda m: m.id)
    if len(manuscripts) < 2:
        return
    ids = [m.id for m in manuscripts]
    outcomes = [m.outcome for m in manuscripts]
    sizes = [len(groups[i]) for i in ids]
    n_groups = 1 + max((g for i in ids for g in groups[i]), default=-1)
    rows, cols = [], []
    for r, mid in enumerate(ids):
        for g in sorted(groups[mid]):
            rows.append(r)
            cols.append(g)
    incidence = sparse.csr_matrix(
        (np.ones(len(rows), dtype=np.int64), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=(len(ids), max(n_groups, 1)),
    )
    bounds = [(i, min(i + block_rows, len(ids))) for i in range(0, len(ids), block_rows)]
    i = 0
    for block in ordered_map(_coupling_block, bounds, workers=workers, initializer=_init_incidence, initargs=(incidence,)):
        for cols_j, inters in block:
            for j, inter in zip(cols_j.tolist(), inters.tolist()):
                union = sizes[i] + sizes[j] - inter
                a, b = outcomes[i], outcomes[j]
                category = None if Outcome.UNKNOWN in (a, b) else categorize_pair(a, b)
                yield CouplingPair(ids[i], ids[j], inter, inter / union, category)
            i += 1


def bucket_label(intersection: int) -> str | None:
    for label, lo, hi in HISTOGRAM_BUCKETS:
        if lo <= intersection <= hi:
            return label
    return OVERFLOW_BUCKET if intersection > HISTOGRAM_BUCKETS[-1][2] else None


def intersection_histogram(intersections: Iterable[int]) -> list[tuple[str, int]]:
    """Counts per intersection bucket; the overflow row appears only when used."""
    counts = dict.fromkeys([b[0] for b in HISTOGRAM_BUCKETS], 0)
    overflow = 0
    for x in intersections:
        label = bucket_label(x)
        if label == OVERFLOW_BUCKET:
            overflow += 1
        elif label is not None:
            counts[label] += 1
    out = list(counts.items())
    if overflow:
        out.append((OVERFLOW_BUCKET, overflow))
    return out

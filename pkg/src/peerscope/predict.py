"""Bag-of-words acceptance prediction and keyword importance.

Documents are tf-idf vectors over Porter stems. The classifier is an L2
regularised logistic regression fitted by full-batch gradient descent with
a backtracking (Armijo) line search, evaluated by stratified k-fold
cross-validation with macro-averaged precision, recall and F1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.special import expit

from .corpus import Corpus, Manuscript, Outcome, Section
from .errors import DataError
from .parallel import ordered_map
from .similarity import TfIdfModel, fit_tfidf_tokens, section_stems, to_matrix, vectorize

DEFAULT_LAMBDA = 1.0
DEFAULT_SEED = 42
DEFAULT_FOLDS = 10
MAX_ITER = 1000
GRAD_TOL = 1e-6
_ARMIJO_C = 1e-4
_MIN_STEP = 1e-20


@dataclass(frozen=True)
class FeatureMatrix:
    X: sparse.csr_matrix
    y: np.ndarray
    ids: tuple[str, ...]
    model: TfIdfModel

    @property
    def terms(self) -> list[str]:
        return self.model.terms


def build_features(
    corpus: Corpus | Iterable[Manuscript],
    section: Section | str,
    min_df: int = 1,
    stopwords=None,
    min_docs: int = 10,
) -> FeatureMatrix:
    """tf-idf rows for every manuscript with a known outcome and text in ``section``."""
    section = Section(section)
    docs, labels, ids = [], [], []
    for m in corpus:
        if m.outcome is Outcome.UNKNOWN:
            continue
        stems = section_stems(m.section(section), stopwords)
        if not stems:
            continue
        docs.append(stems)
        labels.append(1 if m.outcome is Outcome.ACCEPTED else 0)
        ids.append(m.id)
    if len(docs) < min_docs:
        raise DataError(f"prediction needs at least {min_docs} manuscripts with a known outcome, got {len(docs)}")
    if len(set(labels)) < 2:
        raise DataError("prediction needs both accepted and rejected manuscripts")
    model = fit_tfidf_tokens(docs, min_df=min_df, section=section)
    X = to_matrix([vectorize(model, d) for d in docs], len(model.vocabulary))
    return FeatureMatrix(X=X, y=np.asarray(labels, dtype=np.int8), ids=tuple(ids), model=model)


@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float
    lam: float
    n_iter: int = 0
    converged: bool = False
    loss_history: list[float] = field(default_factory=list, repr=False)

    def decision(self, X) -> np.ndarray:
        return np.asarray(X @ self.weights).ravel() + self.bias

    def predict_proba(self, X) -> np.ndarray:
        return expit(self.decision(X))

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(X) >= threshold).astype(np.int8)


def balanced_weights(y: np.ndarray) -> np.ndarray:
    """Per-sample weights inversely proportional to class frequency (mean 1)."""
    y = np.asarray(y)
    n = len(y)
    counts = {c: int(np.sum(y == c)) for c in (0, 1)}
    return np.array([n / (2.0 * counts[int(c)]) for c in y], dtype=float)


def loss_and_grad(w: np.ndarray, b: float, X, y: np.ndarray, lam: float, sample_weight=None):
    """Mean (weighted) logistic loss plus ``lam / (2n) * ||w||^2`` and its gradient."""
    n = X.shape[0]
    s = np.ones(n) if sample_weight is None else sample_weight
    z = np.asarray(X @ w).ravel() + b
    loss = (np.dot(s, np.logaddexp(0.0, z) - y * z) + 0.5 * lam * np.dot(w, w)) / n
    r = s * (expit(z) - y)
    grad_w = (np.asarray(X.T @ r).ravel() + lam * w) / n
    grad_b = float(np.sum(r)) / n
    return float(loss), grad_w, grad_b


def train_logreg(
    X,
    y,
    lam: float = DEFAULT_LAMBDA,
    seed: int = DEFAULT_SEED,
    sample_weight=None,
    max_iter: int = MAX_ITER,
    tol: float = GRAD_TOL,
) -> LogRegModel:
    """Gradient descent from zero weights.

    Stops once the gradient's largest component falls below ``tol`` or
    after ``max_iter`` iterations. ``seed`` is accepted for interface
    symmetry; the procedure itself is deterministic.
    """
    if lam <= 0:
        raise ValueError("regularization strength must be positive")
    data = X.data if sparse.issparse(X) else np.asarray(X)
    if not np.all(np.isfinite(data)):
        raise DataError("non-finite feature value")
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    s = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    w = np.zeros(X.shape[1])
    b = 0.0
    loss, gw, gb = loss_and_grad(w, b, X, y, lam, s)
    z = np.full(n, b)
    history = [loss]
    step = 1.0
    n_iter = 0
    while n_iter < max_iter:
        if max(float(np.max(np.abs(gw), initial=0.0)), abs(gb)) < tol:
            break
        # the loss along -grad only needs the projected direction in z-space
        dz = np.asarray(X @ gw).ravel() + gb
        ww, wg, gg = float(np.dot(w, w)), float(np.dot(w, gw)), float(np.dot(gw, gw))
        decrease = gg + gb * gb
        step = min(step * 2.0, 1e6)
        while True:
            zt = z - step * dz
            wt2 = ww - 2.0 * step * wg + step * step * gg
            trial = (np.dot(s, np.logaddexp(0.0, zt) - y * zt) + 0.5 * lam * wt2) / n
            if trial <= loss - _ARMIJO_C * step * decrease or step < _MIN_STEP:
                break
            step *= 0.5
        if trial > loss:
            break
        w = w - step * gw
        b = b - step * gb
        loss, gw, gb = loss_and_grad(w, b, X, y, lam, s)
        z = np.asarray(X @ w).ravel() + b
        history.append(loss)
        n_iter += 1
    converged = max(float(np.max(np.abs(gw), initial=0.0)), abs(gb)) < tol
    return LogRegModel(weights=w, bias=b, lam=lam, n_iter=n_iter, converged=converged, loss_history=history)


def macro_scores(y_true, y_pred) -> tuple[float, float, float]:
    """Macro precision, recall and F1 over classes 0 and 1 (0 when undefined)."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    ps, rs, fs = [], [], []
    for c in (0, 1):
        tp = int(np.sum((y_pred == c) & (y_true == c)))
        fp = int(np.sum((y_pred == c) & (y_true != c)))
        fn = int(np.sum((y_pred != c) & (y_true == c)))
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        ps.append(p)
        rs.append(r)
        fs.append(f)
    return sum(ps) / 2, sum(rs) / 2, sum(fs) / 2


def stratified_folds(y, k: int, seed: int) -> list[np.ndarray]:
    """Test indices of each fold; each class is shuffled and dealt round-robin."""
    y = np.asarray(y)
    counts = [int(np.sum(y == c)) for c in (0, 1)]
    if k < 2:
        raise DataError("need at least 2 folds")
    if k > min(counts):
        raise DataError(f"{k} folds requested but the smaller class has only {min(counts)} manuscripts")
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(y), dtype=np.int64)
    offset = 0
    for c in (0, 1):
        idx = rng.permutation(np.flatnonzero(y == c))
        assignment[idx] = (offset + np.arange(len(idx))) % k
        offset += len(idx)
    return [np.flatnonzero(assignment == f) for f in range(k)]


@dataclass(frozen=True)
class FoldScores:
    fold: int
    macro_precision: float
    macro_recall: float
    macro_f1: float


@dataclass(frozen=True)
class CvReport:
    folds: tuple[FoldScores, ...]
    seed: int
    k: int

    @property
    def mean_precision(self) -> float:
        return math.fsum(f.macro_precision for f in self.folds) / len(self.folds)

    @property
    def mean_recall(self) -> float:
        return math.fsum(f.macro_recall for f in self.folds) / len(self.folds)

    @property
    def mean_f1(self) -> float:
        return math.fsum(f.macro_f1 for f in self.folds) / len(self.folds)


_CV: dict = {}


def _init_cv(X, y, folds, lam, balanced) -> None:
    _CV.update(X=X, y=y, folds=folds, lam=lam, balanced=balanced)


def _run_fold(fold: int) -> FoldScores:
    X, y, folds = _CV["X"], _CV["y"], _CV["folds"]
    test = folds[fold]
    mask = np.ones(len(y), dtype=bool)
    mask[test] = False
    train = np.flatnonzero(mask)
    weights = balanced_weights(y[train]) if _CV["balanced"] else None
    model = train_logreg(X[train], y[train], lam=_CV["lam"], sample_weight=weights)
    p, r, f = macro_scores(y[test], model.predict(X[test]))
    return FoldScores(fold=fold, macro_precision=p, macro_recall=r, macro_f1=f)


def cross_validate(
    X,
    y,
    k: int = DEFAULT_FOLDS,
    seed: int = DEFAULT_SEED,
    lam: float = DEFAULT_LAMBDA,
    balanced: bool = False,
    workers: int = 1,
) -> CvReport:
    y = np.asarray(y)
    if sparse.issparse(X):
        X = X.tocsr()
    folds = stratified_folds(y, k, seed)
    scores = list(
        ordered_map(
            _run_fold,
            range(k),
            workers=min(workers, k),
            initializer=_init_cv,
            initargs=(X, y, folds, lam, balanced),
        )
    )
    return CvReport(folds=tuple(scores), seed=seed, k=k)


@dataclass(frozen=True)
class KeywordImportance:
    stem: str
    mean_acc: float
    mean_rej: float
    importance: float
    rank: int = 0


def _column_means(X: sparse.csr_matrix) -> list[float]:
    # exactly rounded column sums, so equal multisets give bit-equal means
    csc = X.tocsc()
    n = X.shape[0]
    return [
        math.fsum(csc.data[csc.indptr[j] : csc.indptr[j + 1]]) / n for j in range(X.shape[1])
    ]


def importance_from_features(fm: FeatureMatrix) -> list[KeywordImportance]:
    """Unranked importance (mean tf-idf among accepted minus among rejected) per stem."""
    acc = _column_means(fm.X[np.flatnonzero(fm.y == 1)])
    rej = _column_means(fm.X[np.flatnonzero(fm.y == 0)])
    return [
        KeywordImportance(stem=t, mean_acc=a, mean_rej=r, importance=a - r)
        for t, a, r in zip(fm.terms, acc, rej)
    ]


def rank_importance(items: Sequence[KeywordImportance]) -> tuple[list[KeywordImportance], list[KeywordImportance]]:
    """(acceptance predictors, rejection predictors), ranks starting at 1; ties by stem."""
    desc = sorted(items, key=lambda k: (-k.importance, k.stem))
    asc = sorted(items, key=lambda k: (k.importance, k.stem))
    return (
        [KeywordImportance(k.stem, k.mean_acc, k.mean_rej, k.importance, i) for i, k in enumerate(desc, 1)],
        [KeywordImportance(k.stem, k.mean_acc, k.mean_rej, k.importance, i) for i, k in enumerate(asc, 1)],
    )


def keyword_importance(
    corpus: Corpus | Iterable[Manuscript],
    section: Section | str,
    min_df: int = 1,
    stopwords=None,
    min_docs: int = 2,
) -> tuple[list[KeywordImportance], list[KeywordImportance]]:
    fm = build_features(corpus, section, min_df=min_df, stopwords=stopwords, min_docs=min_docs)
    return rank_importance(importance_from_features(fm))

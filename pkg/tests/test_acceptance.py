"""Exit criteria. One test per criterion; conftest prints a PASS/FAIL line for each."""
from __future__ import annotations

import csv
import filecmp
import json
import math
import os
import random
import time
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import sparse

from peerscope.cli import main as cli_main
from peerscope.corpus import load_corpus
from peerscope.lexicons import ListTag, load_wordlist
from peerscope.predict import build_features, cross_validate, loss_and_grad
from peerscope.readability import count_difficult, fre, ndc, ndc_from_counts, text_counts
from peerscope.refmatch import (
    coupling_sets,
    coupling_table,
    group_references,
    intersection_histogram,
    manuscript_groups,
    match_references,
    token_set_ratio,
)
from peerscope.similarity import cosine, fit_tfidf_tokens, section_stems, to_matrix, vectorize
from peerscope.stats import eta_squared, mean_sem, pearson, welch_t
from peerscope.textprep import porter_stem

from conftest import FIXTURES, LEXICONS, PLANTED
from oracles import (
    brute_force_groups,
    brute_histogram,
    oracle_match,
    oracle_token_set_ratio,
    partition,
    random_reference,
    reference_pair_strategy,
)

pytestmark = pytest.mark.acceptance

ALL_COMMANDS = ("ingest", "summary", "readability", "lexical", "similarity", "coupling", "correlate", "predict")


def run_all(out: Path, workers: int) -> None:
    for command in ALL_COMMANDS:
        args = [command, "--corpus", str(PLANTED), "--out", str(out), "--workers", str(workers)]
        if command in ("readability", "lexical"):
            args += ["--lexicon-dir", str(LEXICONS)]
        assert cli_main(args) == 0, command


def read_rows(path: Path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def test_criterion_1_readability_oracle():
    start = time.perf_counter()
    text = (FIXTURES / "readability" / "text12.txt").read_text(encoding="utf-8")
    common = load_wordlist(FIXTURES / "readability" / "common50.txt", ListTag.NDC_COMMON)
    assert len(common) == 50
    rows = [
        line.split("\t")
        for line in (FIXTURES / "readability" / "counts12.tsv").read_text(encoding="utf-8").splitlines()
        if line and not line.startswith("#")
    ]
    assert len(rows) == 12
    W = sum(int(r[1]) for r in rows)
    Y = sum(int(r[2]) for r in rows)
    D = sum(int(r[3]) for r in rows)
    S = 12
    counts = text_counts(text)
    assert (counts.n_words, counts.n_sentences, counts.n_syllables) == (W, S, Y)
    assert count_difficult(counts.words, common) == D

    expected_fre = 206.835 - 1.015 * (W / S) - 84.6 * (Y / W)
    expected_ndc = 15.79 * (D / W) + 0.0496 * (W / S) + (3.6365 if D / W > 0.05 else 0.0)
    assert abs(fre(text) - expected_fre) <= 1e-9
    assert abs(ndc(text, common) - expected_ndc) <= 1e-9
    assert abs(expected_fre - 100.09925) <= 1e-9

    # D/W exactly 0.05 gets no adjustment; anything above gets the full +3.6365
    at = ndc_from_counts(1000, 50, 50)
    above = ndc_from_counts(1000, 50, 51)
    assert abs(at - (15.79 * 0.05 + 0.0496 * 20)) <= 1e-12
    assert abs((above - at) - (15.79 * 0.001 + 3.6365)) <= 1e-9
    assert time.perf_counter() - start < 1.0


def test_criterion_2_porter_conformance():
    lines = (FIXTURES / "porter_sample.tsv").read_text(encoding="utf-8").splitlines()
    pairs = [line.split("\t") for line in lines if line]
    assert len(pairs) >= 1000
    mismatches = [(w, s, porter_stem(w)) for w, s in pairs if porter_stem(w) != s]
    assert not mismatches, mismatches[:20]


_TEXT = st.lists(
    st.sampled_from(["smith", "j.", "doe", "a", "deep", "learning", "parsing", "for", "of", "Deep,", "lee", "x-y", ""]),
    max_size=6,
).map(" ".join)


@settings(max_examples=1000, deadline=None)
@given(_TEXT | st.text(max_size=25), _TEXT | st.text(max_size=25))
def _ratio_matches_oracle(a, b):
    assert abs(token_set_ratio(a, b) - oracle_token_set_ratio(a, b)) <= 1e-12


@settings(max_examples=1000, deadline=None)
@given(reference_pair_strategy())
def _match_matches_oracle(pair):
    r1, r2 = pair
    assert match_references(r1, r2) == oracle_match(r1, r2)


def test_criterion_3_fuzzy_matching_oracles():
    _ratio_matches_oracle()
    _match_matches_oracle()
    rng = random.Random(3)
    for _ in range(500):
        refs = [random_reference(rng) for _ in range(rng.randint(0, 50))]
        got = group_references(refs)
        assert partition(got) == partition(brute_force_groups(refs))
        # dense ids in order of first appearance
        seen = []
        for g in got:
            if g not in seen:
                seen.append(g)
        assert seen == list(range(len(seen)))


@settings(max_examples=1000, deadline=None)
@given(st.frozensets(st.integers(0, 30), max_size=15), st.frozensets(st.integers(0, 30), max_size=15))
def _coupling_matches_sets(a, b):
    score = coupling_sets(a, b)
    if not a and not b:
        assert score is None
        return
    assert score.intersection == len(set(a) & set(b))
    assert score.jaccard == len(set(a) & set(b)) / len(set(a) | set(b))


def test_criterion_4_coupling_correctness(planted_corpus):
    _coupling_matches_sets()
    truth = json.loads((FIXTURES / "planted_truth.json").read_text(encoding="utf-8"))
    expected = brute_histogram(truth)
    hand = [("1", 245), ("2", 83), ("3", 111), ("4", 167), ("5-9", 135), ("10-19", 0),
            ("20-29", 0), ("30-39", 0), ("40-49", 0), ("50-59", 0), ("60-80", 0)]
    assert expected == hand
    groups = manuscript_groups(planted_corpus)
    got = intersection_histogram(p.intersection for p in coupling_table(planted_corpus, groups))
    assert got == hand


def test_criterion_5_tfidf_cosine():
    docs = [section_stems("neural network"), section_stems("neural logic")]
    model = fit_tfidf_tokens(docs)
    u, v = vectorize(model, docs[0]), vectorize(model, docs[1])
    assert abs(cosine(u, v) - 0.3361) <= 1e-4

    rng = np.random.default_rng(5)
    vocab = [f"term{chr(97 + i)}{chr(97 + j)}" for i in range(10) for j in range(10)]
    random_docs = [list(rng.choice(vocab, size=rng.integers(1, 40))) for _ in range(1000)]
    model = fit_tfidf_tokens(random_docs)
    vecs = [vectorize(model, d) for d in random_docs]
    for x in vecs:
        assert abs(cosine(x, x) - 1.0) <= 1e-12
    for _ in range(2000):
        i, j = rng.integers(0, 1000, size=2)
        c = cosine(vecs[i], vecs[j])
        assert c == cosine(vecs[j], vecs[i])
        assert 0.0 <= c <= 1.0 + 1e-12
    gram = (to_matrix(vecs, len(model.vocabulary)) @ to_matrix(vecs, len(model.vocabulary)).T).toarray()
    assert gram.min() >= 0.0 and gram.max() <= 1.0 + 1e-12
    assert np.array_equal(gram, gram.T)


def test_criterion_6_logistic_regression():
    start = time.perf_counter()
    rng = np.random.default_rng(6)
    X = sparse.random(40, 25, density=0.3, random_state=6, format="csr")
    y = rng.integers(0, 2, size=40).astype(float)
    w = rng.normal(size=25)
    b = 0.3
    _, gw, gb = loss_and_grad(w, b, X, y, 1.0)
    h = 1e-6
    fd = np.empty(26)
    for k in range(25):
        e = np.zeros(25)
        e[k] = h
        fd[k] = (loss_and_grad(w + e, b, X, y, 1.0)[0] - loss_and_grad(w - e, b, X, y, 1.0)[0]) / (2 * h)
    fd[25] = (loss_and_grad(w, b + h, X, y, 1.0)[0] - loss_and_grad(w, b - h, X, y, 1.0)[0]) / (2 * h)
    analytic = np.append(gw, gb)
    assert np.linalg.norm(analytic - fd) / np.linalg.norm(analytic) <= 1e-6

    fm = build_features(load_corpus(FIXTURES / "separable200.jsonl"), "abstract")
    assert fm.X.shape[0] == 200
    assert cross_validate(fm.X, fm.y, k=10, seed=42).mean_f1 >= 0.95
    permuted = [cross_validate(fm.X, np.random.default_rng(s).permutation(fm.y), k=10, seed=42).mean_f1
                for s in range(20)]
    assert 0.4 <= float(np.mean(permuted)) <= 0.6
    assert time.perf_counter() - start < 60.0


def test_criterion_7_statistics_oracles():
    """Checks every worked example exactly as stated.

    Two stated values are inconsistent with their own definitions: the
    Welch example ([1,2,3,4] vs [3,4,5,6]) has t = -2.19089, p = 0.07099
    under Welch's formula, and eta squared of {0,1},{1,2} is 1/2 (SS_total
    is 2, not 3). Both are asserted as stated, so this criterion fails;
    test_stats.py pins the correct values against scipy.
    """
    failures = []
    m, s = mean_sem([1, 2, 3])
    if abs(m - 2.0) > 1e-9 or abs(s - 1 / math.sqrt(3)) > 1e-9:
        failures.append(f"mean_sem([1,2,3]) = {(m, s)}")
    if mean_sem([5, 5, 5, 5])[1] != 0.0:
        failures.append("mean_sem constant")
    if abs(pearson([1, 2, 3, 4], [1, 3, 2, 4]) - 0.8) > 1e-9:
        failures.append("pearson example")
    if abs(pearson([1, 2, 3, 4], [3, 5, 7, 9]) - 1.0) > 1e-9 or abs(pearson([1, 2, 3], [-1, -2, -3]) + 1.0) > 1e-9:
        failures.append("pearson +-1")
    if abs(eta_squared([[0, 0], [1, 1]]) - 1.0) > 1e-9 or abs(eta_squared([[0, 1], [0, 1]])) > 1e-9:
        failures.append("eta_squared trivial examples")
    t0, _, p0 = welch_t([1, 2, 3], [1, 2, 3])
    if abs(t0) > 1e-9 or abs(p0 - 1.0) > 1e-9:
        failures.append("welch identical groups")
    eta = eta_squared([[0, 1], [1, 2]])
    if abs(eta - 1 / 3) > 1e-12:
        failures.append(f"eta_squared({{0,1}},{{1,2}}) = {eta!r}, stated 1/3")
    t, dof, p = welch_t([1, 2, 3, 4], [3, 4, 5, 6])
    if abs(t - (-2.449)) > 1e-3 or abs(dof - 6) > 1e-9 or abs(p - 0.0499) > 1e-4:
        failures.append(f"welch_t([1,2,3,4],[3,4,5,6]) = (t={t!r}, dof={dof!r}, p={p!r}), stated (-2.449, 6, 0.0499)")
    assert not failures, "; ".join(failures)


def _pooled(rows, section, metric):
    return {r["group"]: float(r["mean"]) for r in rows
            if r["venue"] == "ALL" and r["section"] == section and r["metric"] == metric}


def test_criterion_8_planted_end_to_end(tmp_path):
    start = time.perf_counter()
    run_all(tmp_path, workers=1)
    read = read_rows(tmp_path / "readability_compare.csv")
    lex = read_rows(tmp_path / "lexical_compare.csv")
    sim = read_rows(tmp_path / "similarity_compare.csv")
    cpl = read_rows(tmp_path / "coupling_compare.csv")
    for section in ("title", "abstract", "introduction"):
        lower = [(read, "fre"), (lex, "concreteness_tokens"), (lex, "frequency_tokens"), (lex, "n_tokens")]
        higher = [(read, "ndc"), (read, "jargon_general"), (read, "jargon_science_specific"), (read, "jargon_ai"),
                  (lex, "aoa_tokens"), (lex, "ttr")]
        for rows, metric in lower:
            g = _pooled(rows, section, metric)
            assert g["accepted"] < g["rejected"], (section, metric, g)
        for rows, metric in higher:
            g = _pooled(rows, section, metric)
            assert g["accepted"] > g["rejected"], (section, metric, g)
        g = _pooled(sim, section, "cosine")
        assert g["accepted"] > max(g["rejected"], g["mixed"]), (section, g)
        top = read_rows(tmp_path / f"importance_{section}_acc.csv")[0]
        assert top["stem"].startswith("neur") and top["rank"] == "1", (section, top)
    for metric in ("intersection", "jaccard"):
        g = _pooled(cpl, "references", metric)
        assert g["accepted"] > max(g["rejected"], g["mixed"]), (metric, g)
    assert time.perf_counter() - start < 30.0


def test_criterion_9_determinism(tmp_path):
    runs = {"a": 1, "b": 1, "c": 8}
    for name, workers in runs.items():
        run_all(tmp_path / name, workers)
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(files) > 20
    for other in ("b", "c"):
        assert sorted(p.name for p in (tmp_path / other).iterdir()) == files
        match, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / other, files, shallow=False)
        assert not mismatch and not errors, (other, mismatch, errors)


PEERREAD_COUNTS = {
    "ICLR2017": (427, 172),
    "ACL2017": (137, None),
    "CoNLL2016": (22, None),
    "ArxivAI": (4092, 418),
    "ArxivCL": (2638, 646),
    "ArxivLG": (5048, 1827),
}


@pytest.mark.dataset
@pytest.mark.skipif(not os.environ.get("PEERSCOPE_PEERREAD"), reason="set PEERSCOPE_PEERREAD to a converted PeerRead corpus")
def test_criterion_10_full_dataset(tmp_path):
    corpus_path = Path(os.environ["PEERSCOPE_PEERREAD"])
    workers = str(os.cpu_count() or 1)
    for command in ("summary", "similarity", "coupling", "correlate"):
        assert cli_main([command, "--corpus", str(corpus_path), "--out", str(tmp_path), "--workers", workers]) == 0

    summary = {r["venue"]: r for r in read_rows(tmp_path / "corpus_summary.csv")}
    for venue, (n_papers, n_accepted) in PEERREAD_COUNTS.items():
        assert int(summary[venue]["n_papers"]) == n_papers, venue
        if n_accepted is not None:
            assert int(summary[venue]["n_accepted"]) == n_accepted, venue

    for r in read_rows(tmp_path / "correlate.csv"):
        if r["venue"] == "ALL":
            assert 0.20 < float(r["pearson_r"]) < 0.40, r

    def eta(section):
        rows = read_rows(tmp_path / "similarity_compare.csv")
        return next(float(r["eta_squared"]) for r in rows if r["venue"] == "ALL" and r["section"] == section)

    assert abs(eta("introduction") - 0.01) <= 0.5 * 0.01
    assert abs(eta("abstract") - 0.006) <= 0.5 * 0.006
    first = next(int(r["count"]) for r in read_rows(tmp_path / "coupling_histogram.csv") if r["intersection_bucket"] == "1")
    assert abs(first - 1_619_173) <= 0.05 * 1_619_173

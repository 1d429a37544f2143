"""Per-command analyses: compute per-manuscript or per-pair values, write CSV.

Every function here takes a ``RunConfig`` and writes into
``config.out_dir``. Output is a pure function of the corpus, the resource
files and the config (worker count excluded), so repeated runs are
byte-identical.
"""
from __future__ import annotations

import csv
import json
import logging
import math
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .corpus import Corpus, Origin, Outcome, Section, classify_origin, corpus_summary, load_corpus, parse_venue
from .errors import DataError, DegenerateInput, NoCoverage, NoText
from .lexicons import (
    LOG_BASE,
    ListTag,
    NormKind,
    WordList,
    load_psycholing_lexicon,
    load_wordlist,
)
from .lexmetrics import DEFAULT_MIN_COVERAGE, lexical_stats, psych_averages
from .predict import (
    DEFAULT_FOLDS,
    DEFAULT_LAMBDA,
    DEFAULT_SEED,
    GRAD_TOL,
    MAX_ITER,
    build_features,
    cross_validate,
    importance_from_features,
    rank_importance,
)
from .readability import CONSTANTS, readability_scores
from .refmatch import DEFAULT_THRESHOLD, coupling_table, intersection_histogram, manuscript_groups
from .similarity import TFIDF_VARIANT, PairCategory, pairwise_similarity
from .stats import RunningStats, pearson, summarize_groups
from .textprep import default_stopwords, tokenize

log = logging.getLogger(__name__)

ALL_VENUES = "ALL"
COMPARE_FIELDS = ["venue", "section", "metric", "group", "n", "mean", "sem", "t", "p", "eta_squared"]
OUTCOME_GROUPS = (Outcome.ACCEPTED.value, Outcome.REJECTED.value)
PAIR_GROUPS = tuple(c.value for c in PairCategory)

LEXICON_FILES = {
    "common_words": "ndc_common.txt",
    "general_jargon": "general_science_jargon.txt",
    "science_common": "science_specific_common.txt",
    "ai_jargon": "ai_jargon.txt",
    "aoa": "aoa.tsv",
    "concreteness": "concreteness.tsv",
    "frequency": "frequency.tsv",
}


@dataclass
class RunConfig:
    command: str
    corpus: Path
    out_dir: Path
    sections: tuple[Section, ...] = tuple(Section)
    venue: str | None = None
    split_us: bool = False
    seed: int = DEFAULT_SEED
    workers: int = 1
    min_df: int = 1
    threshold: float = DEFAULT_THRESHOLD
    folds: int = DEFAULT_FOLDS
    balanced: bool = False
    top: int = 50
    lam: float = DEFAULT_LAMBDA
    min_coverage: float = DEFAULT_MIN_COVERAGE
    stopwords: Path | None = None
    lexicons: dict[str, Path] = field(default_factory=dict)

    def echo(self) -> dict:
        """Config as recorded in run_meta.json.

        Worker count and output directory are left out since neither
        affects results.
        """
        d = asdict(self)
        d.pop("workers")
        d.pop("out_dir")
        d["corpus"] = str(self.corpus)
        d["sections"] = [s.value for s in self.sections]
        d["stopwords"] = str(self.stopwords) if self.stopwords else "bundled"
        d["lexicons"] = {k: str(v) for k, v in sorted(self.lexicons.items())}
        return d


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


class CsvOut:
    """Minimal CSV writer with fixed columns and deterministic number formatting."""

    def __init__(self, path: Path, fields: Sequence[str]):
        self.fields = list(fields)
        self._fh = open(path, "w", encoding="utf-8", newline="")
        self._w = csv.writer(self._fh, lineterminator="\n")
        self._w.writerow(self.fields)

    def row(self, values: dict | Sequence) -> None:
        if isinstance(values, dict):
            values = [values.get(f) for f in self.fields]
        self._w.writerow([fmt(v) for v in values])

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_csv(path: Path, fields: Sequence[str], rows: Iterable[dict | Sequence]) -> None:
    with CsvOut(path, fields) as out:
        for r in rows:
            out.row(r)


def run_meta(config: RunConfig, corpus: Corpus | None, extra: dict | None = None) -> dict:
    meta = {
        "tool_version": __version__,
        "command": config.command,
        "config": config.echo(),
        "readability_constants": asdict(CONSTANTS),
        "tfidf_variant": TFIDF_VARIANT,
        "frequency_log": f"log base {LOG_BASE} of (count + 1)",
        "lexical_units": "surface forms (lowercase, no stemming), stopwords and single characters removed",
        "psycholinguistic_oov": "skipped; coverage reported",
        "fuzzy_match": {
            "threshold": config.threshold,
            "rule": "same year, same author count, token-set ratio >= threshold on authors and on title",
            "ratio": "indel-distance similarity over sorted token-set strings",
        },
        "logistic_regression": {
            "lambda": config.lam,
            "penalty": "lambda/(2n) * ||w||^2",
            "optimizer": "full-batch gradient descent, Armijo backtracking",
            "grad_tol": GRAD_TOL,
            "max_iter": MAX_ITER,
            "folds": config.folds,
            "seed": config.seed,
            "stratified": True,
            "balanced": config.balanced,
        },
        "statistics": {
            "sem": "sample sd (n-1) / sqrt(n)",
            "two_group_test": "Welch t, two-sided",
            "effect_size": "eta squared (between / total sum of squares)",
        },
    }
    if corpus is not None:
        meta["corpus"] = {
            "source": corpus.source,
            "n_manuscripts": len(corpus),
            "skipped_records": corpus.skipped,
            "dropped_references": corpus.dropped_references,
        }
    if extra:
        meta.update(extra)
    return meta


def write_meta(config: RunConfig, corpus: Corpus | None, extra: dict | None = None) -> None:
    """Record this command's metadata in run_meta.json, keeping other commands' entries."""
    path = config.out_dir / "run_meta.json"
    runs: dict = {}
    if path.exists():
        try:
            runs = json.loads(path.read_text(encoding="utf-8")).get("runs", {})
        except (json.JSONDecodeError, AttributeError):
            log.warning("%s is not valid run metadata; replacing it", path)
    runs[config.command] = run_meta(config, corpus, extra)
    path.write_text(json.dumps({"runs": runs}, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def prepare(config: RunConfig) -> Corpus:
    config.out_dir.mkdir(parents=True, exist_ok=True)
    corpus = load_corpus(config.corpus)
    if config.venue:
        corpus = corpus.filter(venue=config.venue)
        if not len(corpus):
            log.warning("no manuscripts for venue %r", parse_venue(config.venue))
    return corpus


def _stopwords(config: RunConfig) -> frozenset[str]:
    if config.stopwords is None:
        return default_stopwords()
    return load_wordlist(config.stopwords, ListTag.STOPWORDS).words


def _wordlist(config: RunConfig, key: str, tag: ListTag) -> WordList:
    path = config.lexicons.get(key)
    if path is None:
        raise DataError(f"missing word list: {key} (use --{key.replace('_', '-')} or --lexicon-dir)")
    return load_wordlist(path, tag)


def _lexicon(config: RunConfig, key: str, kind: NormKind):
    path = config.lexicons.get(key)
    if path is None:
        raise DataError(f"missing lexicon: {key} (use --{key} or --lexicon-dir)")
    return load_psycholing_lexicon(path, kind)


# -- comparison tables -------------------------------------------------------


def compare_rows(
    values: dict[tuple[str, str, str], dict[str, RunningStats]],
    groups: Sequence[str],
) -> list[dict]:
    """Flatten {(venue, section, metric): {group: stats}} into comparison rows."""
    rows = []
    for (venue, section, metric), by_group in values.items():
        ordered = {g: by_group.get(g, RunningStats()) for g in groups}
        for s in summarize_groups(ordered):
            rows.append(
                {
                    "venue": venue,
                    "section": section,
                    "metric": metric,
                    "group": s.label,
                    "n": s.n,
                    "mean": s.mean,
                    "sem": s.sem,
                    "t": s.t,
                    "p": s.p,
                    "eta_squared": s.eta_squared,
                }
            )
    return rows


def _venue_keys(corpus: Corpus) -> list[str]:
    return corpus.venues() + [ALL_VENUES]


def outcome_comparison(
    corpus: Corpus,
    per_doc: dict[tuple[str, str], dict[str, float]],
    metrics: Sequence[str],
    sections: Sequence[Section],
) -> list[dict]:
    """Accepted vs rejected summaries per venue (and pooled) per section and metric.

    ``per_doc`` maps (manuscript id, section) to metric values; missing
    metrics are simply not counted.
    """
    acc: dict[tuple[str, str, str], dict[str, RunningStats]] = {}
    for venue in _venue_keys(corpus):
        for section in sections:
            for metric in metrics:
                acc[venue, section.value, metric] = {g: RunningStats() for g in OUTCOME_GROUPS}
    for m in corpus:
        if m.outcome is Outcome.UNKNOWN:
            continue
        for section in sections:
            vals = per_doc.get((m.id, section.value))
            if not vals:
                continue
            for metric in metrics:
                v = vals.get(metric)
                if v is None:
                    continue
                for venue in (m.venue, ALL_VENUES):
                    acc[venue, section.value, metric][m.outcome.value].push(v)
    # drop venue blocks without any known-outcome manuscript
    keep = {
        k: v for k, v in acc.items() if sum(s.n for s in v.values()) > 0 or k[0] == ALL_VENUES
    }
    return compare_rows(keep, OUTCOME_GROUPS)


def _write_exclusions(config: RunConfig, counts: Counter) -> None:
    write_csv(
        config.out_dir / f"{config.command}_exclusions.csv",
        ["section", "measure", "reason", "count"],
        [[s, m, r, c] for (s, m, r), c in sorted(counts.items())],
    )


# -- commands ----------------------------------------------------------------


def run_ingest(config: RunConfig) -> Corpus:
    corpus = prepare(config)
    write_csv(
        config.out_dir / "manuscripts.csv",
        ["id", "venue", "outcome", "origin", "has_title", "has_abstract", "has_introduction", "n_references"],
        (
            [
                m.id,
                m.venue,
                m.outcome.value,
                classify_origin(m).value,
                m.has_text(Section.TITLE),
                m.has_text(Section.ABSTRACT),
                m.has_text(Section.INTRODUCTION),
                len(m.references),
            ]
            for m in corpus
        ),
    )
    write_meta(config, corpus)
    return corpus


def run_summary(config: RunConfig) -> Corpus:
    corpus = prepare(config)
    rows = corpus_summary(corpus)
    total = {
        "venue": ALL_VENUES,
        **{k: sum(r[k] for r in rows) for k in ("n_papers", "n_accepted", "n_rejected", "n_unknown")},
    }
    write_csv(
        config.out_dir / "corpus_summary.csv",
        ["venue", "n_papers", "n_accepted", "n_rejected", "n_unknown"],
        rows + [total],
    )
    write_meta(config, corpus)
    return corpus


READABILITY_METRICS = ("fre", "ndc", "jargon_general", "jargon_science_specific", "jargon_ai")


def run_readability(config: RunConfig) -> Corpus:
    lists = dict(
        common=_wordlist(config, "common_words", ListTag.NDC_COMMON),
        general_jargon=_wordlist(config, "general_jargon", ListTag.GENERAL_SCIENCE_JARGON),
        science_common=_wordlist(config, "science_common", ListTag.SCIENCE_SPECIFIC_COMMON),
        ai_jargon=_wordlist(config, "ai_jargon", ListTag.AI_JARGON),
    )
    corpus = prepare(config)
    per_doc: dict[tuple[str, str], dict[str, float]] = {}
    excluded: Counter = Counter()
    fields = ["id", "venue", "outcome", "origin", "section", *READABILITY_METRICS,
              "n_words", "n_sentences", "n_syllables", "n_difficult"]
    with CsvOut(config.out_dir / "readability.csv", fields) as out:
        for m in corpus:
            origin = classify_origin(m).value
            for section in config.sections:
                try:
                    s = readability_scores(m.section(section), **lists)
                except NoText:
                    log.warning("readability: %s has no usable %s text; skipped", m.id, section.value)
                    excluded[section.value, "readability", "no_text"] += 1
                    continue
                values = asdict(s)
                per_doc[m.id, section.value] = values
                out.row({"id": m.id, "venue": m.venue, "outcome": m.outcome.value, "origin": origin,
                         "section": section.value, **values})

    if config.split_us:
        for origin in Origin:
            sub = corpus.filter(origin=origin)
            write_csv(
                config.out_dir / f"readability_compare_{origin.value}.csv",
                COMPARE_FIELDS,
                outcome_comparison(sub, per_doc, READABILITY_METRICS, config.sections),
            )
    else:
        write_csv(
            config.out_dir / "readability_compare.csv",
            COMPARE_FIELDS,
            outcome_comparison(corpus, per_doc, READABILITY_METRICS, config.sections),
        )
    _write_exclusions(config, excluded)
    write_meta(config, corpus)
    return corpus


NORMS = (
    ("aoa", NormKind.AGE_OF_ACQUISITION),
    ("concreteness", NormKind.CONCRETENESS),
    ("frequency", NormKind.LOG_FREQUENCY),
)
LEXICAL_METRICS = ("n_tokens", "n_types", "ttr") + tuple(
    f"{name}_{unit}" for name, _ in NORMS for unit in ("tokens", "types")
)


def run_lexical(config: RunConfig) -> Corpus:
    lexicons = {name: _lexicon(config, name, kind) for name, kind in NORMS}
    stopwords = _stopwords(config)
    corpus = prepare(config)
    per_doc: dict[tuple[str, str], dict[str, float]] = {}
    excluded: Counter = Counter()
    fields = ["id", "venue", "outcome", "origin", "section", "n_tokens", "n_types", "ttr"]
    for name, _ in NORMS:
        fields += [f"{name}_tokens", f"{name}_types", f"{name}_coverage"]
    with CsvOut(config.out_dir / "lexical.csv", fields) as out:
        for m in corpus:
            for section in config.sections:
                tokens = tokenize(m.section(section), drop_single_char=True, stopwords=stopwords)
                try:
                    lex = lexical_stats(tokens)
                except NoText:
                    log.warning("lexical: %s has no usable %s text; skipped", m.id, section.value)
                    excluded[section.value, "lexical", "no_text"] += 1
                    continue
                row = {"id": m.id, "venue": m.venue, "outcome": m.outcome.value,
                       "origin": classify_origin(m).value, "section": section.value,
                       "n_tokens": lex.n_tokens, "n_types": lex.n_types, "ttr": lex.ttr}
                compared = {"n_tokens": float(lex.n_tokens), "n_types": float(lex.n_types), "ttr": lex.ttr}
                for name, _ in NORMS:
                    try:
                        avg = psych_averages(tokens, lexicons[name])
                    except NoCoverage:
                        row[f"{name}_coverage"] = 0.0
                        excluded[section.value, name, "no_coverage"] += 1
                        continue
                    row.update({f"{name}_tokens": avg.mean_over_tokens, f"{name}_types": avg.mean_over_types,
                                f"{name}_coverage": avg.coverage})
                    if avg.coverage >= config.min_coverage:
                        compared[f"{name}_tokens"] = avg.mean_over_tokens
                        compared[f"{name}_types"] = avg.mean_over_types
                    else:
                        excluded[section.value, name, "low_coverage"] += 1
                per_doc[m.id, section.value] = compared
                out.row(row)
    write_csv(
        config.out_dir / "lexical_compare.csv",
        COMPARE_FIELDS,
        outcome_comparison(corpus, per_doc, LEXICAL_METRICS, config.sections),
    )
    _write_exclusions(config, excluded)
    write_meta(config, corpus)
    return corpus


def _pair_accumulators(corpus: Corpus, section: str, metrics: Sequence[str]):
    return {
        (venue, section, metric): {g: RunningStats() for g in PAIR_GROUPS}
        for venue in _venue_keys(corpus)
        for metric in metrics
    }


def run_similarity(config: RunConfig) -> Corpus:
    stopwords = _stopwords(config)
    corpus = prepare(config)
    venue_of = {m.id: m.venue for m in corpus}
    compare: list[dict] = []
    excluded: Counter = Counter()
    for section in config.sections:
        acc = _pair_accumulators(corpus, section.value, ["cosine"])
        path = config.out_dir / f"similarity_pairs_{section.value}.csv"
        try:
            stream = pairwise_similarity(corpus, section, min_df=config.min_df, stopwords=stopwords,
                                         workers=config.workers)
        except DataError as exc:
            log.warning("similarity/%s: %s", section.value, exc)
            write_csv(path, ["id_a", "id_b", "cosine", "category"], [])
            excluded[section.value, "cosine", "too_few_documents"] += 1
            continue
        excluded[section.value, "cosine", "not_eligible"] += stream.n_excluded_docs
        with CsvOut(path, ["id_a", "id_b", "cosine", "category"]) as out:
            for p in stream.rows:
                out.row([p.id_a, p.id_b, p.cosine, p.category.value])
                acc[ALL_VENUES, section.value, "cosine"][p.category.value].push(p.cosine)
                va = venue_of[p.id_a]
                if va == venue_of[p.id_b]:
                    acc[va, section.value, "cosine"][p.category.value].push(p.cosine)
        compare += compare_rows(_nonempty(acc), PAIR_GROUPS)
    write_csv(config.out_dir / "similarity_compare.csv", COMPARE_FIELDS, compare)
    _write_exclusions(config, excluded)
    write_meta(config, corpus)
    return corpus


def _nonempty(acc):
    return {k: v for k, v in acc.items() if k[0] == ALL_VENUES or sum(s.n for s in v.values())}


def run_coupling(config: RunConfig) -> Corpus:
    corpus = prepare(config)
    groups = manuscript_groups(corpus, threshold=config.threshold, workers=config.workers)
    write_csv(
        config.out_dir / "reference_groups.csv",
        ["id", "n_references", "n_groups", "group_ids"],
        ([m.id, len(m.references), len(groups[m.id]), " ".join(map(str, sorted(groups[m.id])))] for m in corpus),
    )
    venue_of = {m.id: m.venue for m in corpus}
    acc = _pair_accumulators(corpus, "references", ["intersection", "jaccard"])
    intersections: list[int] = []
    with CsvOut(config.out_dir / "coupling_pairs.csv", ["id_a", "id_b", "intersection", "jaccard", "category"]) as out:
        for p in coupling_table(corpus, groups, workers=config.workers):
            category = p.category.value if p.category else Outcome.UNKNOWN.value
            out.row([p.id_a, p.id_b, p.intersection, p.jaccard, category])
            intersections.append(p.intersection)
            if p.category is None:
                continue
            venues = [ALL_VENUES]
            if venue_of[p.id_a] == venue_of[p.id_b]:
                venues.append(venue_of[p.id_a])
            for v in venues:
                acc[v, "references", "intersection"][p.category.value].push(float(p.intersection))
                acc[v, "references", "jaccard"][p.category.value].push(p.jaccard)
    write_csv(config.out_dir / "coupling_histogram.csv", ["intersection_bucket", "count"],
              intersection_histogram(intersections))
    write_csv(config.out_dir / "coupling_compare.csv", COMPARE_FIELDS, compare_rows(_nonempty(acc), PAIR_GROUPS))
    write_meta(config, corpus, {"n_reference_groups": len({g for s in groups.values() for g in s})})
    return corpus


def _read_coupling(path: Path) -> dict[tuple[str, str], tuple[int, float]]:
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            inter = int(row["intersection"])
            if inter >= 1:
                out[row["id_a"], row["id_b"]] = (inter, float(row["jaccard"]))
    return out


def run_correlate(config: RunConfig) -> Corpus:
    corpus = prepare(config)
    coupling_path = config.out_dir / "coupling_pairs.csv"
    if not coupling_path.exists():
        raise DataError(f"{coupling_path} not found; run the coupling command first")
    coupled = _read_coupling(coupling_path)
    venue_of = {m.id: m.venue for m in corpus}
    rows = []
    for section in config.sections:
        sim_path = config.out_dir / f"similarity_pairs_{section.value}.csv"
        if not sim_path.exists():
            raise DataError(f"{sim_path} not found; run the similarity command first")
        joined: dict[str, list[tuple[float, int, float]]] = defaultdict(list)
        with open(sim_path, encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                key = (row["id_a"], row["id_b"])
                hit = coupled.get(key)
                if hit is None or key[0] not in venue_of or key[1] not in venue_of:
                    continue
                triple = (float(row["cosine"]), hit[0], hit[1])
                joined[ALL_VENUES].append(triple)
                if venue_of[key[0]] == venue_of[key[1]]:
                    joined[venue_of[key[0]]].append(triple)
        for venue in _venue_keys(corpus):
            pairs = joined.get(venue, [])
            for metric, col in (("intersection", 1), ("jaccard", 2)):
                try:
                    r = pearson([p[0] for p in pairs], [float(p[col]) for p in pairs])
                except DegenerateInput:
                    if venue == ALL_VENUES:
                        raise DegenerateInput(
                            f"correlate/{section.value}/{metric}: correlation undefined over {len(pairs)} pairs"
                        )
                    r = None
                if venue != ALL_VENUES and not pairs:
                    continue
                rows.append({"venue": venue, "section": section.value, "metric": metric,
                             "n_pairs": len(pairs), "pearson_r": r})
    write_csv(config.out_dir / "correlate.csv", ["venue", "section", "metric", "n_pairs", "pearson_r"], rows)
    write_meta(config, corpus)
    return corpus


REPORT_FIELDS = ["venue", "section", "fold", "macro_precision", "macro_recall", "macro_f1"]
IMPORTANCE_FIELDS = ["stem", "mean_acc", "mean_rej", "importance", "rank"]


def _slug(venue: str) -> str:
    return "".join(ch if ch.isalnum() else "_" for ch in venue)


def run_predict(config: RunConfig) -> Corpus:
    stopwords = _stopwords(config)
    corpus = prepare(config)
    report: list[dict] = []
    targets = [(ALL_VENUES, corpus)] + [(v, corpus.filter(venue=v)) for v in corpus.venues()]
    for section in config.sections:
        for venue, sub in targets:
            try:
                fm = build_features(sub, section, min_df=config.min_df, stopwords=stopwords)
                cv = cross_validate(fm.X, fm.y, k=config.folds, seed=config.seed, lam=config.lam,
                                    balanced=config.balanced, workers=config.workers)
            except DataError as exc:
                if venue == ALL_VENUES and len(targets) == 2 or venue == ALL_VENUES and config.venue:
                    raise
                log.warning("predict/%s/%s skipped: %s", venue, section.value, exc)
                continue
            for f in cv.folds:
                report.append({"venue": venue, "section": section.value, "fold": f.fold,
                               "macro_precision": f.macro_precision, "macro_recall": f.macro_recall,
                               "macro_f1": f.macro_f1})
            report.append({"venue": venue, "section": section.value, "fold": "mean",
                           "macro_precision": cv.mean_precision, "macro_recall": cv.mean_recall,
                           "macro_f1": cv.mean_f1})
            acc, rej = rank_importance(importance_from_features(fm))
            stem = f"importance_{section.value}" if venue == ALL_VENUES else f"importance_{_slug(venue)}_{section.value}"
            write_csv(config.out_dir / f"{stem}_acc.csv", IMPORTANCE_FIELDS, (asdict(k) for k in acc[: config.top]))
            write_csv(config.out_dir / f"{stem}_rej.csv", IMPORTANCE_FIELDS, (asdict(k) for k in rej[: config.top]))
    write_csv(config.out_dir / "predict_report.csv", REPORT_FIELDS, report)
    write_meta(config, corpus)
    return corpus


COMMANDS = {
    "ingest": run_ingest,
    "summary": run_summary,
    "readability": run_readability,
    "lexical": run_lexical,
    "similarity": run_similarity,
    "coupling": run_coupling,
    "correlate": run_correlate,
    "predict": run_predict,
}

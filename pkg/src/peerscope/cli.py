"""Command-line entry point: ``peerscope <command> --corpus FILE --out DIR``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 degenerate statistic.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .corpus import Section
from .errors import DataError, DegenerateInput
from .parallel import default_workers
from .pipeline import COMMANDS, LEXICON_FILES, RunConfig
from .predict import DEFAULT_FOLDS, DEFAULT_LAMBDA, DEFAULT_SEED
from .refmatch import DEFAULT_THRESHOLD
from .lexmetrics import DEFAULT_MIN_COVERAGE

log = logging.getLogger("peerscope")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DEGENERATE = 0, 2, 3, 4

HELP = {
    "ingest": "validate a corpus and list its manuscripts",
    "summary": "papers per venue and outcome",
    "readability": "FRE, NDC and jargon ratios per manuscript, compared by outcome",
    "lexical": "length, type-token ratio and psycholinguistic norms, compared by outcome",
    "similarity": "tf-idf cosine of every manuscript pair, compared by pair category",
    "coupling": "shared references of every manuscript pair, compared by pair category",
    "correlate": "Pearson r between cosine similarity and coupling (needs similarity and coupling output)",
    "predict": "cross-validated logistic regression and keyword importance",
}


def _common_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run options")
    g.add_argument("--corpus", type=Path, required=True, help="JSON-Lines corpus file")
    g.add_argument("--out", type=Path, required=True, help="output directory")
    g.add_argument("--section", choices=[s.value for s in Section], help="restrict to one section (default: all)")
    g.add_argument("--venue", help="restrict to one venue (e.g. arxiv_cl, ICLR2017)")
    g.add_argument("--split-us", action="store_true", help="compare US and non-US manuscripts separately")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED)
    g.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _unit_float(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError("must be within [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peerscope", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    common = _common_options()
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=HELP[name], description=HELP[name])
        if name in ("similarity", "predict"):
            p.add_argument("--min-df", type=_positive_int, default=1, help="drop stems in fewer documents")
        if name in ("similarity", "predict", "lexical"):
            p.add_argument("--stopwords", type=Path, help="stopword file (default: bundled English list)")
        if name == "coupling":
            p.add_argument("--threshold", type=_unit_float, default=DEFAULT_THRESHOLD,
                           help="fuzzy match threshold for authors and titles")
        if name == "predict":
            p.add_argument("--folds", type=_positive_int, default=DEFAULT_FOLDS)
            p.add_argument("--balanced", action="store_true", help="weight samples inversely to class size")
            p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA,
                           help="L2 regularisation strength")
            p.add_argument("--top", type=_positive_int, default=50, help="stems per importance list")
        if name in ("readability", "lexical"):
            p.add_argument("--lexicon-dir", type=Path,
                           help="directory holding " + ", ".join(sorted(LEXICON_FILES.values())))
        if name == "readability":
            for key in ("common_words", "general_jargon", "science_common", "ai_jargon"):
                p.add_argument("--" + key.replace("_", "-"), dest=key, type=Path)
        if name == "lexical":
            for key in ("aoa", "concreteness", "frequency"):
                p.add_argument("--" + key, dest=key, type=Path)
            p.add_argument("--min-coverage", type=_unit_float, default=DEFAULT_MIN_COVERAGE,
                           help="minimum lexicon coverage for a manuscript to enter comparisons")
    return parser


def config_from_args(args: argparse.Namespace, parser: argparse.ArgumentParser) -> RunConfig:
    """Build a RunConfig, checking every given path before any work starts."""
    if not args.corpus.is_file():
        parser.error(f"--corpus: no such file: {args.corpus}")
    if args.out.exists() and not args.out.is_dir():
        parser.error(f"--out: not a directory: {args.out}")
    if args.workers is not None and args.workers < 1:
        parser.error("--workers must be >= 1")

    lexicons: dict[str, Path] = {}
    lexicon_dir = getattr(args, "lexicon_dir", None)
    if lexicon_dir is not None:
        if not lexicon_dir.is_dir():
            parser.error(f"--lexicon-dir: not a directory: {lexicon_dir}")
        for key, filename in LEXICON_FILES.items():
            if (lexicon_dir / filename).is_file():
                lexicons[key] = lexicon_dir / filename
    for key in LEXICON_FILES:
        path = getattr(args, key, None)
        if path is not None:
            if not path.is_file():
                parser.error(f"--{key.replace('_', '-')}: no such file: {path}")
            lexicons[key] = path
    stopwords = getattr(args, "stopwords", None)
    if stopwords is not None and not stopwords.is_file():
        parser.error(f"--stopwords: no such file: {stopwords}")

    return RunConfig(
        command=args.command,
        corpus=args.corpus,
        out_dir=args.out,
        sections=(Section(args.section),) if args.section else tuple(Section),
        venue=args.venue,
        split_us=args.split_us,
        seed=args.seed,
        workers=args.workers or default_workers(),
        min_df=getattr(args, "min_df", 1),
        threshold=getattr(args, "threshold", DEFAULT_THRESHOLD),
        folds=getattr(args, "folds", DEFAULT_FOLDS),
        balanced=getattr(args, "balanced", False),
        top=getattr(args, "top", 50),
        lam=getattr(args, "lam", DEFAULT_LAMBDA),
        min_coverage=getattr(args, "min_coverage", DEFAULT_MIN_COVERAGE),
        stopwords=stopwords,
        lexicons=lexicons,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    config = config_from_args(args, parser)
    try:
        COMMANDS[config.command](config)
    except DegenerateInput as exc:
        log.error("%s", exc)
        return EXIT_DEGENERATE
    except DataError as exc:
        log.error("%s", exc)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

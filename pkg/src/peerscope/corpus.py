"""Manuscript data model and JSON-Lines ingestion.

One manuscript per line::

    {"id": str, "venue": str, "title": str, "abstract": str,
     "introduction": str, "accepted": true|false|null,
     "author_emails": [str],
     "references": [{"year": int, "authors": [str], "title": str}]}
"""
from __future__ import annotations

import enum
import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DataError

log = logging.getLogger(__name__)


class Outcome(str, enum.Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    UNKNOWN = "unknown"

    @classmethod
    def from_flag(cls, accepted: bool | None) -> "Outcome":
        if accepted is None:
            return cls.UNKNOWN
        return cls.ACCEPTED if accepted else cls.REJECTED


class Section(str, enum.Enum):
    TITLE = "title"
    ABSTRACT = "abstract"
    INTRODUCTION = "introduction"


class Origin(str, enum.Enum):
    US = "US"
    NON_US = "NonUS"


# Table order used by corpus_summary; anything else sorts after these.
KNOWN_VENUES = ("ICLR2017", "ACL2017", "CoNLL2016", "ArxivAI", "ArxivCL", "ArxivLG")
_VENUE_KEYS = {v.lower(): v for v in KNOWN_VENUES}


def parse_venue(tag: str) -> str:
    """Map a venue tag onto its canonical name.

    Accepts the canonical names, PeerRead directory names such as
    ``arxiv.cs.cl_2007-2017`` or ``iclr_2017``, and short forms like
    ``arxiv_cl``. Unrecognised tags are returned stripped, unchanged.
    """
    key = re.sub(r"[^a-z0-9]", "", tag.lower())
    key = key.replace("arxivcs", "arxiv")
    if key.endswith("20072017"):
        key = key[: -len("20072017")]
    return _VENUE_KEYS.get(key, tag.strip() or "Other")


@dataclass(frozen=True)
class ReferenceRecord:
    year: int
    authors: tuple[str, ...]
    title: str

    @property
    def n_authors(self) -> int:
        return len(self.authors)


@dataclass(frozen=True)
class Manuscript:
    id: str
    venue: str
    title: str
    abstract: str = ""
    introduction: str = ""
    outcome: Outcome = Outcome.UNKNOWN
    author_emails: tuple[str, ...] = ()
    references: tuple[ReferenceRecord, ...] = ()

    def section(self, section: Section | str) -> str:
        return section_text(self, section)

    def has_text(self, section: Section | str) -> bool:
        return bool(section_text(self, section).strip())

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "venue": self.venue,
            "title": self.title,
            "abstract": self.abstract,
            "introduction": self.introduction,
            "accepted": None if self.outcome is Outcome.UNKNOWN else self.outcome is Outcome.ACCEPTED,
            "author_emails": list(self.author_emails),
            "references": [
                {"year": r.year, "authors": list(r.authors), "title": r.title}
                for r in self.references
            ],
        }


@dataclass(frozen=True)
class Corpus:
    manuscripts: tuple[Manuscript, ...]
    source: str = ""
    loaded_at: str = ""
    skipped: int = 0
    dropped_references: int = 0
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {m.id: m for m in self.manuscripts})

    def __iter__(self) -> Iterator[Manuscript]:
        return iter(self.manuscripts)

    def __len__(self) -> int:
        return len(self.manuscripts)

    def __getitem__(self, manuscript_id: str) -> Manuscript:
        return self._index[manuscript_id]

    def filter(self, venue: str | None = None, origin: Origin | None = None) -> "Corpus":
        keep = self.manuscripts
        if venue is not None:
            venue = parse_venue(venue)
            keep = tuple(m for m in keep if m.venue == venue)
        if origin is not None:
            keep = tuple(m for m in keep if classify_origin(m) is origin)
        return replace(self, manuscripts=keep)

    def with_known_outcome(self) -> "Corpus":
        return replace(
            self, manuscripts=tuple(m for m in self.manuscripts if m.outcome is not Outcome.UNKNOWN)
        )

    def venues(self) -> list[str]:
        present = {m.venue for m in self.manuscripts}
        return [v for v in KNOWN_VENUES if v in present] + sorted(present - set(KNOWN_VENUES))

    def dumps(self) -> str:
        """Serialize the manuscripts (not the provenance) back to JSON-Lines."""
        return "".join(
            json.dumps(m.to_record(), ensure_ascii=False, sort_keys=True) + "\n"
            for m in self.manuscripts
        )


def _norm_ws(text: str) -> str:
    return " ".join(text.split())


def _parse_reference(raw) -> ReferenceRecord | None:
    if not isinstance(raw, dict):
        return None
    year = raw.get("year")
    if isinstance(year, str) and year.strip().isdigit():
        year = int(year.strip())
    if not isinstance(year, int) or isinstance(year, bool) or not 1800 <= year <= 2100:
        return None
    authors = raw.get("authors") or []
    if not isinstance(authors, list):
        return None
    authors = tuple(_norm_ws(a) for a in authors if isinstance(a, str) and a.strip())
    title = _norm_ws(raw.get("title") or "") if isinstance(raw.get("title"), str) else ""
    if not authors or not title:
        return None
    return ReferenceRecord(year=year, authors=authors, title=title)


def parse_manuscript(record: dict) -> tuple[Manuscript, int]:
    """Build a manuscript from one decoded JSON record.

    Returns the manuscript and the number of references that failed
    validation and were dropped. Raises ``ValueError`` when the record
    cannot be used at all.
    """
    if not isinstance(record, dict):
        raise ValueError("record is not a JSON object")
    mid = record.get("id")
    title = record.get("title")
    if not isinstance(mid, str) or not mid.strip():
        raise ValueError("missing id")
    if not isinstance(title, str) or not title.strip():
        raise ValueError("missing title")
    accepted = record.get("accepted")
    if accepted is not None and not isinstance(accepted, bool):
        raise ValueError(f"'accepted' must be true, false or null, got {accepted!r}")

    raw_refs = record.get("references") or []
    refs = [_parse_reference(r) for r in raw_refs] if isinstance(raw_refs, list) else []
    good_refs = tuple(r for r in refs if r is not None)
    emails = record.get("author_emails") or []
    m = Manuscript(
        id=mid.strip(),
        venue=parse_venue(record.get("venue") or "Other"),
        title=title,
        abstract=record.get("abstract") or "",
        introduction=record.get("introduction") or "",
        outcome=Outcome.from_flag(accepted),
        author_emails=tuple(e for e in emails if isinstance(e, str)),
        references=good_refs,
    )
    return m, len(refs) - len(good_refs)


def load_corpus(path: str | Path) -> Corpus:
    """Read a JSON-Lines corpus; malformed records are skipped and counted."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read corpus {path}: {exc}") from exc

    manuscripts: list[Manuscript] = []
    seen: set[str] = set()
    skipped = dropped = 0
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            m, bad_refs = parse_manuscript(json.loads(line))
        except (json.JSONDecodeError, ValueError) as exc:
            log.warning("%s:%d: skipping record (%s)", path, lineno, exc)
            skipped += 1
            continue
        if m.id in seen:
            log.warning("%s:%d: skipping duplicate id %r", path, lineno, m.id)
            skipped += 1
            continue
        seen.add(m.id)
        dropped += bad_refs
        manuscripts.append(m)
    if dropped:
        log.warning("%s: dropped %d malformed references", path, dropped)
    return Corpus(
        manuscripts=tuple(manuscripts),
        source=str(path),
        loaded_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        skipped=skipped,
        dropped_references=dropped,
    )


def classify_origin(m: Manuscript) -> Origin:
    """US when at least one author email ends in ``.edu``."""
    for email in m.author_emails:
        if email.strip().lower().endswith(".edu"):
            return Origin.US
    return Origin.NON_US


def section_text(m: Manuscript, section: Section | str) -> str:
    section = Section(section)
    if section is Section.TITLE:
        return m.title
    if section is Section.ABSTRACT:
        return m.abstract
    return m.introduction


def corpus_summary(corpus: Iterable[Manuscript] | Corpus) -> list[dict]:
    """Per-venue paper and outcome counts, one row per venue present."""
    if not isinstance(corpus, Corpus):
        corpus = Corpus(tuple(corpus))
    counts = Counter((m.venue, m.outcome) for m in corpus)
    rows = []
    for venue in corpus.venues():
        acc = counts[venue, Outcome.ACCEPTED]
        rej = counts[venue, Outcome.REJECTED]
        unk = counts[venue, Outcome.UNKNOWN]
        rows.append(
            {
                "venue": venue,
                "n_papers": acc + rej + unk,
                "n_accepted": acc,
                "n_rejected": rej,
                "n_unknown": unk,
            }
        )
    return rows

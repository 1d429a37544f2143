"""Convert a PeerRead checkout into the JSON-Lines corpus format.

PeerRead stores each venue as ``<venue>/<split>/reviews/<id>.json`` (with
the ``accepted`` flag) and ``<venue>/<split>/parsed_pdfs/<id>.pdf.json``
(science-parse output: title, abstract, sections, emails, references).
The introduction is the text of the first section whose heading mentions
"introduction", falling back to the first section.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Iterator

from .corpus import parse_venue

log = logging.getLogger(__name__)

SPLITS = ("train", "dev", "test")


def _introduction(sections: list) -> str:
    usable = [s for s in sections or [] if isinstance(s, dict) and (s.get("text") or "").strip()]
    for s in usable:
        if "introduction" in (s.get("heading") or "").lower():
            return s["text"]
    return usable[0]["text"] if usable else ""


def _reference(raw: dict) -> dict | None:
    year = raw.get("year")
    authors = raw.get("author") or raw.get("authors") or []
    title = raw.get("title") or ""
    if not isinstance(year, int) or not authors or not title.strip():
        return None
    return {"year": year, "authors": [a for a in authors if isinstance(a, str)], "title": title}


def convert_paper(venue: str, paper_id: str, review: dict | None, parsed: dict | None) -> dict:
    meta = (parsed or {}).get("metadata") or {}
    review = review or {}
    accepted = review.get("accepted")
    refs = [r for r in (_reference(x) for x in meta.get("references") or [] if isinstance(x, dict)) if r]
    return {
        "id": f"{venue}/{paper_id}",
        "venue": parse_venue(venue),
        "title": review.get("title") or meta.get("title") or "",
        "abstract": review.get("abstract") or meta.get("abstractText") or "",
        "introduction": _introduction(meta.get("sections")),
        "accepted": accepted if isinstance(accepted, bool) else None,
        "author_emails": [e for e in meta.get("emails") or [] if isinstance(e, str)],
        "references": refs,
    }


def _read_json(path: Path) -> dict | None:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        log.warning("cannot read %s: %s", path, exc)
        return None


def iter_peerread(root: Path) -> Iterator[dict]:
    """Records for every paper under ``root``, in sorted venue/split/id order."""
    for venue_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for split in SPLITS:
            split_dir = venue_dir / split
            if not split_dir.is_dir():
                continue
            reviews = {p.name[: -len(".json")]: p for p in (split_dir / "reviews").glob("*.json")}
            parsed = {p.name[: -len(".pdf.json")]: p for p in (split_dir / "parsed_pdfs").glob("*.pdf.json")}
            for pid in sorted(set(reviews) | set(parsed)):
                review = _read_json(reviews[pid]) if pid in reviews else None
                pdf = _read_json(parsed[pid]) if pid in parsed else None
                yield convert_paper(venue_dir.name, pid, review, pdf)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="peerscope-convert-peerread", description=__doc__.splitlines()[0])
    parser.add_argument("root", type=Path, help="PeerRead data directory (holding one folder per venue)")
    parser.add_argument("output", type=Path, help="JSON-Lines file to write")
    args = parser.parse_args(argv)
    if not args.root.is_dir():
        parser.error(f"not a directory: {args.root}")
    n = 0
    with open(args.output, "w", encoding="utf-8") as fh:
        for record in iter_peerread(args.root):
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
            n += 1
    print(f"wrote {n} manuscripts to {args.output}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())

from __future__ import annotations

import os
from pathlib import Path

import pytest
from hypothesis import settings

from peerscope.corpus import load_corpus
from peerscope.lexicons import ListTag, load_wordlist

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
LEXICONS = FIXTURES / "lexicons"
PLANTED = FIXTURES / "planted.jsonl"

settings.register_profile("default", deadline=None)
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def planted_corpus():
    return load_corpus(PLANTED)


@pytest.fixture(scope="session")
def fixture_lists():
    return dict(
        common=load_wordlist(LEXICONS / "ndc_common.txt", ListTag.NDC_COMMON),
        general_jargon=load_wordlist(LEXICONS / "general_science_jargon.txt", ListTag.GENERAL_SCIENCE_JARGON),
        science_common=load_wordlist(LEXICONS / "science_specific_common.txt", ListTag.SCIENCE_SPECIFIC_COMMON),
        ai_jargon=load_wordlist(LEXICONS / "ai_jargon.txt", ListTag.AI_JARGON),
    )


# one summary line per acceptance criterion

_ACCEPTANCE: list[tuple[str, str, float]] = []


def pytest_runtest_logreport(report):
    if "acceptance" not in report.keywords:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        outcome = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, duration in _ACCEPTANCE:
        terminalreporter.write_line(f"{outcome:4}  {name}  ({duration:.2f}s)")

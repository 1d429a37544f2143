"""Regenerate the synthetic fixtures in this directory.

    python fixtures/generate.py

Output is deterministic. ``planted.jsonl`` is a 64-manuscript corpus where
accepted manuscripts are written in long sentences of rare, late-acquired,
abstract, jargon-heavy vocabulary that always mentions neural networks,
cite from a small shared pool of references and are short and lexically
diverse; rejected manuscripts are the opposite. ``planted_truth.json``
records which canonical reference each citation was rendered from.
``mini30.jsonl`` is every other planted manuscript, 30 in all.
``separable200.jsonl`` is a 200-manuscript corpus whose classes use
disjoint vocabularies.
"""
from __future__ import annotations

import json
import random
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
LEX = HERE / "lexicons"
SEED = 20170424

AI_JARGON = """neural networks convolutional recurrent embeddings backpropagation transformer
multihead adversarial generative reinforcement autoencoder dropout softmax perceptron
hyperparameters regularization gradient stochastic latent""".split()
GENERAL_JARGON = """hypothesis paradigm empirical methodology quantitative theoretical
framework phenomenon heuristic taxonomy ontology epistemic correlational longitudinal
operationalization""".split()
SCIENCE_COMMON = """model method analysis evaluation experiments dataset performance
algorithm baseline benchmark architecture parameters approximation inference""".split()
# technical but listed nowhere, so jargon ratios stay below 1
OTHER_TECH = """variational bayesian probabilistic optimization computational differentiable
asymptotic nonconvex multimodal hierarchical compositional distributional parameterization
generalization representational discriminative combinatorial""".split()
ACCEPTED_POOL = AI_JARGON + GENERAL_JARGON + SCIENCE_COMMON + OTHER_TECH
CORE = ("neural", "networks")
FUNCTION = ["the", "of", "a", "and", "to", "in", "we", "with", "for", "on"]

FIRST = """james mary robert patricia john jennifer michael linda david elizabeth william
barbara richard susan joseph jessica thomas sarah charles karen wei yuki olga pierre
ahmed priya lars ines kofi mei""".split()
LAST = """smith johnson williams brown jones garcia miller davis rodriguez martinez
hernandez lopez gonzalez wilson anderson thomas taylor moore jackson martin lee
perez thompson white harris sanchez clark ramirez lewis robinson walker young allen
king wright scott torres nguyen hill flores""".split()
TITLE_WORDS = """learning deep structured sparse robust efficient scalable online
semantic syntactic lexical visual spoken textual unsupervised supervised transfer
memory graph kernel tree sequence parsing tagging translation retrieval summarization
question answering dialogue grounding segmentation detection recognition clustering
ranking sampling search planning control estimation coding compression""".split()


def read_common() -> list[str]:
    return [w.strip() for w in (LEX / "ndc_common.txt").read_text(encoding="utf-8").splitlines() if w.strip()]


def stopword_set() -> set[str]:
    sys.path.insert(0, str(HERE.parent / "src"))
    from peerscope.textprep import default_stopwords

    return set(default_stopwords())


def rejected_pool(rng: random.Random) -> list[str]:
    stop = stopword_set()
    common = [w for w in read_common() if w.isalpha() and 3 <= len(w) <= 5 and w not in stop]
    return sorted(rng.sample(common, 240))


def canonical_refs(rng: random.Random, n: int, start: int) -> list[dict]:
    refs = []
    for k in range(n):
        n_auth = rng.randint(1, 4)
        authors = [f"{rng.choice(FIRST).title()} {rng.choice(LAST).title()}" for _ in range(n_auth)]
        title = " ".join(rng.sample(TITLE_WORDS, rng.randint(4, 7))).capitalize()
        refs.append({"key": start + k, "year": rng.randint(1995, 2016), "authors": authors, "title": title})
    return refs


def render_ref(rng: random.Random, ref: dict) -> dict:
    """One citation of ``ref`` with formatting noise that fuzzy matching must absorb."""
    authors, title = list(ref["authors"]), ref["title"]
    style = rng.randrange(4)
    if style == 1:
        title = title.lower()
    elif style == 2:
        title = title + "."
    elif style == 3:
        authors = [f"{a.split()[0][0]}. {a.split()[1]}" for a in authors]
    return {"year": ref["year"], "authors": authors, "title": title}


def sentence(words: list[str]) -> str:
    text = " ".join(words)
    return text[0].upper() + text[1:] + "."


def accepted_text(rng: random.Random, n_sentences: int, per_sentence: int) -> str:
    # distinct content words across the section keep the type-token ratio high
    sizes = [per_sentence + rng.randint(-2, 1) for _ in range(n_sentences)]
    content = rng.sample([w for w in ACCEPTED_POOL if w not in CORE], sum(sizes))
    out = []
    for s, size in enumerate(sizes):
        start = sum(sizes[:s])
        words = ["neural"] + (["networks"] if rng.random() < 0.5 else []) + content[start : start + size]
        rng.shuffle(words)
        mixed = []
        for w in words:
            mixed.append(w)
            if rng.random() < 0.3:
                mixed.append(rng.choice(FUNCTION))
        out.append(sentence(["the"] + mixed))
    return " ".join(out)


def rejected_text(rng: random.Random, private: list[str], n_sentences: int, per_sentence: int) -> str:
    out = []
    for _ in range(n_sentences + rng.randint(-2, 2)):
        words = [rng.choice(private) for _ in range(per_sentence + rng.randint(-1, 1))]
        out.append(sentence(["the"] + words))
    return " ".join(out)


def make_planted(rng: random.Random) -> tuple[list[dict], dict, dict]:
    pool_r = rejected_pool(rng)
    refs_a = canonical_refs(rng, 16, 0)
    refs_s = canonical_refs(rng, 12, 100)
    refs_r = canonical_refs(rng, 240, 200)
    docs, truth = [], {}
    plan = []
    for venue in ("ICLR2017", "ArxivLG"):
        plan += [(venue, True)] * 15 + [(venue, False)] * 15 + [(venue, None)] * 2
    for n, (venue, accepted) in enumerate(plan):
        mid = f"{venue.lower()}-{n:03d}"
        if accepted:
            extra = [w for w in ACCEPTED_POOL if w not in CORE]
            head = list(CORE) if rng.random() < 0.5 else ["neural"]
            title = " ".join(head + rng.sample(extra, rng.randint(2, 4))).capitalize()
            abstract = accepted_text(rng, 3, 10)
            intro = accepted_text(rng, 5, 10)
            cited = rng.sample(refs_a, 8) + rng.sample(refs_s, 1)
        elif accepted is False:
            private = rng.sample(pool_r, 8)
            title = sentence(["the"] + [rng.choice(private[:4]) for _ in range(rng.randint(7, 9))])[:-1]
            abstract = rejected_text(rng, private, 14, 6)
            intro = rejected_text(rng, private, 28, 6)
            cited = rng.sample(refs_r, 6) + rng.sample(refs_s, 1)
        else:
            private = rng.sample(pool_r, 8)
            title = " ".join(rng.sample(OTHER_TECH, 2) + rng.sample(private, 2)).capitalize()
            abstract = accepted_text(rng, 1, 6) + " " + rejected_text(rng, private, 2, 6)
            intro = accepted_text(rng, 2, 6) + " " + rejected_text(rng, private, 4, 6)
            cited = rng.sample(refs_a, 3) + rng.sample(refs_r, 3)
        email_domain = "edu" if n % 2 == 0 else "com"
        docs.append(
            {
                "id": mid,
                "venue": venue,
                "title": title,
                "abstract": abstract,
                "introduction": intro,
                "accepted": accepted,
                "author_emails": [f"author{n}@lab{n % 5}.example.{email_domain}"],
                "references": [render_ref(rng, r) for r in cited],
            }
        )
        truth[mid] = sorted(r["key"] for r in cited)
    lexicon_words = {"accepted": sorted(set(ACCEPTED_POOL)), "rejected": pool_r}
    return docs, truth, lexicon_words


def write_lexicons(rng: random.Random, words: dict) -> None:
    def table(name: str, header: str, ranges: dict) -> None:
        rows = [f"word\t{header}"]
        for cls in ("accepted", "rejected"):
            lo, hi = ranges[cls]
            for w in words[cls]:
                rows.append(f"{w}\t{round(rng.uniform(lo, hi), 2)}")
        (LEX / name).write_text("\n".join(rows) + "\n", encoding="utf-8")

    table("aoa.tsv", "aoa_years", {"accepted": (10.0, 14.0), "rejected": (3.0, 6.5)})
    table("concreteness.tsv", "concreteness", {"accepted": (1.3, 2.6), "rejected": (3.8, 5.0)})
    table("frequency.tsv", "count", {"accepted": (5, 800), "rejected": (20000, 400000)})
    for name, items in (
        ("ai_jargon.txt", AI_JARGON),
        ("general_science_jargon.txt", GENERAL_JARGON),
        ("science_specific_common.txt", SCIENCE_COMMON),
    ):
        (LEX / name).write_text("\n".join(sorted(items)) + "\n", encoding="utf-8")


def make_separable(rng: random.Random, pool_r: list[str]) -> list[dict]:
    docs = []
    for n in range(200):
        accepted = n < 100
        if accepted:
            abstract = accepted_text(rng, 2, 8)
            title = " ".join(rng.sample(OTHER_TECH, 4)).capitalize()
        else:
            private = rng.sample(pool_r, 10)
            abstract = rejected_text(rng, private, 6, 6)
            title = " ".join(rng.sample(private, 4)).capitalize()
        docs.append({"id": f"sep-{n:03d}", "venue": "ICLR2017", "title": title, "abstract": abstract,
                     "introduction": abstract, "accepted": accepted, "author_emails": [], "references": []})
    return docs


def write_jsonl(path: Path, docs: list[dict]) -> None:
    path.write_text("".join(json.dumps(d, sort_keys=True) + "\n" for d in docs), encoding="utf-8")


def main() -> None:
    rng = random.Random(SEED)
    common = set(read_common())
    leaked = [w for w in ACCEPTED_POOL if w in common]
    assert not leaked, f"accepted vocabulary found in the common-word list: {leaked}"
    docs, truth, words = make_planted(rng)
    write_jsonl(HERE / "planted.jsonl", docs)
    write_jsonl(HERE / "mini30.jsonl", docs[::2][:30])
    (HERE / "planted_truth.json").write_text(json.dumps(truth, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    write_lexicons(rng, words)
    write_jsonl(HERE / "separable200.jsonl", make_separable(rng, words["rejected"]))


if __name__ == "__main__":
    main()

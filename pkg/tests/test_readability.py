import pytest
from hypothesis import given
from hypothesis import strategies as st

from peerscope.errors import NoText
from peerscope.lexicons import ListTag, wordlist_from_words
from peerscope.readability import (
    fre,
    fre_from_counts,
    jargon_ratio,
    ndc,
    ndc_from_counts,
    readability_scores,
    text_counts,
    word_syllables,
)

COMMON = wordlist_from_words("the a cat dog sat ran on mat big red".split(), ListTag.NDC_COMMON)


def test_fre_two_sentences():
    counts = text_counts("The cat sat. The dog ran.")
    assert (counts.n_words, counts.n_sentences, counts.n_syllables) == (6, 2, 6)
    assert fre("The cat sat. The dog ran.") == pytest.approx(206.835 - 1.015 * 3 - 84.6, abs=1e-9)
    assert fre("The cat sat. The dog ran.") == pytest.approx(119.19, abs=0.01)


def test_fre_single_word():
    # 206.835 - 1.015 - 84.6
    assert fre("cat") == pytest.approx(121.22, abs=1e-9)


def test_empty_text_raises():
    for fn in (fre, lambda t: ndc(t, COMMON)):
        with pytest.raises(NoText):
            fn("")
        with pytest.raises(NoText):
            fn("... 42 !")


def test_ndc_examples():
    assert ndc_from_counts(10, 1, 0) == pytest.approx(0.496, abs=1e-12)
    assert ndc_from_counts(10, 1, 2) == pytest.approx(15.79 * 0.2 + 0.496 + 3.6365, abs=1e-12)
    assert ndc_from_counts(10, 1, 2) == pytest.approx(7.2905, abs=1e-9)
    assert ndc("The big red cat sat on the mat. The dog ran.", COMMON) == pytest.approx(0.0496 * 5.5)
    assert ndc("The cat sat on the zebra.", COMMON) == pytest.approx(15.79 / 6 + 0.0496 * 6 + 3.6365)


def test_ndc_adjustment_is_strictly_above_threshold():
    at = ndc_from_counts(20, 1, 1)
    assert at == pytest.approx(15.79 * 0.05 + 0.0496 * 20)
    assert ndc_from_counts(19, 1, 1) > at + 3.6


def test_hyphenated_and_possessive_syllables():
    assert word_syllables("state-of-the-art") == 4
    assert word_syllables("model's") == 2


def test_jargon_ratio_examples():
    jargon = wordlist_from_words(["gradient", "descent"], ListTag.AI_JARGON)
    assert jargon_ratio(["gradient", "descent", "cat"], jargon) == pytest.approx(2 / 3)
    assert jargon_ratio(["cat", "dog"], jargon) == 0.0
    assert jargon_ratio(["gradient", "descent"], jargon) == 1.0
    with pytest.raises(NoText):
        jargon_ratio([], jargon)


def test_readability_scores_bundle(fixture_lists):
    text = "We train a neural network with gradient descent. The model is simple."
    s = readability_scores(text, fixture_lists["common"], fixture_lists["general_jargon"],
                           fixture_lists["science_common"], fixture_lists["ai_jargon"])
    assert s.fre == pytest.approx(fre(text))
    assert s.ndc == pytest.approx(ndc(text, fixture_lists["common"]))
    assert (s.n_words, s.n_sentences) == (12, 2)
    for value in (s.jargon_general, s.jargon_science_specific, s.jargon_ai):
        assert 0.0 <= value <= 1.0


words = st.lists(st.sampled_from(["cat", "dog", "window", "make", "banana", "zebra", "the"]), min_size=1, max_size=12)


@given(st.lists(words, min_size=1, max_size=6))
def test_counts_additive_over_sentences(sentences):
    text = " ".join(" ".join(s) + "." for s in sentences)
    counts = text_counts(text)
    assert counts.n_sentences == len(sentences)
    assert counts.n_words == sum(len(s) for s in sentences)
    assert fre(text) == pytest.approx(fre_from_counts(counts.n_words, counts.n_sentences, counts.n_syllables))


@given(words)
def test_common_words_lower_ndc(ws):
    text = " ".join(ws) + "."
    all_common = wordlist_from_words(ws, ListTag.NDC_COMMON)
    assert ndc(text, all_common) == pytest.approx(0.0496 * len(ws))
    assert ndc(text, all_common) <= ndc(text, COMMON) + 1e-12

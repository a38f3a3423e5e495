"""Keyword extraction tests, anchored by an independent brute-force scorer."""
import numpy as np
import pytest

from credo.rake import extract_candidates, extract_keywords, score_words
from tests.conftest import EINSTEIN_PARAGRAPH

# Small closed vocabulary for randomized cross-checks.
CONTENT = [
    "maple", "quartz", "lantern", "river", "signal", "harvest", "copper",
    "meadow", "circuit", "granite", "beacon", "orchard", "vessel", "timber",
]
STOPS = ["the", "of", "and", "to", "in", "a", "is", "was"]
PUNCT = [",", ".", ";", ":", "!"]


def brute_force_keywords(text, stopwords, top_k):
    """Deliberately different implementation: split to sentences by regex,
    walk characters, then score with explicit dict loops."""
    import re

    phrases = []
    for sentence in re.split(r"(?<=[.!?])\s+", text):
        fragments = re.split(r"[^\w\s\-]+", sentence.lower())
        for fragment in fragments:
            current = []
            for raw in fragment.split():
                word = raw.strip("-")
                if not word or word in stopwords:
                    if current:
                        phrases.append(current)
                    current = []
                else:
                    current.append(word)
            if current:
                phrases.append(current)
    freq = {}
    deg = {}
    for phrase in phrases:
        for word in phrase:
            freq[word] = freq.get(word, 0) + 1
            deg[word] = deg.get(word, 0) + len(phrase)
    seen = {}
    order = []
    for position, phrase in enumerate(phrases):
        key = " ".join(phrase)
        if key not in seen:
            seen[key] = sum(deg[w] / freq[w] for w in phrase)
            order.append(key)
    # stable sort by score descending; insertion order breaks ties the same
    # way the library's earliest-span rule does because phrases were
    # appended in reading order
    ranked = sorted(order, key=lambda k: -seen[k])
    return [(k, seen[k]) for k in ranked[:top_k]]


def random_text(rng):
    words = []
    for _ in range(int(rng.integers(10, 60))):
        r = rng.random()
        if r < 0.30:
            words.append(STOPS[int(rng.integers(len(STOPS)))])
        elif r < 0.38:
            words.append(
                CONTENT[int(rng.integers(len(CONTENT)))]
                + PUNCT[int(rng.integers(len(PUNCT)))]
            )
        else:
            words.append(CONTENT[int(rng.integers(len(CONTENT)))])
    return " ".join(words)


class TestCandidates:
    def test_empty(self):
        assert extract_candidates("", {"the"}) == []

    def test_stopword_split(self):
        got = extract_candidates(
            "deep learning improves deep parsing", {"improves"}
        )
        assert [c.phrase for c in got] == ["deep learning", "deep parsing"]

    def test_only_stopwords(self):
        assert extract_candidates("the of and", {"the", "of", "and"}) == []

    def test_punctuation_breaks_phrases(self):
        got = extract_candidates("copper, lantern river", set())
        assert [c.phrase for c in got] == ["copper", "lantern river"]

    def test_sentence_boundary_breaks_phrases(self):
        got = extract_candidates("copper lantern. river signal", set())
        assert [c.phrase for c in got] == ["copper lantern", "river signal"]

    def test_apostrophe_breaks_possessives(self):
        got = extract_candidates("pennsylvania's lincoln university", {"s"})
        assert [c.phrase for c in got] == ["pennsylvania", "lincoln university"]

    def test_spans_are_maximal_and_ordered(self):
        got = extract_candidates("maple quartz the river", {"the"})
        assert got[0].span == (0, 2)
        assert got[1].span == (2, 3)


class TestScoreWords:
    def test_shared_word_degree(self):
        cands = extract_candidates("deep learning improves deep parsing", {"improves"})
        scores = score_words(cands)
        assert scores == {"deep": 2.0, "learning": 2.0, "parsing": 2.0}

    def test_single_word(self):
        cands = extract_candidates("apple", set())
        assert score_words(cands) == {"apple": 1.0}

    def test_absent_word_not_in_map(self):
        scores = score_words(extract_candidates("apple pie", {"pie"}))
        assert "pie" not in scores


class TestExtractKeywords:
    def test_empty(self):
        assert extract_keywords("", {"the"}) == []

    def test_sum_of_word_scores(self):
        got = extract_keywords(
            "deep learning improves deep parsing", {"improves"}, top_k=2
        )
        assert [(k.phrase, k.kscore) for k in got] == [
            ("deep learning", 4.0),
            ("deep parsing", 4.0),
        ]

    def test_top_k_bounds(self):
        got = extract_keywords("maple quartz. river", set(), top_k=10)
        assert len(got) == 2  # fewer candidates than requested is fine
        with pytest.raises(ValueError):
            extract_keywords("maple", set(), top_k=0)

    def test_duplicates_merge(self):
        got = extract_keywords("maple river. maple river", set(), top_k=10)
        assert [k.phrase for k in got] == ["maple river"]

    def test_einstein_paragraph_reference_phrases(self, stopwords):
        keywords = extract_keywords(EINSTEIN_PARAGRAPH, stopwords, top_k=3)
        phrases = {k.phrase for k in keywords}
        assert "degree-granting black university" in phrases
        assert "lincoln university" in phrases
        by_phrase = {
            k.phrase: k.kscore
            for k in extract_keywords(EINSTEIN_PARAGRAPH, stopwords, top_k=10)
        }
        assert by_phrase["degree-granting black university"] == pytest.approx(8.5)
        assert by_phrase["lincoln university"] == pytest.approx(4.5)
        assert by_phrase["ceremony conferring"] == pytest.approx(4.0)

    def test_matches_brute_force_on_random_texts(self, rng):
        stopset = set(STOPS)
        for _ in range(50):
            text = random_text(rng)
            ours = extract_keywords(text, stopset, top_k=8)
            reference = brute_force_keywords(text, stopset, top_k=8)
            assert [(k.phrase, k.kscore) for k in ours] == [
                (p, pytest.approx(s, abs=0)) for p, s in reference
            ]

    def test_sorted_non_increasing_with_deterministic_ties(self, rng):
        for _ in range(20):
            keywords = extract_keywords(random_text(rng), set(STOPS), top_k=12)
            scores = [k.kscore for k in keywords]
            assert scores == sorted(scores, reverse=True)

    def test_stopword_only_sentence_changes_nothing(self, rng):
        stopset = set(STOPS)
        for _ in range(10):
            text = random_text(rng)
            base = {(k.phrase, k.kscore) for k in extract_keywords(text, stopset, 20)}
            padded = text + ". the of and in a."
            again = {(k.phrase, k.kscore) for k in extract_keywords(padded, stopset, 20)}
            assert base == again

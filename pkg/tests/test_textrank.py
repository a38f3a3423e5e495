"""Summarization tests with a dense power-iteration reference."""
import numpy as np
import pytest

from credo.bm25 import KbDocument
from credo.text import split_sentences
from credo.textrank import SentenceGraph, SummaryConfig, sentence_graph, summarize, textrank

WORDS = ["ash", "birch", "cedar", "dune", "elm", "fern", "gale", "holly"]


def reference_power_iteration(weights, damping=0.85, tol=1e-6, max_iters=100):
    """Explicit transition-matrix construction, then plain power iteration."""
    m = weights.shape[0]
    transition = np.zeros((m, m))
    for j in range(m):
        total = weights[j].sum()
        if total == 0:
            transition[j, :] = 1.0 / m
        else:
            transition[j, :] = weights[j] / total
    scores = np.full(m, 1.0 / m)
    for _ in range(max_iters):
        updated = (1 - damping) / m + damping * transition.T @ scores
        done = np.max(np.abs(updated - scores)) < tol
        scores = updated
        if done:
            break
    return scores


def random_graph(rng, max_nodes=50):
    m = int(rng.integers(2, max_nodes + 1))
    w = rng.random((m, m)) * (rng.random((m, m)) < 0.4)
    w = np.triu(w, 1)
    w = w + w.T
    # occasionally isolate a node to exercise dangling handling
    if m > 2 and rng.random() < 0.5:
        idx = int(rng.integers(m))
        w[idx, :] = 0.0
        w[:, idx] = 0.0
    return SentenceGraph(w)


class TestSentenceGraph:
    def test_single_sentence(self):
        g = sentence_graph(split_sentences("One sentence only."))
        assert g.size == 1
        assert g.weights.shape == (1, 1)
        assert g.weights[0, 0] == 0.0

    def test_identical_sentences_positive_symmetric(self):
        g = sentence_graph(split_sentences("The cat sat. The cat sat."))
        assert g.weights[0, 1] == g.weights[1, 0] > 0.0

    def test_disjoint_sentences_zero(self):
        g = sentence_graph(split_sentences("ash birch cedar. dune elm fern."))
        assert g.weights[0, 1] == 0.0

    def test_weights_finite_nonnegative(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 6))
            text = ". ".join(
                " ".join(WORDS[int(rng.integers(len(WORDS)))] for _ in range(4))
                for _ in range(n)
            ) + "."
            g = sentence_graph(split_sentences(text))
            assert np.all(np.isfinite(g.weights))
            assert np.all(g.weights >= 0)
            np.testing.assert_array_equal(g.weights, g.weights.T)
            assert np.all(np.diag(g.weights) == 0)


class TestTextrank:
    def test_single_node(self):
        assert textrank(SentenceGraph(np.zeros((1, 1))))[0] == 1.0

    def test_two_identical(self):
        g = sentence_graph(split_sentences("The cat sat. The cat sat."))
        np.testing.assert_allclose(textrank(g), [0.5, 0.5], atol=1e-9)

    def test_three_node_chain_matches_reference(self):
        w = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
        got = textrank(SentenceGraph(w))
        expected = reference_power_iteration(w)
        np.testing.assert_allclose(got, expected, atol=1e-6)
        assert got[1] > got[0]

    def test_matches_reference_on_random_graphs(self, rng):
        for _ in range(60):
            graph = random_graph(rng)
            got = textrank(graph)
            expected = reference_power_iteration(graph.weights)
            np.testing.assert_allclose(got, expected, atol=1e-6)
            assert got.sum() == pytest.approx(1.0, abs=1e-6)
            assert np.all(got >= 0)

    def test_converges_within_iteration_budget(self, rng):
        config = SummaryConfig(tolerance=1e-6, max_iters=100)
        for _ in range(20):
            graph = random_graph(rng)
            m = graph.size
            w = graph.weights
            out = w.sum(axis=1)
            dangling = out == 0.0
            safe = np.where(dangling, 1.0, out)
            scores = np.full(m, 1.0 / m)
            deltas = []
            for _ in range(config.max_iters):
                per_source = np.where(dangling, 0.0, scores / safe)
                updated = (1 - 0.85) / m + 0.85 * (w.T @ per_source + scores[dangling].sum() / m)
                deltas.append(np.max(np.abs(updated - scores)))
                scores = updated
                if deltas[-1] < config.tolerance:
                    break
            assert deltas[-1] < config.tolerance  # exits before the cap
            assert len(deltas) < config.max_iters

    def test_permutation_covariance(self, rng):
        graph = random_graph(rng, max_nodes=12)
        m = graph.size
        perm = rng.permutation(m)
        permuted = SentenceGraph(graph.weights[np.ix_(perm, perm)])
        base = textrank(graph)
        got = textrank(permuted)
        np.testing.assert_allclose(got, base[perm], atol=1e-9)


class TestSummarize:
    def doc(self, text):
        return KbDocument("d", "t", text, "u")

    def test_short_doc_returned_whole(self):
        text = "ash birch. cedar dune."
        assert summarize(self.doc(text), 1000) == "ash birch. cedar dune."

    def test_identical_sentences_earlier_wins(self):
        text = "The cat sat. The cat sat."
        assert summarize(self.doc(text), 12) == "The cat sat."

    def test_budget_respected_in_original_order(self):
        # five sentences; the repeated-vocabulary ones rank highest
        text = (
            "ash birch cedar dune. ash birch cedar elm. ash birch cedar fern. "
            "gale holly. holly gale."
        )
        summary = summarize(self.doc(text), 45)
        sentences = [s.text for s in split_sentences(text)]
        picked = [s for s in sentences if s in summary]
        assert summary == " ".join(picked)  # document order
        assert len(summary) <= 1.2 * 45 + max(len(s) for s in sentences)

    def test_first_sentence_always_accepted(self):
        text = "ash birch cedar dune elm fern gale holly."
        assert summarize(self.doc(text), 1) == text

    def test_target_validation(self):
        with pytest.raises(ValueError):
            summarize(self.doc("a."), 0)

    def test_scores_probability_vector_on_real_docs(self, rng):
        text = (
            "the amber kettle rises near the harbor. "
            "survey records from the harbor confirm that the amber kettle rises. "
            "field notes describe how the amber kettle rises near the harbor."
        )
        sentences = split_sentences(text)
        scores = textrank(sentence_graph(sentences))
        assert scores.sum() == pytest.approx(1.0, abs=1e-6)

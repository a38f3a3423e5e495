"""Extractive summarization: PageRank over a BM25 sentence-similarity graph.

Each sentence is scored against every other using the document's own
sentences as the BM25 corpus; the symmetrized scores form edge weights.
The summary keeps the highest-ranked sentences, re-emitted in original
order, until the character budget runs out.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bm25 import B, K1, bm25_score, index_token_lists
from .text import Sentence, split_sentences


@dataclass
class SentenceGraph:
    weights: np.ndarray  # (m, m) symmetric, zero diagonal

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])


@dataclass
class SummaryConfig:
    damping: float = 0.85
    tolerance: float = 1e-6
    max_iters: int = 100
    slack: float = 1.2


def sentence_graph(
    sentences: Sequence[Sentence], k1: float = K1, b: float = B
) -> SentenceGraph:
    if not sentences:
        raise ValueError("sentence graph needs at least one sentence")
    token_lists = [[t.surface for t in s.tokens] for s in sentences]
    m = len(sentences)
    index = index_token_lists([(f"{i:06d}", toks) for i, toks in enumerate(token_lists)])
    weights = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            forward = bm25_score(token_lists[i], f"{j:06d}", index, k1, b)
            backward = bm25_score(token_lists[j], f"{i:06d}", index, k1, b)
            weights[i, j] = weights[j, i] = 0.5 * (forward + backward)
    return SentenceGraph(weights)


def textrank(graph: SentenceGraph, config: SummaryConfig | None = None) -> np.ndarray:
    """Weighted PageRank scores over the sentence graph.

    Nodes with no outgoing weight distribute their mass uniformly, which
    keeps the iteration stochastic and the scores summing to one.
    """
    config = config or SummaryConfig()
    m = graph.size
    if m == 0:
        raise ValueError("cannot rank an empty graph")
    if m == 1:
        return np.array([1.0])
    w = graph.weights
    out = w.sum(axis=1)
    dangling = out == 0.0
    safe_out = np.where(dangling, 1.0, out)
    d = config.damping
    scores = np.full(m, 1.0 / m)
    for _ in range(config.max_iters):
        per_source = np.where(dangling, 0.0, scores / safe_out)
        inflow = w.T @ per_source
        dangling_mass = scores[dangling].sum()
        updated = (1.0 - d) / m + d * (inflow + dangling_mass / m)
        delta = np.max(np.abs(updated - scores))
        scores = updated
        if delta < config.tolerance:
            break
    return scores


def rank_sentences(text: str, config: SummaryConfig | None = None) -> tuple[list[Sentence], np.ndarray]:
    sentences = split_sentences(text)
    if not sentences:
        return [], np.zeros(0)
    return sentences, textrank(sentence_graph(sentences), config)


def summarize(doc, target_chars: int, config: SummaryConfig | None = None) -> str:
    """Greedy extractive summary close to ``target_chars`` characters.

    Sentences are taken best-first until the next one would push past
    slack * target_chars; at least one sentence always survives.  Accepted
    sentences come back in document order.
    """
    if target_chars < 1:
        raise ValueError("target_chars must be at least 1")
    config = config or SummaryConfig()
    text = doc.text if hasattr(doc, "text") else str(doc)
    sentences, scores = rank_sentences(text, config)
    if not sentences:
        return ""
    order = sorted(range(len(sentences)), key=lambda i: (-scores[i], i))
    budget = config.slack * target_chars
    chosen: list[int] = []
    total = 0
    for i in order:
        length = len(sentences[i].text)
        if chosen and total + length > budget:
            break
        chosen.append(i)
        total += length
    return " ".join(sentences[i].text for i in sorted(chosen))

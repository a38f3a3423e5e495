"""Okapi BM25 retrieval over an in-memory inverted index.

The scorer uses the idf-floor variation: terms whose raw idf goes negative
(they appear in more than half the corpus) are rescored as a small fraction
of the average positive idf instead, so common terms can never subtract
relevance.  When no term has positive idf the average falls back to 1.0,
which keeps degenerate corpora (e.g. two identical sentences) scoreable.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .rake import Keyword
from .text import token_surfaces

K1 = 1.2
B = 0.75
IDF_EPSILON = 0.25


class IngestionError(ValueError):
    pass


class UnknownDocumentError(KeyError):
    pass


class EmptyQueryError(ValueError):
    pass


@dataclass(frozen=True)
class KbDocument:
    doc_id: str
    title: str
    text: str
    source_url: str
    author: str | None = None


@dataclass
class InvertedIndex:
    postings: dict[str, list[tuple[str, int]]]
    doc_lengths: dict[str, int]
    avg_doc_length: float
    doc_count: int
    docs: dict[str, KbDocument]
    _tf: dict[str, dict[str, int]] = field(repr=False, default_factory=dict)
    _avg_positive_idf: float | None = field(repr=False, default=None)

    def __post_init__(self) -> None:
        if not self._tf:
            self._tf = {t: dict(plist) for t, plist in self.postings.items()}

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        return math.log((self.doc_count - df + 0.5) / (df + 0.5))

    def avg_positive_idf(self) -> float:
        if self._avg_positive_idf is None:
            positive = [v for v in (self.idf(t) for t in self.postings) if v > 0.0]
            self._avg_positive_idf = (
                sum(positive) / len(positive) if positive else 1.0
            )
        return self._avg_positive_idf

    def floored_idf(self, term: str, epsilon: float = IDF_EPSILON) -> float:
        raw = self.idf(term)
        return raw if raw > 0.0 else epsilon * self.avg_positive_idf()

    def term_frequency(self, term: str, doc_id: str) -> int:
        return self._tf.get(term, {}).get(doc_id, 0)


def index_token_lists(items: Sequence[tuple[str, Sequence[str]]]) -> InvertedIndex:
    """Build an index from (doc_id, tokens) pairs; used directly by the
    sentence-similarity graph where documents are sentences."""
    postings: dict[str, list[tuple[str, int]]] = {}
    lengths: dict[str, int] = {}
    for doc_id, tokens in items:
        if doc_id in lengths:
            raise IngestionError(f"duplicate doc_id: {doc_id}")
        lengths[doc_id] = len(tokens)
        for term, tf in Counter(tokens).items():
            postings.setdefault(term, []).append((doc_id, tf))
    for plist in postings.values():
        plist.sort(key=lambda entry: entry[0])
    n = len(lengths)
    avg = sum(lengths.values()) / n if n else 0.0
    return InvertedIndex(postings, lengths, avg, n, {})


def build_index(corpus: Iterable[KbDocument]) -> InvertedIndex:
    docs: dict[str, KbDocument] = {}
    items: list[tuple[str, list[str]]] = []
    for doc in corpus:
        if doc.doc_id in docs:
            raise IngestionError(f"duplicate doc_id: {doc.doc_id}")
        docs[doc.doc_id] = doc
        items.append((doc.doc_id, token_surfaces(doc.text)))
    index = index_token_lists(items)
    index.docs = docs
    return index


def bm25_score(
    query_terms: Sequence[str],
    doc_id: str,
    index: InvertedIndex,
    k1: float = K1,
    b: float = B,
    epsilon: float = IDF_EPSILON,
) -> float:
    """Score one document against a query term multiset.

    Repeated query terms contribute once per occurrence; document-side
    repetition saturates through the usual k1 normalization.
    """
    if doc_id not in index.doc_lengths:
        raise UnknownDocumentError(doc_id)
    dl = index.doc_lengths[doc_id]
    norm = k1 * (1.0 - b + b * dl / index.avg_doc_length)
    score = 0.0
    for term in query_terms:
        tf = index.term_frequency(term, doc_id)
        if tf == 0:
            continue
        score += index.floored_idf(term, epsilon) * tf * (k1 + 1.0) / (tf + norm)
    return score


@dataclass(frozen=True)
class RetrievedDoc:
    doc: KbDocument
    rank: int
    bm25: float


@dataclass(frozen=True)
class ResultSet:
    docs: tuple[RetrievedDoc, ...]

    @property
    def n(self) -> int:
        return len(self.docs)


def retrieve(
    keywords: Sequence[Keyword], index: InvertedIndex, limit: int = 5
) -> ResultSet:
    """Bag-of-words OR query from the keyword phrases.

    Documents with positive score are ranked by score, ties by doc_id.
    An empty keyword list is an error; an empty result set is not.
    """
    if limit < 1:
        raise ValueError("limit must be at least 1")
    if not keywords:
        raise EmptyQueryError("cannot build a retrieval query from zero keywords")
    terms: list[str] = []
    seen: set[str] = set()
    for kw in keywords:
        for term in kw.phrase.split():
            if term not in seen:
                seen.add(term)
                terms.append(term)
    candidates: set[str] = set()
    for term in terms:
        candidates.update(doc_id for doc_id, _ in index.postings.get(term, ()))
    scored = [
        (doc_id, bm25_score(terms, doc_id, index)) for doc_id in sorted(candidates)
    ]
    scored = [(doc_id, s) for doc_id, s in scored if s > 0.0]
    scored.sort(key=lambda entry: (-entry[1], entry[0]))
    top = scored[:limit]
    return ResultSet(
        tuple(
            RetrievedDoc(index.docs[doc_id], rank + 1, s)
            for rank, (doc_id, s) in enumerate(top)
        )
    )


def load_kb_jsonl(path: str | Path) -> list[KbDocument]:
    """Knowledge-base ingestion: one JSON object per line."""
    docs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            docs.append(
                KbDocument(
                    doc_id=raw["doc_id"],
                    title=raw["title"],
                    text=raw["text"],
                    source_url=raw["source_url"],
                    author=raw.get("author"),
                )
            )
        except (json.JSONDecodeError, KeyError) as exc:
            raise IngestionError(f"{path}:{lineno}: bad knowledge-base record: {exc}") from exc
    return docs


def save_index(index: InvertedIndex, path: str | Path) -> None:
    payload = {
        "doc_count": index.doc_count,
        "avg_doc_length": index.avg_doc_length,
        "doc_lengths": index.doc_lengths,
        "postings": {t: index.postings[t] for t in sorted(index.postings)},
        "docs": {
            doc_id: {
                "doc_id": d.doc_id,
                "title": d.title,
                "text": d.text,
                "source_url": d.source_url,
                "author": d.author,
            }
            for doc_id, d in sorted(index.docs.items())
        },
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_index(path: str | Path) -> InvertedIndex:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    postings = {
        t: [(doc_id, tf) for doc_id, tf in plist]
        for t, plist in payload["postings"].items()
    }
    docs = {doc_id: KbDocument(**raw) for doc_id, raw in payload["docs"].items()}
    return InvertedIndex(
        postings,
        payload["doc_lengths"],
        payload["avg_doc_length"],
        payload["doc_count"],
        docs,
    )

"""RAKE keyword extraction.

Candidate phrases are maximal runs of content words between stopwords,
punctuation and sentence boundaries.  Each word scores deg/freq over the
candidate list; a phrase scores the sum of its word scores.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .text import Token, split_sentences

# Any run of characters that is neither word-like, whitespace nor a hyphen
# breaks a phrase.  Hyphens glue compounds ("degree-granting"); apostrophes
# split possessives so "pennsylvania's lincoln" cannot fuse into one phrase.
_PHRASE_BREAK_RE = re.compile(r"[^\w\s\-]+")


@dataclass(frozen=True)
class CandidatePhrase:
    words: tuple[Token, ...]
    span: tuple[int, int]  # [start, end) positions in the candidate token stream

    @property
    def phrase(self) -> str:
        return " ".join(t.surface for t in self.words)


@dataclass(frozen=True)
class Keyword:
    phrase: str
    kscore: float


def extract_candidates(text: str, stopwords: Iterable[str]) -> list[CandidatePhrase]:
    stopset = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    candidates: list[CandidatePhrase] = []
    run: list[Token] = []
    position = 0

    def flush() -> None:
        if run:
            candidates.append(
                CandidatePhrase(tuple(run), (run[0].position, run[-1].position + 1))
            )
            run.clear()

    for sentence in split_sentences(text):
        for fragment in _PHRASE_BREAK_RE.split(sentence.text.lower()):
            for piece in fragment.split():
                word = piece.strip("-")
                if not word:
                    flush()  # a bare dash acts as punctuation
                    continue
                if word in stopset:
                    flush()
                    continue
                run.append(Token(word, position))
                position += 1
            flush()
        flush()
    return candidates


def score_words(candidates: Sequence[CandidatePhrase]) -> dict[str, float]:
    """deg(w)/freq(w) per content word, counted per occurrence."""
    freq: Counter[str] = Counter()
    deg: Counter[str] = Counter()
    for cand in candidates:
        length = len(cand.words)
        for token in cand.words:
            freq[token.surface] += 1
            deg[token.surface] += length
    return {word: deg[word] / freq[word] for word in freq}


def extract_keywords(
    text: str, stopwords: Iterable[str], top_k: int = 10
) -> list[Keyword]:
    """Top-k candidate phrases by summed word score.

    Duplicate phrases merge; ties break toward the earlier occurrence.
    """
    if top_k < 1:
        raise ValueError("top_k must be at least 1")
    candidates = extract_candidates(text, stopwords)
    word_scores = score_words(candidates)
    best: dict[str, tuple[float, int]] = {}
    for cand in candidates:
        if cand.phrase in best:
            continue
        kscore = sum(word_scores[t.surface] for t in cand.words)
        best[cand.phrase] = (kscore, cand.span[0])
    ordered = sorted(best.items(), key=lambda kv: (-kv[1][0], kv[1][1]))
    return [Keyword(phrase, kscore) for phrase, (kscore, _) in ordered[:top_k]]

"""Tokenization, sentence splitting, stopwords, vocabulary and embeddings.

Every downstream stage consumes this module's output, so the rules are
deliberately small and deterministic: lowercase, split on whitespace, strip
surrounding punctuation, keep hyphenated compounds whole.
"""
from __future__ import annotations

import string
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

# Characters stripped from the ends of whitespace-separated pieces.  The
# typographic variants matter: news text is full of curly quotes and dashes.
_STRIP_CHARS = string.punctuation + "‘’“”«»–—…¡¿"

_SENTENCE_ENDERS = frozenset(".!?")

_DEFAULT_STOPWORDS_PATH = Path(__file__).parent / "data" / "stopwords_en.txt"

PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"
PAD_ID = 0
UNK_ID = 1


class ConfigurationError(ValueError):
    """Raised when vocabulary and embedding table disagree."""


@dataclass(frozen=True)
class Token:
    surface: str
    position: int


@dataclass(frozen=True)
class Sentence:
    text: str
    index: int
    tokens: tuple[Token, ...]


def tokenize(text: str) -> list[Token]:
    """Lowercase, split on whitespace, strip surrounding punctuation.

    Hyphenated compounds stay single tokens; pieces that strip down to
    nothing (bare punctuation) are dropped.
    """
    tokens: list[Token] = []
    for piece in text.lower().split():
        word = piece.strip(_STRIP_CHARS)
        if word:
            tokens.append(Token(word, len(tokens)))
    return tokens


def token_surfaces(text: str) -> list[str]:
    return [t.surface for t in tokenize(text)]


def split_sentences(text: str) -> list[Sentence]:
    """Split at '.', '!' or '?' followed by whitespace or end of text.

    Abbreviations get no special treatment.  Each sentence keeps its
    original wording (surrounding whitespace trimmed) and carries its own
    tokenization.
    """
    sentences: list[Sentence] = []

    def push(chunk: str) -> None:
        stripped = chunk.strip()
        if stripped:
            sentences.append(
                Sentence(stripped, len(sentences), tuple(tokenize(stripped)))
            )

    start = 0
    n = len(text)
    for i, ch in enumerate(text):
        if ch in _SENTENCE_ENDERS and (i + 1 == n or text[i + 1].isspace()):
            push(text[start : i + 1])
            start = i + 1
    push(text[start:])
    return sentences


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a stopword file: UTF-8, one lowercase word per line, '#' comments."""
    resolved = Path(path) if path is not None else _DEFAULT_STOPWORDS_PATH
    words = []
    for line in resolved.read_text(encoding="utf-8").splitlines():
        entry = line.strip()
        if entry and not entry.startswith("#"):
            words.append(entry)
    return frozenset(words)


class Vocabulary:
    """Token/id bijection with reserved padding and unknown-word slots."""

    def __init__(self, tokens: Iterable[str] = ()):
        self.id_to_token: list[str] = [PAD_TOKEN, UNK_TOKEN]
        self.token_to_id: dict[str, int] = {}
        for surface in tokens:
            self.add(surface)

    @classmethod
    def from_texts(cls, texts: Iterable[str]) -> "Vocabulary":
        vocab = cls()
        for text in texts:
            for surface in token_surfaces(text):
                vocab.add(surface)
        return vocab

    def add(self, surface: str) -> int:
        existing = self.token_to_id.get(surface)
        if existing is not None:
            return existing
        idx = len(self.id_to_token)
        self.token_to_id[surface] = idx
        self.id_to_token.append(surface)
        return idx

    def id_for(self, surface: str) -> int:
        return self.token_to_id.get(surface, UNK_ID)

    def __contains__(self, surface: str) -> bool:
        return surface in self.token_to_id

    def __len__(self) -> int:
        return len(self.id_to_token)


@dataclass
class EmbeddingTable:
    """Dense float64 embedding rows, one per vocabulary id."""

    matrix: np.ndarray

    @classmethod
    def create(
        cls, vocab_size: int, dim: int, rng: np.random.Generator, scale: float = 0.1
    ) -> "EmbeddingTable":
        if dim < 1:
            raise ConfigurationError("embedding dim must be positive")
        return cls(rng.uniform(-scale, scale, size=(vocab_size, dim)))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])


def embed_lookup(token: Token, vocab: Vocabulary, table: EmbeddingTable) -> np.ndarray:
    """Row for the token's id; unknown words fall back to the UNK row."""
    if table.matrix.shape[0] != len(vocab):
        raise ConfigurationError(
            f"embedding table has {table.matrix.shape[0]} rows "
            f"but vocabulary has {len(vocab)} entries"
        )
    return table.matrix[vocab.id_for(token.surface)].copy()

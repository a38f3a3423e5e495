"""Website and author credibility ledgers.

Each labeled training instance multiplies the entity's score by a
logarithmic factor of the instance tag and clamps back into [0, 1].
Updates are order-dependent, so replays must follow dataset order; every
entry carries its instance count to keep replays auditable.

Quirk kept on purpose: a tag of exactly 0 multiplies by 1 + ln(1) = 1 and
leaves the score untouched, so outright-false instances penalize an entity
less than mostly-false ones.  That is how the update rule is defined, not a
bug in this module.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlparse

ANONYMOUS = "anonymous"
DEFAULT_SCORE = 0.5

# Graded instance tags; binary datasets use only the endpoints.
TAG_VALUES = {
    "false": 0.0,
    "mostly false": 0.25,
    "mostly true": 0.75,
    "true": 1.0,
}
TAG_NAMES = {v: k for k, v in TAG_VALUES.items()}


class TagError(ValueError):
    pass


class LedgerParseError(ValueError):
    pass


@dataclass(frozen=True)
class LedgerEntry:
    entity_id: str
    score: float
    count: int


def normalize_domain(url: str) -> str:
    """Registrable host part, lowercased, leading 'www.' dropped."""
    parsed = urlparse(url if "//" in url else f"//{url}")
    host = (parsed.netloc or parsed.path).lower().strip()
    if host.startswith("www."):
        host = host[4:]
    return host


def normalize_author(name: str | None) -> str:
    cleaned = (name or "").strip().lower()
    return cleaned if cleaned else ANONYMOUS


def validate_tag(t: float) -> float:
    if not 0.0 <= t <= 1.0:
        raise TagError(f"tag must lie in [0, 1], got {t}")
    return float(t)


def binarize_tag(t: float) -> float:
    return 1.0 if validate_tag(t) >= 0.5 else 0.0


class ReputationProvider:
    """File-backed seed scores for website ledgers; unknown domains get 0.5."""

    def __init__(self, scores: dict[str, float] | None = None):
        self.scores = dict(scores or {})
        for domain, value in self.scores.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"reputation for {domain} outside [0, 1]: {value}")

    def get(self, domain: str) -> float:
        return self.scores.get(domain, DEFAULT_SCORE)

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "ReputationProvider":
        scores = {}
        for lineno, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), 1
        ):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                scores[raw["domain"]] = float(raw["score"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise LedgerParseError(f"{path}:{lineno}: bad provider record: {exc}") from exc
        return cls(scores)


def init_entry(entity_id: str, provider: ReputationProvider | None = None) -> LedgerEntry:
    """Fresh entry: providers seed website scores, authors always start at 0.5."""
    score = provider.get(entity_id) if provider is not None else DEFAULT_SCORE
    return LedgerEntry(entity_id, score, 0)


def update(entry: LedgerEntry, t: float) -> LedgerEntry:
    """One multiplicative update from an instance tag, clamped into [0, 1]."""
    t = validate_tag(t)
    if t <= 0.5:
        factor = 1.0 + math.log(1.0 - t)
    else:
        factor = 1.0 + math.log(1.0 + t)
    score = min(1.0, max(0.0, factor * entry.score))
    return LedgerEntry(entry.entity_id, score, entry.count + 1)


class TrustLedger:
    """Single-writer map of entity scores; reads of a snapshot are safe."""

    def __init__(self, provider: ReputationProvider | None = None):
        self.provider = provider
        self.entries: dict[str, LedgerEntry] = {}

    def entry(self, entity_id: str) -> LedgerEntry:
        return self.entries.get(entity_id, init_entry(entity_id, self.provider))

    def score(self, entity_id: str) -> float:
        return self.entry(entity_id).score

    def observe(self, entity_id: str, t: float) -> LedgerEntry:
        updated = update(self.entry(entity_id), t)
        self.entries[entity_id] = updated
        return updated

    def __len__(self) -> int:
        return len(self.entries)


def persist(ledger: TrustLedger, path: str | Path) -> None:
    lines = [
        json.dumps(
            {"entity_id": e.entity_id, "score": e.score, "count": e.count},
            sort_keys=True,
        )
        for e in ledger.entries.values()
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def load(path: str | Path, provider: ReputationProvider | None = None) -> TrustLedger:
    ledger = TrustLedger(provider)
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            entry = LedgerEntry(raw["entity_id"], float(raw["score"]), int(raw["count"]))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise LedgerParseError(f"{path}:{lineno}: bad ledger record: {exc}") from exc
        if not 0.0 <= entry.score <= 1.0:
            raise LedgerParseError(f"{path}:{lineno}: score outside [0, 1]")
        ledger.entries[entry.entity_id] = entry
    return ledger

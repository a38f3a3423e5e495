"""Declarative configuration: a flat key = value file.

Lines starting with '#' are comments.  Values are coerced to the type of
the matching default; unknown keys are an error so typos fail loudly.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    seed: int = 7
    stopwords_path: str = ""  # empty -> packaged list

    # embeddings / encoders
    embed_dim: int = 32
    hidden_size: int = 64
    max_tokens: int = 200
    grad_clip: float = 5.0

    # similarity training
    sim_epochs: int = 10
    sim_lr: float = 1e-3
    sim_margin: float = 0.0
    sim_batch_size: int = 32

    # sentiment training
    sent_epochs: int = 10
    sent_lr: float = 1e-3
    sent_batch_size: int = 32

    # retrieval
    bm25_k1: float = 1.2
    bm25_b: float = 0.75
    bm25_idf_epsilon: float = 0.25
    retrieve_limit: int = 5

    # keywords
    rake_top_k: int = 10
    kterm_tau: float = 10.0

    # summarization
    textrank_damping: float = 0.85
    textrank_tolerance: float = 1e-6
    textrank_max_iters: int = 100
    summary_slack: float = 1.2

    # fusion
    weights_lr: float = 0.05
    weights_iterations: int = 400
    mlp_hidden: int = 16
    mlp_lr: float = 0.02
    mlp_epochs: int = 800

    # evaluation
    eval_folds: int = 5
    eval_mode: str = "binary"
    eval_fusion: str = "eq"
    decision_threshold: float = 0.5

    # STS reader
    sts_threshold: float = 2.5

    @classmethod
    def parse(cls, text: str) -> "Config":
        defaults = cls()
        known = {f.name: f.type for f in fields(cls)}
        values: dict[str, object] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, _, raw = stripped.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key not in known:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            current = getattr(defaults, key)
            try:
                if isinstance(current, bool):
                    values[key] = raw.lower() in ("1", "true", "yes", "on")
                elif isinstance(current, int):
                    values[key] = int(raw)
                elif isinstance(current, float):
                    values[key] = float(raw)
                else:
                    values[key] = raw
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key}: {raw!r}") from exc
        return cls(**values)  # type: ignore[arg-type]

    @classmethod
    def load(cls, path: str | Path) -> "Config":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    def dump(self) -> str:
        lines = ["# credo configuration"]
        for f in fields(self):
            lines.append(f"{f.name} = {getattr(self, f.name)}")
        return "\n".join(lines) + "\n"

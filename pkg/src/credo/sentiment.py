"""LSTM sentiment classifier and the neutrality feature derived from it.

A single-direction LSTM reads the text, a pooling layer averages the hidden
states over all steps, and a logistic head turns the pooled representation
into the probability of positive sentiment.  Neutrality measures how far
that probability sits from either pole: 1 at p = 0.5, 0 at the extremes.
Training is end-to-end (LSTM and head jointly) on +1/-1 labels.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import nn
from .text import Vocabulary, token_surfaces


@dataclass(frozen=True)
class SentimentExample:
    text: str
    label: int  # +1 positive, -1 negative


@dataclass
class SentimentTraining:
    embed_dim: int = 32
    hidden_size: int = 64
    epochs: int = 10
    learning_rate: float = 1e-3
    batch_size: int = 32
    max_tokens: int = 200
    grad_clip: float = 5.0
    seed: int = 7


@dataclass
class SentimentModel:
    vocab: Vocabulary
    params: dict[str, np.ndarray]  # embedding, w_x, w_h, bias, head_w, head_b
    max_tokens: int
    meta: dict = field(default_factory=dict)

    def lstm(self) -> nn.LSTMParams:
        return nn.LSTMParams(self.params["w_x"], self.params["w_h"], self.params["bias"])


def _token_ids(text: str, vocab: Vocabulary, max_tokens: int) -> list[int]:
    return [vocab.id_for(s) for s in token_surfaces(text)[:max_tokens]]


def sentiment_prob(text: str, model: SentimentModel) -> float:
    """Probability of positive sentiment in (0, 1)."""
    ids = _token_ids(text, model.vocab, model.max_tokens)
    if not ids:
        raise nn.EmptySequenceError("text produced no tokens to classify")
    xs = model.params["embedding"][ids]
    hs, _ = nn.lstm_forward(xs, model.lstm())
    pooled = nn.mean_pool(hs)
    logit = float(model.params["head_w"] @ pooled + model.params["head_b"][0])
    return float(nn.sigmoid(logit))

def neutrality(p: float) -> float:
    """1 - |2p - 1|: classifier indecision maps to maximal neutrality."""
    return 1.0 - abs(2.0 * p - 1.0)


def example_loss_and_grads(
    example: SentimentExample, model: SentimentModel
) -> tuple[float, dict[str, np.ndarray]]:
    """Binary cross-entropy with gradients for head, LSTM and embeddings."""
    ids = _token_ids(example.text, model.vocab, model.max_tokens)
    if not ids:
        raise nn.EmptySequenceError("training text produced no tokens")
    xs = model.params["embedding"][ids]
    hs, cache = nn.lstm_forward(xs, model.lstm())
    pooled = nn.mean_pool(hs)
    logit = float(model.params["head_w"] @ pooled + model.params["head_b"][0])
    p = float(nn.sigmoid(logit))
    y = 1.0 if example.label == 1 else 0.0
    eps = 1e-12
    loss = -(y * np.log(max(p, eps)) + (1.0 - y) * np.log(max(1.0 - p, eps)))
    dlogit = p - y
    grads = {name: np.zeros_like(arr) for name, arr in model.params.items()}
    grads["head_w"] = dlogit * pooled
    grads["head_b"] = np.array([dlogit])
    dpooled = dlogit * model.params["head_w"]
    dhs = np.tile(dpooled / len(ids), (len(ids), 1))
    lstm_grads, dxs = nn.lstm_backward(dhs, cache, model.lstm())
    grads["w_x"] = lstm_grads["w_x"]
    grads["w_h"] = lstm_grads["w_h"]
    grads["bias"] = lstm_grads["bias"]
    np.add.at(grads["embedding"], ids, dxs)
    return float(loss), grads


def _mean_loss(examples, model) -> float:
    total = 0.0
    for example in examples:
        p = sentiment_prob(example.text, model)
        y = 1.0 if example.label == 1 else 0.0
        eps = 1e-12
        total += -(y * np.log(max(p, eps)) + (1.0 - y) * np.log(max(1.0 - p, eps)))
    return total / len(examples)


def train_sentiment(
    examples: list[SentimentExample], config: SentimentTraining | None = None
) -> SentimentModel:
    config = config or SentimentTraining()
    labels = {e.label for e in examples}
    if labels - {1, -1}:
        raise ValueError(f"sentiment labels must be +1 or -1, got {sorted(labels)}")
    if labels != {1, -1}:
        raise nn.TrainingDataError("sentiment training needs both classes present")
    vocab = Vocabulary.from_texts(e.text for e in examples)
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 13]))
    lstm = nn.init_lstm_params(config.embed_dim, config.hidden_size, rng)
    scale = 1.0 / np.sqrt(config.hidden_size)
    params = {
        "embedding": rng.uniform(-0.1, 0.1, size=(len(vocab), config.embed_dim)),
        "w_x": lstm.w_x,
        "w_h": lstm.w_h,
        "bias": lstm.bias,
        "head_w": rng.uniform(-scale, scale, size=config.hidden_size),
        "head_b": np.zeros(1),
    }
    model = SentimentModel(vocab, params, config.max_tokens)
    state = nn.AdamState.for_params(params, config.learning_rate)
    initial = _mean_loss(examples, model)
    order = np.arange(len(examples))
    for _ in range(config.epochs):
        rng.shuffle(order)
        for start in range(0, len(examples), config.batch_size):
            batch = order[start : start + config.batch_size]
            grads = {name: np.zeros_like(p) for name, p in params.items()}
            for idx in batch:
                _, g = example_loss_and_grads(examples[idx], model)
                for name in grads:
                    grads[name] += g[name] / len(batch)
            grads = nn.clip_global_norm(grads, config.grad_clip)
            nn.adam_step(params, grads, state)
    final = _mean_loss(examples, model)
    model.meta = {
        "initial_loss": initial,
        "final_loss": final,
        "seed": config.seed,
        "epochs": config.epochs,
        "embed_dim": config.embed_dim,
    }
    return model


def save_model(model: SentimentModel, path: str | Path) -> None:
    meta = dict(model.meta)
    meta.update(
        {
            "kind": "sentiment",
            "max_tokens": model.max_tokens,
            "vocab": model.vocab.id_to_token[2:],
        }
    )
    nn.save_checkpoint(path, model.params, meta)


def load_model(path: str | Path) -> SentimentModel:
    params, meta = nn.load_checkpoint(path)
    if meta.get("kind") != "sentiment":
        raise ValueError(f"{path} is not a sentiment checkpoint")
    return SentimentModel(Vocabulary(meta["vocab"]), params, meta["max_tokens"], meta)


def load_examples_jsonl(path: str | Path) -> list[SentimentExample]:
    examples = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            examples.append(SentimentExample(raw["text"], int(raw["label"])))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}:{lineno}: bad sentiment record: {exc}") from exc
    return examples

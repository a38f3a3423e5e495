"""Siamese bidirectional-LSTM text similarity.

Two weight-sharing encoder towers map texts into a common space; a cosine
energy compares them.  Training is contrastive on +1/-1 labeled pairs:
positives are pulled toward similarity 1, negatives pushed below a margin
with a squared hinge.  Weight sharing is structural: there is exactly one
parameter store, referenced by both towers.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import nn
from .text import UNK_ID, Vocabulary, token_surfaces


class DegenerateEncodingError(ValueError):
    pass


@dataclass(frozen=True)
class PairExample:
    text_a: str
    text_b: str
    label: int  # +1 similar, -1 dissimilar


@dataclass
class SimilarityTraining:
    embed_dim: int = 32
    hidden_size: int = 64
    epochs: int = 10
    learning_rate: float = 1e-3
    margin: float = 0.0
    batch_size: int = 32
    max_tokens: int = 200
    grad_clip: float = 5.0
    seed: int = 7


@dataclass
class SiameseModel:
    vocab: Vocabulary
    params: dict[str, np.ndarray]
    hidden_size: int
    max_tokens: int
    meta: dict = field(default_factory=dict)

    def tower(self, direction: str) -> nn.LSTMParams:
        return nn.LSTMParams(
            self.params[f"{direction}_w_x"],
            self.params[f"{direction}_w_h"],
            self.params[f"{direction}_bias"],
        )


def _token_ids(text: str, vocab: Vocabulary, max_tokens: int) -> list[int]:
    return [vocab.id_for(s) for s in token_surfaces(text)[:max_tokens]]


def _init_params(
    vocab_size: int, embed_dim: int, hidden_size: int, rng: np.random.Generator
) -> dict[str, np.ndarray]:
    params: dict[str, np.ndarray] = {
        "embedding": rng.uniform(-0.1, 0.1, size=(vocab_size, embed_dim))
    }
    for direction in ("fwd", "bwd"):
        lstm = nn.init_lstm_params(embed_dim, hidden_size, rng)
        params[f"{direction}_w_x"] = lstm.w_x
        params[f"{direction}_w_h"] = lstm.w_h
        params[f"{direction}_bias"] = lstm.bias
    return params


def encode(text: str, model: SiameseModel) -> np.ndarray:
    """Semantic vector of length 2H (forward and reversed final states)."""
    ids = _token_ids(text, model.vocab, model.max_tokens)
    if not ids:
        raise nn.EmptySequenceError("text produced no tokens to encode")
    xs = model.params["embedding"][ids]
    return nn.bilstm_encode(xs, model.tower("fwd"), model.tower("bwd"))


def energy(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; zero vectors have no direction."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise nn.ShapeMismatchError(f"energy: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise DegenerateEncodingError("cannot take cosine of a zero vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def contrastive_loss(sim: float, label: int, margin: float = 0.0) -> float:
    if label not in (1, -1):
        raise ValueError(f"pair label must be +1 or -1, got {label}")
    if label == 1:
        return (1.0 - sim) ** 2
    return max(0.0, sim - margin) ** 2


def _encode_with_cache(ids, model):
    xs = model.params["embedding"][ids]
    vec, caches = nn.bilstm_forward(xs, model.tower("fwd"), model.tower("bwd"))
    return vec, caches


def _cosine_grads(u, v, sim):
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    du = v / (nu * nv) - sim * u / (nu * nu)
    dv = u / (nu * nv) - sim * v / (nv * nv)
    return du, dv


def pair_loss_and_grads(
    pair: PairExample, model: SiameseModel, margin: float = 0.0
) -> tuple[float, dict[str, np.ndarray]]:
    """Contrastive loss for one pair with gradients for every parameter,
    embeddings included.  Both towers route into the same gradient slots."""
    ids_a = _token_ids(pair.text_a, model.vocab, model.max_tokens)
    ids_b = _token_ids(pair.text_b, model.vocab, model.max_tokens)
    if not ids_a or not ids_b:
        raise nn.EmptySequenceError("pair text produced no tokens")
    u, caches_a = _encode_with_cache(ids_a, model)
    v, caches_b = _encode_with_cache(ids_b, model)
    sim = energy(u, v)
    loss = contrastive_loss(sim, pair.label, margin)
    if pair.label == 1:
        dsim = -2.0 * (1.0 - sim)
    else:
        dsim = 2.0 * max(0.0, sim - margin)
    grads = {name: np.zeros_like(p) for name, p in model.params.items()}
    if dsim != 0.0:
        du, dv = _cosine_grads(u, v, sim)
        for ids, caches, dvec in ((ids_a, caches_a, dsim * du), (ids_b, caches_b, dsim * dv)):
            gf, gb, dxs = nn.bilstm_backward(
                dvec, caches, model.tower("fwd"), model.tower("bwd")
            )
            for key, g in (("fwd", gf), ("bwd", gb)):
                grads[f"{key}_w_x"] += g["w_x"]
                grads[f"{key}_w_h"] += g["w_h"]
                grads[f"{key}_bias"] += g["bias"]
            np.add.at(grads["embedding"], ids, dxs)
    return loss, grads


def _mean_loss(pairs, model, margin) -> float:
    total = 0.0
    for pair in pairs:
        u = encode(pair.text_a, model)
        v = encode(pair.text_b, model)
        total += contrastive_loss(energy(u, v), pair.label, margin)
    return total / len(pairs)


def train_siamese(
    pairs: list[PairExample], config: SimilarityTraining | None = None
) -> SiameseModel:
    """Adam on the mean contrastive loss; fixed seed means bit-identical runs."""
    config = config or SimilarityTraining()
    labels = {p.label for p in pairs}
    if labels - {1, -1}:
        raise ValueError(f"pair labels must be +1 or -1, got {sorted(labels)}")
    if labels != {1, -1}:
        raise nn.TrainingDataError(
            "contrastive training needs at least one positive and one negative pair"
        )
    vocab = Vocabulary.from_texts(t for p in pairs for t in (p.text_a, p.text_b))
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 11]))
    params = _init_params(len(vocab), config.embed_dim, config.hidden_size, rng)
    model = SiameseModel(vocab, params, config.hidden_size, config.max_tokens)
    state = nn.AdamState.for_params(params, config.learning_rate)
    initial = _mean_loss(pairs, model, config.margin)
    order = np.arange(len(pairs))
    for _ in range(config.epochs):
        rng.shuffle(order)
        for start in range(0, len(pairs), config.batch_size):
            batch = order[start : start + config.batch_size]
            grads = {name: np.zeros_like(p) for name, p in params.items()}
            for idx in batch:
                _, g = pair_loss_and_grads(pairs[idx], model, config.margin)
                for name in grads:
                    grads[name] += g[name] / len(batch)
            grads = nn.clip_global_norm(grads, config.grad_clip)
            nn.adam_step(params, grads, state)
    final = _mean_loss(pairs, model, config.margin)
    model.meta = {
        "initial_loss": initial,
        "final_loss": final,
        "seed": config.seed,
        "margin": config.margin,
        "epochs": config.epochs,
        "embed_dim": config.embed_dim,
    }
    return model


def ss_score(text_a: str, text_b: str, model: SiameseModel) -> float:
    """Cosine energy rescaled onto [0, 1] for the feature mixture."""
    return (energy(encode(text_a, model), encode(text_b, model)) + 1.0) / 2.0


def save_model(model: SiameseModel, path: str | Path) -> None:
    meta = dict(model.meta)
    meta.update(
        {
            "kind": "siamese",
            "hidden_size": model.hidden_size,
            "max_tokens": model.max_tokens,
            "vocab": model.vocab.id_to_token[2:],
        }
    )
    nn.save_checkpoint(path, model.params, meta)


def load_model(path: str | Path) -> SiameseModel:
    params, meta = nn.load_checkpoint(path)
    if meta.get("kind") != "siamese":
        raise ValueError(f"{path} is not a similarity checkpoint")
    vocab = Vocabulary(meta["vocab"])
    return SiameseModel(vocab, params, meta["hidden_size"], meta["max_tokens"], meta)


def load_pairs_jsonl(path: str | Path) -> list[PairExample]:
    pairs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            pairs.append(PairExample(raw["text_a"], raw["text_b"], int(raw["label"])))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}:{lineno}: bad pair record: {exc}") from exc
    return pairs


def read_sts_tsv(path: str | Path) -> list[tuple[str, str, float]]:
    """Tab-separated rows: gold score, sentence 1, sentence 2."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) < 3:
            raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
        rows.append((parts[1], parts[2], float(parts[0])))
    return rows


def sts_examples(
    rows: list[tuple[str, str, float]], threshold: float = 2.5
) -> list[PairExample]:
    """Binarize gold scores at the threshold for contrastive training."""
    return [
        PairExample(a, b, 1 if gold >= threshold else -1) for a, b, gold in rows
    ]


def oov_rate(text: str, model: SiameseModel) -> float:
    ids = _token_ids(text, model.vocab, model.max_tokens)
    if not ids:
        return 1.0
    return sum(1 for i in ids if i == UNK_ID) / len(ids)

"""Feature assembly and fusion into a credibility score.

Per retrieved evidence document, five features in [0, 1] are mixed by
positive simplex weights into a credibility contribution (CC); the CCs are
then averaged with exponentially decaying retrieval-rank weights into the
final score.  Two fusion modes ship: the interpretable weighted sum with
weights learned by gradient descent under a softmax simplex
parameterization, and a one-hidden-layer MLP over the rank-aggregated
features.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import nn
from .bm25 import InvertedIndex, ResultSet, retrieve
from .rake import Keyword, extract_keywords
from .sentiment import SentimentModel, neutrality, sentiment_prob
from .similarity import SiameseModel, ss_score
from .textrank import SummaryConfig, summarize
from .trust import TAG_VALUES, TrustLedger, normalize_author, normalize_domain

FEATURE_NAMES = ("kterm", "acs", "wts", "ns", "ss")
CLASS_LABELS = ("False", "Mostly False", "Mostly True", "True")

KTERM_TAU = 10.0
SIMPLEX_TOL = 1e-9


class NoEvidenceError(RuntimeError):
    pass


class WeightError(ValueError):
    pass


@dataclass(frozen=True)
class ClaimArticle:
    id: str
    text: str
    label: float | None = None  # tag value in [0, 1] when labeled
    author: str | None = None
    source_url: str = ""
    date: str | None = None


@dataclass(frozen=True)
class FeatureBundle:
    kterm: float
    acs: float
    wts: float
    ns: float
    ss: float

    def __post_init__(self):
        for name in FEATURE_NAMES:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"feature {name} outside [0, 1]: {value}")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES])


@dataclass(frozen=True)
class WeightVector:
    values: tuple[float, float, float, float, float]

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.shape != (5,):
            raise WeightError("expected exactly five weights")
        if abs(float(arr.sum()) - 1.0) > SIMPLEX_TOL:
            raise WeightError(f"weights must sum to 1, got {arr.sum()!r}")
        if not np.all(arr > 0.0):
            raise WeightError("every weight must be strictly positive")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class CredoScore:
    value: float
    contributions: tuple[tuple[int, float], ...]  # (rank, CC)


def keyword_feature(keywords: Sequence[Keyword], tau: float = KTERM_TAU) -> float:
    """Saturating map of summed keyword scores onto [0, 1].

    Raw keyword-score sums grow with text length, so s/(s + tau) keeps the
    feature commensurable with the other mixture terms.
    """
    s = sum(k.kscore for k in keywords)
    return s / (s + tau)


def _weights_array(weights) -> np.ndarray:
    if isinstance(weights, WeightVector):
        return weights.as_array()
    arr = np.asarray(weights, dtype=float)
    if arr.shape != (5,):
        raise WeightError("expected exactly five weights")
    if abs(float(arr.sum()) - 1.0) > SIMPLEX_TOL:
        raise WeightError(f"weights must sum to 1, got {arr.sum()!r}")
    if np.any(arr < 0.0):
        raise WeightError("weights cannot be negative")
    return arr


def credibility_contribution(bundle: FeatureBundle, weights) -> float:
    """Weighted mixture of the five features; a convex combination, so the
    result stays in [0, 1]."""
    return float(_weights_array(weights) @ bundle.as_array())


def rank_weights(n: int) -> np.ndarray:
    """exp(1 - rank/n) for ranks 1..n: earlier evidence counts more."""
    ranks = np.arange(1, n + 1)
    return np.exp(1.0 - ranks / n)


def credo_score(contribs: Sequence[tuple[int, float]], n: int) -> float:
    """Rank-weighted average of the credibility contributions."""
    if n == 0 or not contribs:
        raise NoEvidenceError("no retrieved evidence to aggregate")
    ranks = [rank for rank, _ in contribs]
    if sorted(ranks) != list(range(1, n + 1)):
        raise ValueError(f"ranks must be exactly 1..{n}, got {ranks}")
    num = 0.0
    den = 0.0
    for rank, cc in contribs:
        w = math.exp(1.0 - rank / n)
        num += w * cc
        den += w
    return num / den


def aggregate_features(bundles: Sequence[FeatureBundle]) -> np.ndarray:
    """Rank-weighted average applied per feature across the evidence list.

    With bundles ordered by rank, mixing weights into the aggregate and
    aggregating contributions commute, so fusion models can consume one
    five-dimensional vector per claim.
    """
    if not bundles:
        raise NoEvidenceError("no bundles to aggregate")
    w = rank_weights(len(bundles))
    matrix = np.stack([b.as_array() for b in bundles])
    return (w[:, None] * matrix).sum(axis=0) / w.sum()


# --- feature assembly -------------------------------------------------------


@dataclass
class AssemblyConfig:
    stopwords: frozenset[str]
    rake_top_k: int = 10
    kterm_tau: float = KTERM_TAU
    retrieve_limit: int = 5
    summary: SummaryConfig = field(default_factory=SummaryConfig)


@dataclass
class StaticClaimFeatures:
    """Everything about a claim's evidence that does not depend on ledgers.

    Trust features get bound per training fold; the expensive retrieval,
    summarization and neural scores are computed once.
    """

    claim_id: str
    ns: float
    doc_ids: tuple[str, ...]
    authors: tuple[str, ...]  # normalized, per evidence doc
    domains: tuple[str, ...]
    kterms: tuple[float, ...]
    sss: tuple[float, ...]
    claim_author: str = ""
    claim_domain: str = ""


def claim_neutrality(claim: ClaimArticle, sent_model: SentimentModel) -> float:
    return neutrality(sentiment_prob(claim.text, sent_model))


def static_features(
    claim: ClaimArticle,
    index: InvertedIndex,
    sim_model: SiameseModel,
    sent_model: SentimentModel,
    cfg: AssemblyConfig,
) -> StaticClaimFeatures:
    ns = claim_neutrality(claim, sent_model)
    keywords = extract_keywords(claim.text, cfg.stopwords, cfg.rake_top_k)
    evidence = (
        retrieve(keywords, index, cfg.retrieve_limit)
        if keywords
        else ResultSet(())
    )
    doc_ids, authors, domains, kterms, sss = [], [], [], [], []
    for item in evidence.docs:
        doc = item.doc
        summary = summarize(doc, max(len(claim.text), 1), cfg.summary)
        summary_keywords = extract_keywords(summary, cfg.stopwords, cfg.rake_top_k)
        doc_ids.append(doc.doc_id)
        authors.append(normalize_author(doc.author))
        domains.append(normalize_domain(doc.source_url))
        kterms.append(keyword_feature(summary_keywords, cfg.kterm_tau))
        sss.append(ss_score(claim.text, summary, sim_model))
    return StaticClaimFeatures(
        claim_id=claim.id,
        ns=ns,
        doc_ids=tuple(doc_ids),
        authors=tuple(authors),
        domains=tuple(domains),
        kterms=tuple(kterms),
        sss=tuple(sss),
        claim_author=normalize_author(claim.author),
        claim_domain=normalize_domain(claim.source_url),
    )


def bind_bundles(
    static: StaticClaimFeatures,
    author_ledger: TrustLedger,
    site_ledger: TrustLedger,
) -> list[FeatureBundle]:
    """Attach ledger scores to the precomputed evidence features.

    Without evidence the claim falls back to a single degenerate bundle:
    no keyword mass, no similarity, trust read from the claim's own author
    and domain.
    """
    if not static.doc_ids:
        return [
            FeatureBundle(
                kterm=0.0,
                acs=author_ledger.score(static.claim_author),
                wts=site_ledger.score(static.claim_domain),
                ns=static.ns,
                ss=0.0,
            )
        ]
    bundles = []
    for author, domain, kterm, ss in zip(
        static.authors, static.domains, static.kterms, static.sss
    ):
        bundles.append(
            FeatureBundle(
                kterm=kterm,
                acs=author_ledger.score(author),
                wts=site_ledger.score(domain),
                ns=static.ns,
                ss=min(1.0, max(0.0, ss)),
            )
        )
    return bundles


def assemble_features(
    claim: ClaimArticle,
    evidence: ResultSet,
    author_ledger: TrustLedger,
    site_ledger: TrustLedger,
    sim_model: SiameseModel,
    sent_model: SentimentModel,
    cfg: AssemblyConfig,
) -> list[FeatureBundle]:
    """One feature bundle per retrieved document for an already-retrieved
    evidence set.  Neutrality is the claim's own; similarity compares the
    claim against each document's summary trimmed to the claim's length."""
    ns = claim_neutrality(claim, sent_model)
    bundles = []
    for item in evidence.docs:
        doc = item.doc
        try:
            summary = summarize(doc, max(len(claim.text), 1), cfg.summary)
            summary_keywords = extract_keywords(summary, cfg.stopwords, cfg.rake_top_k)
            bundles.append(
                FeatureBundle(
                    kterm=keyword_feature(summary_keywords, cfg.kterm_tau),
                    acs=author_ledger.score(normalize_author(doc.author)),
                    wts=site_ledger.score(normalize_domain(doc.source_url)),
                    ns=ns,
                    ss=min(1.0, max(0.0, ss_score(claim.text, summary, sim_model))),
                )
            )
        except Exception as exc:
            raise RuntimeError(
                f"feature assembly failed for evidence rank {item.rank} "
                f"({doc.doc_id}): {exc}"
            ) from exc
    return bundles


# --- simplex weight learning -------------------------------------------------


def softmax(theta: np.ndarray) -> np.ndarray:
    shifted = theta - theta.max()
    e = np.exp(shifted)
    return e / e.sum()


def _clamped_bce(scores: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    eps = 1e-9
    s = np.clip(scores, eps, 1.0 - eps)
    loss = float(-np.mean(labels * np.log(s) + (1.0 - labels) * np.log(1.0 - s)))
    dscores = (s - labels) / (s * (1.0 - s)) / len(labels)
    return loss, dscores


def weights_loss_and_grads(
    theta: np.ndarray,
    features: np.ndarray,
    labels: np.ndarray,
    mask: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Binary cross-entropy of the rank-aggregated score against labels.

    ``features`` holds one aggregated five-vector per claim.  ``mask``
    zeroes excluded features for ablations; the softmax runs over the
    surviving coordinates so the simplex constraint still holds.
    """
    w = softmax(theta)
    if mask is not None:
        w = w * mask
        w = w / w.sum()
    scores = features @ w
    loss, dscores = _clamped_bce(scores, labels)
    dw = features.T @ dscores
    if mask is not None:
        # gradient through the masked renormalization
        m = mask.astype(float)
        w_soft = softmax(theta)
        z = float((w_soft * m).sum())
        dw_soft = (dw * m) / z - float((dw * m * w_soft).sum()) / z**2 * m
        dw = dw_soft
        w = w_soft
    dtheta = w * (dw - float((dw * w).sum()))
    return loss, dtheta


def train_weights(
    features: np.ndarray,
    labels: np.ndarray,
    learning_rate: float = 0.05,
    iterations: int = 400,
    mask: np.ndarray | None = None,
) -> np.ndarray:
    """Learn simplex mixture weights by gradient descent on cross-entropy.

    Returns the simplex vector (zeros only on masked coordinates).  The
    softmax parameterization guarantees the constraint by construction.
    """
    labels = np.asarray(labels, dtype=float)
    if len(set(labels.tolist())) < 2:
        raise nn.TrainingDataError("weight learning needs both classes present")
    theta = {"theta": np.zeros(5)}
    state = nn.AdamState.for_params(theta, learning_rate)
    for _ in range(iterations):
        _, dtheta = weights_loss_and_grads(theta["theta"], features, labels, mask)
        nn.adam_step(theta, {"theta": dtheta}, state)
    w = softmax(theta["theta"])
    if mask is not None:
        w = w * mask
        w = w / w.sum()
    return w


# --- MLP fusion ---------------------------------------------------------------


@dataclass
class MlpModel:
    params: dict[str, np.ndarray]  # w1 (hidden, 5), b1, w2 (out, hidden), b2
    n_classes: int
    meta: dict = field(default_factory=dict)


def mlp_forward(params: dict[str, np.ndarray], features: np.ndarray) -> np.ndarray:
    hidden = np.tanh(features @ params["w1"].T + params["b1"])
    logits = hidden @ params["w2"].T + params["b2"]
    return logits


def mlp_predict_proba(model: MlpModel, features: np.ndarray) -> np.ndarray:
    logits = mlp_forward(model.params, np.atleast_2d(features))
    if model.n_classes == 2:
        return nn.sigmoid(logits[:, 0])
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def mlp_loss_and_grads(
    params: dict[str, np.ndarray],
    features: np.ndarray,
    labels: np.ndarray,
    n_classes: int = 2,
) -> tuple[float, dict[str, np.ndarray]]:
    n = len(features)
    hidden = np.tanh(features @ params["w1"].T + params["b1"])
    logits = hidden @ params["w2"].T + params["b2"]
    if n_classes == 2:
        p = nn.sigmoid(logits[:, 0])
        eps = 1e-12
        loss = float(
            -np.mean(
                labels * np.log(np.maximum(p, eps))
                + (1.0 - labels) * np.log(np.maximum(1.0 - p, eps))
            )
        )
        dlogits = ((p - labels) / n)[:, None]
    else:
        shifted = logits - logits.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        probs = e / e.sum(axis=1, keepdims=True)
        idx = labels.astype(int)
        eps = 1e-12
        loss = float(-np.mean(np.log(np.maximum(probs[np.arange(n), idx], eps))))
        dlogits = probs.copy()
        dlogits[np.arange(n), idx] -= 1.0
        dlogits /= n
    grads = {
        "w2": dlogits.T @ hidden,
        "b2": dlogits.sum(axis=0),
    }
    dhidden = (dlogits @ params["w2"]) * (1.0 - hidden**2)
    grads["w1"] = dhidden.T @ features
    grads["b1"] = dhidden.sum(axis=0)
    return loss, grads


def train_mlp(
    features: np.ndarray,
    labels: np.ndarray,
    n_classes: int = 2,
    hidden: int = 16,
    learning_rate: float = 0.02,
    epochs: int = 800,
    seed: int = 7,
) -> MlpModel:
    """One-hidden-layer tanh MLP over the aggregated features."""
    labels = np.asarray(labels, dtype=float)
    if len(set(labels.tolist())) < 2:
        raise nn.TrainingDataError("MLP training needs more than one class present")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 17]))
    out_dim = 1 if n_classes == 2 else n_classes
    scale = 1.0 / np.sqrt(hidden)
    params = {
        "w1": rng.uniform(-0.5, 0.5, size=(hidden, features.shape[1])),
        "b1": np.zeros(hidden),
        "w2": rng.uniform(-scale, scale, size=(out_dim, hidden)),
        "b2": np.zeros(out_dim),
    }
    state = nn.AdamState.for_params(params, learning_rate)
    initial = mlp_loss_and_grads(params, features, labels, n_classes)[0]
    for _ in range(epochs):
        _, grads = mlp_loss_and_grads(params, features, labels, n_classes)
        nn.adam_step(params, grads, state)
    final = mlp_loss_and_grads(params, features, labels, n_classes)[0]
    return MlpModel(params, n_classes, {"initial_loss": initial, "final_loss": final})


def save_mlp(model: MlpModel, path: str | Path) -> None:
    meta = dict(model.meta)
    meta.update({"kind": "mlp", "n_classes": model.n_classes})
    nn.save_checkpoint(path, model.params, meta)


def load_mlp(path: str | Path) -> MlpModel:
    params, meta = nn.load_checkpoint(path)
    if meta.get("kind") != "mlp":
        raise ValueError(f"{path} is not an MLP checkpoint")
    return MlpModel(params, meta["n_classes"], meta)


# --- decisions and IO ----------------------------------------------------------


def classify(score: float, mode: str = "binary") -> str:
    """Binary: threshold 0.5, boundary inclusive upward.  Multi-class:
    quartile bins from False up to True."""
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"score outside [0, 1]: {score}")
    if mode == "binary":
        return "True" if score >= 0.5 else "False"
    if mode == "multiclass":
        if score < 0.25:
            return "False"
        if score < 0.5:
            return "Mostly False"
        if score < 0.75:
            return "Mostly True"
        return "True"
    raise ValueError(f"unknown decision mode: {mode}")


def load_claims_jsonl(path: str | Path) -> list[ClaimArticle]:
    claims = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            label = raw.get("label")
            if isinstance(label, str):
                label = TAG_VALUES[label.lower()]
            claims.append(
                ClaimArticle(
                    id=str(raw["id"]),
                    text=raw["text"],
                    label=label,
                    author=raw.get("author"),
                    source_url=raw.get("source_url", ""),
                    date=raw.get("date"),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"{path}:{lineno}: bad claim record: {exc}") from exc
    return claims

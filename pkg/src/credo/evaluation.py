"""K-fold evaluation, classification metrics, correlation, and ablations.

Per fold the trust ledgers are reset and replayed over the training split
only (in dataset order) before the fusion stage trains; anything else leaks
held-out labels into the ledgers.  Evaluation metrics are averaged across
folds.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import ensemble
from .ensemble import StaticClaimFeatures, aggregate_features, bind_bundles
from .trust import ReputationProvider, TrustLedger, binarize_tag

ABLATABLE = {"ACS": "acs", "WTS": "wts", "SS": "ss", "SA": "ns"}


class MetricError(ValueError):
    pass


@dataclass
class EvalConfig:
    folds: int = 5
    seed: int = 7
    mode: str = "binary"  # binary | multiclass
    fusion: str = "eq"  # eq | mlp
    exclude: str | None = None  # ACS | WTS | SS | SA
    shuffle_labels: bool = False
    weights_lr: float = 0.05
    weights_iterations: int = 400
    mlp_hidden: int = 16
    mlp_lr: float = 0.02
    mlp_epochs: int = 800


@dataclass(frozen=True)
class MetricsReport:
    overall_accuracy: float
    true_claims_accuracy: float
    false_claims_accuracy: float
    macro_averaged_accuracy: float
    auc: float
    fake_precision: float
    fake_recall: float
    fake_f1: float

    def as_dict(self) -> dict[str, float]:
        return {
            "overall_accuracy": self.overall_accuracy,
            "true_claims_accuracy": self.true_claims_accuracy,
            "false_claims_accuracy": self.false_claims_accuracy,
            "macro_averaged_accuracy": self.macro_averaged_accuracy,
            "auc": self.auc,
            "fake_precision": self.fake_precision,
            "fake_recall": self.fake_recall,
            "fake_f1": self.fake_f1,
        }


def kfold_split(ids: Sequence, k: int, seed: int) -> list[list]:
    """Seeded shuffle into k disjoint folds whose sizes differ by at most one."""
    if k < 2:
        raise ValueError("need at least two folds")
    if k > len(ids):
        raise ValueError(f"cannot split {len(ids)} items into {k} folds")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 23]))
    order = list(rng.permutation(len(ids)))
    base, extra = divmod(len(ids), k)
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append([ids[j] for j in order[start : start + size]])
        start += size
    return folds


def auc_rank(scores: Sequence[float], labels: Sequence[bool]) -> float:
    """Rank-statistic AUC with ties counting one half.

    Computed from average ranks, which equals brute-force counting of all
    positive/negative pairs exactly.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    n_pos = int(labels.sum())
    n_neg = int(len(labels) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise MetricError("AUC needs both classes present")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0  # average 1-based rank
        i = j + 1
    rank_sum = float(ranks[labels].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def compute_metrics(
    scores: Sequence[float], predictions: Sequence[bool], labels: Sequence[bool]
) -> MetricsReport:
    """Binary metrics; the fake (negative) class defines precision/recall/F1."""
    scores = np.asarray(scores, dtype=float)
    predictions = np.asarray(predictions, dtype=bool)
    labels = np.asarray(labels, dtype=bool)
    if not (len(scores) == len(predictions) == len(labels)):
        raise MetricError("scores, predictions and labels must align")
    missing = [name for name, m in (("true", labels), ("false", ~labels)) if not m.any()]
    if missing:
        raise MetricError(f"class(es) absent from labels: {', '.join(missing)}")
    overall = float((predictions == labels).mean())
    true_acc = float((predictions[labels] == True).mean())  # noqa: E712
    false_acc = float((predictions[~labels] == False).mean())  # noqa: E712
    macro = (true_acc + false_acc) / 2.0
    fake_pred = ~predictions
    fake_true = ~labels
    tp = float((fake_pred & fake_true).sum())
    precision = tp / float(fake_pred.sum()) if fake_pred.any() else 0.0
    recall = tp / float(fake_true.sum())
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return MetricsReport(
        overall_accuracy=overall,
        true_claims_accuracy=true_acc,
        false_claims_accuracy=false_acc,
        macro_averaged_accuracy=macro,
        auc=auc_rank(scores, labels),
        fake_precision=precision,
        fake_recall=recall,
        fake_f1=f1,
    )


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 2:
        raise MetricError("pearson needs two equal-length series of length >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(np.sqrt((dx * dx).sum()))
    sy = float(np.sqrt((dy * dy).sum()))
    if sx == 0.0 or sy == 0.0:
        raise MetricError("correlation undefined for a constant series")
    return float((dx * dy).sum() / (sx * sy))


def mean_report(reports: Sequence[MetricsReport]) -> MetricsReport:
    arrays = {k: np.mean([r.as_dict()[k] for r in reports]) for k in reports[0].as_dict()}
    return MetricsReport(**{k: float(v) for k, v in arrays.items()})


@dataclass
class EvalResult:
    fold_reports: list[MetricsReport]
    mean: MetricsReport
    pooled_scores: list[float]
    pooled_labels: list[bool]
    fold_weights: list[np.ndarray] = field(default_factory=list)


def _replay_ledgers(
    claims: Sequence[ensemble.ClaimArticle],
    tags: Sequence[float],
    provider: ReputationProvider | None,
) -> tuple[TrustLedger, TrustLedger]:
    from .trust import normalize_author, normalize_domain

    author_ledger = TrustLedger()  # authors always start at 0.5
    site_ledger = TrustLedger(provider)
    for claim, tag in zip(claims, tags):
        author_ledger.observe(normalize_author(claim.author), tag)
        site_ledger.observe(normalize_domain(claim.source_url), tag)
    return author_ledger, site_ledger


def _feature_mask(exclude: str | None) -> np.ndarray | None:
    if exclude is None:
        return None
    if exclude not in ABLATABLE:
        raise ValueError(f"unknown module to exclude: {exclude}")
    mask = np.ones(5)
    mask[ensemble.FEATURE_NAMES.index(ABLATABLE[exclude])] = 0.0
    return mask


def run_eval(
    claims: Sequence[ensemble.ClaimArticle],
    static: Sequence[StaticClaimFeatures],
    config: EvalConfig,
    provider: ReputationProvider | None = None,
) -> EvalResult:
    """Cross-validated evaluation over precomputed static features.

    Ledgers are rebuilt per fold from that fold's training claims; the
    fusion stage (simplex weights or MLP) trains per fold as well.
    """
    if len(claims) != len(static):
        raise ValueError("claims and static features must align")
    for claim in claims:
        if claim.label is None:
            raise ValueError(f"claim {claim.id} is unlabeled")
    tags = np.array([claim.label for claim in claims], dtype=float)
    if config.shuffle_labels:
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, 29]))
        tags = tags[rng.permutation(len(tags))]
    binary = np.array([binarize_tag(t) for t in tags])
    if config.mode == "multiclass":
        class_of = {0.0: 0, 0.25: 1, 0.75: 2, 1.0: 3}
        classes4 = np.array([class_of[t] for t in tags], dtype=int)
    mask = _feature_mask(config.exclude)

    indices = list(range(len(claims)))
    folds = kfold_split(indices, config.folds, config.seed)
    fold_reports: list[MetricsReport] = []
    pooled_scores: list[float] = []
    pooled_labels: list[bool] = []
    fold_weights: list[np.ndarray] = []

    for fold_idx, held_out in enumerate(folds):
        held = set(held_out)
        train_idx = [i for i in indices if i not in held]  # dataset order
        test_idx = sorted(held)
        if len(set(binary[train_idx].tolist())) < 2:
            raise MetricError(f"fold {fold_idx}: training split lost a class")
        ledger_tags = tags if config.mode == "multiclass" else binary
        author_ledger, site_ledger = _replay_ledgers(
            [claims[i] for i in train_idx], ledger_tags[train_idx], provider
        )

        def featurize(idx_list):
            rows = []
            for i in idx_list:
                bundles = bind_bundles(static[i], author_ledger, site_ledger)
                rows.append(aggregate_features(bundles))
            return np.stack(rows)

        try:
            f_train = featurize(train_idx)
            f_test = featurize(test_idx)
        except Exception as exc:
            raise RuntimeError(f"fold {fold_idx} failed: {exc}") from exc

        if config.fusion == "eq":
            weights = ensemble.train_weights(
                f_train,
                binary[train_idx],
                learning_rate=config.weights_lr,
                iterations=config.weights_iterations,
                mask=mask,
            )
            fold_weights.append(weights)
            scores = f_test @ weights
            if config.mode == "multiclass":
                pred4 = np.array(
                    [
                        ensemble.CLASS_LABELS.index(ensemble.classify(s, "multiclass"))
                        for s in scores
                    ]
                )
            preds = scores >= 0.5
        elif config.fusion == "mlp":
            f_tr = f_train * mask if mask is not None else f_train
            f_te = f_test * mask if mask is not None else f_test
            if config.mode == "multiclass":
                model = ensemble.train_mlp(
                    f_tr,
                    classes4[train_idx],
                    n_classes=4,
                    hidden=config.mlp_hidden,
                    learning_rate=config.mlp_lr,
                    epochs=config.mlp_epochs,
                    seed=config.seed,
                )
                probs = ensemble.mlp_predict_proba(model, f_te)
                pred4 = probs.argmax(axis=1)
                scores = probs[:, 2] + probs[:, 3]  # mass on the truthful classes
                preds = pred4 >= 2
            else:
                model = ensemble.train_mlp(
                    f_tr,
                    binary[train_idx],
                    n_classes=2,
                    hidden=config.mlp_hidden,
                    learning_rate=config.mlp_lr,
                    epochs=config.mlp_epochs,
                    seed=config.seed,
                )
                scores = ensemble.mlp_predict_proba(model, f_te)
                preds = scores >= 0.5
        else:
            raise ValueError(f"unknown fusion mode: {config.fusion}")

        test_binary = binary[test_idx] >= 0.5
        report = compute_metrics(scores, preds, test_binary)
        if config.mode == "multiclass":
            exact = float((pred4 == classes4[test_idx]).mean())
            report = replace(report, overall_accuracy=exact)
        fold_reports.append(report)
        pooled_scores.extend(float(s) for s in scores)
        pooled_labels.extend(bool(b) for b in test_binary)

    return EvalResult(
        fold_reports, mean_report(fold_reports), pooled_scores, pooled_labels, fold_weights
    )


def run_ablation(
    claims: Sequence[ensemble.ClaimArticle],
    static: Sequence[StaticClaimFeatures],
    config: EvalConfig,
    exclude: str,
    provider: ReputationProvider | None = None,
) -> EvalResult:
    """Evaluation with one feature forced out of the fusion.

    In weight mode the excluded weight is pinned at zero and the remaining
    weights renormalize onto the simplex; in MLP mode the feature column is
    zeroed.
    """
    return run_eval(claims, static, replace(config, exclude=exclude), provider)

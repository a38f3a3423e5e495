"""Delimited reports and matplotlib figures for evaluation runs.

Every figure goes to a file next to the CSV it illustrates; nothing opens
a display.  Outputs are byte-stable for identical inputs.
"""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .evaluation import EvalResult, MetricsReport  # noqa: E402

METRIC_COLUMNS = [
    "overall_accuracy",
    "true_claims_accuracy",
    "false_claims_accuracy",
    "macro_averaged_accuracy",
    "auc",
    "fake_precision",
    "fake_recall",
    "fake_f1",
]


def write_metrics_csv(path: str | Path, result: EvalResult) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fold"] + METRIC_COLUMNS)
        for i, report in enumerate(result.fold_reports):
            row = report.as_dict()
            writer.writerow([str(i)] + [f"{row[c]:.6f}" for c in METRIC_COLUMNS])
        mean = result.mean.as_dict()
        writer.writerow(["mean"] + [f"{mean[c]:.6f}" for c in METRIC_COLUMNS])
    return path


def roc_points(scores: Sequence[float], labels: Sequence[bool]) -> tuple[list[float], list[float]]:
    paired = sorted(zip(scores, labels), key=lambda p: -p[0])
    n_pos = sum(1 for _, l in paired if l)
    n_neg = len(paired) - n_pos
    fpr = [0.0]
    tpr = [0.0]
    tp = fp = 0
    i = 0
    while i < len(paired):
        j = i
        while j + 1 < len(paired) and paired[j + 1][0] == paired[i][0]:
            j += 1
        for k in range(i, j + 1):
            if paired[k][1]:
                tp += 1
            else:
                fp += 1
        fpr.append(fp / n_neg if n_neg else 0.0)
        tpr.append(tp / n_pos if n_pos else 0.0)
        i = j + 1
    return fpr, tpr


def render_eval_figures(out_dir: str | Path, result: EvalResult, title: str) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    fig, ax = plt.subplots(figsize=(7, 3.5))
    folds = list(range(len(result.fold_reports)))
    width = 0.35
    overall = [r.overall_accuracy for r in result.fold_reports]
    auc = [r.auc for r in result.fold_reports]
    ax.bar([f - width / 2 for f in folds], overall, width, label="overall accuracy")
    ax.bar([f + width / 2 for f in folds], auc, width, label="AUC")
    ax.axhline(result.mean.overall_accuracy, color="k", linestyle=":", linewidth=1)
    ax.set_xlabel("fold")
    ax.set_ylim(0, 1.05)
    ax.set_xticks(folds)
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    path = out / "metrics_by_fold.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(4, 4))
    fpr, tpr = roc_points(result.pooled_scores, result.pooled_labels)
    ax.plot(fpr, tpr, drawstyle="steps-post")
    ax.plot([0, 1], [0, 1], "k--", linewidth=1)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_title(f"pooled ROC ({title})")
    fig.tight_layout()
    path = out / "roc.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written


def render_ablation_figure(
    out_dir: str | Path, reports: dict[str, MetricsReport]
) -> Path:
    """Bar chart of overall accuracy per run (baseline plus exclusions)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = list(reports)
    values = [reports[n].overall_accuracy for n in names]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(names, values, color=["#4c72b0"] + ["#dd8452"] * (len(names) - 1))
    for i, v in enumerate(values):
        ax.text(i, v + 0.01, f"{v:.3f}", ha="center", fontsize=8)
    ax.set_ylim(0, 1.1)
    ax.set_ylabel("overall accuracy")
    ax.set_title("module exclusion comparison")
    fig.tight_layout()
    path = out / "ablation.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_sts_scatter(
    out_dir: str | Path, predicted: Sequence[float], gold: Sequence[float], r: float
) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.scatter(gold, predicted, s=12, alpha=0.6)
    ax.set_xlabel("gold similarity")
    ax.set_ylabel("model similarity")
    ax.set_title(f"sentence pairs, pearson r = {r:.4f}")
    fig.tight_layout()
    path = out / "sts_scatter.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path

"""Command-line interface.

Subcommands cover the full workflow: generate a synthetic corpus, ingest a
knowledge base, train the models and ledgers, score claims, run k-fold
evaluation and ablations, and evaluate the similarity model on
gold-scored sentence pairs.  All randomness flows from --seed.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bm25, ensemble, evaluation, sentiment, similarity, synth, trust
from .config import Config
from .text import load_stopwords
from .textrank import SummaryConfig


def _load_config(args) -> Config:
    cfg = Config.load(args.config) if args.config else Config()
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


def _assembly_config(cfg: Config) -> ensemble.AssemblyConfig:
    return ensemble.AssemblyConfig(
        stopwords=load_stopwords(cfg.stopwords_path or None),
        rake_top_k=cfg.rake_top_k,
        kterm_tau=cfg.kterm_tau,
        retrieve_limit=cfg.retrieve_limit,
        summary=SummaryConfig(
            damping=cfg.textrank_damping,
            tolerance=cfg.textrank_tolerance,
            max_iters=cfg.textrank_max_iters,
            slack=cfg.summary_slack,
        ),
    )


def _load_index(args) -> bm25.InvertedIndex:
    if getattr(args, "index", None):
        return bm25.load_index(args.index)
    if getattr(args, "kb", None):
        return bm25.build_index(bm25.load_kb_jsonl(args.kb))
    raise SystemExit("provide --kb <jsonl> or --index <file>")


def _train_models(args, cfg: Config):
    pairs = similarity.load_pairs_jsonl(args.pairs)
    sim_model = similarity.train_siamese(
        pairs,
        similarity.SimilarityTraining(
            embed_dim=cfg.embed_dim,
            hidden_size=cfg.hidden_size,
            epochs=cfg.sim_epochs,
            learning_rate=cfg.sim_lr,
            margin=cfg.sim_margin,
            batch_size=cfg.sim_batch_size,
            max_tokens=cfg.max_tokens,
            grad_clip=cfg.grad_clip,
            seed=cfg.seed,
        ),
    )
    examples = sentiment.load_examples_jsonl(args.sentiment)
    sent_model = sentiment.train_sentiment(
        examples,
        sentiment.SentimentTraining(
            embed_dim=cfg.embed_dim,
            hidden_size=cfg.hidden_size,
            epochs=cfg.sent_epochs,
            learning_rate=cfg.sent_lr,
            batch_size=cfg.sent_batch_size,
            max_tokens=cfg.max_tokens,
            grad_clip=cfg.grad_clip,
            seed=cfg.seed,
        ),
    )
    return sim_model, sent_model


def _prepare_static(claims, index, sim_model, sent_model, cfg: Config):
    assembly = _assembly_config(cfg)
    return [
        ensemble.static_features(claim, index, sim_model, sent_model, assembly)
        for claim in claims
    ]


def _provider(args) -> trust.ReputationProvider | None:
    if getattr(args, "provider", None):
        return trust.ReputationProvider.from_jsonl(args.provider)
    return None


def _eval_config(args, cfg: Config) -> evaluation.EvalConfig:
    return evaluation.EvalConfig(
        folds=getattr(args, "k", None) or cfg.eval_folds,
        seed=cfg.seed,
        mode=getattr(args, "mode", None) or cfg.eval_mode,
        fusion=getattr(args, "fusion", None) or cfg.eval_fusion,
        shuffle_labels=bool(getattr(args, "shuffle_labels", False)),
        weights_lr=cfg.weights_lr,
        weights_iterations=cfg.weights_iterations,
        mlp_hidden=cfg.mlp_hidden,
        mlp_lr=cfg.mlp_lr,
        mlp_epochs=cfg.mlp_epochs,
    )


# --- commands ---------------------------------------------------------------


def cmd_ingest_kb(args) -> int:
    index = bm25.build_index(bm25.load_kb_jsonl(args.kb_file))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    bm25.save_index(index, out)
    print(f"indexed {index.doc_count} documents -> {out}")
    return 0


def cmd_gen_synthetic(args) -> int:
    spec = synth.SynthSpec(n=args.n, seed=args.seed if args.seed is not None else 7)
    data = synth.generate(spec)
    paths = synth.write_all(data, args.out)
    n_true = sum(1 for c in data.claims if c["label"] in ("true", "mostly true"))
    print(
        f"wrote {len(data.claims)} claims ({n_true} true / "
        f"{len(data.claims) - n_true} false), {len(data.kb_docs)} kb docs, "
        f"{len(data.pairs)} pairs, {len(data.sentiments)} sentiment examples"
    )
    for name, path in paths.items():
        print(f"  {name}: {path}")
    return 0


def cmd_train(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    index = _load_index(args)
    claims = ensemble.load_claims_jsonl(args.claims)
    labeled = [c for c in claims if c.label is not None]
    if not labeled:
        raise SystemExit("training claims must carry labels")

    sim_model, sent_model = _train_models(args, cfg)
    similarity.save_model(sim_model, out / "similarity.ckpt")
    sentiment.save_model(sent_model, out / "sentiment.ckpt")

    author_ledger = trust.TrustLedger()
    site_ledger = trust.TrustLedger(_provider(args))
    binary = cfg.eval_mode != "multiclass"
    for claim in labeled:
        tag = trust.binarize_tag(claim.label) if binary else claim.label
        author_ledger.observe(trust.normalize_author(claim.author), tag)
        site_ledger.observe(trust.normalize_domain(claim.source_url), tag)
    trust.persist(author_ledger, out / "author_ledger.jsonl")
    trust.persist(site_ledger, out / "website_ledger.jsonl")

    static = _prepare_static(labeled, index, sim_model, sent_model, cfg)
    features = np.stack(
        [
            ensemble.aggregate_features(
                ensemble.bind_bundles(s, author_ledger, site_ledger)
            )
            for s in static
        ]
    )
    labels = np.array([trust.binarize_tag(c.label) for c in labeled])
    fusion = args.fusion or cfg.eval_fusion
    if fusion == "eq":
        weights = ensemble.train_weights(
            features, labels, cfg.weights_lr, cfg.weights_iterations
        )
        (out / "weights.json").write_text(
            json.dumps({"fusion": "eq", "weights": list(weights)}, sort_keys=True),
            encoding="utf-8",
        )
    else:
        if cfg.eval_mode == "multiclass":
            class_of = {0.0: 0, 0.25: 1, 0.75: 2, 1.0: 3}
            mlp_labels = np.array([class_of[c.label] for c in labeled])
            model = ensemble.train_mlp(
                features, mlp_labels, 4, cfg.mlp_hidden, cfg.mlp_lr, cfg.mlp_epochs, cfg.seed
            )
        else:
            model = ensemble.train_mlp(
                features, labels, 2, cfg.mlp_hidden, cfg.mlp_lr, cfg.mlp_epochs, cfg.seed
            )
        ensemble.save_mlp(model, out / "mlp.ckpt")
    meta = {"fusion": fusion, "mode": cfg.eval_mode, "seed": cfg.seed, "claims": len(labeled)}
    (out / "meta.json").write_text(json.dumps(meta, sort_keys=True), encoding="utf-8")
    print(f"trained on {len(labeled)} claims -> {out} (fusion={fusion})")
    return 0


def cmd_score(args) -> int:
    cfg = _load_config(args)
    artifacts = Path(args.artifacts)
    meta = json.loads((artifacts / "meta.json").read_text(encoding="utf-8"))
    sim_model = similarity.load_model(artifacts / "similarity.ckpt")
    sent_model = sentiment.load_model(artifacts / "sentiment.ckpt")
    author_ledger = trust.load(artifacts / "author_ledger.jsonl")
    site_ledger = trust.load(artifacts / "website_ledger.jsonl", _provider(args))
    fusion = meta["fusion"]
    mode = meta.get("mode", "binary")
    weights = None
    mlp_model = None
    if fusion == "eq":
        weights = np.array(
            json.loads((artifacts / "weights.json").read_text(encoding="utf-8"))["weights"]
        )
    else:
        mlp_model = ensemble.load_mlp(artifacts / "mlp.ckpt")

    index = _load_index(args)
    claims = ensemble.load_claims_jsonl(args.claim_file)
    static = _prepare_static(claims, index, sim_model, sent_model, cfg)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for claim, st in zip(claims, static):
        bundles = ensemble.bind_bundles(st, author_ledger, site_ledger)
        aggregated = ensemble.aggregate_features(bundles)
        per_evidence = []
        if fusion == "eq":
            contribs = [
                (rank + 1, ensemble.credibility_contribution(b, weights))
                for rank, b in enumerate(bundles)
            ]
            value = ensemble.credo_score(contribs, len(bundles))
        else:
            proba = ensemble.mlp_predict_proba(mlp_model, aggregated[None, :])
            if mlp_model.n_classes == 2:
                value = float(proba[0])
            else:
                value = float(proba[0, 2] + proba[0, 3])
            contribs = [(rank + 1, None) for rank in range(len(bundles))]
        for (rank, cc), bundle, doc_id in zip(
            contribs, bundles, st.doc_ids or ("",)
        ):
            per_evidence.append(
                {
                    "doc_id": doc_id or None,
                    "rank": rank,
                    "cc": cc,
                    "features": {
                        name: getattr(bundle, name) for name in ensemble.FEATURE_NAMES
                    },
                }
            )
        lines.append(
            json.dumps(
                {
                    "claim_id": claim.id,
                    "credo": value,
                    "label": ensemble.classify(value, mode),
                    "per_evidence": per_evidence,
                },
                sort_keys=True,
            )
        )
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"scored {len(claims)} claims -> {out}")
    return 0


def _run_eval_pipeline(args, exclude: str | None = None):
    cfg = _load_config(args)
    index = _load_index(args)
    claims = ensemble.load_claims_jsonl(args.claims)
    sim_model, sent_model = _train_models(args, cfg)
    static = _prepare_static(claims, index, sim_model, sent_model, cfg)
    eval_cfg = _eval_config(args, cfg)
    if exclude is not None:
        eval_cfg = replace(eval_cfg, exclude=exclude)
    result = evaluation.run_eval(claims, static, eval_cfg, _provider(args))
    return cfg, eval_cfg, claims, static, result


def cmd_eval(args) -> int:
    from . import report

    _, eval_cfg, _, _, result = _run_eval_pipeline(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.write_metrics_csv(out / "metrics.csv", result)
    report.render_eval_figures(
        out, result, f"{eval_cfg.fusion} fusion, {eval_cfg.mode}, k={eval_cfg.folds}"
    )
    print(f"k={eval_cfg.folds} {eval_cfg.fusion}/{eval_cfg.mode} -> {out}")
    for key, value in result.mean.as_dict().items():
        print(f"  {key}: {value:.4f}")
    return 0


def cmd_ablate(args) -> int:
    from . import report

    if args.fusion is None:
        args.fusion = "mlp"  # the fusion the exclusion study is run against
    cfg, eval_cfg, claims, static, baseline = _run_eval_pipeline(args)
    ablated = evaluation.run_ablation(
        claims, static, eval_cfg, args.exclude, _provider(args)
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.write_metrics_csv(out / "metrics_baseline.csv", baseline)
    report.write_metrics_csv(out / f"metrics_without_{args.exclude.lower()}.csv", ablated)
    report.render_ablation_figure(
        out, {"full": baseline.mean, f"w/o {args.exclude}": ablated.mean}
    )
    drop = baseline.mean.overall_accuracy - ablated.mean.overall_accuracy
    print(
        f"full={baseline.mean.overall_accuracy:.4f} "
        f"without {args.exclude}={ablated.mean.overall_accuracy:.4f} "
        f"(drop {drop:+.4f}) -> {out}"
    )
    return 0


def cmd_sts_eval(args) -> int:
    from . import report
    from .evaluation import pearson

    model = similarity.load_model(args.model)
    rows = similarity.read_sts_tsv(args.pairs)
    predicted = [
        similarity.energy(
            similarity.encode(a, model), similarity.encode(b, model)
        )
        for a, b, _ in rows
    ]
    gold = [g for _, _, g in rows]
    r = pearson(predicted, gold)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sts_metrics.csv").write_text(
        "pairs,pearson_r\n" + f"{len(rows)},{r:.6f}\n", encoding="utf-8"
    )
    report.render_sts_scatter(out, predicted, gold, r)
    print(f"{len(rows)} pairs, pearson r = {r:.4f} -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="credo", description="Credibility scoring for textual claims."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-kb", help="build a retrieval index from a JSONL knowledge base")
    p.add_argument("kb_file")
    p.add_argument("--out", default="index.json")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_ingest_kb, config=None)

    p = sub.add_parser("gen-synthetic", help="generate the synthetic benchmark corpus")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default="synthetic")
    p.set_defaults(func=cmd_gen_synthetic)

    def add_shared(p, with_fusion=True):
        p.add_argument("--config", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--kb", default=None)
        p.add_argument("--index", default=None)
        p.add_argument("--provider", default=None)
        if with_fusion:
            p.add_argument("--fusion", choices=["eq", "mlp"], default=None)

    p = sub.add_parser("train", help="train models, ledgers and fusion; save artifacts")
    p.add_argument("--claims", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--sentiment", required=True)
    p.add_argument("--out", default="artifacts")
    add_shared(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", help="score claims with saved artifacts")
    p.add_argument("--claim-file", required=True)
    p.add_argument("--artifacts", default="artifacts")
    p.add_argument("--out", default="scores.jsonl")
    add_shared(p, with_fusion=False)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="k-fold cross-validated evaluation")
    p.add_argument("--claims", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--sentiment", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--mode", choices=["binary", "multiclass"], default=None)
    p.add_argument("--shuffle-labels", action="store_true")
    p.add_argument("--out", default="eval_out")
    add_shared(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="evaluation with one module excluded")
    p.add_argument("--exclude", required=True, choices=sorted(evaluation.ABLATABLE))
    p.add_argument("--claims", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--sentiment", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--mode", choices=["binary", "multiclass"], default=None)
    p.add_argument("--out", default="ablation_out")
    add_shared(p)
    p.set_defaults(func=cmd_ablate, shuffle_labels=False)

    p = sub.add_parser("sts-eval", help="correlation of the similarity model with gold pair scores")
    p.add_argument("--pairs", required=True, help="TSV: gold<TAB>sentence1<TAB>sentence2")
    p.add_argument("--model", required=True, help="similarity checkpoint")
    p.add_argument("--out", default="sts_out")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_sts_eval, config=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry points: graph building, question generation,
chain-model training and evaluation, a terminal chat, and the HTTP service.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from random import Random
from typing import Dict, List, Optional, Sequence

from .chains import (
    ChainConfig,
    ChainModel,
    FeatureConfig,
    ModelScorer,
    evaluate_accuracy,
    featurize,
    load_chain_rows,
    textrank_scores,
    train_chain_model,
)
from .corpus import classify_sentences, load_corpus
from .dialog import DialogEngine, load_templates
from .graph import build_graph, deserialize_graph, serialize_graph
from .questions import QuestionGenConfig, generate_questions

CORPUS_ENV = "NEWSGRAPH_CORPUS"
CONFIG_ENV = "NEWSGRAPH_CONFIG"


def _load_config(path: Optional[str]) -> dict:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(f"error: cannot read config {path}: {exc}")


def _corpus_root(args: argparse.Namespace, config: dict) -> Path:
    root = getattr(args, "corpus", None) or config.get("corpus") \
        or os.environ.get(CORPUS_ENV)
    if not root:
        raise SystemExit(
            "error: no corpus given (use --corpus, config, or "
            f"{CORPUS_ENV})"
        )
    return Path(root)


def _load_articles(root: Path, only: Optional[str] = None) -> dict:
    try:
        articles = load_corpus(root)
    except Exception as exc:
        raise SystemExit(f"error: cannot load corpus at {root}: {exc}")
    if only is not None:
        if only not in articles:
            raise SystemExit(f"error: article {only!r} not in corpus")
        articles = {only: articles[only]}
    return articles


def _textrank_by_article(root: Optional[Path]) -> Dict[str, Dict[int, float]]:
    if root is None:
        return {}
    table = {}
    for article_id, article in load_corpus(root).items():
        verdicts = classify_sentences(article.sentences)
        eligible = [s for s, v in zip(article.sentences, verdicts) if v.eligible]
        table[article_id] = textrank_scores(eligible)
    return table


def _feature_config(use_textrank: bool) -> FeatureConfig:
    return FeatureConfig(use_sentence_distance=True, use_textrank=use_textrank)


def _row_featurizer(config: FeatureConfig, ranks: Dict[str, Dict[int, float]]):
    def featurize_row(row):
        article_ranks = ranks.get(row.article_id, {})
        return featurize(row.article_id, row.context, row.candidate,
                         article_ranks, config)
    return featurize_row


# ---------------------------------------------------------------------------
# subcommands


def cmd_build_graph(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    root = _corpus_root(args, config)
    articles = _load_articles(root, args.article)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    chain_config = ChainConfig(
        theta_stop=config.get("theta_stop", ChainConfig.theta_stop),
        max_length=config.get("max_chain_length", ChainConfig.max_length),
    )
    scorer_factory = None
    if args.model:
        model = ChainModel.load(Path(args.model))
        names = set(model.feature_names)
        if {"single_sentence_embedding", "chain_embedding"} & names:
            raise SystemExit(
                "error: this model needs embedding sidecars, which "
                "build-graph does not wire up"
            )
        feat = _feature_config("textrank" in names)

        def scorer_factory(article_id, ranks):
            return ModelScorer(model, article_id, ranks, feat)

    for article_id, article in sorted(articles.items()):
        scorer = None
        if scorer_factory is not None:
            verdicts = classify_sentences(article.sentences)
            eligible = [s for s, v in zip(article.sentences, verdicts)
                        if v.eligible]
            scorer = scorer_factory(article_id, textrank_scores(eligible))
        graph = build_graph(article, chain_scorer=scorer,
                            chain_config=chain_config)
        path = out_dir / f"{article_id}.json"
        path.write_text(serialize_graph(graph))
        print(
            f"{article_id}: {len(graph.sentences)} sentences, "
            f"chain {graph.chain}, {len(graph.questions)} questions, "
            f"{len(graph.entities)} entities -> {path}"
        )
    return 0


def cmd_gen_questions(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    root = _corpus_root(args, config)
    articles = _load_articles(root, args.article)
    gen_config = QuestionGenConfig()
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for article_id, article in sorted(articles.items()):
            verdicts = classify_sentences(article.sentences)
            for sent, verdict in zip(article.sentences, verdicts):
                if not verdict.eligible:
                    continue
                for q in generate_questions(sent, gen_config):
                    record = {
                        "article_id": article_id,
                        "position": sent.position,
                        "qtype": q.qtype,
                        "dep_path": q.dep_path,
                        "answer_index": q.answer_index,
                        "clause": q.clause,
                        "interrogative": q.interrogative,
                    }
                    out.write(json.dumps(record) + "\n")
    finally:
        if args.out:
            out.close()
    return 0


def cmd_train_chain(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    corpus = None
    if args.corpus or config.get("corpus") or os.environ.get(CORPUS_ENV):
        corpus = _corpus_root(args, config)
    train_rows = load_chain_rows(Path(args.data))
    val_rows = load_chain_rows(Path(args.val))
    ranks = _textrank_by_article(corpus)
    feat = _feature_config(use_textrank=corpus is not None)
    grid = tuple(float(x) for x in args.lambda_grid.split(",")) \
        if args.lambda_grid else None
    kwargs = {"lambda_grid": grid} if grid else {}
    model = train_chain_model(
        train_rows, val_rows, _row_featurizer(feat, ranks),
        n_dense=feat.n_dense, joint=args.joint,
        feature_names=feat.names(), **kwargs,
    )
    model.save(Path(args.out))
    for key in sorted(model.models):
        lam = model.models[key].lam
        print(f"group {key}: lambda={lam}")
    print(f"model -> {args.out}")
    return 0


def cmd_eval_chain(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    corpus = None
    if args.corpus or config.get("corpus") or os.environ.get(CORPUS_ENV):
        corpus = _corpus_root(args, config)
    model = ChainModel.load(Path(args.model))
    rows = load_chain_rows(Path(args.data))
    ranks = _textrank_by_article(corpus)
    names = set(model.feature_names)
    feat = _feature_config("textrank" in names)
    featurize_row = _row_featurizer(feat, ranks)

    by_length: Dict[int, List] = {}
    for row in rows:
        by_length.setdefault(len(row.context), []).append(row)
    parts = []
    for length in sorted(by_length):
        group_rows = by_length[length]
        report = evaluate_accuracy(
            group_rows,
            lambda r: model.score(featurize_row(r), len(r.context)),
        )
        parts.append(
            f"L={length} acc={report.correct}/{report.groups} "
            f"({report.accuracy:.3f})"
        )
    print(", ".join(parts))
    return 0


def _engine_for(args: argparse.Namespace, config: dict) -> DialogEngine:
    templates = None
    if config.get("templates"):
        templates = load_templates(Path(config["templates"]))
    if args.graphs:
        path = Path(args.graphs) / f"{args.article}.json"
        if not path.exists():
            raise SystemExit(f"error: no graph file {path}")
        graph = deserialize_graph(path.read_text())
    else:
        root = _corpus_root(args, config)
        articles = _load_articles(root, args.article)
        graph = build_graph(articles[args.article])
    kwargs = {}
    if config.get("confidence_threshold") is not None:
        kwargs["confidence_threshold"] = config["confidence_threshold"]
    return DialogEngine(graph, templates=templates, **kwargs)


def cmd_chat(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    engine = _engine_for(args, config)
    rng = Random(args.seed)
    state = engine.new_state("local")
    text, plan = engine.respond(state, "", rng)
    print(f"bot> {text}")
    if args.debug:
        print(f"     [{plan.strategy}]", file=sys.stderr)
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        text, plan = engine.respond(state, line, rng)
        print(f"bot> {text}")
        if args.debug:
            print(f"     [{plan.strategy}]", file=sys.stderr)
        if state.phase == "Ended":
            break
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    config = _load_config(args.config)
    graphs = {}
    if args.graphs:
        for path in sorted(Path(args.graphs).glob("*.json")):
            graph = deserialize_graph(path.read_text())
            graphs[graph.article_id] = graph
    else:
        root = _corpus_root(args, config)
        for article_id, article in _load_articles(root).items():
            graphs[article_id] = build_graph(article)
    if not graphs:
        raise SystemExit("error: no graphs to serve")
    templates = None
    if config.get("templates"):
        templates = load_templates(Path(config["templates"]))
    log_dir = args.log_dir or config.get("log_dir")
    app = create_app(
        graphs,
        log_dir=Path(log_dir) if log_dir else None,
        ttl_seconds=float(config.get("ttl_seconds", args.ttl)),
        templates=templates,
        confidence_threshold=config.get("confidence_threshold"),
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newsgraph",
        description="Document-grounded dialog over dependency-parsed news.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--corpus", help="corpus root with manifest.json")
        p.add_argument("--config", help="JSON config file")

    p = sub.add_parser("build-graph", help="build document graphs")
    add_common(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--article", help="only this article id")
    p.add_argument("--model", help="trained chain model file")
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("gen-questions", help="emit generated questions")
    add_common(p)
    p.add_argument("--article", help="only this article id")
    p.add_argument("--out", help="output JSONL file (default stdout)")
    p.set_defaults(func=cmd_gen_questions)

    p = sub.add_parser("train-chain", help="train the chain model")
    add_common(p)
    p.add_argument("--data", required=True, help="training rows JSONL")
    p.add_argument("--val", required=True, help="validation rows JSONL")
    p.add_argument("--out", required=True, help="model output file")
    p.add_argument("--lambda-grid", help="comma-separated lambda values")
    p.add_argument("--joint", action="store_true",
                   help="one model over all context lengths")
    p.set_defaults(func=cmd_train_chain)

    p = sub.add_parser("eval-chain", help="evaluate a chain model")
    add_common(p)
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--data", required=True, help="evaluation rows JSONL")
    p.set_defaults(func=cmd_eval_chain)

    p = sub.add_parser("chat", help="terminal chat over one article")
    add_common(p)
    p.add_argument("--article", required=True, help="article id")
    p.add_argument("--graphs", help="directory of prebuilt graph JSON")
    p.add_argument("--seed", type=int, default=0, help="rng seed")
    p.add_argument("--debug", action="store_true",
                   help="print strategy labels to stderr")
    p.set_defaults(func=cmd_chat)

    p = sub.add_parser("serve", help="run the chat HTTP service")
    add_common(p)
    p.add_argument("--graphs", help="directory of prebuilt graph JSON")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--log-dir", help="conversation log directory")
    p.add_argument("--ttl", type=float, default=30 * 60,
                   help="idle session TTL in seconds")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except BrokenPipeError:
        return 0
    return 0


if __name__ == "__main__":
    sys.exit(main())

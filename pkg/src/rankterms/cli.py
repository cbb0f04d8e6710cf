"""Command-line front end: a workspace of named artifacts, one stage per subcommand.

Each subcommand reads its upstream artifacts from the workspace directory
and writes its own, so stages can be rerun independently.  Options resolve
with precedence flag > config file > built-in default; the workspace
location additionally honors the RANKTERMS_WORKSPACE environment variable
(flag > environment > config > default).  The config file holds one
``key = value`` pair per line with ``#`` comments.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

from . import coherence as coh
from . import corpus as cp
from . import evaluation as ev
from . import index as ix
from . import model as md
from .rerank import RankingMethod, rerank_all

ENV_WORKSPACE = "RANKTERMS_WORKSPACE"
DEFAULT_WORKSPACE = "workspace"

VOCAB_FILE = "vocab.tsv"
DOCS_FILE = "docs.tsv"
SUMMARY_FILE = "corpus_summary.json"
PHI_FILE = "phi.txt"
THETA_FILE = "theta.txt"
META_FILE = "model_meta.json"
SELECTION_FILE = "topic_selection.json"
RANKED_JSON = "ranked_topics.json"
RANKED_TSV = "ranked_topics.tsv"
COHERENCE_FILE = "coherence.json"
REPORT_JSON = "eval_report.json"
REPORT_TABLE = "eval_table.txt"
CORRELATION_FILE = "correlation.json"
REPORT_TEXT = "report.txt"
RUNS_DIR = "runs"

CONFIG_KEYS = {
    "workspace", "stopwords", "min_df", "max_df_ratio",
    "num_topics", "alpha", "beta", "iterations", "seed",
    "candidate_topics", "metric", "window", "top_n",
    "methods", "n_values", "gold_k", "label_depth", "label_separator",
    "k1", "b", "depth", "tag",
}


class CliError(Exception):
    """An expected failure; its message goes to stderr with exit status 2."""


def _load_config(path: str) -> dict[str, str]:
    if not Path(path).exists():
        raise CliError(f"config file not found: {path}")
    config: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise CliError(
                    f"{path}:{lineno}: unknown config key {key!r} "
                    f"(known: {', '.join(sorted(CONFIG_KEYS))})"
                )
            config[key] = value
    return config


def _resolve(flag_value, config: dict[str, str], key: str, default, parse):
    """Option precedence: command-line flag, then config file, then default."""
    if flag_value is not None:
        return flag_value
    if key in config:
        try:
            return parse(config[key])
        except ValueError as e:
            raise CliError(f"config key {key!r}: {e}") from e
    return default


def _parse_window(text: str) -> int | str:
    if text == "document":
        return "document"
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"window must be 'document' or an integer, got {text!r}")


def _parse_methods(text: str) -> list[RankingMethod]:
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            out.append(RankingMethod(part))
        except ValueError:
            valid = ", ".join(m.value for m in RankingMethod)
            raise ValueError(f"unknown ranking method {part!r} (valid: {valid})")
    return out


def _parse_ints(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _parse_alpha(text: str) -> float | None:
    return None if text == "auto" else float(text)


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def _need(path: Path, hint: str) -> Path:
    if not path.exists():
        raise CliError(f"missing {path}: {hint}")
    return path


def _default_stopwords() -> set[str]:
    text = resources.files("rankterms").joinpath("data/stopwords_en.txt").read_text("utf-8")
    return {w for w in (line.strip().lower() for line in text.splitlines()) if w}


def _load_workspace_corpus(ws: Path) -> cp.Corpus:
    vocab = _need(ws / VOCAB_FILE, "run 'rankterms preprocess' first")
    docs = _need(ws / DOCS_FILE, "run 'rankterms preprocess' first")
    return cp.load_corpus(vocab, docs)


def _load_workspace_model(ws: Path) -> md.TopicModel:
    phi = _need(ws / PHI_FILE, "run 'rankterms train' or 'rankterms import-model' first")
    theta = _need(ws / THETA_FILE, "run 'rankterms train' or 'rankterms import-model' first")
    return md.load_model(phi, theta, ws / META_FILE)


def _gibbs_config(args, config: dict[str, str], ws: Path, require_topics: bool = True) -> md.GibbsConfig:
    num_topics = _resolve(args.num_topics, config, "num_topics", None, int)
    if num_topics is None:
        selection = ws / SELECTION_FILE
        if selection.exists():
            with open(selection, encoding="utf-8") as f:
                num_topics = json.load(f)["selected"]
        elif require_topics:
            raise CliError(
                "no topic count: pass --num-topics, set num_topics in the "
                "config, or run 'rankterms select-topics' first"
            )
    try:
        return md.GibbsConfig(
            num_topics=num_topics if num_topics is not None else 1,
            alpha=_resolve(args.alpha, config, "alpha", None, _parse_alpha),
            beta=_resolve(args.beta, config, "beta", 0.01, float),
            iterations=_resolve(args.iterations, config, "iterations", 1000, int),
            seed=_resolve(args.seed, config, "seed", 0, int),
        )
    except ValueError as e:
        raise CliError(str(e)) from e


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_preprocess(args, config: dict[str, str], ws: Path) -> int:
    if not Path(args.input).exists():
        raise CliError(f"input file not found: {args.input}")
    stopword_arg = _resolve(args.stopwords, config, "stopwords", None, str)
    if stopword_arg is None:
        stopwords = _default_stopwords()
    elif stopword_arg == "none":
        stopwords = set()
    else:
        if not Path(stopword_arg).exists():
            raise CliError(
                f"stopword file not found: {stopword_arg} "
                "(pass --stopwords none to disable filtering)"
            )
        stopwords = cp.load_stopwords(stopword_arg)

    raw_docs = cp.read_jsonl(args.input)
    corpus = cp.build_corpus(
        raw_docs,
        stopwords=stopwords,
        min_df=_resolve(args.min_df, config, "min_df", cp.DEFAULT_MIN_DF, int),
        max_df_ratio=_resolve(
            args.max_df_ratio, config, "max_df_ratio", cp.DEFAULT_MAX_DF_RATIO, float
        ),
    )
    cp.save_corpus(corpus, ws / VOCAB_FILE, ws / DOCS_FILE)
    labels = {label for d in corpus.docs for label in d.labels}
    _write_json(ws / SUMMARY_FILE, {
        "num_docs": corpus.num_docs,
        "vocab_size": len(corpus.vocab),
        "total_tokens": corpus.total_tokens,
        "empty_docs": sum(1 for d in corpus.docs if d.is_empty),
        "num_labels": len(labels),
    })
    print(f"preprocess: {corpus.num_docs} docs, vocabulary {len(corpus.vocab)}, "
          f"{corpus.total_tokens} tokens -> {ws}")
    return 0


def cmd_train(args, config: dict[str, str], ws: Path) -> int:
    corpus = _load_workspace_corpus(ws)
    cfg = _gibbs_config(args, config, ws)
    model = md.train_lda(corpus, cfg)
    md.export_model(model, ws / PHI_FILE, ws / THETA_FILE, ws / META_FILE)
    print(f"train: T={cfg.num_topics} iterations={cfg.iterations} "
          f"seed={cfg.seed} -> {ws / PHI_FILE}")
    return 0


def cmd_import_model(args, config: dict[str, str], ws: Path) -> int:
    for path in (args.phi, args.theta):
        if not Path(path).exists():
            raise CliError(f"matrix file not found: {path}")
    meta = None
    if args.meta:
        with open(_need(Path(args.meta), "metadata sidecar"), encoding="utf-8") as f:
            meta = json.load(f)
    try:
        model = md.import_model(args.phi, args.theta, meta=meta)
    except ValueError as e:
        raise CliError(f"invalid model: {e}") from e
    md.export_model(model, ws / PHI_FILE, ws / THETA_FILE, ws / META_FILE)
    print(f"import-model: T={model.num_topics} V={model.vocab_size} "
          f"D={model.num_docs} -> {ws / PHI_FILE}")
    return 0


def cmd_select_topics(args, config: dict[str, str], ws: Path) -> int:
    corpus = _load_workspace_corpus(ws)
    candidates = _resolve(args.candidates, config, "candidate_topics", None, _parse_ints)
    if not candidates:
        raise CliError("no candidate topic counts: pass --candidates 5,10,20")
    metric = _resolve(args.metric, config, "metric", "npmi", str)
    window = _resolve(args.window, config, "window", "document", _parse_window)
    top_n = _resolve(args.top_n, config, "top_n", coh.DEFAULT_TOP_N, int)
    cfg = _gibbs_config(args, config, ws, require_topics=False)
    try:
        stats = coh.build_cooc(corpus, window)
        scores = coh.coherence_by_count(corpus, candidates, cfg, stats, metric, top_n)
    except ValueError as e:
        raise CliError(str(e)) from e
    selected = min((t for t in scores), key=lambda t: (-scores[t], t))
    _write_json(ws / SELECTION_FILE, {
        "metric": metric,
        "window": window,
        "top_n": top_n,
        "candidates": {str(t): scores[t] for t in sorted(scores)},
        "selected": selected,
        "gibbs": {"alpha": cfg.alpha, "beta": cfg.beta,
                  "iterations": cfg.iterations, "seed": cfg.seed},
    })
    for t in sorted(scores):
        print(f"T={t}: mean {metric} coherence {scores[t]:.4f}")
    print(f"select-topics: selected T={selected} -> {ws / SELECTION_FILE}")
    return 0


def cmd_rerank(args, config: dict[str, str], ws: Path) -> int:
    corpus = _load_workspace_corpus(ws)
    model = _load_workspace_model(ws)
    methods = _resolve(args.methods, config, "methods", list(RankingMethod), _parse_methods)
    n = _resolve(args.n, config, "top_n", coh.DEFAULT_TOP_N, int)
    try:
        ranked = [
            topic
            for method in methods
            for topic in rerank_all(model, corpus.vocab, method, n)
        ]
    except ValueError as e:
        raise CliError(str(e)) from e
    _write_json(ws / RANKED_JSON, [r.to_dict() for r in ranked])
    with open(ws / RANKED_TSV, "w", encoding="utf-8") as f:
        for r in ranked:
            f.write(r.to_line() + "\n")
    print(f"rerank: {len(ranked)} ranked topics "
          f"({len(methods)} methods x {model.num_topics} topics, n={n}) -> {ws / RANKED_TSV}")
    return 0


def cmd_coherence(args, config: dict[str, str], ws: Path) -> int:
    corpus = _load_workspace_corpus(ws)
    model = _load_workspace_model(ws)
    metric = _resolve(args.metric, config, "metric", "npmi", str)
    window = _resolve(args.window, config, "window", "document", _parse_window)
    top_n = _resolve(args.top_n, config, "top_n", coh.DEFAULT_TOP_N, int)
    try:
        stats = coh.build_cooc(corpus, window)
        per_topic = coh.topic_coherences(model, stats, top_n=top_n, metric=metric)
    except ValueError as e:
        raise CliError(str(e)) from e
    mean = sum(per_topic) / len(per_topic)
    _write_json(ws / COHERENCE_FILE, {
        "metric": metric,
        "window": window,
        "top_n": top_n,
        "per_topic": per_topic,
        "mean": mean,
    })
    print(f"coherence: mean {metric} = {mean:.4f} over {len(per_topic)} topics "
          f"-> {ws / COHERENCE_FILE}")
    return 0


def cmd_ir_eval(args, config: dict[str, str], ws: Path) -> int:
    corpus = _load_workspace_corpus(ws)
    model = _load_workspace_model(ws)
    label_depth = _resolve(args.label_depth, config, "label_depth", None, int)
    separator = _resolve(args.label_separator, config, "label_separator", "/", str)
    gold_k = _resolve(args.gold_k, config, "gold_k", 50, int)
    methods = _resolve(args.methods, config, "methods", list(RankingMethod), _parse_methods)
    ns = _resolve(args.n_values, config, "n_values", [5, 10, 20], _parse_ints)
    depth = _resolve(args.depth, config, "depth", ix.DEFAULT_DEPTH, int)
    params = ix.BM25Params(
        k1=_resolve(args.k1, config, "k1", 1.2, float),
        b=_resolve(args.b, config, "b", 0.75, float),
    )
    labelled = corpus if label_depth is None else ev.with_truncated_labels(
        corpus, label_depth, separator
    )
    try:
        golds = ev.select_top_gold(labelled, gold_k)
        report = ev.run_ir_eval(
            labelled, model, labelled.vocab, ix.build_index(labelled),
            golds, methods=methods, ns=ns, k=depth, params=params,
            run_dir=(ws / RUNS_DIR) if args.write_runs else None,
        )
    except ValueError as e:
        raise CliError(str(e)) from e
    with open(ws / REPORT_JSON, "w", encoding="utf-8") as f:
        f.write(report.to_json())
    table = report.to_table()
    with open(ws / REPORT_TABLE, "w", encoding="utf-8") as f:
        f.write(table)
    print(table, end="")
    print(f"ir-eval: {len(golds)} gold labels -> {ws / REPORT_JSON}")
    return 0


def _read_vector(source: str, ws: Path) -> list[float]:
    """A vector source: a numbers file, or 'report' for the workspace MAPs."""
    if source == "report":
        path = _need(ws / REPORT_JSON, "run 'rankterms ir-eval' first")
        with open(path, encoding="utf-8") as f:
            return [cell["map"] for cell in json.load(f)["cells"]]
    if not Path(source).exists():
        raise CliError(f"vector file not found: {source}")
    with open(source, encoding="utf-8") as f:
        values = [float(tok) for tok in f.read().split()]
    if not values:
        raise CliError(f"no numbers in {source}")
    return values


def cmd_correlate(args, config: dict[str, str], ws: Path) -> int:
    xs = _read_vector(args.xs, ws)
    ys = _read_vector(args.ys, ws)
    try:
        r = ev.pearson(xs, ys)
    except ValueError as e:
        raise CliError(str(e)) from e
    _write_json(ws / CORRELATION_FILE, {
        "xs": xs, "ys": ys, "n": len(xs), "pearson_r": r,
    })
    print(f"pearson_r = {r:.6f}")
    return 0


def cmd_report(args, config: dict[str, str], ws: Path) -> int:
    sections = []
    summary_path = ws / SUMMARY_FILE
    if summary_path.exists():
        with open(summary_path, encoding="utf-8") as f:
            s = json.load(f)
        sections.append(
            "Corpus\n"
            f"  documents      {s['num_docs']}\n"
            f"  vocabulary     {s['vocab_size']}\n"
            f"  tokens         {s['total_tokens']}\n"
            f"  empty docs     {s['empty_docs']}\n"
            f"  gold labels    {s['num_labels']}"
        )
    meta_path = ws / META_FILE
    if meta_path.exists():
        with open(meta_path, encoding="utf-8") as f:
            m = json.load(f)
        lines = ["Model"]
        for key in ("num_topics", "vocab_size", "num_docs", "alpha", "beta",
                    "iterations", "seed", "rng", "source"):
            if key in m:
                lines.append(f"  {key:<14} {m[key]}")
        sections.append("\n".join(lines))
    selection_path = ws / SELECTION_FILE
    if selection_path.exists():
        with open(selection_path, encoding="utf-8") as f:
            sel = json.load(f)
        lines = [f"Topic count selection ({sel['metric']}, top {sel['top_n']})"]
        for t, value in sorted(sel["candidates"].items(), key=lambda kv: int(kv[0])):
            marker = " <- selected" if int(t) == sel["selected"] else ""
            lines.append(f"  T={t:<4} {value:.4f}{marker}")
        sections.append("\n".join(lines))
    coherence_path = ws / COHERENCE_FILE
    if coherence_path.exists():
        with open(coherence_path, encoding="utf-8") as f:
            c = json.load(f)
        sections.append(
            f"Coherence ({c['metric']}, window={c['window']}, top {c['top_n']})\n"
            f"  mean           {c['mean']:.4f}"
        )
    table_path = ws / REPORT_TABLE
    if table_path.exists():
        sections.append(table_path.read_text(encoding="utf-8").rstrip("\n"))
    correlation_path = ws / CORRELATION_FILE
    if correlation_path.exists():
        with open(correlation_path, encoding="utf-8") as f:
            corr = json.load(f)
        sections.append(f"Correlation\n  pearson_r      {corr['pearson_r']:.4f}")
    if not sections:
        raise CliError(
            f"workspace {ws} has no artifacts to report; run 'rankterms preprocess' first"
        )
    text = "\n\n".join(sections) + "\n"
    with open(ws / REPORT_TEXT, "w", encoding="utf-8") as f:
        f.write(text)
    print(text, end="")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_gibbs_flags(sub: argparse.ArgumentParser, with_topics: bool = True) -> None:
    if with_topics:
        sub.add_argument("--num-topics", type=int, help="number of topics T")
    sub.add_argument("--alpha", type=_parse_alpha,
                     help="document-topic prior ('auto' = 50/T)")
    sub.add_argument("--beta", type=float, help="topic-word prior (default 0.01)")
    sub.add_argument("--iterations", type=int, help="sampler sweeps (default 1000)")
    sub.add_argument("--seed", type=int, help="random seed (default 0)")


def _add_coherence_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--metric", choices=list(coh.METRICS), help="pair metric (default npmi)")
    sub.add_argument("--window", type=_parse_window,
                     help="'document' or a sliding window length >= 2")
    sub.add_argument("--top-n", type=int, help="words per topic (default 10)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankterms",
        description="Re-rank topic-model word lists and evaluate the rankings "
                    "with BM25 retrieval.",
        epilog=f"The workspace directory may also be set via ${ENV_WORKSPACE}.",
    )
    parser.add_argument("-w", "--workspace", help="artifact directory (default ./workspace)")
    parser.add_argument("-c", "--config", help="key = value config file")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("preprocess", help="tokenize and filter a JSONL corpus")
    sub.add_argument("--input", required=True, help="JSON Lines file with id/text/labels")
    sub.add_argument("--stopwords", help="stopword file, or 'none' (default: built-in English)")
    sub.add_argument("--min-df", type=int, help="minimum document frequency (default 5)")
    sub.add_argument("--max-df-ratio", type=float,
                     help="maximum document frequency as a fraction (default 0.5)")
    sub.set_defaults(func=cmd_preprocess)

    sub = commands.add_parser("train", help="train a topic model by Gibbs sampling")
    _add_gibbs_flags(sub)
    sub.set_defaults(func=cmd_train)

    sub = commands.add_parser("import-model", help="validate and adopt external matrices")
    sub.add_argument("--phi", required=True, help="topic-word matrix file")
    sub.add_argument("--theta", required=True, help="document-topic matrix file")
    sub.add_argument("--meta", help="optional JSON metadata sidecar")
    sub.set_defaults(func=cmd_import_model)

    sub = commands.add_parser("select-topics",
                              help="pick the topic count maximizing coherence")
    sub.add_argument("--candidates", type=_parse_ints, help="comma-separated counts")
    _add_gibbs_flags(sub, with_topics=False)
    _add_coherence_flags(sub)
    sub.set_defaults(func=cmd_select_topics, num_topics=None)

    sub = commands.add_parser("rerank", help="rank each topic's words per method")
    sub.add_argument("--methods", type=_parse_methods,
                     help="comma-separated subset of orig,norm,tfidf,idf")
    sub.add_argument("--n", type=int, help="words per topic (default 10)")
    sub.set_defaults(func=cmd_rerank)

    sub = commands.add_parser("coherence", help="score the trained model's topics")
    _add_coherence_flags(sub)
    sub.set_defaults(func=cmd_coherence)

    sub = commands.add_parser("ir-eval", help="retrieval evaluation of all rankings")
    sub.add_argument("--gold-k", type=int, help="gold labels to evaluate (default 50)")
    sub.add_argument("--label-depth", type=int, help="truncate hierarchical labels")
    sub.add_argument("--label-separator", help="hierarchy separator (default '/')")
    sub.add_argument("--methods", type=_parse_methods,
                     help="comma-separated subset of orig,norm,tfidf,idf")
    sub.add_argument("--n-values", type=_parse_ints, help="query lengths (default 5,10,20)")
    sub.add_argument("--depth", type=int, help="retrieval depth k (default 1000)")
    sub.add_argument("--k1", type=float, help="BM25 k1 (default 1.2)")
    sub.add_argument("--b", type=float, help="BM25 b (default 0.75)")
    sub.add_argument("--write-runs", action="store_true",
                     help="write qrels and per-cell run files under runs/")
    sub.set_defaults(func=cmd_ir_eval)

    sub = commands.add_parser("correlate", help="Pearson r between two vectors")
    sub.add_argument("--xs", required=True,
                     help="numbers file, or 'report' for the workspace MAP vector")
    sub.add_argument("--ys", required=True, help="numbers file, or 'report'")
    sub.set_defaults(func=cmd_correlate)

    sub = commands.add_parser("report", help="summarize workspace artifacts")
    sub.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        config = _load_config(args.config) if args.config else {}
        workspace = args.workspace or os.environ.get(ENV_WORKSPACE) \
            or config.get("workspace") or DEFAULT_WORKSPACE
        ws = Path(workspace)
        ws.mkdir(parents=True, exist_ok=True)
        return args.func(args, config, ws)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line pipeline: convert, stats, walk, train, eval, sweep.

Every artifact is accompanied by a ``<artifact>.manifest`` TSV recording
the graph fingerprint and the parameters that produced it, so downstream
commands can verify provenance (notably the label-leak guard for the
classification task).

Exit codes: 0 ok, 1 input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import convert as conv
from . import evaluate as ev
from . import graph as gr
from . import skipgram as sg
from . import walks as wk
from .fixtures import random_graph
from .parser import ParseError, parse_document
from .terms import RDF_TYPE, Triple, serialize_triple


class InputError(Exception):
    pass


# -- manifests ---------------------------------------------------------------

def write_manifest(path: Path, entries: dict[str, str]) -> None:
    with open(str(path) + ".manifest", "w", encoding="utf-8") as fh:
        for key, value in entries.items():
            fh.write(f"{key}\t{value}\n")


def read_manifest(path: Path) -> dict[str, str]:
    manifest = Path(str(path) + ".manifest")
    if not manifest.exists():
        return {}
    entries: dict[str, str] = {}
    with open(manifest, "r", encoding="utf-8") as fh:
        for line in fh:
            key, _, value = line.rstrip("\n").partition("\t")
            entries[key] = value
    return entries


# -- shared loading -----------------------------------------------------------

def load_graph(path: str, exclude_predicates: tuple[str, ...] = ()) -> gr.Graph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(str(exc)) from exc
    triples = parse_document(text)
    if exclude_predicates:
        excluded = set(exclude_predicates)
        triples = [t for t in triples if t.predicate.value not in excluded]
    return gr.build_graph(triples)


def write_triples(triples, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for t in triples:
            fh.write(serialize_triple(t) + "\n")


# -- subcommands ----------------------------------------------------------------

def cmd_convert(args) -> int:
    g_triples = parse_document(Path(args.input).read_text(encoding="utf-8"))
    converted, report = conv.convert_document(
        g_triples, link_to_wrapper=not args.link_to_inner
    )
    write_triples(converted, args.output)
    report_path = args.report or args.output + ".report.tsv"
    Path(report_path).write_text(report.tsv(), encoding="utf-8")
    return 0


def cmd_stats(args) -> int:
    g = load_graph(args.input)
    stats = gr.compute_stats(g, include_id_nesting=args.include_id_nesting)
    text = gr.stats_tsv(stats)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _walk_params(args) -> wk.WalkParams:
    return wk.WalkParams(
        strategy=wk.Strategy(args.strategy),
        n=args.walks,
        d=args.depth,
        alpha=args.alpha,
        beta=args.beta,
        seed=args.seed,
    )


def cmd_walk(args) -> int:
    g = load_graph(args.input, tuple(args.exclude_predicate))
    params = _walk_params(args)
    corpus = wk.generate_corpus(g, params)
    wk.write_corpus(corpus, args.output)
    write_manifest(Path(args.output), {
        "graph_fingerprint": corpus.graph_fingerprint,
        "strategy": params.strategy.value,
        "n": str(params.n),
        "d": str(params.d),
        "alpha": repr(params.alpha),
        "beta": repr(params.beta),
        "walk_seed": str(params.seed),
        "excluded_predicates": ",".join(args.exclude_predicate),
    })
    return 0


def _train_config(args) -> sg.TrainConfig:
    return sg.TrainConfig(
        dim=args.dim,
        window=args.window,
        epochs=args.epochs,
        negatives=args.negatives,
        learning_rate=args.learning_rate,
        min_count=args.min_count,
        seed=args.seed,
        mode=sg.Mode(args.mode),
        softmax_mode=(
            sg.SoftmaxMode.FULL_SOFTMAX if args.full_softmax
            else sg.SoftmaxMode.NEGATIVE_SAMPLING
        ),
    )


def cmd_train(args) -> int:
    _, rows = wk.read_corpus_lines(args.input)
    cfg = _train_config(args)
    vocab = sg.build_vocabulary(rows, cfg.min_count)
    model = sg.train(rows, vocab, cfg)
    sg.save_embeddings(model, args.output, include_outputs=args.save_outputs)
    manifest = read_manifest(Path(args.input))
    manifest.update({
        "dim": str(cfg.dim),
        "window": str(cfg.window),
        "epochs": str(cfg.epochs),
        "negatives": str(cfg.negatives),
        "learning_rate": repr(cfg.learning_rate),
        "min_count": str(cfg.min_count),
        "train_seed": str(cfg.seed),
        "mode": cfg.mode.value,
        "softmax": cfg.softmax_mode.value,
    })
    write_manifest(Path(args.output), manifest)
    return 0


_TASKS = ("classification", "clustering", "relatedness", "qt_similarity")


def _gold_path(gold_dir: str, task: str) -> Path:
    path = Path(gold_dir) / f"{task}.tsv"
    if not path.exists():
        raise InputError(f"gold file not found: {path}")
    return path


def cmd_eval(args) -> int:
    emb = sg.load_embeddings(args.input)
    manifest = read_manifest(Path(args.input))
    tasks = args.tasks.split(",") if args.tasks else list(_TASKS)
    for task in tasks:
        if task not in _TASKS:
            raise InputError(f"unknown task {task!r}")
    if "classification" in tasks and not args.allow_leak:
        excluded = manifest.get("excluded_predicates", "").split(",")
        if RDF_TYPE not in excluded:
            raise InputError(
                "classification on embeddings trained without excluding "
                "rdf:type leaks labels; pass --allow-leak to override"
            )
    echo = {"manifest": manifest}
    reports = []
    for task in tasks:
        path = _gold_path(args.gold_dir, task)
        if task == "classification":
            reports.append(ev.eval_classification(
                emb, ev.load_labeled_tsv(path), seed=args.seed,
                config_echo=echo))
        elif task == "clustering":
            reports.append(ev.eval_clustering(
                emb, ev.load_labeled_tsv(path), seed=args.seed,
                config_echo=echo))
        elif task == "relatedness":
            reports.append(ev.eval_relatedness(
                emb, ev.load_relatedness(path), config_echo=echo))
        else:
            reports.append(ev.eval_qt_similarity(
                emb, ev.load_similarity(path), config_echo=echo))
    text = ev.reports_tsv(reports)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def run_pipeline(g: gr.Graph, params: wk.WalkParams, cfg: sg.TrainConfig
                 ) -> sg.EmbeddingModel:
    """walk -> train, in memory; used by the sweep command and tests."""
    corpus = wk.generate_corpus(g, params)
    rows = [walk.texts() for walk in corpus.walks]
    vocab = sg.build_vocabulary(rows, cfg.min_count)
    return sg.train(rows, vocab, cfg)


def _model_vectors(model: sg.EmbeddingModel) -> sg.WordVectors:
    return sg.WordVectors(
        tokens=model.vocab.tokens,
        vectors=model.input_vectors,
        index=dict(model.vocab.index),
    )


def cmd_sweep(args) -> int:
    g = load_graph(args.input, tuple(args.exclude_predicate))
    gold = ev.load_labeled_tsv(_gold_path(args.gold_dir, "classification"))
    alphas = [float(x) for x in args.grid_alpha.split(",")] if args.grid_alpha else [args.alpha]
    betas = [float(x) for x in args.grid_beta.split(",")] if args.grid_beta else [args.beta]
    depths = [int(x) for x in args.grid_depth.split(",")] if args.grid_depth else [args.depth]
    rows = []
    for depth in depths:
        for alpha in alphas:
            for beta in betas:
                params = wk.WalkParams(
                    strategy=wk.Strategy(args.strategy), n=args.walks,
                    d=depth, alpha=alpha, beta=beta, seed=args.seed,
                )
                cfg = _train_config(args)
                model = run_pipeline(g, params, cfg)
                report = ev.eval_classification(
                    _model_vectors(model), gold, seed=args.seed)
                for metric, value in report.metrics.items():
                    rows.append(
                        f"{alpha!r}\t{beta!r}\t{depth}\tclassification"
                        f"\t{metric}\t{value!r}"
                    )
    text = "alpha\tbeta\tdepth\ttask\tmetric\tvalue\n" + "".join(
        r + "\n" for r in rows
    )
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen_fixture(args) -> int:
    triples = random_graph(
        seed=args.seed,
        triples=args.triples,
        qt_probability=args.qt_probability,
        max_depth=args.max_depth,
    )
    write_triples(triples, args.output)
    return 0


# -- argument wiring ----------------------------------------------------------

def _add_walk_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--walks", type=int, default=100)
    p.add_argument("--strategy", choices=["random", "mid"], default="mid")
    p.add_argument("--exclude-predicate", action="append", default=[],
                   metavar="IRI")


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--learning-rate", type=float, default=0.025)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--mode", choices=["classic", "structured"],
                   default="classic")
    p.add_argument("--full-softmax", action="store_true")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtwalk",
        description="RDF-star graph embeddings via QT-aware walks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="fold reified scenes into RDF-star")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--report")
    p.add_argument("--link-to-inner", action="store_true",
                   help="resolve scene links to the inner QT, not the "
                        "id wrapper")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("stats", help="structural statistics of a graph")
    p.add_argument("input")
    p.add_argument("--output")
    p.add_argument("--include-id-nesting", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("walk", help="generate a walk corpus")
    p.add_argument("input")
    p.add_argument("output")
    _add_walk_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("train", help="train embeddings from a corpus")
    p.add_argument("input")
    p.add_argument("output")
    _add_train_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--save-outputs", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score embeddings against gold files")
    p.add_argument("input")
    p.add_argument("--gold-dir", required=True)
    p.add_argument("--tasks", help="comma list; default all four")
    p.add_argument("--output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--allow-leak", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="grid sweep over alpha/beta/depth")
    p.add_argument("input")
    p.add_argument("--gold-dir", required=True)
    p.add_argument("--output")
    _add_walk_flags(p)
    _add_train_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-alpha")
    p.add_argument("--grid-beta")
    p.add_argument("--grid-depth")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen-fixture", help="write a random RDF-star graph")
    p.add_argument("output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--triples", type=int, default=60)
    p.add_argument("--qt-probability", type=float, default=0.3)
    p.add_argument("--max-depth", type=int, default=3)
    p.set_defaults(func=cmd_gen_fixture)

    return parser


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ParseError, OSError, ValueError, KeyError) as exc:
        print(f"qtwalk: error: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"qtwalk: internal invariant violated: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

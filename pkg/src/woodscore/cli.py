"""Subcommand front-end: ingestion -> scoring -> evaluation -> reports.

Exit codes: 0 success, 2 input/validation error, 1 internal error.
Diagnostics go to stderr; stdout stays clean for piped data.  Every output
file cites the digest of the run manifest that produced it (corpus-format
bin files cite it through their sidecar, which has no comment channel).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback

from . import __version__
from .analysis import (
    annotation_plan,
    chunk_error_curve,
    export_testbed,
    format_boundary_report,
    format_testbed_summary,
    iid_ood_boundary,
    monotonicity,
    sts_bins,
    sts_maxprob_correlation,
    write_chunk_csv,
)
from .corpus import load_corpus, load_embeddings, load_predictions
from .errors import ValidationError
from .manifest import build_manifest
from .scoring import (
    DEFAULT_B_SWEEP,
    ScoringConfig,
    read_scores_csv,
    score_samples,
    sweep_b,
    write_scores_csv,
)
from .similarity import JaccardBackend, fit_embed, fit_tfidf
from .wood import EvalConfig, compare_rankings, format_wood_report, wood_score

_WEIGHT_SCHEMES = {"chunk": "chunk-integer", "p": "p-raw"}


def _add_corpus_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--train", required=True, help="train corpus file")
    parser.add_argument("--test", required=True, help="test corpus file")
    parser.add_argument(
        "--backend",
        required=True,
        choices=("jaccard", "tfidf", "embed"),
        help="similarity backend",
    )
    parser.add_argument(
        "--embeddings-train", help="vector file covering the train corpus (embed backend)"
    )
    parser.add_argument(
        "--embeddings-test", help="vector file covering the test corpus (embed backend)"
    )
    parser.add_argument("--threads", type=int, default=None, help="worker threads")


def _add_scoring_flags(parser: argparse.ArgumentParser, chunks_default: int) -> None:
    parser.add_argument("-a", "--a", type=float, default=1.0, dest="a", help="p scale (default 1)")
    parser.add_argument(
        "--chunks", type=int, default=chunks_default, help=f"chunk count (default {chunks_default})"
    )
    parser.add_argument(
        "--normalization",
        choices=("minmax", "affine", "rank"),
        default="minmax",
        help="hardness normalization mode",
    )


def _make_backend(args, train, test):
    if args.backend == "jaccard":
        return JaccardBackend()
    if args.backend == "tfidf":
        return fit_tfidf(train, test)
    if not args.embeddings_train or not args.embeddings_test:
        raise ValidationError(
            "backend 'embed' needs --embeddings-train and --embeddings-test"
        )
    train_table = load_embeddings(args.embeddings_train)
    test_table = load_embeddings(args.embeddings_test)
    return fit_embed(train, test, train_table, test_table)


def _embedding_inputs(args) -> list[str]:
    paths = []
    if args.backend == "embed":
        if args.embeddings_train:
            paths.append(args.embeddings_train)
        if args.embeddings_test:
            paths.append(args.embeddings_test)
    return paths


def _note(path: str) -> None:
    print(f"wrote {path}", file=sys.stderr)


def _config_comment(backend_kind: str, a: float, b: float, chunks: int, normalization: str) -> dict:
    return {
        "backend": backend_kind,
        "a": format(a, ".10g"),
        "b": format(b, ".10g"),
        "chunks": str(chunks),
        "normalization": normalization,
    }


def cmd_score(args) -> int:
    train = load_corpus(args.train, role="train")
    test = load_corpus(args.test, role="test")
    backend = _make_backend(args, train, test)
    cfg = ScoringConfig(
        a=args.a, b=args.b, chunk_count=args.chunks, normalization=args.normalization
    )
    scores = score_samples(train, test, backend, cfg, threads=args.threads)
    manifest = build_manifest(
        "score",
        [args.train, args.test] + _embedding_inputs(args),
        {
            "backend": backend.kind,
            "a": args.a,
            "b": args.b,
            "chunk_count": args.chunks,
            "normalization": args.normalization,
        },
        __version__,
    )
    write_scores_csv(
        scores,
        args.out,
        manifest_digest=manifest.short_digest(),
        config=_config_comment(backend.kind, args.a, args.b, args.chunks, args.normalization),
    )
    manifest.save(args.out + ".manifest.json")
    _note(args.out)
    return 0


def _model_name(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def cmd_wood(args) -> int:
    scores, _ = read_scores_csv(args.scores)
    test = load_corpus(args.test, role="test") if args.test else None
    eval_cfg = EvalConfig(
        reward_correct=args.reward,
        penalty_incorrect=args.penalty,
        weight_scheme=_WEIGHT_SCHEMES[args.weights],
    )
    names = [_model_name(p) for p in args.predictions]
    dupes = {n for n in names if names.count(n) > 1}
    if dupes:
        raise ValidationError(
            f"duplicate model name '{sorted(dupes)[0]}' (prediction files must have distinct basenames)"
        )
    manifest = build_manifest(
        "wood",
        [args.scores] + list(args.predictions) + ([args.test] if args.test else []),
        {
            "reward": args.reward,
            "penalty": args.penalty,
            "weights": args.weights,
        },
        __version__,
    )
    digest = manifest.short_digest()
    results = []
    base, _ = os.path.splitext(args.out)
    for path, name in zip(args.predictions, names):
        predictions = load_predictions(path, test)
        result = wood_score(scores, predictions, eval_cfg, model_name=name)
        results.append(result)
        chunk_path = f"{base}_chunks_{name}.csv"
        write_chunk_csv(result.per_chunk, chunk_path, manifest_digest=digest)
        _note(chunk_path)
    comparison = compare_rankings(results) if len(results) >= 2 else None
    report = format_wood_report(results, comparison, manifest_digest=digest)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(report)
    manifest.save(args.out + ".manifest.json")
    _note(args.out)
    return 0


def cmd_analyze(args) -> int:
    if not args.predictions and not args.ood_scores:
        raise ValidationError("nothing to analyze: pass --predictions and/or --ood-scores")
    scores, meta = read_scores_csv(args.scores)
    test = load_corpus(args.test, role="test") if args.test else None
    inputs = [args.scores]
    if args.predictions:
        inputs.append(args.predictions)
    if args.ood_scores:
        inputs.append(args.ood_scores)
    if args.test:
        inputs.append(args.test)
    manifest = build_manifest(
        "analyze", inputs, {"chunk_count": args.chunks}, __version__
    )
    digest = manifest.short_digest()
    lines = [f"# manifest {digest}", f"chunk_count: {args.chunks}"]

    if args.predictions:
        predictions = load_predictions(args.predictions, test)
        stats = chunk_error_curve(scores, predictions, args.chunks)
        base, _ = os.path.splitext(args.out)
        chunk_path = f"{base}_chunks.csv"
        write_chunk_csv(stats, chunk_path, manifest_digest=digest)
        _note(chunk_path)
        lines.append("chunk,size,mean_sts,error_rate,mean_conf_correct,mean_conf_incorrect")
        for s in stats:
            lines.append(
                ",".join(
                    [
                        str(s.chunk_index),
                        str(s.size),
                        _opt(s.mean_sts),
                        _opt(s.error_rate),
                        _opt(s.mean_conf_correct),
                        _opt(s.mean_conf_incorrect),
                    ]
                )
            )
        if args.chunks >= 3:
            lines.append(f"monotonicity_error_rate: {_opt(monotonicity(stats, 'error_rate'))}")
            lines.append(f"monotonicity_mean_sts: {_opt(monotonicity(stats, 'mean_sts'))}")
            with_conf = [s for s in stats if s.mean_conf_correct is not None]
            if len(with_conf) >= 3:
                lines.append(
                    "monotonicity_mean_conf_correct: "
                    f"{_opt(monotonicity(stats, 'mean_conf_correct'))}"
                )
        if all(p.confidence is not None for p in predictions):
            rho = sts_maxprob_correlation(scores, predictions)
            lines.append(f"sts_maxprob_spearman: {_opt(rho)}")

    if args.ood_scores:
        ood_scores, ood_meta = read_scores_csv(args.ood_scores)
        report = iid_ood_boundary(
            scores,
            ood_scores,
            chunk_count=args.chunks,
            config_iid=meta.get("config"),
            config_ood=ood_meta.get("config"),
        )
        lines.append("")
        lines.append(format_boundary_report(report))

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines).rstrip("\n") + "\n")
    manifest.save(args.out + ".manifest.json")
    _note(args.out)
    return 0


def _opt(x) -> str:
    return "" if x is None else format(x, ".10g")


def cmd_testbed(args) -> int:
    scores, _ = read_scores_csv(args.scores)
    corpus = load_corpus(args.corpus, role="test")
    edges = None
    if args.edges:
        try:
            edges = [float(tok) for tok in args.edges.split(",")]
        except ValueError:
            raise ValidationError(f"--edges must be comma-separated numbers, got {args.edges!r}") from None
    bins = sts_bins(scores, bin_count=args.bins, edges=edges)
    manifest = build_manifest(
        "testbed",
        [args.scores, args.corpus],
        {"bins": args.bins, "edges": args.edges or ""},
        __version__,
    )
    payload = json.loads(manifest.to_json())
    payload["digest"] = manifest.digest()
    paths = export_testbed(bins, corpus, args.prefix, manifest_json=json.dumps(payload))
    for path in paths:
        _note(path)
    print(format_testbed_summary(bins, manifest_digest=manifest.short_digest()), end="", file=sys.stderr)
    return 0


def cmd_annotate(args) -> int:
    scores, _ = read_scores_csv(args.scores)
    plan = annotation_plan(
        scores,
        annotate_threshold=args.threshold,
        create_threshold=args.create_threshold,
        target_hard_count=args.target,
    )
    manifest = build_manifest(
        "annotate",
        [args.scores],
        {
            "annotate_threshold": args.threshold,
            "create_threshold": args.create_threshold,
            "target": args.target if args.target is not None else "",
        },
        __version__,
    )
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# manifest {manifest.short_digest()}\n")
        fh.write(f"# annotate_threshold {_opt(plan.annotate_threshold)}\n")
        fh.write(f"# create_threshold {_opt(plan.create_threshold)}\n")
        fh.write(f"# create_deficit {plan.create_deficit}\n")
        for sample_id in plan.annotate_ids:
            fh.write(sample_id + "\n")
    manifest.save(args.out + ".manifest.json")
    _note(args.out)
    return 0


def cmd_sweep(args) -> int:
    train = load_corpus(args.train, role="train")
    test = load_corpus(args.test, role="test")
    backend = _make_backend(args, train, test)
    if args.b_values:
        try:
            b_values = tuple(float(tok) for tok in args.b_values.split(","))
        except ValueError:
            raise ValidationError(
                f"--b-values must be comma-separated numbers, got {args.b_values!r}"
            ) from None
    else:
        b_values = DEFAULT_B_SWEEP
    swept = sweep_b(
        train,
        test,
        backend,
        a=args.a,
        b_values=b_values,
        chunk_count=args.chunks,
        normalization=args.normalization,
        threads=args.threads,
    )
    manifest = build_manifest(
        "sweep",
        [args.train, args.test] + _embedding_inputs(args),
        {
            "backend": backend.kind,
            "a": args.a,
            "b_values": list(b_values),
            "chunk_count": args.chunks,
            "normalization": args.normalization,
        },
        __version__,
    )
    for b in b_values:
        path = f"{args.prefix}_b{b * 100:g}.csv"
        write_scores_csv(
            swept[b],
            path,
            manifest_digest=manifest.short_digest(),
            config=_config_comment(backend.kind, args.a, b, args.chunks, args.normalization),
        )
        _note(path)
    manifest.save(f"{args.prefix}_manifest.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="woodscore",
        description="Hardness scoring and similarity-weighted evaluation for text test sets.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score a test corpus against a train corpus")
    _add_corpus_flags(p)
    p.add_argument("-b", "--b", type=float, default=0.1, dest="b", help="top fraction (default 0.1)")
    _add_scoring_flags(p, chunks_default=3)
    p.add_argument("--out", required=True, help="scores CSV path")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("wood", help="WOOD score of prediction files over scored samples")
    p.add_argument("--scores", required=True, help="scores CSV from the score subcommand")
    p.add_argument(
        "--predictions",
        action="append",
        required=True,
        help="predictions file; repeat to compare models",
    )
    p.add_argument("--reward", type=float, default=1.0, help="E for correct (default 1)")
    p.add_argument("--penalty", type=float, default=-1.0, help="E for incorrect (default -1)")
    p.add_argument(
        "--weights",
        choices=tuple(_WEIGHT_SCHEMES),
        default="chunk",
        help="chunk: integer chunk weights; p: raw OOD degree",
    )
    p.add_argument("--test", help="test corpus, for gold labels the prediction files lack")
    p.add_argument("--out", required=True, help="report path")
    p.set_defaults(func=cmd_wood)

    p = sub.add_parser("analyze", help="chunk curves, monotonicity, IID/OOD boundary")
    p.add_argument("--scores", required=True, help="scores CSV (IID side for --ood-scores)")
    p.add_argument("--predictions", help="predictions file for error/confidence curves")
    p.add_argument("--ood-scores", help="scores CSV of an OOD test set (same train corpus)")
    p.add_argument("--test", help="test corpus, for gold labels the prediction files lack")
    p.add_argument("--chunks", type=int, default=7, help="chunk count (default 7)")
    p.add_argument("--out", required=True, help="report path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("testbed", help="export difficulty bins as corpus files")
    p.add_argument("--scores", required=True)
    p.add_argument("--corpus", required=True, help="corpus file the scores came from")
    p.add_argument("--bins", type=int, default=7, help="bin count (default 7)")
    p.add_argument("--edges", help="explicit comma-separated bin edges, ascending")
    p.add_argument("--prefix", required=True, help="output path prefix")
    p.set_defaults(func=cmd_testbed)

    p = sub.add_parser("annotate", help="plan annotation of hard samples")
    p.add_argument("--scores", required=True)
    p.add_argument("--threshold", type=float, default=0.7, help="annotate below (default 0.7)")
    p.add_argument(
        "--create-threshold", type=float, default=0.5, help="hard-sample bar (default 0.5)"
    )
    p.add_argument("--target", type=int, default=None, help="wanted count of hard samples")
    p.add_argument("--out", required=True, help="id list path")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("sweep", help="score at each b of a sweep, one CSV per b")
    _add_corpus_flags(p)
    p.add_argument(
        "--b-values",
        help="comma-separated b values (default: the nine-step sweep 0.01..1.0)",
    )
    _add_scoring_flags(p, chunks_default=3)
    p.add_argument("--prefix", required=True, help="output path prefix")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc(file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

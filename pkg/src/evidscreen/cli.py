"""Operator command line: ingest corpora, run simulations, serve, report.

Every stochastic command is fully determined by --seed. Flags override
values from an optional key=value config file. Reports are plain data files
(CSV/JSON); plotting is left to external tools.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import DEFAULT_FILTERS, build_screening_texts, document_to_record, ingest
from .errors import EvidscreenError, ValidationError
from .simulator import (
    ExperimentConfig,
    FIXTURE_BATCH_SIZE,
    FIXTURE_INIT_SIZE,
    FIXTURE_N,
    FIXTURE_PREVALENCE,
    FIXTURE_SEEDS,
    FIXTURE_SIGNAL,
    FIXTURE_SIZES,
    generate_synthetic_corpus,
    load_labeled_corpus,
    run_experiment,
)

TOKEN_ENV = "EVIDSCREEN_TOKEN"


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse a flat key=value file; '#' starts a comment."""
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line is not key=value: {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip().strip("\"'")
    return values


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip())


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evidscreen",
        description="Classifier-guided prioritization for title/abstract screening",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--config", type=Path, default=None, help="key=value config file"
    )
    parser.add_argument("--seed", type=int, default=0, help="global random seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="read a corpus and clean its texts")
    p_ingest.add_argument("--in", dest="in_path", type=Path, required=True)
    p_ingest.add_argument(
        "--format", choices=("csv", "jsonl"), default=None,
        help="input format (default: by file extension)",
    )
    p_ingest.add_argument("--out", type=Path, required=True, help="output directory")

    p_sim = sub.add_parser("simulate", help="run strategy/size experiments")
    src = p_sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--corpus", type=Path, help="labeled JSONL corpus")
    src.add_argument("--synthetic", action="store_true", help="generate a fixture corpus")
    p_sim.add_argument("--n", type=int, default=FIXTURE_N)
    p_sim.add_argument("--prevalence", type=float, default=FIXTURE_PREVALENCE)
    p_sim.add_argument("--signal", type=float, default=FIXTURE_SIGNAL)
    p_sim.add_argument("--strategies", type=_str_list, default=("random", "lc", "hp"))
    p_sim.add_argument("--sizes", type=_int_list, default=FIXTURE_SIZES)
    p_sim.add_argument("--seeds", type=_int_list, default=FIXTURE_SEEDS)
    p_sim.add_argument("--target-ir", type=float, default=0.8)
    p_sim.add_argument("--batch-size", type=int, default=FIXTURE_BATCH_SIZE)
    p_sim.add_argument("--init-size", type=int, default=FIXTURE_INIT_SIZE)
    p_sim.add_argument("--model-runs", type=int, default=1)
    p_sim.add_argument("--holdout", action="store_true",
                       help="also run the single-split holdout evaluation")
    p_sim.add_argument("--out", type=Path, required=True)

    p_serve = sub.add_parser("serve", help="run the review service")
    p_serve.add_argument("--addr", default="127.0.0.1:8000")
    p_serve.add_argument("--data-dir", type=Path, required=True)
    p_serve.add_argument(
        "--token", default=None, help=f"API token (or set ${TOKEN_ENV})"
    )
    p_serve.add_argument("--frontend", type=Path, default=None,
                         help="static asset directory to serve at /ui")

    p_report = sub.add_parser("report", help="summarize experiment directories")
    p_report.add_argument("dirs", nargs="+", type=Path)
    p_report.add_argument("--out", type=Path, default=None,
                          help="write the combined long CSV here")
    return parser


def cmd_ingest(args) -> int:
    format = args.format
    if format is None:
        suffix = args.in_path.suffix.lower().lstrip(".")
        format = "jsonl" if suffix in ("jsonl", "ndjson", "json") else "csv"
    corpus = ingest(args.in_path, format)
    texts = build_screening_texts(corpus.documents, DEFAULT_FILTERS)
    args.out.mkdir(parents=True, exist_ok=True)
    snapshot = args.out / "corpus_snapshot.jsonl"
    with open(snapshot, "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            record = document_to_record(doc)
            st = texts[doc.id]
            record["screening_text"] = st.text
            record["sentence_count"] = st.sentence_count
            record["dropped_sentence_count"] = st.dropped_sentence_count
            fh.write(json.dumps(record) + "\n")
    report = {
        "documents": len(corpus.documents),
        "duplicates": corpus.duplicate_count,
        "dropped_sentences": sum(t.dropped_sentence_count for t in texts.values()),
        "empty_after_filtering": sum(t.all_dropped for t in texts.values()),
    }
    (args.out / "ingest_report.json").write_text(
        json.dumps(report, indent=2), encoding="utf-8"
    )
    print(json.dumps(report))
    return 0


def cmd_simulate(args) -> int:
    if args.synthetic:
        corpus = generate_synthetic_corpus(
            args.n, args.prevalence, args.signal, args.seed
        )
    else:
        corpus = load_labeled_corpus(args.corpus)
    config = ExperimentConfig(
        strategies=args.strategies,
        training_sizes=args.sizes,
        seeds=args.seeds,
        target_ir=args.target_ir,
        batch_size=args.batch_size,
        init_size=args.init_size,
        model_runs=args.model_runs,
    )
    result = run_experiment(corpus, config, out_dir=args.out)
    if args.holdout:
        from .simulator import run_holdout_eval

        holdout = run_holdout_eval(corpus, seed=args.seed, target_ir=args.target_ir)
        (args.out / "holdout.json").write_text(
            json.dumps(
                {
                    "train_n": holdout.train_n,
                    "test_n": holdout.test_n,
                    "accuracy": holdout.accuracy,
                    "f1": holdout.f1,
                    "he_at_target": holdout.he_at_target,
                },
                indent=2,
            ),
            encoding="utf-8",
        )
    summary = json.loads((args.out / "summary.json").read_text(encoding="utf-8"))
    for strategy, row in summary["comparison"]["strategies"].items():
        if row.get("unreachable"):
            print(f"{strategy}: target never reached")
        else:
            se = row["he_at_target_se"]
            se_text = f" +/- {se:.4f}" if se is not None else ""
            print(
                f"{strategy}: HE@{config.target_ir} = "
                f"{row['he_at_target_mean']:.4f}{se_text} "
                f"(best size {row['best_training_size']}, "
                f"saves {row['saved_vs_no_ml_rel']:.1%} vs no assistance)"
            )
    print(f"report written to {args.out} ({result.wall_seconds:.1f}s)")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port_text = args.addr.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValidationError(f"--addr must be host:port, got {args.addr!r}")
    token = args.token or os.environ.get(TOKEN_ENV) or None
    app = create_app(data_dir=args.data_dir, token=token, frontend_dir=args.frontend)
    config = uvicorn.Config(app, host=host, port=int(port_text), log_level="warning")
    server = uvicorn.Server(config)
    try:
        server.run()
    except SystemExit as exc:  # uvicorn exits this way on bind failure
        print(f"error: could not serve on {args.addr}", file=sys.stderr)
        return int(exc.code or 1)
    if not server.started:
        print(f"error: could not bind {args.addr}", file=sys.stderr)
        return 1
    return 0


def cmd_report(args) -> int:
    rows = []
    summaries = {}
    for directory in args.dirs:
        summary_path = directory / "summary.json"
        long_path = directory / "curves_long.csv"
        if not summary_path.is_file() or not long_path.is_file():
            raise ValidationError(f"no results in {directory}")
        experiment_id = directory.name
        summaries[experiment_id] = json.loads(summary_path.read_text(encoding="utf-8"))
        with open(long_path, encoding="utf-8") as fh:
            header = next(fh).rstrip("\n")
            for line in fh:
                rows.append(f"{experiment_id},{line.rstrip()}")
    out = args.out or (args.dirs[0] / "combined_long.csv")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("experiment," + header + "\n")
        fh.write("\n".join(rows) + "\n")
    for experiment_id, summary in summaries.items():
        comparison = summary["comparison"]
        print(f"experiment {experiment_id} (target IR {comparison['target_ir']}):")
        for strategy, row in comparison["strategies"].items():
            if row.get("unreachable"):
                print(f"  {strategy:8s} target never reached")
            else:
                print(
                    f"  {strategy:8s} HE {row['he_at_target_mean']:.4f} "
                    f"best size {row['best_training_size']}"
                )
    print(f"combined table: {out}")
    return 0


def apply_config_file(args, argv: list[str]) -> None:
    if args.config is None:
        return
    values = read_config_file(args.config)
    for key, value in values.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ValidationError(f"unknown config key: {key}")
        flag = "--" + key.replace("_", "-")
        if any(a == flag or a.startswith(flag + "=") for a in argv):
            continue  # explicit flags win over the config file
        current = getattr(args, attr)
        if isinstance(current, bool):
            setattr(args, attr, value.lower() in ("1", "true", "yes"))
        elif isinstance(current, int):
            setattr(args, attr, int(value))
        elif isinstance(current, float):
            setattr(args, attr, float(value))
        elif isinstance(current, tuple):
            parts = _str_list(value)
            setattr(
                args,
                attr,
                tuple(int(p) for p in parts)
                if all(p.isdigit() for p in parts)
                else parts,
            )
        else:
            setattr(args, attr, value)


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        apply_config_file(args, argv)
        handler = {
            "ingest": cmd_ingest,
            "simulate": cmd_simulate,
            "serve": cmd_serve,
            "report": cmd_report,
        }[args.command]
        return handler(args)
    except EvidscreenError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

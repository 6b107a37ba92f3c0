"""Command line interface: ``modlog analyze | validate-log | kb-stats``.

Exit codes: 0 ok, 1 usage error, 2 input error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .kgraph import RDFS_LABEL, NTriplesError, load_ntriples
from .logmodel import MalformedRecord, extract_pairs, label_success, parse_log, sessionize
from .report import AnalysisConfig, AnalysisError, FeedbackThresholds, run_analysis

EXIT_OK, EXIT_USAGE, EXIT_INPUT = 0, 1, 2

logger = logging.getLogger("modlog")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# config-file key -> (analyze option dest, converter)
_CONFIG_KEYS = {
    "log": ("log", "paths"),
    "kb": ("kb", "paths"),
    "out": ("out", str),
    "session_timeout": ("session_timeout", float),
    "max_path_len": ("max_path_len", int),
    "random_pairs": ("random_pairs", int),
    "seed": ("seed", int),
    "ratio_threshold": ("ratio_threshold", float),
    "min_support": ("min_support", float),
    "top_k": ("top_k", int),
    "format": ("format", str),
    "label_predicate": ("label_predicate", str),
    "on_parse_error": ("on_parse_error", str),
    "jobs": ("jobs", int),
    "recommend_isr": ("recommend_isr", float),
    "discourage_isr": ("discourage_isr", float),
    "min_freq": ("min_freq", float),
}

_DEFAULTS = {
    "session_timeout": 900.0,
    "max_path_len": 3,
    "random_pairs": None,
    "seed": 0,
    "ratio_threshold": 2.0,
    "min_support": 5.0,
    "top_k": 10,
    "format": "tsv",
    "label_predicate": RDFS_LABEL,
    "on_parse_error": "abort",
    "jobs": 1,
    "recommend_isr": 0.02,
    "discourage_isr": 0.02,
    "min_freq": 0.01,
}


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines. Relative paths resolve against the file's directory."""
    base = Path(path).parent
    values = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip().replace("-", "_"), value.strip()
            if not sep or key not in _CONFIG_KEYS:
                raise UsageError(f"{path}:{line_no}: unknown or malformed config entry {line!r}")
            dest, conv = _CONFIG_KEYS[key]
            try:
                if conv == "paths":
                    values[dest] = [str(base / p) for p in value.replace(",", " ").split()]
                elif key == "out":
                    values[dest] = str(base / value)
                else:
                    values[dest] = conv(value)
            except ValueError:
                raise UsageError(f"{path}:{line_no}: bad value for {key}: {value!r}") from None
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modlog", description="Query modification analysis over search logs")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    an = sub.add_parser("analyze", help="run the full analysis and write tables")
    an.add_argument("--config", help="key = value config file; flags take precedence")
    an.add_argument("--log", nargs="+", help="query log TSV file(s)")
    an.add_argument("--kb", nargs="+", help="N-Triples knowledge base file(s)")
    an.add_argument("--out", help="output directory")
    an.add_argument("--session-timeout", type=float)
    an.add_argument("--max-path-len", type=int)
    an.add_argument("--random-pairs", type=int)
    an.add_argument("--seed", type=int)
    an.add_argument("--ratio-threshold", type=float)
    an.add_argument("--min-support", type=float)
    an.add_argument("--top-k", type=int)
    an.add_argument("--format", choices=["tsv", "markdown"])
    an.add_argument("--label-predicate")
    an.add_argument("--on-parse-error", choices=["abort", "skip"])
    an.add_argument("--jobs", type=int, help="worker threads for semantic typing")
    an.add_argument("--recommend-isr", type=float)
    an.add_argument("--discourage-isr", type=float)
    an.add_argument("--min-freq", type=float)

    vl = sub.add_parser("validate-log", help="check a query log and print counts")
    vl.add_argument("paths", nargs="+")
    vl.add_argument("--session-timeout", type=float, default=900.0)

    ks = sub.add_parser("kb-stats", help="print knowledge base statistics")
    ks.add_argument("--kb", nargs="+", required=True)
    ks.add_argument("--label-predicate", default=RDFS_LABEL)
    ks.add_argument("--on-parse-error", choices=["abort", "skip"], default="abort")
    return parser


def _merged_options(args) -> dict:
    opts = dict(_DEFAULTS)
    if args.config:
        try:
            opts.update(read_config_file(args.config))
        except OSError as exc:
            raise AnalysisError(f"cannot read config file: {exc}") from exc
    for key in list(_CONFIG_KEYS):
        dest = _CONFIG_KEYS[key][0]
        value = getattr(args, dest, None)
        if value is not None:
            opts[dest] = value
    return opts


def _cmd_analyze(args) -> int:
    opts = _merged_options(args)
    missing = [f"--{k}" for k in ("log", "kb", "out") if not opts.get(k)]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join(missing))
    config = AnalysisConfig(
        log_paths=list(opts["log"]),
        kb_paths=list(opts["kb"]),
        out_dir=opts["out"],
        session_timeout=opts["session_timeout"],
        max_path_len=opts["max_path_len"],
        random_pairs=opts["random_pairs"],
        seed=opts["seed"],
        ratio_threshold=opts["ratio_threshold"],
        min_support=opts["min_support"],
        top_k=opts["top_k"],
        fmt=opts["format"],
        label_predicate=opts["label_predicate"],
        on_parse_error=opts["on_parse_error"],
        jobs=opts["jobs"],
        thresholds=FeedbackThresholds(opts["recommend_isr"], opts["discourage_isr"], opts["min_freq"]),
    )
    bundle = run_analysis(config)
    print(f"wrote {len(bundle)} files to {config.out_dir}")
    return EXIT_OK


def _cmd_validate_log(args) -> int:
    status = EXIT_OK
    for path in args.paths:
        errors: list = []
        try:
            with open(path, encoding="utf-8") as fh:
                events = parse_log(fh, on_error="skip", errors=errors, source=path)
        except (OSError, UnicodeDecodeError) as exc:
            print(f"{path}: cannot read: {exc}", file=sys.stderr)
            status = EXIT_INPUT
            continue
        sessions = sessionize(events, args.session_timeout) if events else []
        n_pairs = sum(len(extract_pairs(label_success(s))) for s in sessions)
        n_queries = sum(1 for e in events if e.kind.value == "Q")
        print(
            f"{path}: events={len(events)} queries={n_queries} clicks={len(events) - n_queries} "
            f"sessions={len(sessions)} pairs={n_pairs} malformed={len(errors)}"
        )
        for err in errors[:20]:
            print(f"  {err}", file=sys.stderr)
        if errors:
            status = EXIT_INPUT
    return status


def _cmd_kb_stats(args) -> int:
    for p in args.kb:
        if not os.path.isfile(p):
            raise AnalysisError(f"KB file not found: {p}")
    errors: list = []
    try:
        graph = load_ntriples(args.kb, label_predicate=args.label_predicate,
                              on_parse_error=args.on_parse_error, errors=errors)
    except NTriplesError as exc:
        raise AnalysisError(str(exc)) from exc
    print(f"edges\t{graph.n_edges}")
    print(f"entities\t{graph.n_entities}")
    print(f"labels\t{graph.n_labels}")
    print(f"malformed\t{len(errors)}")
    print("predicate\tavg_out\tavg_in\tfew_to_few")
    for pred in graph.predicates:
        avg_out, avg_in = graph.predicate_degree_stats(pred)
        print(f"{pred}\t{avg_out:.3f}\t{avg_in:.3f}\t{'yes' if graph.is_few_to_few(pred) else 'no'}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler = {"analyze": _cmd_analyze, "validate-log": _cmd_validate_log, "kb-stats": _cmd_kb_stats}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"modlog: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AnalysisError, MalformedRecord) as exc:
        print(f"modlog: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""End-to-end analysis run: tables, feedback rules, summary and manifest."""

from __future__ import annotations

import enum
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from .kgraph import RDFS_LABEL, Graph, NTriplesError, load_ntriples
from .logmodel import (
    DEFAULT_TIMEOUT,
    MalformedRecord,
    extract_pairs,
    label_success,
    parse_log,
    sessionize,
)
from .metrics import (
    STRATA,
    Stratum,
    SuccessStats,
    metric_rows,
    topic_shift_proportions,
)
from .semrel import (
    DEFAULT_MAX_PATH_LEN,
    BaselineError,
    SemanticClass,
    SemanticModificationTyper,
    classify_semantic,
)
from .termmod import RELATED_TERM_CLASSES, TermModification, TermModificationClassifier

__all__ = [
    "AnalysisConfig",
    "AnalysisError",
    "ClassifiedPair",
    "ConfigError",
    "FeedbackRule",
    "FeedbackThresholds",
    "MetricTable",
    "NoPairsError",
    "analyze",
    "derive_feedback_rules",
    "fmt_freq",
    "fmt_isr",
    "run_analysis",
]

logger = logging.getLogger(__name__)

SEMANTIC_CLASSES = (
    SemanticClass.SIBLING,
    SemanticClass.FEW_TO_FEW,
    SemanticClass.SAME_ENTITY,
    SemanticClass.OTHER,
)

_CONDITION = {
    Stratum.TOTAL: "any",
    Stratum.AFTER_SUCCESSFUL: "last query successful",
    Stratum.AFTER_UNSUCCESSFUL: "last query unsuccessful",
}


class AnalysisError(Exception):
    """Input problem that aborts a run (CLI exit code 2)."""


class ConfigError(AnalysisError):
    pass


class NoPairsError(AnalysisError):
    pass


@dataclass(frozen=True)
class FeedbackThresholds:
    recommend_isr: float = 0.02
    discourage_isr: float = 0.02
    min_freq: float = 0.01


@dataclass
class AnalysisConfig:
    log_paths: list
    kb_paths: list
    out_dir: Optional[str] = None
    session_timeout: float = DEFAULT_TIMEOUT
    max_path_len: int = DEFAULT_MAX_PATH_LEN
    random_pairs: Optional[int] = None
    seed: int = 0
    ratio_threshold: float = 2.0
    min_support: float = 5.0
    top_k: int = 10
    fmt: str = "tsv"
    label_predicate: str = RDFS_LABEL
    on_parse_error: str = "abort"
    jobs: int = 1
    thresholds: FeedbackThresholds = field(default_factory=FeedbackThresholds)

    def validate(self) -> None:
        if not self.log_paths:
            raise ConfigError("at least one --log path is required")
        if not self.kb_paths:
            raise ConfigError("at least one --kb path is required")
        for kind, paths in (("log", self.log_paths), ("KB", self.kb_paths)):
            for p in paths:
                if not os.path.isfile(p):
                    raise ConfigError(f"{kind} file not found: {p}")
        for name in ("session_timeout", "ratio_threshold", "top_k", "jobs"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("max_path_len", "min_support"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must not be negative")
        if self.random_pairs is not None and self.random_pairs <= 0:
            raise ConfigError("random_pairs must be positive")
        if self.fmt not in ("tsv", "markdown"):
            raise ConfigError(f"format must be tsv or markdown, got {self.fmt!r}")
        if self.on_parse_error not in ("abort", "skip"):
            raise ConfigError("on_parse_error must be abort or skip")

    def echo(self) -> dict:
        """Config as recorded in the manifest, with canonical numeric types.

        Thread count is left out on purpose: it never changes the results.
        """
        return {
            "logs": [Path(p).name for p in self.log_paths],
            "kbs": [Path(p).name for p in self.kb_paths],
            "session_timeout": float(self.session_timeout),
            "max_path_len": int(self.max_path_len),
            "random_pairs": self.random_pairs,
            "seed": self.seed,
            "ratio_threshold": float(self.ratio_threshold),
            "min_support": float(self.min_support),
            "top_k": int(self.top_k),
            "format": self.fmt,
            "label_predicate": self.label_predicate,
            "on_parse_error": self.on_parse_error,
            "recommend_isr": float(self.thresholds.recommend_isr),
            "discourage_isr": float(self.thresholds.discourage_isr),
            "min_freq": float(self.thresholds.min_freq),
        }


@dataclass(frozen=True)
class ClassifiedPair:
    pair: object
    term: TermModification
    relation: object

    @property
    def original_successful(self) -> bool:
        return self.pair.original.successful

    @property
    def modified_successful(self) -> bool:
        return self.pair.modified.successful


@dataclass
class MetricTable:
    """Per-stratum metric rows for one family of subjects (term, class or type)."""

    subject_kind: str
    rows: dict


class Advice(enum.Enum):
    RECOMMEND = "recommend"
    DISCOURAGE = "discourage"
    CHECK_COLLECTION_FIRST = "check collection first"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FeedbackRule:
    stratum: Stratum
    condition: str
    subject_kind: str
    subject: object
    advice: Advice
    isr: Fraction
    freq: Fraction

    @property
    def evidence(self) -> dict:
        return {"isr": fmt_isr(self.isr), "freq": fmt_freq(self.freq)}

    def as_row(self) -> list:
        return [
            self.stratum.value, self.condition, self.subject_kind, _subject_text(self.subject),
            self.advice.value, fmt_isr(self.isr), fmt_freq(self.freq),
        ]


def fmt_isr(value) -> str:
    return "n/a" if value is None else f"{float(value):+.2f}"


def fmt_freq(value) -> str:
    return "n/a" if value is None else f"{float(value):.2f}"


def _subject_text(subject) -> str:
    render = getattr(subject, "render", None)
    return render() if render else str(subject)


# --- feedback rules ------------------------------------------------------------

_CHECK_FIRST = (TermModification.LEXICAL_VARIATION, SemanticClass.SAME_ENTITY)


def derive_feedback_rules(tables, thresholds: FeedbackThresholds = FeedbackThresholds()) -> list:
    """Turn metric tables into Recommend / Discourage / CheckCollectionFirst rules.

    ``tables`` is an iterable of :class:`MetricTable`. Subjects that are
    name variants of the previous query (lexical variation, same entity) get
    CheckCollectionFirst instead of Discourage in the conditional strata.
    """
    up = Fraction(str(thresholds.recommend_isr))
    down = -Fraction(str(thresholds.discourage_isr))
    min_freq = Fraction(str(thresholds.min_freq))
    rules = []
    for table in tables:
        for stratum in STRATA:
            for row in table.rows.get(stratum, ()):
                if row.isr is None or row.freq < min_freq:
                    continue
                if row.isr >= up:
                    advice = Advice.RECOMMEND
                elif row.isr <= down:
                    if row.key in _CHECK_FIRST and stratum is not Stratum.TOTAL:
                        advice = Advice.CHECK_COLLECTION_FIRST
                    else:
                        advice = Advice.DISCOURAGE
                else:
                    continue
                rules.append(
                    FeedbackRule(stratum, _CONDITION[stratum], table.subject_kind, row.key, advice, row.isr, row.freq)
                )
    return rules


# --- analysis --------------------------------------------------------------------


@dataclass
class AnalysisResult:
    config: AnalysisConfig
    graph: Graph
    n_events: int
    n_malformed: int
    n_sessions: int
    classified: list
    typer: SemanticModificationTyper
    table1: dict
    term_table: MetricTable
    class_table: MetricTable
    type_table: MetricTable
    top_types: list
    rules: list


def _tally(classified, key_weights) -> SuccessStats:
    stats = SuccessStats()
    for cp in classified:
        for key, w in key_weights(cp):
            stats.add(key, w, cp.modified_successful, cp.original_successful)
    return stats


def _per_stratum(stats: SuccessStats, keys=None) -> dict:
    return {s: metric_rows(stats, s, keys) for s in STRATA}


def analyze(config: AnalysisConfig) -> AnalysisResult:
    """Run the whole pipeline in memory. Raises :class:`AnalysisError` on bad input."""
    config.validate()

    kb_errors: list = []
    try:
        graph = load_ntriples(
            config.kb_paths, label_predicate=config.label_predicate,
            on_parse_error=config.on_parse_error, errors=kb_errors,
        )
    except (NTriplesError, OSError, UnicodeDecodeError) as exc:
        raise AnalysisError(f"cannot load knowledge base: {exc}") from exc
    if kb_errors:
        logger.warning("skipped %d malformed KB lines", len(kb_errors))

    events, log_errors = [], []
    for path in config.log_paths:
        try:
            with open(path, encoding="utf-8") as fh:
                events.extend(parse_log(fh, on_error=config.on_parse_error, errors=log_errors, source=str(path)))
        except (MalformedRecord, OSError, UnicodeDecodeError) as exc:
            raise AnalysisError(f"cannot read log: {exc}") from exc
    if log_errors:
        logger.warning("skipped %d malformed log lines", len(log_errors))

    sessions = [label_success(s) for s in sessionize(events, config.session_timeout)]
    pairs = [p for s in sessions for p in extract_pairs(s)]
    if not pairs:
        raise NoPairsError("no pairs: the log contains no session with two distinct queries")

    terms = TermModificationClassifier().fit(pairs).transform(pairs)
    typer = SemanticModificationTyper(
        graph=graph, max_path_len=config.max_path_len, random_pairs=config.random_pairs,
        seed=config.seed, ratio_threshold=config.ratio_threshold,
        min_support=config.min_support, n_jobs=config.jobs,
    )
    try:
        relations = typer.fit_transform(pairs, sessions=sessions)
    except BaselineError as exc:
        raise AnalysisError(str(exc)) from exc
    classified = [ClassifiedPair(p, t, r) for p, t, r in zip(pairs, terms, relations)]

    table1 = topic_shift_proportions(
        (cp.original_successful, cp.modified_successful,
         cp.term is not TermModification.NO_RELATION, cp.relation.related)
        for cp in classified
    )

    term_stats = _tally(
        classified,
        lambda cp: [(cp.term, 1)] if cp.term is not TermModification.NO_RELATION else [],
    )
    type_stats = _tally(classified, lambda cp: sorted(cp.relation.weights.items()))
    class_cache: dict = {}

    def class_weights(cp):
        out: dict = {}
        for t, w in cp.relation.weights.items():
            cls = class_cache.get(t)
            if cls is None:
                cls = class_cache[t] = classify_semantic(t, graph)
            out[cls] = out.get(cls, 0) + w
        return [(c, out[c]) for c in SEMANTIC_CLASSES if c in out]

    class_stats = _tally(classified, class_weights)

    term_table = MetricTable("term", _per_stratum(term_stats, RELATED_TERM_CLASSES))
    class_table = MetricTable("class", _per_stratum(class_stats, SEMANTIC_CLASSES))

    total_rows = metric_rows(type_stats, Stratum.TOTAL)
    total_rows.sort(key=lambda r: (-r.weight, r.key.render(), r.key))
    top = total_rows[: config.top_k]
    type_table = MetricTable("type", {Stratum.TOTAL: top})

    rules = derive_feedback_rules([term_table, class_table, type_table], config.thresholds)
    return AnalysisResult(
        config, graph, len(events), len(log_errors), len(sessions), classified, typer,
        table1, term_table, class_table, type_table, top, rules,
    )


# --- rendering -------------------------------------------------------------------


def _render(header, rows, fmt: str) -> str:
    if fmt == "tsv":
        return "".join("\t".join(r) + "\n" for r in [header, *rows])
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _stratified(table: MetricTable, label: str, fmt: str) -> str:
    header = [label]
    for s in STRATA:
        tag = s.value.replace(" ", "_")
        header += [f"{tag}_freq", f"{tag}_isr"]
    keys = [r.key for r in table.rows[Stratum.TOTAL]]
    by_stratum = {s: {r.key: r for r in table.rows[s]} for s in STRATA}
    rows = []
    for k in keys:
        row = [_subject_text(k)]
        for s in STRATA:
            r = by_stratum[s][k]
            row += [fmt_freq(r.freq), fmt_isr(r.isr)]
        rows.append(row)
    return _render(header, rows, fmt)


def render_tables(result: AnalysisResult) -> dict:
    fmt = result.config.fmt
    ext = "tsv" if fmt == "tsv" else "md"
    t1_rows = [
        [s.value, str(r.n_pairs), fmt_freq(r.success_rate), fmt_freq(r.no_term_relation), fmt_freq(r.no_semantic_relation)]
        for s, r in result.table1.items()
    ]
    t3_rows = [
        [str(i), fmt_isr(r.isr), fmt_freq(r.freq), r.key.render()]
        for i, r in enumerate(result.top_types, start=1)
    ]
    return {
        f"table1.{ext}": _render(
            ["stratum", "pairs", "success_rate", "no_term_relation", "no_semantic_relation"], t1_rows, fmt
        ),
        f"table2.{ext}": _stratified(result.term_table, "modification", fmt),
        f"table3.{ext}": _render(["rank", "isr", "freq", "modification_type"], t3_rows, fmt),
        f"table4.{ext}": _stratified(result.class_table, "class", fmt),
        f"rules.{ext}": _render(
            ["stratum", "condition", "subject_kind", "subject", "advice", "isr", "freq"],
            [rule.as_row() for rule in result.rules], fmt,
        ),
    }


def _num(x) -> Optional[float]:
    return None if x is None else round(float(x), 6)


def _rows_json(table: MetricTable) -> dict:
    return {
        s.value: [
            {"subject": _subject_text(r.key), "weight": _num(r.weight), "freq": _num(r.freq),
             "sr": _num(r.sr), "isr": _num(r.isr)}
            for r in rows
        ]
        for s, rows in table.rows.items()
    }


def build_summary(result: AnalysisResult) -> dict:
    typer = result.typer
    statuses: dict = {}
    for cp in result.classified:
        statuses[cp.relation.status.value] = statuses.get(cp.relation.status.value, 0) + 1
    return {
        "counts": {
            "events": result.n_events,
            "malformed_log_lines": result.n_malformed,
            "sessions": result.n_sessions,
            "pairs": len(result.classified),
            "random_pairs": typer.n_random_pairs_,
            "semantic_status": dict(sorted(statuses.items())),
        },
        "knowledge_base": {
            "edges": result.graph.n_edges,
            "entities": result.graph.n_entities,
            "labels": result.graph.n_labels,
        },
        "modification_types": {
            "found": len(typer.real_weights_),
            "retained": sorted(t.render(compact=False) for t in typer.retained_types_),
        },
        "table1": {
            s.value: {"pairs": r.n_pairs, "success_rate": _num(r.success_rate),
                      "no_term_relation": _num(r.no_term_relation),
                      "no_semantic_relation": _num(r.no_semantic_relation)}
            for s, r in result.table1.items()
        },
        "table2": _rows_json(result.term_table),
        "table3": _rows_json(result.type_table),
        "table4": _rows_json(result.class_table),
        "rules": [
            dict(zip(["stratum", "condition", "subject_kind", "subject", "advice", "isr", "freq"], rule.as_row()))
            for rule in result.rules
        ],
    }


def _digest(path) -> dict:
    h = hashlib.sha256()
    size = 0
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
            size += len(chunk)
    return {"name": Path(path).name, "bytes": size, "sha256": h.hexdigest()}


def build_manifest(config: AnalysisConfig) -> dict:
    return {
        "tool": "modlog",
        "version": __version__,
        "seed": config.seed,
        "config": config.echo(),
        "inputs": {
            "logs": [_digest(p) for p in config.log_paths],
            "kbs": [_digest(p) for p in config.kb_paths],
        },
    }


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def run_analysis(config: AnalysisConfig) -> dict:
    """Run the analysis and write the bundle to ``config.out_dir``.

    Returns the mapping of file name to content. Nothing is written when
    the analysis fails.
    """
    if not config.out_dir:
        raise ConfigError("an output directory is required")
    result = analyze(config)
    bundle = render_tables(result)
    bundle["summary.json"] = _json(build_summary(result))
    bundle["manifest.json"] = _json(build_manifest(config))

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in bundle.items():
        with open(out / name, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    logger.info("wrote %d files to %s", len(bundle), out)
    return bundle

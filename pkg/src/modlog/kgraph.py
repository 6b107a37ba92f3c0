"""In-memory RDF graph loaded from N-Triples, with label lookup indices.

Only entity-to-entity triples become edges. Literal-valued triples are kept
only for the label predicate and feed the two label indices: an exact index
on normalized label strings and an inverted index on stemmed label tokens.
"""

from __future__ import annotations

import gzip
import io
import logging
import os
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .logmodel import normalize_query
from .termmod import stem_token

__all__ = [
    "BACKWARD",
    "FORWARD",
    "RDFS_LABEL",
    "Graph",
    "NTriplesError",
    "UnknownPredicate",
    "load_ntriples",
    "local_name",
    "parse_ntriples_line",
]

logger = logging.getLogger(__name__)

RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
FORWARD = "forward"
BACKWARD = "backward"

_PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "owl": "http://www.w3.org/2002/07/owl#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
    "skos": "http://www.w3.org/2004/02/skos/core#",
}

_IRI = r"<([^<>\"{}|^`\\\s]*)>"
_BNODE = r"(_:[A-Za-z0-9_][A-Za-z0-9_.\-]*)"
_LITERAL = r'"((?:[^"\\\n\r]|\\.)*)"(?:@([A-Za-z]+(?:-[A-Za-z0-9]+)*)|\^\^' + _IRI + r")?"
_TRIPLE_RE = re.compile(
    r"^\s*(?:" + _IRI + "|" + _BNODE + r")\s*"
    + _IRI + r"\s*"
    r"(?:" + _IRI + "|" + _BNODE + "|" + _LITERAL + r")\s*\.\s*(?:#.*)?$"
)
_ESCAPE_RE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))")
_SIMPLE_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_WORD_RE = re.compile(r"\w+")


class NTriplesError(ValueError):
    def __init__(self, source: str, line_no: int, reason: str):
        self.source = source
        self.line_no = line_no
        super().__init__(f"{source}:{line_no}: {reason}")


class UnknownPredicate(KeyError):
    pass


@dataclass(frozen=True)
class Literal:
    value: str
    language: Optional[str] = None
    datatype: Optional[str] = None


def _expand(iri: str) -> str:
    prefix, sep, local = iri.partition(":")
    if sep and prefix in _PREFIXES and not local.startswith("//"):
        return _PREFIXES[prefix] + local
    return iri


def _unescape(text: str) -> str:
    def repl(m):
        if m.group(1) or m.group(2):
            return chr(int(m.group(1) or m.group(2), 16))
        ch = m.group(3)
        if ch not in _SIMPLE_ESCAPES:
            raise ValueError(f"invalid escape \\{ch}")
        return _SIMPLE_ESCAPES[ch]

    return _ESCAPE_RE.sub(repl, text)


def parse_ntriples_line(line: str):
    """Parse one N-Triples statement into ``(subject, predicate, object)``.

    Returns None for blank and comment lines. Objects are IRI / blank node
    strings or :class:`Literal` instances. Raises ValueError on bad syntax.
    """
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    m = _TRIPLE_RE.match(stripped)
    if m is None:
        raise ValueError("not a valid N-Triples statement")
    s_iri, s_bnode, pred, o_iri, o_bnode, lit, lang, dtype = m.groups()
    subject = _expand(s_iri) if s_iri is not None else s_bnode
    if o_iri is not None:
        obj = _expand(o_iri)
    elif o_bnode is not None:
        obj = o_bnode
    else:
        obj = Literal(_unescape(lit), lang.lower() if lang else None, _expand(dtype) if dtype else None)
    return subject, _expand(pred), obj


def local_name(iri: str) -> str:
    """Short display form: the part after the last ``#``, ``/`` or ``:``."""
    for sep in ("#", "/", ":"):
        head, found, tail = iri.rpartition(sep)
        if found and tail:
            return tail
    return iri


def label_tokens(text: str) -> frozenset:
    return frozenset(stem_token(t) for t in _WORD_RE.findall(normalize_query(text)))


class Graph:
    """Frozen entity graph. Build it with :func:`load_ntriples` or :meth:`from_triples`."""

    def __init__(self, entities, predicates, triples, labels):
        self._names = tuple(entities)
        self._ids = {name: i for i, name in enumerate(self._names)}
        self._pred_names = tuple(predicates)
        self._pred_ids = {name: i for i, name in enumerate(self._pred_names)}

        out = [[] for _ in self._names]
        inc = [[] for _ in self._names]
        for s, p, o in triples:
            out[s].append((p, o))
            inc[o].append((p, s))
        self._out = tuple(tuple(sorted(x)) for x in out)
        self._in = tuple(tuple(sorted(x)) for x in inc)
        self._n_edges = len(triples)

        exact: dict = {}
        stem_postings: dict = {}
        self._label_owner = []
        for label_id, (ent, text) in enumerate(sorted(labels)):
            self._label_owner.append(ent)
            toks = label_tokens(text)
            exact.setdefault(normalize_query(text), set()).add(ent)
            for tok in toks:
                stem_postings.setdefault(tok, set()).add(label_id)
        self._exact = {k: frozenset(v) for k, v in exact.items()}
        self._stem_postings = {k: frozenset(v) for k, v in stem_postings.items()}
        self._n_labels = len(self._label_owner)

        counts: dict = {}
        for s, p, o in triples:
            n, subj, obj = counts.setdefault(p, [0, set(), set()])
            counts[p][0] = n + 1
            subj.add(s)
            obj.add(o)
        self._degree = {
            self._pred_names[p]: (n / len(subj), n / len(obj))
            for p, (n, subj, obj) in counts.items()
        }

    @classmethod
    def from_triples(cls, triples, labels=()) -> "Graph":
        """Build from ``(subject, predicate, object)`` IRI triples and ``(entity, label)`` pairs."""
        entities: dict = {}
        predicates: dict = {}
        ids = set()
        for s, p, o in triples:
            ids.add((entities.setdefault(s, len(entities)), predicates.setdefault(p, len(predicates)),
                     entities.setdefault(o, len(entities))))
        label_ids = {(entities.setdefault(e, len(entities)), text) for e, text in labels}
        return cls(sorted(entities, key=entities.get), sorted(predicates, key=predicates.get), sorted(ids), label_ids)

    # immutable, so estimator cloning can share it instead of copying
    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    # -- basic accessors -------------------------------------------------

    def __len__(self) -> int:
        return self._n_edges

    @property
    def n_edges(self) -> int:
        return self._n_edges

    @property
    def n_entities(self) -> int:
        return len(self._names)

    @property
    def n_labels(self) -> int:
        return self._n_labels

    @property
    def predicates(self) -> tuple:
        return tuple(sorted(self._degree))

    def __contains__(self, entity: str) -> bool:
        return entity in self._ids

    def edges(self) -> Iterator[tuple]:
        """Yield every (subject, predicate, object) edge, in id order."""
        for s, outs in enumerate(self._out):
            for p, o in outs:
                yield self._names[s], self._pred_names[p], self._names[o]

    def incoming(self, entity: str) -> list:
        """(subject, predicate) pairs for edges pointing at ``entity``."""
        i = self._ids[entity]
        return [(self._names[s], self._pred_names[p]) for p, s in self._in[i]]

    def neighbors(self, entity: str) -> list:
        """Direction-annotated steps ``(predicate, direction, other)`` from ``entity``."""
        i = self._ids.get(entity)
        if i is None:
            return []
        return [(self._pred_names[p], d, self._names[o]) for p, d, o in self._steps(i)]

    def _steps(self, i: int) -> Iterator[tuple]:
        for p, o in self._out[i]:
            yield p, FORWARD, o
        for p, s in self._in[i]:
            yield p, BACKWARD, s

    @property
    def label_index(self) -> dict:
        """Normalized label text -> set of entities carrying that label."""
        return {k: frozenset(self._names[i] for i in ids) for k, ids in self._exact.items()}

    @property
    def stem_index(self) -> dict:
        """Stemmed label token -> set of entities carrying such a label."""
        return {
            tok: frozenset(self._names[self._label_owner[lid]] for lid in lids)
            for tok, lids in self._stem_postings.items()
        }

    # -- lookups -----------------------------------------------------------

    def lookup_exact(self, label_text: str) -> frozenset:
        ids = self._exact.get(normalize_query(label_text), frozenset())
        return frozenset(self._names[i] for i in ids)

    def lookup_stemmed(self, query_terms) -> frozenset:
        """Entities with a label whose stemmed tokens include every query stem."""
        if isinstance(query_terms, str):
            query_terms = [query_terms]
        stems = set()
        for term in query_terms:
            stems |= label_tokens(term)
        if not stems:
            return frozenset()
        postings = sorted((self._stem_postings.get(s, frozenset()) for s in stems), key=len)
        hits = set(postings[0])
        for other in postings[1:]:
            hits &= other
            if not hits:
                break
        return frozenset(self._names[self._label_owner[lid]] for lid in hits)

    def predicate_degree_stats(self, predicate: str) -> tuple:
        """``(avg objects per subject, avg subjects per object)`` for ``predicate``."""
        try:
            return self._degree[predicate]
        except KeyError:
            raise UnknownPredicate(predicate) from None

    def is_few_to_few(self, predicate: str, threshold: float = 2.0) -> bool:
        if predicate not in self._degree:
            return False
        avg_out, avg_in = self._degree[predicate]
        return avg_out < threshold and avg_in < threshold

    def entity_id(self, entity: str) -> int:
        return self._ids[entity]

    def entity_name(self, i: int) -> str:
        return self._names[i]

    def predicate_name(self, p: int) -> str:
        return self._pred_names[p]


def _open_text(path) -> io.TextIOBase:
    path = os.fspath(path)
    if path.endswith(".gz"):
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, encoding="utf-8")


def load_ntriples(
    paths: Iterable,
    *,
    label_predicate: str = RDFS_LABEL,
    on_parse_error: str = "abort",
    errors: Optional[list] = None,
) -> Graph:
    """Load one or more N-Triples files (``.gz`` allowed) into a :class:`Graph`.

    ``paths`` may also contain open text streams. Duplicate triples collapse.
    """
    if on_parse_error not in ("abort", "skip"):
        raise ValueError(f"on_parse_error must be 'abort' or 'skip', got {on_parse_error!r}")
    if isinstance(paths, (str, os.PathLike)):
        paths = [paths]
    label_predicate = _expand(label_predicate)

    entities: dict = {}
    predicates: dict = {}
    triples: set = set()
    labels: set = set()

    def ent(name):
        return entities.setdefault(name, len(entities))

    for src in paths:
        if hasattr(src, "read"):
            name, fh, close = getattr(src, "name", "<stream>"), src, False
        else:
            name, fh, close = os.fspath(src), _open_text(src), True
        try:
            for line_no, line in enumerate(fh, start=1):
                try:
                    parsed = parse_ntriples_line(line)
                except ValueError as exc:
                    err = NTriplesError(name, line_no, str(exc))
                    if on_parse_error == "abort":
                        raise err from None
                    if errors is not None:
                        errors.append(err)
                    continue
                if parsed is None:
                    continue
                s, p, o = parsed
                if isinstance(o, Literal):
                    if p == label_predicate and not s.startswith("_:"):
                        labels.add((ent(s), o.value))
                    continue
                triples.add((ent(s), predicates.setdefault(p, len(predicates)), ent(o)))
        finally:
            if close:
                fh.close()

    logger.info("loaded %d edges, %d labels, %d entities", len(triples), len(labels), len(entities))
    return Graph(
        sorted(entities, key=entities.get),
        sorted(predicates, key=predicates.get),
        sorted(triples),
        labels,
    )

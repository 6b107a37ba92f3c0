"""Semantic classification of query modifications over a linked-data graph.

Pipeline per query pair: match both queries to entities, find every shortest
relation path between the two entity sets, abstract each path into an
instance-free modification type and give each path weight 1/n.
:class:`SemanticModificationTyper` adds the random cross-session baseline
that decides which types are kept.
"""

from __future__ import annotations

import enum
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_pairs, check_positive
from .kgraph import BACKWARD, FORWARD, Graph, local_name
from .logmodel import LabeledSession, Session, conflate, label_success, normalize_query

__all__ = [
    "BaselineError",
    "EntityMatch",
    "MatchMethod",
    "ModificationType",
    "PairRelation",
    "RelationPath",
    "SemanticClass",
    "SemanticModificationTyper",
    "SemanticStatus",
    "abstract_path",
    "baseline_filter",
    "classify_semantic",
    "draw_random_pairs",
    "match_query",
    "relate_queries",
    "select_types",
    "shortest_relations",
    "type_weights",
]

logger = logging.getLogger(__name__)

DEFAULT_MAX_PATH_LEN = 3


class BaselineError(ValueError):
    pass


class MatchMethod(enum.Enum):
    EXACT = "exact"
    STEMMED_FALLBACK = "stemmed"
    NONE = "none"


@dataclass(frozen=True)
class EntityMatch:
    query: str
    entities: frozenset
    method: MatchMethod


def _flip(direction: str) -> str:
    return BACKWARD if direction == FORWARD else FORWARD


@dataclass(frozen=True, order=True)
class RelationPath:
    """A concrete path: ``nodes[i] --steps[i]--> nodes[i+1]``."""

    nodes: tuple
    steps: tuple

    @property
    def endpoints(self) -> tuple:
        return self.nodes[0], self.nodes[-1]

    @property
    def intermediates(self) -> tuple:
        return self.nodes[1:-1]

    def __len__(self) -> int:
        return len(self.steps)

    def reversed(self) -> "RelationPath":
        return RelationPath(
            tuple(reversed(self.nodes)),
            tuple((p, _flip(d)) for p, d in reversed(self.steps)),
        )


@dataclass(frozen=True, order=True)
class ModificationType:
    signature: tuple

    def render(self, compact: bool = True) -> str:
        if not self.signature:
            return "[ ]"
        n_inner = len(self.signature) - 1
        parts = ["Q1"]
        for i, (pred, direction) in enumerate(self.signature):
            name = local_name(pred) if compact else pred
            parts.append(f"–{name}→" if direction == FORWARD else f"←{name}–")
            if i == n_inner:
                parts.append("Q2")
            else:
                parts.append("X" if n_inner == 1 else f"X{i + 1}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.render()


class SemanticClass(enum.Enum):
    SIBLING = "sibling"
    FEW_TO_FEW = "few-to-few"
    SAME_ENTITY = "same entity"
    OTHER = "other"

    def __str__(self) -> str:
        return self.value


class SemanticStatus(enum.Enum):
    RELATED = "related"
    NO_MATCH = "no match"
    NO_PATH = "no path"
    FILTERED = "filtered"


@dataclass(frozen=True)
class PairRelation:
    status: SemanticStatus
    matches: tuple
    paths: tuple = ()
    weights: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def related(self) -> bool:
        return self.status is SemanticStatus.RELATED


# --- matching and path search ------------------------------------------------


def match_query(query: str, graph: Graph) -> EntityMatch:
    exact = graph.lookup_exact(query)
    if exact:
        return EntityMatch(query, exact, MatchMethod.EXACT)
    terms = normalize_query(query).split()
    stemmed = graph.lookup_stemmed(terms) if terms else frozenset()
    if stemmed:
        return EntityMatch(query, stemmed, MatchMethod.STEMMED_FALLBACK)
    return EntityMatch(query, frozenset(), MatchMethod.NONE)


def _expand_level(graph: Graph, frontier, dist, parents, depth):
    nxt = []
    for u in frontier:
        for p, d, w in graph._steps(u):
            dw = dist.get(w)
            if dw is None:
                dist[w] = depth + 1
                parents[w] = [(u, p, d)]
                nxt.append(w)
            elif dw == depth + 1:
                parents[w].append((u, p, d))
    return nxt


def _chains(v, parents):
    """All shortest chains from a BFS source to ``v`` as (nodes, steps)."""
    if v not in parents:
        return [((v,), ())]
    out = []
    for u, p, d in parents[v]:
        for nodes, steps in _chains(u, parents):
            out.append((nodes + (v,), steps + ((p, d),)))
    return out


def shortest_relations(E1: Iterable[str], E2: Iterable[str], graph: Graph, max_len: int = DEFAULT_MAX_PATH_LEN) -> tuple:
    """All minimal-length relation paths from any entity in E1 to any in E2.

    Edges are walked in both directions and the direction is recorded per
    step. Shared entities yield one empty path each. Returns a sorted tuple,
    empty when nothing connects within ``max_len`` steps.
    """
    E1, E2 = frozenset(E1), frozenset(E2)
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    shared = E1 & E2
    if shared:
        return tuple(RelationPath((e,), ()) for e in sorted(shared))

    src = sorted(graph.entity_id(e) for e in E1 if e in graph)
    dst = sorted(graph.entity_id(e) for e in E2 if e in graph)
    if not src or not dst:
        return ()

    dist1, dist2 = {v: 0 for v in src}, {v: 0 for v in dst}
    par1, par2 = {}, {}
    fr1, fr2 = src, dst
    k1 = k2 = 0
    meet = []
    while k1 + k2 < max_len and fr1 and fr2:
        if len(fr1) <= len(fr2):
            fr1 = _expand_level(graph, fr1, dist1, par1, k1)
            k1 += 1
            meet = [v for v in fr1 if v in dist2]
        else:
            fr2 = _expand_level(graph, fr2, dist2, par2, k2)
            k2 += 1
            meet = [v for v in fr2 if v in dist1]
        if meet:
            break
    if not meet:
        return ()

    name, pred = graph.entity_name, graph.predicate_name
    paths = set()
    for m in meet:
        heads = _chains(m, par1)
        tails = _chains(m, par2)
        for h_nodes, h_steps in heads:
            for t_nodes, t_steps in tails:
                nodes = h_nodes + tuple(reversed(t_nodes[:-1]))
                steps = h_steps + tuple((p, _flip(d)) for p, d in reversed(t_steps))
                paths.add(
                    RelationPath(
                        tuple(name(v) for v in nodes),
                        tuple((pred(p), d) for p, d in steps),
                    )
                )
    return tuple(sorted(paths))


def abstract_path(path: RelationPath) -> ModificationType:
    return ModificationType(tuple(path.steps))


def classify_semantic(mod_type: ModificationType, graph: Graph, few_threshold: float = 2.0) -> SemanticClass:
    sig = mod_type.signature
    if not sig:
        return SemanticClass.SAME_ENTITY
    if len(sig) == 2 and sig[0][0] == sig[1][0] and sig[0][1] != sig[1][1]:
        return SemanticClass.SIBLING
    if len(sig) == 1 and graph.is_few_to_few(sig[0][0], few_threshold):
        return SemanticClass.FEW_TO_FEW
    return SemanticClass.OTHER


def type_weights(paths) -> dict:
    """Give each path weight 1/n and sum per abstract type (exact rationals)."""
    if not paths:
        return {}
    share = Fraction(1, len(paths))
    weights: dict = {}
    for path in paths:
        t = abstract_path(path)
        weights[t] = weights.get(t, 0) + share
    return weights


def relate_queries(q1: str, q2: str, graph: Graph, max_len: int = DEFAULT_MAX_PATH_LEN) -> PairRelation:
    m1, m2 = match_query(q1, graph), match_query(q2, graph)
    if m1.method is MatchMethod.NONE or m2.method is MatchMethod.NONE:
        return PairRelation(SemanticStatus.NO_MATCH, (m1, m2))
    paths = shortest_relations(m1.entities, m2.entities, graph, max_len)
    if not paths:
        return PairRelation(SemanticStatus.NO_PATH, (m1, m2))
    return PairRelation(SemanticStatus.RELATED, (m1, m2), paths, type_weights(paths))


def restrict(relation: PairRelation, keep) -> PairRelation:
    """Drop paths whose type is not in ``keep`` and re-spread the unit weight."""
    if not relation.related:
        return relation
    paths = tuple(p for p in relation.paths if abstract_path(p) in keep)
    if not paths:
        return PairRelation(SemanticStatus.FILTERED, relation.matches)
    return PairRelation(SemanticStatus.RELATED, relation.matches, paths, type_weights(paths))


# --- random baseline -----------------------------------------------------------


def _session_pool(sessions) -> list:
    pool = []
    for s in sessions:
        if isinstance(s, Session):
            s = label_success(s)
        if isinstance(s, LabeledSession):
            pool.extend((s.id, q.text) for q in conflate(s.queries))
        else:
            sid, text = s
            pool.append((sid, text))
    return pool


def draw_random_pairs(sessions, n: int, seed) -> list:
    """Draw ``n`` (original, modified) query texts from two different sessions.

    ``sessions`` holds Session / LabeledSession objects or ``(session_id,
    query_text)`` tuples. Draws are uniform over queries with rejection of
    same-session picks.
    """
    pool = _session_pool(sessions)
    if len({sid for sid, _ in pool}) < 2:
        raise BaselineError("need queries from at least 2 sessions to draw cross-session pairs")
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        i, j = rng.randrange(len(pool)), rng.randrange(len(pool))
        if pool[i][0] != pool[j][0]:
            out.append((pool[i][1], pool[j][1]))
    return out


def select_types(real_weights, n_real, random_weights, n_random, *, ratio_threshold=2.0, min_support=5.0) -> frozenset:
    """Types whose real-pair frequency clears the (add-one smoothed) random one."""
    ratio = Fraction(ratio_threshold)
    support = Fraction(min_support)
    keep = set()
    for t, w in real_weights.items():
        if w < support:
            continue
        rand = Fraction(random_weights.get(t, 0)) + 1
        if Fraction(w) / n_real >= ratio * rand / n_random:
            keep.add(t)
    return frozenset(keep)


def _sum_weights(relations) -> dict:
    total: dict = {}
    for rel in relations:
        for t, w in rel.weights.items():
            total[t] = total.get(t, 0) + w
    return total


def baseline_filter(
    real_counts: dict,
    sessions,
    graph: Graph,
    *,
    n_real_pairs: int,
    num_random_pairs: Optional[int] = None,
    seed=0,
    ratio_threshold: float = 2.0,
    min_support: float = 5.0,
    max_len: int = DEFAULT_MAX_PATH_LEN,
) -> frozenset:
    """Keep the types of ``real_counts`` that are over-represented versus random pairs."""
    n_random = num_random_pairs if num_random_pairs is not None else n_real_pairs
    if n_real_pairs <= 0 or n_random <= 0:
        raise BaselineError("need at least one real and one random pair")
    drawn = draw_random_pairs(sessions, n_random, seed)
    random_weights = _sum_weights(relate_queries(a, b, graph, max_len) for a, b in drawn)
    return select_types(
        real_counts, n_real_pairs, random_weights, n_random,
        ratio_threshold=ratio_threshold, min_support=min_support,
    )


# --- estimator -----------------------------------------------------------------


class SemanticModificationTyper(BaseEstimator):
    """Assign weighted semantic modification types to query pairs.

    ``fit`` types the given pairs, types an equally large (by default) sample
    of random cross-session pairs drawn with ``seed``, and keeps the types
    that are at least ``ratio_threshold`` times more frequent among the real
    pairs and have ``min_support`` total weight. ``transform`` returns one
    :class:`PairRelation` per pair, restricted to the retained types.

    Parameters
    ----------
    graph : Graph
        Loaded knowledge graph.
    max_path_len : int
        Longest relation path searched for.
    random_pairs : int or None
        Size of the random baseline sample; None means as many as real pairs.
    seed : int
        Seed for the baseline sample.
    ratio_threshold, min_support : float
        Type retention thresholds.
    n_jobs : int
        Worker threads for per-pair typing; output does not depend on it.
    """

    def __init__(
        self,
        graph=None,
        max_path_len=DEFAULT_MAX_PATH_LEN,
        random_pairs=None,
        seed=0,
        ratio_threshold=2.0,
        min_support=5.0,
        n_jobs=1,
    ):
        self.graph = graph
        self.max_path_len = max_path_len
        self.random_pairs = random_pairs
        self.seed = seed
        self.ratio_threshold = ratio_threshold
        self.min_support = min_support
        self.n_jobs = n_jobs

    def _check_params(self):
        if not isinstance(self.graph, Graph):
            raise TypeError("graph must be a loaded modlog.kgraph.Graph")
        check_positive("max_path_len", self.max_path_len, allow_zero=True)
        check_positive("random_pairs", self.random_pairs)
        check_positive("ratio_threshold", self.ratio_threshold)
        check_positive("min_support", self.min_support, allow_zero=True)
        check_positive("n_jobs", self.n_jobs)

    def _relate_texts(self, texts) -> list:
        cache = self.__dict__.setdefault("_relation_cache", {})
        graph, max_len = self.graph, self.max_path_len

        def one(qq):
            key = (qq[0], qq[1], id(graph), max_len)
            rel = cache.get(key)
            if rel is None:
                rel = cache[key] = relate_queries(qq[0], qq[1], graph, max_len)
            return rel

        if self.n_jobs == 1:
            return [one(t) for t in texts]
        with ThreadPoolExecutor(max_workers=self.n_jobs) as pool:
            return list(pool.map(one, texts))

    def relate(self, X) -> list:
        """Unfiltered relations for each pair (no baseline applied)."""
        self._check_params()
        pairs = check_pairs(X)
        return self._relate_texts([(p.original.text, p.modified.text) for p in pairs])

    def fit(self, X, y=None, sessions=None):
        self._check_params()
        pairs = check_pairs(X)
        if not pairs:
            raise ValueError("cannot fit on zero query pairs")
        if sessions is None:
            seen = {}
            for p in pairs:
                for q in (p.original, p.modified):
                    seen.setdefault((p.session_id, q.position), q.text)
            sessions = [(sid, text) for (sid, _), text in seen.items()]

        real = self._relate_texts([(p.original.text, p.modified.text) for p in pairs])
        n_random = self.random_pairs if self.random_pairs is not None else len(pairs)
        drawn = draw_random_pairs(sessions, n_random, self.seed)
        rand = self._relate_texts(drawn)

        self.n_real_pairs_ = len(pairs)
        self.n_random_pairs_ = n_random
        self.real_weights_ = _sum_weights(real)
        self.random_weights_ = _sum_weights(rand)
        self.retained_types_ = select_types(
            self.real_weights_, len(pairs), self.random_weights_, n_random,
            ratio_threshold=self.ratio_threshold, min_support=self.min_support,
        )
        logger.info(
            "baseline kept %d of %d modification types",
            len(self.retained_types_), len(self.real_weights_),
        )
        return self

    def transform(self, X) -> list:
        check_is_fitted(self, "retained_types_")
        return [restrict(rel, self.retained_types_) for rel in self.relate(X)]

    def fit_transform(self, X, y=None, sessions=None):
        return self.fit(X, sessions=sessions).transform(X)

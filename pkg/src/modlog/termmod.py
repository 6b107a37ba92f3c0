"""Term-based classification of query modifications.

Each consecutive pair is assigned one of five classes by comparing the sets
of Porter stems of the two queries.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_pairs
from .logmodel import normalize_query
from .porter import porter_stem

__all__ = [
    "StemmedQuery",
    "TermModification",
    "TermModificationClassifier",
    "classify_term_mod",
    "stem_query",
    "stem_token",
]


class TermModification(enum.Enum):
    SPECIFICATION = "specification"
    GENERALIZATION = "generalization"
    REFORMULATION = "reformulation"
    LEXICAL_VARIATION = "lexical variation"
    NO_RELATION = "no relation"

    def __str__(self) -> str:
        return self.value


# Order used for table rows; NO_RELATION is reported separately as topic shift.
RELATED_TERM_CLASSES = (
    TermModification.REFORMULATION,
    TermModification.SPECIFICATION,
    TermModification.GENERALIZATION,
    TermModification.LEXICAL_VARIATION,
)


@dataclass(frozen=True)
class StemmedQuery:
    raw: str
    terms: tuple
    stems: tuple

    @property
    def stem_set(self) -> frozenset:
        return frozenset(self.stems)


def stem_token(token: str) -> str:
    token = token.lower()
    return porter_stem(token) if token.isalpha() else token


def stem_query(text: str) -> StemmedQuery:
    terms = tuple(normalize_query(text).split())
    return StemmedQuery(text, terms, tuple(stem_token(t) for t in terms))


def classify_term_mod(q1: StemmedQuery | str, q2: StemmedQuery | str) -> TermModification:
    if isinstance(q1, str):
        q1 = stem_query(q1)
    if isinstance(q2, str):
        q2 = stem_query(q2)
    s1, s2 = q1.stem_set, q2.stem_set
    if s1 == s2:
        return TermModification.LEXICAL_VARIATION
    if not s1 & s2:
        return TermModification.NO_RELATION
    if s1 < s2:
        return TermModification.SPECIFICATION
    if s2 < s1:
        return TermModification.GENERALIZATION
    return TermModification.REFORMULATION


class TermModificationClassifier(BaseEstimator, TransformerMixin):
    """Stateless transformer mapping query pairs to :class:`TermModification`.

    ``fit`` only validates input; it exists so the classifier can sit in a
    pipeline next to the fitted semantic typer.
    """

    def fit(self, X, y=None):
        self.n_pairs_seen_ = len(check_pairs(X))
        return self

    def transform(self, X) -> list[TermModification]:
        return [
            classify_term_mod(stem_query(p.original.text), stem_query(p.modified.text))
            for p in check_pairs(X)
        ]

    predict = transform

    def __sklearn_is_fitted__(self) -> bool:
        return True

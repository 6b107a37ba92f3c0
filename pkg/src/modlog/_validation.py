"""Input coercion shared by the estimators."""

from __future__ import annotations

from collections.abc import Sequence

from .logmodel import QueryPair, QueryRecord


def check_pairs(X) -> list[QueryPair]:
    """Coerce ``X`` into a list of :class:`QueryPair`.

    Accepts QueryPair objects or ``(original, modified)`` string 2-tuples;
    tuples become pairs with both queries unsuccessful and session id -1.
    """
    if isinstance(X, (str, bytes)) or not isinstance(X, (Sequence, list, tuple)):
        try:
            X = list(X)
        except TypeError:
            raise TypeError(f"expected a sequence of query pairs, got {type(X).__name__}") from None
    pairs = []
    for i, item in enumerate(X):
        if isinstance(item, QueryPair):
            pairs.append(item)
        elif isinstance(item, (tuple, list)) and len(item) == 2 and all(isinstance(s, str) for s in item):
            pairs.append(QueryPair(QueryRecord(item[0], False, 0), QueryRecord(item[1], False, 1), -1))
        else:
            raise TypeError(f"element {i} is not a QueryPair or (str, str) tuple: {item!r}")
    return pairs


def check_positive(name: str, value, *, allow_zero: bool = False) -> None:
    if value is None:
        return
    if allow_zero and value < 0 or not allow_zero and value <= 0:
        bound = "non-negative" if allow_zero else "positive"
        raise ValueError(f"{name} must be {bound}, got {value!r}")

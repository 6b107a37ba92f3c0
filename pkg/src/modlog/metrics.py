"""Click-based success statistics for modification types.

Counts are exact :class:`~fractions.Fraction` values so that fractional 1/n
path weights add up without drift. Floats appear only when rendering.

The increase of success rate is oriented so that a type with a higher
success rate than the pool gets a positive value::

    isr_m = sr_m - sum(c) / sum(c + n)
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Optional

__all__ = [
    "STRATA",
    "MetricRow",
    "Stratum",
    "SuccessStats",
    "TopicShiftRow",
    "UndefinedRate",
    "isr",
    "metric_rows",
    "overall_success_rate",
    "stratum_of",
    "success_rate",
    "topic_shift_proportions",
]

logger = logging.getLogger(__name__)


class UndefinedRate(ArithmeticError):
    """Raised when a rate is requested for a type never observed in a stratum."""


class Stratum(enum.Enum):
    TOTAL = "total"
    AFTER_SUCCESSFUL = "after successful"
    AFTER_UNSUCCESSFUL = "after unsuccessful"

    def __str__(self) -> str:
        return self.value


STRATA = (Stratum.TOTAL, Stratum.AFTER_SUCCESSFUL, Stratum.AFTER_UNSUCCESSFUL)


def stratum_of(original_successful: bool) -> Stratum:
    return Stratum.AFTER_SUCCESSFUL if original_successful else Stratum.AFTER_UNSUCCESSFUL


class SuccessStats:
    """Weighted (c_m, n_m) tallies per modification type, per stratum.

    ``c`` counts pairs whose modified query was followed by a click, ``n``
    those where it was not. The conditional strata split on the success of
    the original query; the total stratum receives every contribution too.
    """

    def __init__(self):
        self._counts = {s: {} for s in STRATA}

    def add(self, key: Hashable, weight, modified_successful: bool, original_successful: bool) -> None:
        weight = Fraction(weight)
        if weight < 0:
            raise ValueError("weights must be non-negative")
        idx = 0 if modified_successful else 1
        for stratum in (Stratum.TOTAL, stratum_of(original_successful)):
            cell = self._counts[stratum].setdefault(key, [Fraction(0), Fraction(0)])
            cell[idx] += weight

    @classmethod
    def from_counts(cls, counts: dict) -> "SuccessStats":
        """Build directly from ``{stratum: {key: (c, n)}}``."""
        stats = cls()
        for stratum, table in counts.items():
            stats._counts[Stratum(stratum)] = {
                k: [Fraction(c), Fraction(n)] for k, (c, n) in table.items()
            }
        return stats

    def counts(self, stratum: Stratum = Stratum.TOTAL) -> dict:
        return {k: (c, n) for k, (c, n) in self._counts[stratum].items()}

    def keys(self, stratum: Stratum = Stratum.TOTAL) -> list:
        return list(self._counts[stratum])

    def weight(self, stratum: Stratum = Stratum.TOTAL) -> Fraction:
        return sum((c + n for c, n in self._counts[stratum].values()), Fraction(0))

    def scaled(self, factor) -> "SuccessStats":
        factor = Fraction(factor)
        return SuccessStats.from_counts(
            {s: {k: (c * factor, n * factor) for k, (c, n) in t.items()} for s, t in self._counts.items()}
        )

    def __add__(self, other: "SuccessStats") -> "SuccessStats":
        merged = SuccessStats()
        for src in (self, other):
            for s, table in src._counts.items():
                for k, (c, n) in table.items():
                    cell = merged._counts[s].setdefault(k, [Fraction(0), Fraction(0)])
                    cell[0] += c
                    cell[1] += n
        return merged

    def __eq__(self, other) -> bool:
        return isinstance(other, SuccessStats) and self._counts == other._counts

    def __repr__(self) -> str:
        sizes = ", ".join(f"{s.value}={len(t)}" for s, t in self._counts.items())
        return f"SuccessStats({sizes})"


def success_rate(c, n) -> Fraction:
    c, n = Fraction(c), Fraction(n)
    if c + n == 0:
        raise UndefinedRate("success rate undefined for an unobserved type")
    return c / (c + n)


def overall_success_rate(stats: SuccessStats, stratum: Stratum = Stratum.TOTAL) -> Fraction:
    counts = stats.counts(stratum).values()
    return success_rate(sum((c for c, _ in counts), Fraction(0)), sum((n for _, n in counts), Fraction(0)))


def isr(stats: SuccessStats, stratum: Stratum = Stratum.TOTAL) -> dict:
    """Increase of success rate for every type observed in ``stratum``."""
    overall = overall_success_rate(stats, stratum)
    return {
        k: success_rate(c, n) - overall
        for k, (c, n) in stats.counts(stratum).items()
        if c + n > 0
    }


@dataclass(frozen=True)
class MetricRow:
    key: Hashable
    weight: Fraction
    freq: Fraction
    sr: Optional[Fraction]
    isr: Optional[Fraction]


def metric_rows(stats: SuccessStats, stratum: Stratum = Stratum.TOTAL, keys: Optional[Iterable] = None) -> list:
    """One :class:`MetricRow` per key; unobserved keys get ``sr = isr = None``.

    An empty stratum yields rows with zero frequency and no rates.
    """
    counts = stats.counts(stratum)
    keys = list(keys) if keys is not None else list(counts)
    total = stats.weight(stratum)
    overall = overall_success_rate(stats, stratum) if total else None
    rows = []
    for k in keys:
        c, n = counts.get(k, (Fraction(0), Fraction(0)))
        w = c + n
        if w == 0:
            rows.append(MetricRow(k, w, Fraction(0), None, None))
            continue
        sr = c / w
        rows.append(MetricRow(k, w, w / total, sr, sr - overall))
    return rows


@dataclass(frozen=True)
class TopicShiftRow:
    stratum: Stratum
    n_pairs: int
    success_rate: Fraction
    no_term_relation: Fraction
    no_semantic_relation: Fraction


def topic_shift_proportions(pairs: Iterable) -> dict:
    """Overall success and topic-shift proportions per stratum.

    ``pairs`` yields ``(original_successful, modified_successful,
    has_term_relation, has_semantic_relation)`` tuples. Strata without pairs
    are left out with a warning.
    """
    tallies = {s: [0, 0, 0, 0] for s in STRATA}
    for orig_ok, mod_ok, term_rel, sem_rel in pairs:
        for s in (Stratum.TOTAL, stratum_of(orig_ok)):
            t = tallies[s]
            t[0] += 1
            t[1] += bool(mod_ok)
            t[2] += not term_rel
            t[3] += not sem_rel
    out = {}
    for s in STRATA:
        n, ok, no_term, no_sem = tallies[s]
        if n == 0:
            logger.warning("stratum %r has no query pairs; row omitted", s.value)
            continue
        out[s] = TopicShiftRow(s, n, Fraction(ok, n), Fraction(no_term, n), Fraction(no_sem, n))
    return out

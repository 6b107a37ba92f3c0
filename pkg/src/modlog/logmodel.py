"""Query-log ingestion: TSV parsing, sessionization, click labelling and pairs.

Log lines look like::

    2010-03-01T10:00:00+00:00<TAB>u1<TAB>Q<TAB>monet
    2010-03-01T10:00:12+00:00<TAB>u1<TAB>C<TAB>img-0042

An optional fifth column carries an explicit session id, which then takes
precedence over timeout-based segmentation.
"""

from __future__ import annotations

import enum
import io
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from itertools import groupby
from typing import Iterable, Optional, TextIO

__all__ = [
    "DEFAULT_TIMEOUT",
    "EventKind",
    "LabeledSession",
    "MalformedRecord",
    "QueryPair",
    "QueryRecord",
    "Session",
    "SessionEvent",
    "conflate",
    "extract_pairs",
    "label_success",
    "normalize_query",
    "parse_log",
    "sessionize",
]

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 900


class MalformedRecord(ValueError):
    """A log line that violates the column contract."""

    def __init__(self, line_no: int, reason: str, source: str = "<log>"):
        self.line_no = line_no
        self.reason = reason
        self.source = source
        super().__init__(f"{source}:{line_no}: {reason}")


class EventKind(enum.Enum):
    QUERY = "Q"
    CLICK = "C"


@dataclass(frozen=True)
class SessionEvent:
    timestamp: datetime
    user_key: str
    kind: EventKind
    payload: str
    session_key: Optional[str] = None


@dataclass(frozen=True)
class Session:
    id: int
    user_key: str
    events: tuple

    @property
    def queries(self) -> list:
        return [e for e in self.events if e.kind is EventKind.QUERY]


@dataclass(frozen=True)
class QueryRecord:
    text: str
    successful: bool
    position: int

    @property
    def normalized(self) -> str:
        return normalize_query(self.text)


@dataclass(frozen=True)
class LabeledSession:
    id: int
    user_key: str
    queries: tuple


@dataclass(frozen=True)
class QueryPair:
    original: QueryRecord
    modified: QueryRecord
    session_id: int


def normalize_query(text: str) -> str:
    """Trim, collapse whitespace runs and case-fold."""
    return " ".join(text.split()).casefold()


def _parse_timestamp(raw: str) -> datetime:
    raw = raw.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    ts = datetime.fromisoformat(raw)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def parse_log(
    stream: TextIO | Iterable[str],
    *,
    on_error: str = "abort",
    errors: Optional[list] = None,
    source: str = "<log>",
) -> list[SessionEvent]:
    """Parse a TSV query log into events, keeping input order.

    With ``on_error="skip"`` malformed lines are dropped; if ``errors`` is a
    list the corresponding :class:`MalformedRecord` instances are appended
    to it so callers can count them.
    """
    if on_error not in ("abort", "skip"):
        raise ValueError(f"on_error must be 'abort' or 'skip', got {on_error!r}")
    if isinstance(stream, str):
        stream = io.StringIO(stream)

    events = []
    for line_no, line in enumerate(stream, start=1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        try:
            events.append(_parse_line(line, line_no, source))
        except MalformedRecord as exc:
            if on_error == "abort":
                raise
            logger.debug("skipping %s", exc)
            if errors is not None:
                errors.append(exc)
    return events


def _parse_line(line: str, line_no: int, source: str) -> SessionEvent:
    cols = line.split("\t")
    if len(cols) not in (4, 5):
        raise MalformedRecord(line_no, f"expected 4 or 5 columns, got {len(cols)}", source)
    raw_ts, user_key, kind, payload = cols[:4]
    try:
        ts = _parse_timestamp(raw_ts)
    except ValueError:
        raise MalformedRecord(line_no, f"bad timestamp {raw_ts!r}", source) from None
    user_key = user_key.strip()
    if not user_key:
        raise MalformedRecord(line_no, "empty user key", source)
    try:
        kind = EventKind(kind.strip().upper())
    except ValueError:
        raise MalformedRecord(line_no, f"kind must be Q or C, got {kind!r}", source) from None
    payload = payload.strip()
    if not payload:
        raise MalformedRecord(line_no, "empty payload", source)
    session_key = cols[4].strip() if len(cols) == 5 and cols[4].strip() else None
    return SessionEvent(ts, user_key, kind, payload, session_key)


def sessionize(events: Iterable[SessionEvent], timeout_seconds: float = DEFAULT_TIMEOUT) -> list[Session]:
    """Group events into sessions.

    Events carrying an explicit session key are grouped by (user, key).
    All others are split per user whenever the gap to the previous event
    strictly exceeds ``timeout_seconds``. Sessions without any query are
    dropped. Ids are assigned in order of each session's first event.
    """
    if timeout_seconds <= 0:
        raise ValueError("timeout_seconds must be positive")

    by_group: dict = {}
    for idx, ev in enumerate(events):
        key = (ev.user_key, ev.session_key)
        by_group.setdefault(key, []).append((idx, ev))

    chunks = []
    for (user_key, session_key), items in by_group.items():
        items.sort(key=lambda t: (t[1].timestamp, t[0]))
        if session_key is not None:
            chunks.append(items)
            continue
        current = [items[0]]
        for prev, item in zip(items, items[1:]):
            gap = (item[1].timestamp - prev[1].timestamp).total_seconds()
            if gap > timeout_seconds:
                chunks.append(current)
                current = []
            current.append(item)
        chunks.append(current)

    chunks = [c for c in chunks if any(ev.kind is EventKind.QUERY for _, ev in c)]
    chunks.sort(key=lambda c: (c[0][1].timestamp, c[0][0]))
    return [
        Session(id=i, user_key=c[0][1].user_key, events=tuple(ev for _, ev in c))
        for i, c in enumerate(chunks)
    ]


def label_success(session: Session) -> LabeledSession:
    """Flag each query as successful iff a click follows it before the next query.

    Clicks seen before the first query of the session are ignored.
    """
    texts: list[str] = []
    clicked: list[bool] = []
    for ev in session.events:
        if ev.kind is EventKind.QUERY:
            texts.append(ev.payload)
            clicked.append(False)
        elif clicked:
            clicked[-1] = True
    records = tuple(QueryRecord(t, c, i) for i, (t, c) in enumerate(zip(texts, clicked)))
    return LabeledSession(session.id, session.user_key, records)


def conflate(queries: Iterable[QueryRecord]) -> list[QueryRecord]:
    """Merge runs of consecutive identical (normalized) queries.

    The merged record keeps the first raw text and is successful if any copy was.
    """
    merged = []
    for _, run in groupby(queries, key=lambda q: q.normalized):
        run = list(run)
        merged.append(
            QueryRecord(run[0].text, any(q.successful for q in run), len(merged))
        )
    return merged


def extract_pairs(session: LabeledSession) -> list[QueryPair]:
    queries = conflate(session.queries)
    return [QueryPair(a, b, session.id) for a, b in zip(queries, queries[1:])]

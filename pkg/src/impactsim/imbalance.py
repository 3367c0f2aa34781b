"""Order-flow imbalance analytics over book-event streams.

Everything here is pure: per-event flow deltas are functions of two
consecutive snapshots, and :class:`MlofiWindow` is a single-owner ring
buffer over the last N events. The scalar ``offset`` turns the per-level
imbalance vector into a price adjustment for impact-sensitive traders.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

from .book import ASK, BID, LobSnapshot

_MISSING_BID = float("-inf")
_MISSING_ASK = float("inf")


class NonConsecutiveSnapshots(ValueError):
    """Flow deltas are only defined between events n-1 and n."""


class EmptyWindowError(ValueError):
    """The requested statistic is undefined on an empty window."""


@dataclass(frozen=True)
class ImbalanceParams:
    """Configuration for the imbalance-to-price-offset pipeline.

    ``scale_c`` and ``decay_alpha`` are the constants of the level-decayed
    offset sum; ``levels`` is how many book levels are tracked; and
    ``window_events`` is the event-count window length (event-based, not
    wall-clock).
    """

    scale_c: float = 5.0
    decay_alpha: float = 0.8
    levels: int = 5
    window_events: int = 10

    def __post_init__(self):
        if self.scale_c <= 0:
            raise ValueError("scale_c must be positive")
        if not (0.0 < self.decay_alpha <= 1.0):
            raise ValueError("decay_alpha must be in (0, 1]")
        if self.levels < 1 or self.window_events < 1:
            raise ValueError("levels and window_events must be >= 1")


class LevelDelta(NamedTuple):
    """Per-event signed flow at one book level.

    ``d_bid`` is the bid-side flow, ``d_ask`` the ask-side flow, and
    ``e = d_bid - d_ask`` the net level imbalance for the event.
    ``depth_sample`` is (bid quantity + ask quantity) / 2 at this level
    after the event, the per-event contribution to average depth.
    """

    level: int
    d_bid: int
    d_ask: int
    e: int
    depth_sample: float


def delta_m(snapshot: LobSnapshot) -> Optional[float]:
    """Micro-price minus mid-price; None when either is undefined.

    Positive values signal excess demand at the top of the book, negative
    values excess supply.
    """
    mid = snapshot.mid_price()
    if mid is None:
        return None
    return snapshot.micro_price() - mid


def _level_key(snapshot: LobSnapshot, side: str, m: int) -> tuple[float, int]:
    """(comparable price, quantity) at level m; absent levels compare as
    strictly worse than any real price and carry quantity 0."""
    pq = snapshot.level(side, m)
    if pq is None:
        return (_MISSING_BID if side == BID else _MISSING_ASK, 0)
    return (float(pq[0]), pq[1])


def level_flow(prev: LobSnapshot, next: LobSnapshot, m: int) -> LevelDelta:
    """Signed order flow at level ``m`` between two consecutive events.

    Bid side: a price improvement contributes the new level's quantity, an
    unchanged price contributes the quantity change, and a price retreat
    contributes minus the old quantity. The ask side mirrors this, and the
    net flow is bid flow minus ask flow.
    """
    if next.event_seq != prev.event_seq + 1:
        raise NonConsecutiveSnapshots(
            f"snapshots not consecutive: {prev.event_seq} -> {next.event_seq}"
        )
    return _flow_at(prev, next, m)


def _flow_at(prev: LobSnapshot, next: LobSnapshot, m: int) -> LevelDelta:
    pb_n, qb_n = _level_key(next, BID, m)
    pb_s, qb_s = _level_key(prev, BID, m)
    if pb_n > pb_s:
        d_bid = qb_n
    elif pb_n == pb_s:
        d_bid = qb_n - qb_s
    else:
        d_bid = -qb_s

    pa_n, qa_n = _level_key(next, ASK, m)
    pa_s, qa_s = _level_key(prev, ASK, m)
    if pa_n > pa_s:
        d_ask = -qa_s
    elif pa_n == pa_s:
        d_ask = qa_n - qa_s
    else:
        d_ask = qa_n

    return LevelDelta(
        level=m,
        d_bid=d_bid,
        d_ask=d_ask,
        e=d_bid - d_ask,
        depth_sample=(qb_n + qa_n) / 2.0,
    )


def level_flow_vector(
    prev: LobSnapshot, next: LobSnapshot, levels: int
) -> tuple[LevelDelta, ...]:
    """Flow deltas for levels 1..levels in one pass."""
    if next.event_seq != prev.event_seq + 1:
        raise NonConsecutiveSnapshots(
            f"snapshots not consecutive: {prev.event_seq} -> {next.event_seq}"
        )
    return tuple(_flow_at(prev, next, m) for m in range(1, levels + 1))


class MlofiWindow:
    """Ring buffer of per-event level deltas over the last N book events.

    Each trader that wants imbalance-sensitivity owns one window; pushes
    either recompute the delta vector from a snapshot pair or accept a
    precomputed one (``push_delta``) so a session can share the per-event
    computation across many windows.
    """

    __slots__ = ("levels", "length", "_entries", "_e_sums", "_depth_sums")

    def __init__(self, levels: int = 5, length: int = 10):
        if levels < 1 or length < 1:
            raise ValueError("levels and length must be >= 1")
        self.levels = levels
        self.length = length
        self._entries: deque[tuple[LevelDelta, ...]] = deque()
        self._e_sums = [0] * levels
        self._depth_sums = [0.0] * levels

    def __len__(self) -> int:
        return len(self._entries)

    def clear(self) -> None:
        self._entries.clear()
        self._e_sums = [0] * self.levels
        self._depth_sums = [0.0] * self.levels

    def push(self, prev: LobSnapshot, next: LobSnapshot) -> "MlofiWindow":
        self.push_delta(level_flow_vector(prev, next, self.levels))
        return self

    def push_delta(self, deltas: tuple[LevelDelta, ...]) -> "MlofiWindow":
        """Append one event's delta vector, evicting the oldest beyond N.

        ``deltas`` may cover more levels than this window tracks; extra
        levels are ignored.
        """
        if len(deltas) < self.levels:
            raise ValueError(f"need {self.levels} levels, got {len(deltas)}")
        entry = tuple(deltas[: self.levels])
        self._entries.append(entry)
        e_sums, d_sums = self._e_sums, self._depth_sums
        for i, d in enumerate(entry):
            e_sums[i] += d.e
            d_sums[i] += d.depth_sample
        if len(self._entries) > self.length:
            old = self._entries.popleft()
            for i, d in enumerate(old):
                e_sums[i] -= d.e
                d_sums[i] -= d.depth_sample
        return self

    def mlofi(self) -> tuple[int, ...]:
        """Per-level cumulative imbalance over the retained events.

        An empty window is a zero vector: no events, no flow.
        """
        return tuple(self._e_sums)

    def average_depth(self) -> tuple[float, ...]:
        """Per-level mean of (bid qty + ask qty)/2 over retained events."""
        n = len(self._entries)
        if n == 0:
            raise EmptyWindowError("average depth undefined on an empty window")
        return tuple(s / n for s in self._depth_sums)


def offset(window: MlofiWindow, params: ImbalanceParams) -> float:
    """Scalar price offset: level-decayed sum of c * MLOFI_m / AD_m.

    Levels whose average depth is zero are skipped entirely. Positive
    offsets mean demand pressure (prices expected to rise), negative mean
    supply pressure.
    """
    if len(window) == 0:
        raise EmptyWindowError("offset undefined on an empty window")
    mlofi = window.mlofi()
    depth = window.average_depth()
    levels = min(window.levels, params.levels)
    total = 0.0
    for i in range(levels):
        ad = depth[i]
        if ad == 0.0:
            continue
        total += (params.decay_alpha ** i) * params.scale_c * mlofi[i] / ad
    return total


def write_analytics_csv(
    snapshots: Iterable[LobSnapshot], params: ImbalanceParams, path
) -> None:
    """Per-event, per-level imbalance trace for offline inspection.

    Columns: ``seq,time,m,dW,dV,e,MLOFI_m,AD_m,offset``; one row per level
    per transition, with the event's scalar offset repeated on each row.
    """
    window = MlofiWindow(levels=params.levels, length=params.window_events)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seq", "time", "m", "dW", "dV", "e", "MLOFI_m", "AD_m", "offset"])
        prev: Optional[LobSnapshot] = None
        for snap in snapshots:
            if prev is not None:
                deltas = level_flow_vector(prev, snap, params.levels)
                window.push_delta(deltas)
                mlofi = window.mlofi()
                depth = window.average_depth()
                off = offset(window, params)
                for i, d in enumerate(deltas):
                    writer.writerow(
                        [snap.event_seq, repr(snap.time), d.level, d.d_bid, d.d_ask,
                         d.e, mlofi[i], repr(depth[i]), repr(off)]
                    )
            prev = snap

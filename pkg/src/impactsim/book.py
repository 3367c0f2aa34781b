"""Price-level aggregated limit order book and immutable book snapshots.

Prices are integers in ticks (tick size = 1). Each side of the book keeps
one FIFO queue of resting orders per price level; empty levels are removed
immediately. Snapshots are immutable values that can be handed to any
consumer, serialised to a line record, and rebuilt from one.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Optional

BID = "bid"
ASK = "ask"

DEFAULT_PRICE_MIN = 1
DEFAULT_PRICE_MAX = 500


def opposite(side: str) -> str:
    return ASK if side == BID else BID


@dataclass(frozen=True)
class Order:
    """A resting or incoming limit order."""

    order_id: int
    trader_id: str
    side: str
    price: int
    quantity: int
    submit_time: float


class LobLevel(NamedTuple):
    """One price level: aggregate quantity plus the FIFO queue of order ids."""

    price: int
    quantity: int
    orders: tuple[int, ...]


@dataclass(frozen=True)
class LobSnapshot:
    """Immutable view of the book after one event.

    ``bids`` are in strictly descending price order, ``asks`` strictly
    ascending, so index 0 is the best level on each side.
    """

    bids: tuple[LobLevel, ...]
    asks: tuple[LobLevel, ...]
    event_seq: int
    time: float

    def best_bid(self) -> Optional[tuple[int, int]]:
        """Best (price, aggregate quantity) on the bid side, or None."""
        if not self.bids:
            return None
        lvl = self.bids[0]
        return (lvl.price, lvl.quantity)

    def best_ask(self) -> Optional[tuple[int, int]]:
        """Best (price, aggregate quantity) on the ask side, or None."""
        if not self.asks:
            return None
        lvl = self.asks[0]
        return (lvl.price, lvl.quantity)

    def level(self, side: str, m: int) -> Optional[tuple[int, int]]:
        """The m-th best (price, quantity) on ``side`` (m >= 1), or None.

        Level m is the m-highest bid price or the m-lowest ask price.
        """
        if m < 1:
            raise ValueError("level index must be >= 1")
        levels = self.bids if side == BID else self.asks
        if m > len(levels):
            return None
        lvl = levels[m - 1]
        return (lvl.price, lvl.quantity)

    def mid_price(self) -> Optional[float]:
        """Arithmetic mean of best bid and best ask; None if either absent."""
        if not self.bids or not self.asks:
            return None
        return (self.bids[0].price + self.asks[0].price) / 2.0

    def micro_price(self) -> Optional[float]:
        """Quantity-weighted blend of the best prices; None if either absent.

        Computed as (q_bid * p_ask + q_ask * p_bid) / (q_bid + q_ask): heavy
        bid quantity pushes the estimate toward the ask, so the value moves
        in the direction that excess demand would push traded prices.
        """
        if not self.bids or not self.asks:
            return None
        pb, qb = self.bids[0].price, self.bids[0].quantity
        pa, qa = self.asks[0].price, self.asks[0].quantity
        return (qb * pa + qa * pb) / (qb + qa)

    def depth(self, side: str) -> int:
        """Number of occupied price levels on ``side``."""
        return len(self.bids) if side == BID else len(self.asks)

    def to_line(self) -> str:
        """Serialise as ``time;seq;BID p1:q1 ...;ASK p1:q1 ...``."""
        bid_part = " ".join(f"{l.price}:{l.quantity}" for l in self.bids)
        ask_part = " ".join(f"{l.price}:{l.quantity}" for l in self.asks)
        bid_field = f"BID {bid_part}" if bid_part else "BID"
        ask_field = f"ASK {ask_part}" if ask_part else "ASK"
        return f"{self.time!r};{self.event_seq};{bid_field};{ask_field}"

    @classmethod
    def from_line(cls, line: str) -> "LobSnapshot":
        """Rebuild a snapshot from :meth:`to_line` output.

        FIFO queues are not part of the line format, so the rebuilt levels
        carry empty order-id tuples.
        """
        time_s, seq_s, bid_field, ask_field = line.strip().split(";")

        def parse(field: str, tag: str) -> tuple[LobLevel, ...]:
            if not field.startswith(tag):
                raise ValueError(f"malformed snapshot line: {line!r}")
            body = field[len(tag):].strip()
            if not body:
                return ()
            out = []
            for tok in body.split(" "):
                p_s, q_s = tok.split(":")
                out.append(LobLevel(int(p_s), int(q_s), ()))
            return tuple(out)

        return cls(
            bids=parse(bid_field, "BID"),
            asks=parse(ask_field, "ASK"),
            event_seq=int(seq_s),
            time=float(time_s),
        )

    @classmethod
    def from_levels(
        cls,
        bids: Iterable[tuple[int, int]],
        asks: Iterable[tuple[int, int]],
        event_seq: int = 0,
        time: float = 0.0,
    ) -> "LobSnapshot":
        """Build a snapshot directly from (price, quantity) pairs.

        Intended for tests, replay and analytics on externally supplied
        book states; the FIFO queues are left empty.
        """
        bid_levels = tuple(
            LobLevel(p, q, ()) for p, q in sorted(bids, key=lambda pq: -pq[0])
        )
        ask_levels = tuple(
            LobLevel(p, q, ()) for p, q in sorted(asks, key=lambda pq: pq[0])
        )
        return cls(bids=bid_levels, asks=ask_levels, event_seq=event_seq, time=time)


class OrderBook:
    """Mutable two-sided book; the matching engine's working state.

    Maintains price-sorted levels with FIFO queues keyed by
    (submit_time, order_id). Only the exchange mutates it; everyone else
    sees :class:`LobSnapshot` values.
    """

    def __init__(self, price_min: int = DEFAULT_PRICE_MIN, price_max: int = DEFAULT_PRICE_MAX):
        if price_min < 1 or price_max <= price_min:
            raise ValueError("invalid price range")
        self.price_min = price_min
        self.price_max = price_max
        # per side: price -> FIFO list of Orders, plus a sorted key list
        self._queues: dict[str, dict[int, list[Order]]] = {BID: {}, ASK: {}}
        self._keys: dict[str, list[int]] = {BID: [], ASK: []}  # bids stored as -price
        self._levels: dict[str, dict[int, LobLevel]] = {BID: {}, ASK: {}}
        self._by_id: dict[int, Order] = {}

    # -- queries ---------------------------------------------------------

    def __contains__(self, order_id: int) -> bool:
        return order_id in self._by_id

    def get(self, order_id: int) -> Optional[Order]:
        return self._by_id.get(order_id)

    def best_price(self, side: str) -> Optional[int]:
        keys = self._keys[side]
        if not keys:
            return None
        return -keys[0] if side == BID else keys[0]

    def side_volume(self, side: str) -> int:
        return sum(l.quantity for l in self._levels[side].values())

    def peek_front(self, side: str) -> Optional[Order]:
        """Oldest order at the best price on ``side``."""
        best = self.best_price(side)
        if best is None:
            return None
        return self._queues[side][best][0]

    # -- mutations -------------------------------------------------------

    def insert(self, order: Order) -> None:
        if order.order_id in self._by_id:
            raise ValueError(f"duplicate order id {order.order_id}")
        if not (self.price_min <= order.price <= self.price_max):
            raise ValueError(f"price {order.price} outside [{self.price_min}, {self.price_max}]")
        if order.quantity < 1:
            raise ValueError("quantity must be >= 1")
        queue = self._queues[order.side].get(order.price)
        if queue is None:
            queue = []
            self._queues[order.side][order.price] = queue
            key = -order.price if order.side == BID else order.price
            bisect.insort(self._keys[order.side], key)
        queue.append(order)
        # keep FIFO keyed by (submit_time, order_id); appends are normally
        # already in that order, so only sort when an out-of-order insert occurs
        if len(queue) > 1 and (queue[-2].submit_time, queue[-2].order_id) > (
            order.submit_time,
            order.order_id,
        ):
            queue.sort(key=lambda o: (o.submit_time, o.order_id))
        self._by_id[order.order_id] = order
        self._refresh_level(order.side, order.price)

    def remove(self, order_id: int) -> Order:
        order = self._by_id.pop(order_id)
        queue = self._queues[order.side][order.price]
        queue.remove(order)
        self._drop_if_empty(order.side, order.price)
        return order

    def reduce(self, order_id: int, quantity: int) -> Order:
        """Shrink a resting order in place (partial fill or partial cancel).

        The order keeps its FIFO position; returns the updated order, which
        is removed entirely when its quantity reaches zero.
        """
        order = self._by_id[order_id]
        if quantity < 1 or quantity > order.quantity:
            raise ValueError("invalid reduction quantity")
        if quantity == order.quantity:
            self.remove(order_id)
            return replace(order, quantity=0)
        updated = replace(order, quantity=order.quantity - quantity)
        queue = self._queues[order.side][order.price]
        queue[queue.index(order)] = updated
        self._by_id[order_id] = updated
        self._refresh_level(order.side, order.price)
        return updated

    # -- snapshotting ------------------------------------------------------

    def snapshot(self, event_seq: int, time: float) -> LobSnapshot:
        bids = tuple(self._levels[BID][-k] for k in self._keys[BID])
        asks = tuple(self._levels[ASK][k] for k in self._keys[ASK])
        return LobSnapshot(bids=bids, asks=asks, event_seq=event_seq, time=time)

    # -- internals -------------------------------------------------------

    def _refresh_level(self, side: str, price: int) -> None:
        queue = self._queues[side][price]
        self._levels[side][price] = LobLevel(
            price=price,
            quantity=sum(o.quantity for o in queue),
            orders=tuple(o.order_id for o in queue),
        )

    def _drop_if_empty(self, side: str, price: int) -> None:
        queue = self._queues[side][price]
        if queue:
            self._refresh_level(side, price)
            return
        del self._queues[side][price]
        del self._levels[side][price]
        key = -price if side == BID else price
        idx = bisect.bisect_left(self._keys[side], key)
        self._keys[side].pop(idx)

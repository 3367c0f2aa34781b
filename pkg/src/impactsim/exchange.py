"""Matching engine: limit orders and cancellations against the book.

Processing is strictly sequential; every accepted operation produces exactly
one :class:`BookEvent` with a snapshot of the book after the operation
completed, so downstream analytics see a clean event-numbered stream.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

from .book import ASK, BID, LobSnapshot, Order, OrderBook, opposite

NEW_ORDER = "new_order"
CANCEL = "cancel"
TRADE = "trade"
PARTIAL_FILL = "partial_fill"


class OrderRejected(Exception):
    """Submission failed validation (bad price/quantity or unknown trader)."""


@dataclass(frozen=True)
class Trade:
    """One fill between two counterparties, at the resting order's price."""

    time: float
    price: int
    quantity: int
    buyer_id: str
    seller_id: str
    aggressor_side: str


@dataclass(frozen=True)
class BookEvent:
    """One book change: what happened plus the snapshot after it."""

    seq: int
    time: float
    kind: str
    trader_id: str
    order_id: Optional[int]
    side: Optional[str]
    price: Optional[int]
    quantity: Optional[int]
    trades: tuple[Trade, ...]
    snapshot_after: LobSnapshot


@dataclass
class Exchange:
    """One exchange instance owns one book and its tape."""

    price_min: int = 1
    price_max: int = 500
    _book: OrderBook = field(init=False)
    _traders: set[str] = field(init=False, default_factory=set)
    _resting: dict[str, int] = field(init=False, default_factory=dict)
    _tape: list[Trade] = field(init=False, default_factory=list)
    _events: list[BookEvent] = field(init=False, default_factory=list)
    _commands: list[tuple] = field(init=False, default_factory=list)
    _seq: int = field(init=False, default=0)
    _next_order_id: int = field(init=False, default=1)

    def __post_init__(self):
        self._book = OrderBook(self.price_min, self.price_max)

    # -- registration ------------------------------------------------------

    def register_trader(self, trader_id: str) -> None:
        self._traders.add(trader_id)
        self._commands.append(("register", trader_id))

    # -- queries -----------------------------------------------------------

    @property
    def initial_snapshot(self) -> LobSnapshot:
        return LobSnapshot(bids=(), asks=(), event_seq=0, time=0.0)

    def snapshot(self) -> LobSnapshot:
        """Book state as of the latest event."""
        if self._events:
            return self._events[-1].snapshot_after
        return self.initial_snapshot

    def tape(self) -> tuple[Trade, ...]:
        """All trades so far, in time order (append-only)."""
        return tuple(self._tape)

    def events(self) -> tuple[BookEvent, ...]:
        return tuple(self._events)

    def commands(self) -> tuple[tuple, ...]:
        """The raw operation log; replaying it reconstructs the book."""
        return tuple(self._commands)

    def resting_order(self, trader_id: str) -> Optional[Order]:
        oid = self._resting.get(trader_id)
        return self._book.get(oid) if oid is not None else None

    # -- operations ----------------------------------------------------------

    def submit(
        self, trader_id: str, side: str, price: int, quantity: int, time: float
    ) -> tuple[list[Trade], BookEvent]:
        """Process a limit order; crossing volume fills, the rest rests.

        Any earlier resting order from the same trader is withdrawn first
        (one live order per trader). Fills execute at the resting orders'
        prices, best level first, FIFO within a level.
        """
        if trader_id not in self._traders:
            raise OrderRejected(f"unknown trader {trader_id!r}")
        if side not in (BID, ASK):
            raise OrderRejected(f"bad side {side!r}")
        if not isinstance(price, int) or not (self.price_min <= price <= self.price_max):
            raise OrderRejected(f"price {price!r} outside [{self.price_min}, {self.price_max}]")
        if not isinstance(quantity, int) or quantity < 1:
            raise OrderRejected(f"bad quantity {quantity!r}")

        self._commands.append(("submit", trader_id, side, price, quantity, time))

        prior = self._resting.pop(trader_id, None)
        if prior is not None and prior in self._book:
            self._book.remove(prior)

        order_id = self._next_order_id
        self._next_order_id += 1

        remaining = quantity
        trades: list[Trade] = []
        opp = opposite(side)
        while remaining > 0:
            best = self._book.best_price(opp)
            if best is None:
                break
            crosses = price >= best if side == BID else price <= best
            if not crosses:
                break
            resting = self._book.peek_front(opp)
            fill = min(remaining, resting.quantity)
            if side == BID:
                buyer, seller = trader_id, resting.trader_id
            else:
                buyer, seller = resting.trader_id, trader_id
            trade = Trade(
                time=time,
                price=resting.price,
                quantity=fill,
                buyer_id=buyer,
                seller_id=seller,
                aggressor_side=side,
            )
            trades.append(trade)
            self._tape.append(trade)
            self._book.reduce(resting.order_id, fill)
            if resting.order_id not in self._book:
                self._resting.pop(resting.trader_id, None)
            remaining -= fill

        if remaining > 0:
            self._book.insert(
                Order(
                    order_id=order_id,
                    trader_id=trader_id,
                    side=side,
                    price=price,
                    quantity=remaining,
                    submit_time=time,
                )
            )
            self._resting[trader_id] = order_id

        if trades and remaining > 0:
            kind = PARTIAL_FILL
        elif trades:
            kind = TRADE
        else:
            kind = NEW_ORDER
        event = self._publish(kind, trader_id, order_id, side, price, quantity, time, tuple(trades))
        return trades, event

    def cancel(
        self, trader_id: str, order_id: int, time: float, quantity: Optional[int] = None
    ) -> Optional[BookEvent]:
        """Withdraw a resting order, or ``quantity`` units of it.

        Returns None (a no-op distinguishable from success) when the order
        is unknown or not owned by ``trader_id``.
        """
        order = self._book.get(order_id)
        if order is None or order.trader_id != trader_id:
            return None
        self._commands.append(("cancel", trader_id, order_id, time, quantity))
        if quantity is None or quantity >= order.quantity:
            self._book.remove(order_id)
            removed = order.quantity
        else:
            self._book.reduce(order_id, quantity)
            removed = quantity
        if order_id not in self._book and self._resting.get(trader_id) == order_id:
            del self._resting[trader_id]
        return self._publish(CANCEL, trader_id, order_id, order.side, order.price, removed, time, ())

    # -- exports --------------------------------------------------------------

    def write_tape_csv(self, path) -> None:
        """Export the tape as ``time,price,quantity,buyer,seller,aggressor``."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time", "price", "quantity", "buyer", "seller", "aggressor"])
            for t in self._tape:
                writer.writerow([repr(t.time), t.price, t.quantity, t.buyer_id, t.seller_id, t.aggressor_side])

    # -- internals ------------------------------------------------------------

    def _publish(self, kind, trader_id, order_id, side, price, quantity, time, trades) -> BookEvent:
        self._seq += 1
        event = BookEvent(
            seq=self._seq,
            time=time,
            kind=kind,
            trader_id=trader_id,
            order_id=order_id,
            side=side,
            price=price,
            quantity=quantity,
            trades=trades,
            snapshot_after=self._book.snapshot(self._seq, time),
        )
        self._events.append(event)
        return event


def replay(commands, price_min: int = 1, price_max: int = 500) -> Exchange:
    """Run a recorded command log through a fresh exchange.

    Feeding back :meth:`Exchange.commands` reproduces the original event
    stream, tape and final snapshot exactly.
    """
    ex = Exchange(price_min=price_min, price_max=price_max)
    for cmd in commands:
        op = cmd[0]
        if op == "register":
            ex.register_trader(cmd[1])
        elif op == "submit":
            ex.submit(*cmd[1:])
        elif op == "cancel":
            ex.cancel(*cmd[1:])
        else:
            raise ValueError(f"unknown command {op!r}")
    return ex

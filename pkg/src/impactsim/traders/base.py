"""Trader-agent base class and the market-update record traders consume."""

from __future__ import annotations

import random
from typing import NamedTuple, Optional

from ..book import ASK, BID, LobSnapshot
from ..exchange import Trade
from ..imbalance import LevelDelta

BUYER = "buyer"
SELLER = "seller"


class MarketUpdate(NamedTuple):
    """One book event as seen by every trader in a session.

    The improvement/hit flags are precomputed once per event relative to the
    previous event's best levels; ``deltas`` carries the per-level flow
    vector of the transition so imbalance windows need not recompute it.
    """

    time: float
    seq: int
    kind: str
    trade: Optional[Trade]
    snapshot: LobSnapshot
    prev_snapshot: Optional[LobSnapshot]
    best_bid: Optional[int]
    best_bid_qty: int
    best_ask: Optional[int]
    best_ask_qty: int
    bid_improved: bool
    bid_hit: bool
    ask_improved: bool
    ask_lifted: bool
    deltas: Optional[tuple[LevelDelta, ...]]


class Trader:
    """Base class: assignment handling, legality clipping, bookkeeping.

    Subclasses implement ``_price`` (and usually ``observe``). A trader with
    no live assignment never quotes. Quotes are clipped so a buyer never
    bids above its limit and a seller never asks below it.
    """

    NAME = "BASE"

    def __init__(
        self,
        trader_id: str,
        role: str,
        rng: random.Random,
        price_min: int = 1,
        price_max: int = 500,
    ):
        if role not in (BUYER, SELLER):
            raise ValueError(f"bad role {role!r}")
        self.trader_id = trader_id
        self.role = role
        self.rng = rng
        self.price_min = price_min
        self.price_max = price_max
        self.limit: Optional[int] = None
        self.balance = 0
        self.n_trades = 0

    @property
    def side(self) -> str:
        return BID if self.role == BUYER else ASK

    @property
    def active(self) -> bool:
        return self.limit is not None

    # -- session hooks -----------------------------------------------------

    def assign(self, limit: int, time: float) -> None:
        """Receive a customer order: the private limit price to work."""
        self.limit = limit

    def quote(self, snapshot: LobSnapshot, time: float) -> Optional[int]:
        """Price this trader wants on the book now, or None for no quote."""
        if self.limit is None:
            return None
        price = self._price(snapshot, time)
        if price is None:
            return None
        price = int(price)
        if self.role == BUYER:
            price = min(price, self.limit)
        else:
            price = max(price, self.limit)
        return max(self.price_min, min(self.price_max, price))

    def observe(self, update: MarketUpdate) -> None:
        """React to one book event (adaptive strategies learn here)."""

    def on_fill(self, trade: Trade, time: float) -> None:
        """Bank the surplus against the current limit and retire the assignment."""
        if self.limit is None:
            return
        if self.role == BUYER:
            self.balance += (self.limit - trade.price) * trade.quantity
        else:
            self.balance += (trade.price - self.limit) * trade.quantity
        self.n_trades += 1
        self.limit = None

    # -- strategy ------------------------------------------------------------

    def _price(self, snapshot: LobSnapshot, time: float) -> Optional[int]:
        raise NotImplementedError

"""Zero-Intelligence-Plus trader: Widrow-Hoff profit-margin adaptation.

Follows Cliff's original design: each trader keeps a profit margin on its
limit price and nudges the margin toward a noisy target price whenever
market events show its current quote is uncompetitive (or could be
greedier). Per-trader hyperparameters are drawn once from the classic
uniform ranges.
"""

from __future__ import annotations

from random import Random
from typing import Optional

from ..book import LobSnapshot
from .base import BUYER, SELLER, MarketUpdate, Trader

# (lo, hi) draws per trader, after Cliff 1997
LEARN_RATE_RANGE = (0.1, 0.5)
MOMENTUM_RANGE = (0.0, 0.1)
TARGET_ABS_RANGE = (0.01, 0.05)
TARGET_REL_RANGE = (0.01, 0.05)
INIT_MARGIN_RANGE = (0.05, 0.35)


class ZipTrader(Trader):
    NAME = "ZIP"

    def __init__(
        self,
        trader_id: str,
        role: str,
        rng: Random,
        price_min: int = 1,
        price_max: int = 500,
    ):
        super().__init__(trader_id, role, rng, price_min, price_max)
        self.learn_rate = rng.uniform(*LEARN_RATE_RANGE)
        self.momentum = rng.uniform(*MOMENTUM_RANGE)
        self.target_abs = rng.uniform(*TARGET_ABS_RANGE)
        self.target_rel = rng.uniform(*TARGET_REL_RANGE)
        margin0 = rng.uniform(*INIT_MARGIN_RANGE)
        self.margin = -margin0 if role == BUYER else margin0
        self.prev_change = 0.0
        self.price: Optional[int] = None  # last computed own quote price
        self.last_limit: Optional[int] = None

    # -- quoting -----------------------------------------------------------

    def assign(self, limit: int, time: float) -> None:
        super().assign(limit, time)
        self.last_limit = limit

    def _price(self, snapshot: LobSnapshot, time: float) -> Optional[int]:
        self.price = int(round(self.limit * (1.0 + self.margin)))
        return self.price

    # -- learning ------------------------------------------------------------

    def _target_up(self, price: float) -> float:
        """A price a little above ``price`` (noisy, per-trader constants)."""
        return price * (1.0 + self.target_rel * self.rng.random()) + self.target_abs * self.rng.random()

    def _target_down(self, price: float) -> float:
        return price * (1.0 - self.target_rel * self.rng.random()) - self.target_abs * self.rng.random()

    def _willing(self, price: int) -> bool:
        if not self.active or self.price is None:
            return False
        return self.price >= price if self.role == BUYER else self.price <= price

    def _adjust_margin(self, target: float) -> None:
        """Widrow-Hoff-with-momentum step of the quote price toward target;
        only adopted if the implied margin stays on the profitable side."""
        change = (1.0 - self.momentum) * self.learn_rate * (target - self.price) + self.momentum * self.prev_change
        self.prev_change = change
        new_margin = (self.price + change) / self.last_limit - 1.0
        if self.role == BUYER:
            if new_margin < 0.0:
                self.margin = new_margin
        else:
            if new_margin > 0.0:
                self.margin = new_margin
        self.price = int(round(self.last_limit * (1.0 + self.margin)))

    def observe(self, update: MarketUpdate) -> None:
        if self.price is None or self.last_limit is None:
            return  # nothing learnable before the first own quote
        deal = update.trade is not None
        trade_price = update.trade.price if deal else None

        if self.role == SELLER:
            if deal:
                if self.price <= trade_price:
                    # sold out too cheap? raise the margin
                    self._adjust_margin(self._target_up(trade_price))
                elif update.ask_lifted and self.active and not self._willing(trade_price):
                    # a deal went through that this trader priced itself out of
                    self._adjust_margin(self._target_down(trade_price))
            elif update.ask_improved and self.price > update.best_ask:
                target = (
                    self._target_up(update.best_bid)
                    if update.best_bid is not None
                    else float(self.price_max)
                )
                self._adjust_margin(target)
        else:
            if deal:
                if self.price >= trade_price:
                    self._adjust_margin(self._target_down(trade_price))
                elif update.bid_hit and self.active and not self._willing(trade_price):
                    self._adjust_margin(self._target_up(trade_price))
            elif update.bid_improved and self.price < update.best_bid:
                target = (
                    self._target_down(update.best_ask)
                    if update.best_ask is not None
                    else float(self.price_min)
                )
                self._adjust_margin(target)

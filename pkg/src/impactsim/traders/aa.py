"""Adaptive-Aggressiveness trader.

Two learning loops drive the quote, per Vytelingum's design:

* long-term: an equilibrium-price estimate (recency-weighted average of
  recent trade prices) plus a volatility-driven shape parameter ``theta``;
* short-term: a scalar aggressiveness ``r`` in [-1, 1], nudged by
  Widrow-Hoff steps toward the aggressiveness implied by observed
  competitive shouts and trades.

``r`` and ``theta`` map to a target price through exponential curves that
bend between the equilibrium estimate and the trader's limit; the emitted
quote then jumps a fraction of the way from the current touch toward that
target.
"""

from __future__ import annotations

import math
from collections import deque
from random import Random
from typing import Optional

from ..book import LobSnapshot
from .base import BUYER, SELLER, MarketUpdate, Trader

THETA_MIN = -8.0
THETA_MAX = 2.0
_EPS = 1e-8


class AaTrader(Trader):
    NAME = "AA"

    def __init__(
        self,
        trader_id: str,
        role: str,
        rng: Random,
        price_min: int = 1,
        price_max: int = 500,
        eta: float = 3.0,
        lambda_rel: float = 0.02,
        lambda_abs: float = 0.01,
        beta_short: float = 0.4,
        beta_long: float = 0.4,
        gamma: float = 2.0,
        est_memory: int = 5,
        est_forget: float = 0.9,
        init_margin: Optional[float] = None,
    ):
        super().__init__(trader_id, role, rng, price_min, price_max)
        self.eta = eta
        self.lambda_rel = lambda_rel
        self.lambda_abs = lambda_abs
        self.beta_short = beta_short
        self.beta_long = beta_long
        self.gamma = gamma
        # heterogeneous cold-start margins let some pairs cross early and
        # ignite the transaction history the estimator feeds on
        self.init_margin = init_margin if init_margin is not None else rng.uniform(0.05, 0.3)
        self.r = rng.uniform(-0.3, 0.3)
        self.theta = -5.0 * rng.random()
        self.eq_estimate: Optional[float] = None
        self._trades: deque[float] = deque(maxlen=est_memory)
        self._forget = est_forget
        self._vol_min: Optional[float] = None
        self._vol_max: Optional[float] = None

    # -- long-term learning ---------------------------------------------------

    def _update_estimate(self, price: float) -> None:
        self._trades.append(price)
        weight = 1.0
        num = den = 0.0
        for p in reversed(self._trades):
            num += weight * p
            den += weight
            weight *= self._forget
        self.eq_estimate = num / den

        n = len(self._trades)
        if n < 2:
            return
        var = sum((p - self.eq_estimate) ** 2 for p in self._trades) / n
        vol = math.sqrt(var) / self.eq_estimate
        self._vol_min = vol if self._vol_min is None else min(self._vol_min, vol)
        self._vol_max = vol if self._vol_max is None else max(self._vol_max, vol)
        if self._vol_max > self._vol_min:
            ratio = (vol - self._vol_min) / (self._vol_max - self._vol_min)
            theta_star = (THETA_MAX - THETA_MIN) * (
                1.0 - ratio * math.exp(self.gamma * (ratio - 1.0))
            ) + THETA_MIN
            self.theta += self.beta_long * (theta_star - self.theta)

    # -- aggressiveness curves -------------------------------------------------

    def _curve(self, r: float) -> float:
        """(e^{r theta} - 1) / (e^{theta} - 1), linear in the theta -> 0 limit."""
        if abs(self.theta) < _EPS:
            return r
        return (math.exp(r * self.theta) - 1.0) / (math.exp(self.theta) - 1.0)

    def _curve_inv(self, y: float) -> float:
        y = min(1.0, max(0.0, y))
        if abs(self.theta) < _EPS:
            return y
        return math.log(1.0 + y * (math.exp(self.theta) - 1.0)) / self.theta

    def _target(self) -> float:
        """Target price implied by current r, theta and equilibrium estimate."""
        p_eq = self.eq_estimate
        lim = float(self.limit if self.limit is not None else self._last_limit())
        r = self.r
        if self.role == BUYER:
            if lim >= p_eq:  # intramarginal buyer
                if r >= 0:
                    tau = p_eq + (lim - p_eq) * self._curve(r)
                else:
                    tau = p_eq * (1.0 - self._curve(-r))
            else:
                tau = lim if r >= 0 else lim * (1.0 - self._curve(-r))
        else:
            if lim <= p_eq:  # intramarginal seller
                if r >= 0:
                    tau = p_eq - (p_eq - lim) * self._curve(r)
                else:
                    tau = p_eq + (self.price_max - p_eq) * self._curve(-r)
            else:
                tau = lim if r >= 0 else lim + (self.price_max - lim) * self._curve(-r)
        return min(float(self.price_max), max(float(self.price_min), tau))

    def _r_for_price(self, price: float) -> float:
        """Aggressiveness that would make ``price`` the target."""
        p_eq = self.eq_estimate
        lim = float(self.limit if self.limit is not None else self._last_limit())
        if self.role == BUYER:
            if lim >= p_eq:
                if price >= p_eq:
                    if lim - p_eq < _EPS:
                        return 1.0
                    return self._curve_inv((price - p_eq) / (lim - p_eq))
                return -self._curve_inv(1.0 - price / p_eq)
            if price >= lim:
                return 0.0
            return -self._curve_inv(1.0 - price / lim)
        if lim <= p_eq:
            if price <= p_eq:
                if p_eq - lim < _EPS:
                    return 1.0
                return self._curve_inv((p_eq - price) / (p_eq - lim))
            return -self._curve_inv((price - p_eq) / (self.price_max - p_eq))
        if price <= lim:
            return 0.0
        return -self._curve_inv((price - lim) / (self.price_max - lim))

    def _last_limit(self) -> int:
        # between assignments, fall back to a midrange reference price
        return self._limit_memo if self._limit_memo is not None else (self.price_min + self.price_max) // 2

    _limit_memo: Optional[int] = None

    def assign(self, limit: int, time: float) -> None:
        super().assign(limit, time)
        self._limit_memo = limit

    # -- short-term learning ------------------------------------------------

    def _learn_r(self, toward_price: float, more_aggressive: bool) -> None:
        r_shout = self._r_for_price(toward_price)
        if more_aggressive:
            delta = (1.0 + self.lambda_rel) * r_shout + self.lambda_abs
        else:
            delta = (1.0 - self.lambda_rel) * r_shout - self.lambda_abs
        self.r += self.beta_short * (delta - self.r)
        self.r = min(1.0, max(-1.0, self.r))

    def observe(self, update: MarketUpdate) -> None:
        if update.trade is not None:
            price = float(update.trade.price)
            self._update_estimate(price)
            tau = self._target()
            if self.role == BUYER:
                self._learn_r(price, more_aggressive=tau < price)
            else:
                self._learn_r(price, more_aggressive=tau > price)
            return
        if self.eq_estimate is None:
            return
        if self.role == BUYER and update.bid_improved and update.best_bid is not None:
            if self._target() <= update.best_bid:
                self._learn_r(float(update.best_bid), more_aggressive=True)
        elif self.role == SELLER and update.ask_improved and update.best_ask is not None:
            if self._target() >= update.best_ask:
                self._learn_r(float(update.best_ask), more_aggressive=True)

    # -- quoting ------------------------------------------------------------

    def _price(self, snapshot: LobSnapshot, time: float) -> Optional[int]:
        if self.eq_estimate is None:
            # cold start: fixed margin off the limit until a first trade exists
            if self.role == BUYER:
                return int(round(self.limit * (1.0 - self.init_margin)))
            return int(round(self.limit * (1.0 + self.init_margin)))
        tau = self._target()
        if self.role == BUYER:
            best_ask = snapshot.best_ask()
            if best_ask is not None and best_ask[0] <= tau:
                return best_ask[0]
            base = snapshot.best_bid()
            ref = base[0] if base is not None else self.price_min
            return int(round(ref + (tau - ref) / self.eta))
        best_bid = snapshot.best_bid()
        if best_bid is not None and best_bid[0] >= tau:
            return best_bid[0]
        base = snapshot.best_ask()
        ref = base[0] if base is not None else self.price_max
        return int(round(ref - (ref - tau) / self.eta))

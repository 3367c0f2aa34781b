"""Imbalance-sensitive extensions: the impact price adjustment and the
ZZISHV / ZZIZIP / ZZIAA wrappers.

The adjustment is strategy-agnostic: whatever price the underlying
strategy produces is pulled a Widrow-Hoff step toward a target equal to a
benchmark price (the mid, when one exists) plus the scalar imbalance
offset. When the imbalance window shows no pressure at all, every wrapped
strategy quotes exactly what its base strategy would.
"""

from __future__ import annotations

import math
from random import Random
from typing import Optional

from ..book import LobSnapshot
from ..imbalance import ImbalanceParams, MlofiWindow, offset
from .aa import AaTrader
from .base import BUYER, SELLER, MarketUpdate, Trader
from .shaver import Shaver
from .zip import ZipTrader

DEFAULT_IMPACT_RATE = 0.5


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))


def impact_adjust(
    p_underlying: int,
    snapshot: LobSnapshot,
    window: MlofiWindow,
    params: ImbalanceParams,
    rate: float,
) -> int:
    """Pull an underlying quote toward benchmark + imbalance offset.

    The benchmark is the mid-price when one exists, otherwise the
    underlying price itself; ``rate`` is the Widrow-Hoff step size. The
    result is rounded to the tick grid; legality clipping is the caller's
    job. An empty window contributes no offset.
    """
    off = offset(window, params) if len(window) > 0 else 0.0
    mid = snapshot.mid_price()
    benchmark = mid if mid is not None else float(p_underlying)
    target = benchmark + off
    return _round_half_away(p_underlying + rate * (target - p_underlying))


class ImpactMixin:
    """Maintains the owner's imbalance window and its scalar offset.

    ``zero_offset`` forces the offset to zero: a diagnostic switch that
    makes a wrapped trader provably identical to its base strategy.
    """

    def _init_impact(
        self,
        impact_params: Optional[ImbalanceParams],
        impact_rate: float,
        zero_offset: bool,
    ) -> None:
        self.impact_params = impact_params or ImbalanceParams()
        self.impact_rate = impact_rate
        self.zero_offset = zero_offset
        self.window = MlofiWindow(
            levels=self.impact_params.levels,
            length=self.impact_params.window_events,
        )

    def observe(self, update: MarketUpdate) -> None:
        super().observe(update)
        if self.zero_offset:
            return
        if update.deltas is not None:
            if len(update.deltas) >= self.window.levels:
                self.window.push_delta(update.deltas)
            elif update.prev_snapshot is not None:
                self.window.push(update.prev_snapshot, update.snapshot)
        elif update.prev_snapshot is not None:
            self.window.push(update.prev_snapshot, update.snapshot)

    def _offset(self) -> float:
        if self.zero_offset or len(self.window) == 0:
            return 0.0
        return offset(self.window, self.impact_params)


class ZziZip(ImpactMixin, ZipTrader):
    NAME = "ZZIZIP"

    def __init__(self, trader_id, role, rng: Random, price_min=1, price_max=500,
                 impact_params: Optional[ImbalanceParams] = None,
                 impact_rate: float = DEFAULT_IMPACT_RATE, zero_offset: bool = False):
        super().__init__(trader_id, role, rng, price_min, price_max)
        self._init_impact(impact_params, impact_rate, zero_offset)

    def _price(self, snapshot: LobSnapshot, time: float) -> Optional[int]:
        base = super()._price(snapshot, time)
        if base is None or self._offset() == 0.0:
            return base
        return impact_adjust(base, snapshot, self.window, self.impact_params, self.impact_rate)


class ZziAa(ImpactMixin, AaTrader):
    NAME = "ZZIAA"

    def __init__(self, trader_id, role, rng: Random, price_min=1, price_max=500,
                 impact_params: Optional[ImbalanceParams] = None,
                 impact_rate: float = DEFAULT_IMPACT_RATE, zero_offset: bool = False,
                 **aa_kwargs):
        super().__init__(trader_id, role, rng, price_min, price_max, **aa_kwargs)
        self._init_impact(impact_params, impact_rate, zero_offset)

    def _price(self, snapshot: LobSnapshot, time: float) -> Optional[int]:
        base = super()._price(snapshot, time)
        if base is None or self._offset() == 0.0:
            return base
        return impact_adjust(base, snapshot, self.window, self.impact_params, self.impact_rate)


class ZziShaver(ImpactMixin, Shaver):
    """SHVR that parks its quote away from the touch under imbalance pressure.

    A seller seeing a positive offset (demand surplus, prices expected to
    rise) quotes best ask + offset and waits instead of undercutting; a
    buyer seeing a negative offset quotes best bid + offset (a lower bid).
    With no pressure it is exactly SHVR. ``holdout_cap`` bounds how far the
    quote parks from the touch, keeping it inside the price band the rest
    of the market can actually reach.
    """

    NAME = "ZZISHV"

    def __init__(self, trader_id, role, rng: Random, price_min=1, price_max=500,
                 impact_params: Optional[ImbalanceParams] = None,
                 impact_rate: float = DEFAULT_IMPACT_RATE, zero_offset: bool = False,
                 holdout_threshold: float = 0.0,
                 holdout_cap: Optional[int] = None):
        super().__init__(trader_id, role, rng, price_min, price_max)
        self._init_impact(impact_params, impact_rate, zero_offset)
        self.holdout_threshold = holdout_threshold
        self.holdout_cap = holdout_cap

    def _holdout(self, off: float) -> int:
        ticks = _round_half_away(off)
        if self.holdout_cap is None:
            return ticks
        return max(-self.holdout_cap, min(self.holdout_cap, ticks))

    def _price(self, snapshot: LobSnapshot, time: float) -> Optional[int]:
        off = self._offset()
        if self.role == SELLER and off > self.holdout_threshold:
            best = snapshot.best_ask()
            if best is not None:
                return best[0] + self._holdout(off)
        elif self.role == BUYER and off < -self.holdout_threshold:
            best = snapshot.best_bid()
            if best is not None:
                return best[0] + self._holdout(off)
        return super()._price(snapshot, time)

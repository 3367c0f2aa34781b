"""Non-adaptive shaving strategies: SHVR and its imbalance-aware variant ISHV."""

from __future__ import annotations

import math
from random import Random
from typing import Optional

from ..book import LobSnapshot
from ..imbalance import delta_m
from .base import BUYER, Trader


def round_shave(x: float) -> int:
    """Round a shave amount to ticks, ties away from zero, so the defensive
    shave is never understated."""
    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))


class Shaver(Trader):
    """Undercut/overbid the touch by one tick; quote at limit if there is
    no reference price on the trader's own side."""

    NAME = "SHVR"

    def _price(self, snapshot: LobSnapshot, time: float) -> Optional[int]:
        if self.role == BUYER:
            best = snapshot.best_bid()
            return self.limit if best is None else best[0] + 1
        best = snapshot.best_ask()
        return self.limit if best is None else best[0] - 1


class ImbalanceShaver(Shaver):
    """SHVR with a top-of-book imbalance response.

    When the micro/mid gap signals prices moving against this trader
    (rising for a buyer, falling for a seller), the shave grows linearly
    with the gap: ``shave_base + shave_slope * |gap|`` ticks. Otherwise it
    behaves exactly like SHVR. Both constants and the significance
    threshold on the gap are parameters.
    """

    NAME = "ISHV"

    def __init__(
        self,
        trader_id: str,
        role: str,
        rng: Random,
        price_min: int = 1,
        price_max: int = 500,
        shave_base: int = 2,
        shave_slope: float = 1.0,
        significance: float = 0.0,
    ):
        super().__init__(trader_id, role, rng, price_min, price_max)
        if shave_base < 1 or shave_slope < 0:
            raise ValueError("shave_base must be >= 1 and shave_slope >= 0")
        self.shave_base = shave_base
        self.shave_slope = shave_slope
        self.significance = significance

    def _price(self, snapshot: LobSnapshot, time: float) -> Optional[int]:
        gap = delta_m(snapshot)
        if gap is None:
            return self.limit
        if self.role == BUYER:
            if gap > self.significance:
                shave = round_shave(self.shave_base + self.shave_slope * abs(gap))
                return snapshot.best_bid()[0] + shave
            return super()._price(snapshot, time)
        if gap < -self.significance:
            shave = round_shave(self.shave_base + self.shave_slope * abs(gap))
            return snapshot.best_ask()[0] - shave
        return super()._price(snapshot, time)

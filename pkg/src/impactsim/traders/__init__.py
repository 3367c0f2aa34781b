"""Trader-agent catalogue and the name-keyed strategy registry."""

from __future__ import annotations

from random import Random
from typing import Optional

from ..imbalance import ImbalanceParams
from .aa import AaTrader
from .base import BUYER, SELLER, MarketUpdate, Trader
from .impact import DEFAULT_IMPACT_RATE, ZziAa, ZziShaver, ZziZip, impact_adjust
from .shaver import ImbalanceShaver, Shaver
from .zip import ZipTrader

STRATEGIES: dict[str, type[Trader]] = {
    cls.NAME: cls
    for cls in (Shaver, ImbalanceShaver, ZipTrader, AaTrader, ZziShaver, ZziZip, ZziAa)
}

IMPACT_STRATEGIES = frozenset(("ZZISHV", "ZZIZIP", "ZZIAA"))


def build_trader(
    strategy: str,
    trader_id: str,
    role: str,
    rng: Random,
    price_min: int = 1,
    price_max: int = 500,
    params: Optional[dict] = None,
) -> Trader:
    """Instantiate a strategy by registry name.

    ``params`` are passed through as keyword arguments; for impact-sensitive
    strategies the imbalance keys (``scale_c``, ``decay_alpha``, ``levels``,
    ``window_events``) are folded into an :class:`ImbalanceParams`.
    """
    if strategy not in STRATEGIES:
        raise KeyError(f"unknown strategy {strategy!r}; known: {sorted(STRATEGIES)}")
    cls = STRATEGIES[strategy]
    kwargs = dict(params or {})
    if strategy in IMPACT_STRATEGIES:
        imbalance_keys = {"scale_c", "decay_alpha", "levels", "window_events"}
        overrides = {k: kwargs.pop(k) for k in list(kwargs) if k in imbalance_keys}
        if overrides or "impact_params" not in kwargs:
            kwargs["impact_params"] = ImbalanceParams(**overrides)
    return cls(trader_id, role, rng, price_min=price_min, price_max=price_max, **kwargs)


__all__ = [
    "AaTrader",
    "BUYER",
    "DEFAULT_IMPACT_RATE",
    "ImbalanceShaver",
    "IMPACT_STRATEGIES",
    "MarketUpdate",
    "SELLER",
    "STRATEGIES",
    "Shaver",
    "Trader",
    "ZipTrader",
    "ZziAa",
    "ZziShaver",
    "ZziZip",
    "build_trader",
    "impact_adjust",
]

"""Declarative configuration files (INI: key-value with nested sections).

Two entry points: :func:`parse_session_config` for a single market session
(needs ``[trader.*]`` roster sections) and :func:`parse_ab_design` for an
A:B experiment (needs ``[experiment]``). Shared sections:

* ``[session]`` -- duration, step, replenish_interval, price range, seed
* ``[schedule.buyers]`` / ``[schedule.sellers]`` -- limit-price generators
* ``[block.NAME]`` -- one injected block order per section
* ``[strategy.NAME]`` -- parameter overrides for one strategy
* ``[imbalance]`` -- imbalance-window constants for impact-sensitive
  strategies (lower precedence than ``[strategy.NAME]``)

A complete annotated example lives in the README.
"""

from __future__ import annotations

import configparser
from dataclasses import replace
from typing import Optional

from .experiments import AbDesign
from .session import (
    DEFAULT_DURATION,
    DEFAULT_REPLENISH,
    DEFAULT_SCHEDULE_RANGE,
    BlockOrder,
    ConfigError,
    Schedule,
    SessionConfig,
    TraderSpec,
    evenly_spaced,
)
from .traders import BUYER, IMPACT_STRATEGIES, SELLER, STRATEGIES

_IMBALANCE_KEYS = ("scale_c", "decay_alpha", "levels", "window_events")


def _coerce(raw: str):
    text = raw.strip()
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def _section(cp: configparser.ConfigParser, name: str) -> dict:
    if not cp.has_section(name):
        return {}
    return {k: _coerce(v) for k, v in cp.items(name)}


def _parse_limits(raw: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in raw.replace(",", " ").split())


def _parse_schedule(
    cp: configparser.ConfigParser,
    name: str,
    role: str,
    traders_on_side: Optional[int],
    default_interval: float,
) -> Optional[Schedule]:
    if not cp.has_section(name):
        return None
    raw = dict(cp.items(name))
    mode = raw.get("mode", "list").strip()
    interval = float(raw.get("interval", default_interval))
    replenish = raw.get("replenish", "periodic").strip()
    low, high = DEFAULT_SCHEDULE_RANGE
    low = int(raw.get("low", low))
    high = int(raw.get("high", high))
    if mode == "range":
        return Schedule(role=role, mode="range", low=low, high=high,
                        interval=interval, replenish=replenish)
    if "limits" in raw:
        limits = _parse_limits(raw["limits"])
    elif traders_on_side:
        limits = evenly_spaced(low, high, traders_on_side)
    else:
        raise ConfigError(f"[{name}] needs 'limits' (or an experiment to size them from)")
    return Schedule(role=role, mode="list", limits=limits,
                    interval=interval, replenish=replenish)


def _parse_blocks(cp: configparser.ConfigParser) -> tuple[BlockOrder, ...]:
    blocks = []
    for section in cp.sections():
        if not section.startswith("block."):
            continue
        raw = _section(cp, section)
        if "fire_time" not in raw:
            raise ConfigError(f"[{section}] needs fire_time")
        blocks.append(
            BlockOrder(
                fire_time=float(raw["fire_time"]),
                side=str(raw.get("side", "bid")),
                level_offset=int(raw.get("level_offset", 1)),
                quantity=int(raw.get("quantity", 100)),
            )
        )
    blocks.sort(key=lambda b: b.fire_time)
    return tuple(blocks)


def _strategy_params(cp: configparser.ConfigParser, strategy: str) -> dict:
    params = {}
    if strategy in IMPACT_STRATEGIES:
        imbalance = _section(cp, "imbalance")
        params.update({k: v for k, v in imbalance.items() if k in _IMBALANCE_KEYS})
    params.update(_section(cp, f"strategy.{strategy}"))
    return params


def _read(text: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return cp


def parse_ab_design(text: str) -> AbDesign:
    """Build an AbDesign from config text; raises ConfigError when invalid."""
    cp = _read(text)
    if not cp.has_section("experiment"):
        raise ConfigError("missing [experiment] section")
    exp = _section(cp, "experiment")
    for key in ("type_a", "type_b"):
        if key not in exp:
            raise ConfigError(f"[experiment] needs {key}")
        if exp[key] not in STRATEGIES:
            raise ConfigError(f"unknown strategy {exp[key]!r}")
    sess = _section(cp, "session")
    n = int(exp.get("traders_per_side", 10))
    replenish = float(sess.get("replenish_interval", DEFAULT_REPLENISH))
    design = AbDesign(
        type_a=str(exp["type_a"]),
        type_b=str(exp["type_b"]),
        n_per_side=n,
        trials=int(exp.get("trials", 100)),
        master_seed=int(exp.get("seed", 1)),
        duration=float(sess.get("duration", DEFAULT_DURATION)),
        step=float(sess.get("step", 1.0)),
        replenish_interval=replenish,
        price_min=int(sess.get("price_min", 1)),
        price_max=int(sess.get("price_max", 500)),
        blocks=_parse_blocks(cp),
        buyer_schedule=_parse_schedule(cp, "schedule.buyers", BUYER, 2 * n, replenish),
        seller_schedule=_parse_schedule(cp, "schedule.sellers", SELLER, 2 * n, replenish),
        params_a=_strategy_params(cp, str(exp["type_a"])),
        params_b=_strategy_params(cp, str(exp["type_b"])),
    )
    design.validate()
    return design


def parse_session_config(text: str) -> SessionConfig:
    """Build a SessionConfig from config text with [trader.*] roster sections."""
    cp = _read(text)
    sess = _section(cp, "session")
    roster = []
    for section in cp.sections():
        if not section.startswith("trader."):
            continue
        raw = _section(cp, section)
        if "strategy" not in raw or "role" not in raw:
            raise ConfigError(f"[{section}] needs strategy and role")
        strategy = str(raw["strategy"])
        if strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {strategy!r}")
        roster.append(
            TraderSpec(
                strategy=strategy,
                count=int(raw.get("count", 1)),
                role=str(raw["role"]),
                params=_strategy_params(cp, strategy),
            )
        )
    if not roster:
        raise ConfigError("no [trader.*] sections")
    n_buyers = sum(s.count for s in roster if s.role == BUYER)
    n_sellers = sum(s.count for s in roster if s.role == SELLER)
    replenish = float(sess.get("replenish_interval", DEFAULT_REPLENISH))
    buyer_sched = _parse_schedule(cp, "schedule.buyers", BUYER, n_buyers, replenish)
    seller_sched = _parse_schedule(cp, "schedule.sellers", SELLER, n_sellers, replenish)
    low, high = DEFAULT_SCHEDULE_RANGE
    if buyer_sched is None:
        buyer_sched = Schedule(role=BUYER, mode="list",
                               limits=evenly_spaced(low, high, max(n_buyers, 1)),
                               interval=replenish)
    if seller_sched is None:
        seller_sched = Schedule(role=SELLER, mode="list",
                                limits=evenly_spaced(low, high, max(n_sellers, 1)),
                                interval=replenish)
    config = SessionConfig(
        roster=tuple(roster),
        buyer_schedule=buyer_sched,
        seller_schedule=seller_sched,
        blocks=_parse_blocks(cp),
        duration=float(sess.get("duration", DEFAULT_DURATION)),
        step=float(sess.get("step", 1.0)),
        seed=int(sess.get("seed", 0)),
        price_min=int(sess.get("price_min", 1)),
        price_max=int(sess.get("price_max", 500)),
    )
    config.validate()
    return config


def override_design(
    design: AbDesign, seed: Optional[int] = None, trials: Optional[int] = None
) -> AbDesign:
    """Apply command-line overrides to a parsed design."""
    if seed is not None:
        design = replace(design, master_seed=seed)
    if trials is not None:
        design = replace(design, trials=trials)
    design.validate()
    return design

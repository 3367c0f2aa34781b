"""Discrete-event market session.

One session owns one exchange and a roster of traders. The loop advances a
simulated clock in fixed steps; each step it issues any due customer
assignments, fires any due block orders, then polls every trader once in a
seed-shuffled order. Every accepted exchange operation produces one book
event, which is broadcast to all traders (that is where adaptive
strategies learn and imbalance windows update).

Everything is deterministic given the config seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from random import Random
from typing import Optional

from .book import ASK, BID, LobSnapshot
from .exchange import BookEvent, Exchange, Trade
from .imbalance import level_flow_vector
from .traders import BUYER, SELLER, MarketUpdate, Trader, build_trader

DEFAULT_DURATION = 600.0
DEFAULT_REPLENISH = 30.0
DEFAULT_BLOCK_QUANTITY = 100
DEFAULT_SCHEDULE_RANGE = (100, 150)

PERIODIC = "periodic"
DRIP = "stochastic-drip"


class ConfigError(ValueError):
    """Session configuration failed validation; nothing was simulated."""


def evenly_spaced(low: int, high: int, n: int) -> tuple[int, ...]:
    """n integer limit prices spread uniformly over [low, high]."""
    if n == 1:
        return ((low + high) // 2,)
    return tuple(round(low + i * (high - low) / (n - 1)) for i in range(n))


@dataclass(frozen=True)
class Schedule:
    """Customer-order generator for one side of the market.

    ``mode`` is ``"list"`` (a fixed list of limit prices, cycled to the
    trader count and dealt out in shuffled order each round) or ``"range"``
    (independent uniform draws between the endpoints). Replenishment is
    either periodic for the whole side or a per-trader stochastic drip with
    exponential inter-arrival times.
    """

    role: str
    mode: str = "list"
    limits: tuple[int, ...] = ()
    low: int = DEFAULT_SCHEDULE_RANGE[0]
    high: int = DEFAULT_SCHEDULE_RANGE[1]
    interval: float = DEFAULT_REPLENISH
    replenish: str = PERIODIC

    def validate(self, price_min: int, price_max: int) -> None:
        if self.role not in (BUYER, SELLER):
            raise ConfigError(f"bad schedule role {self.role!r}")
        if self.mode not in ("list", "range"):
            raise ConfigError(f"bad schedule mode {self.mode!r}")
        if self.mode == "list" and not self.limits:
            raise ConfigError("list schedule needs at least one limit price")
        if self.interval <= 0:
            raise ConfigError("replenish interval must be positive")
        if self.replenish not in (PERIODIC, DRIP):
            raise ConfigError(f"bad replenish mode {self.replenish!r}")
        lo, hi = (min(self.limits), max(self.limits)) if self.mode == "list" else (self.low, self.high)
        if lo < price_min or hi > price_max or lo > hi:
            raise ConfigError(f"schedule limits [{lo}, {hi}] outside price range")

    def draw(self, count: int, rng: Random) -> list[int]:
        """Limit prices for one replenishment round of ``count`` traders."""
        if self.mode == "range":
            return [rng.randint(self.low, self.high) for _ in range(count)]
        limits = [self.limits[i % len(self.limits)] for i in range(count)]
        rng.shuffle(limits)
        return limits

    def draw_one(self, rng: Random) -> int:
        if self.mode == "range":
            return rng.randint(self.low, self.high)
        return self.limits[rng.randrange(len(self.limits))]


def symmetric_schedules(
    low: int = DEFAULT_SCHEDULE_RANGE[0],
    high: int = DEFAULT_SCHEDULE_RANGE[1],
    traders_per_side: int = 20,
    interval: float = DEFAULT_REPLENISH,
) -> tuple["Schedule", "Schedule"]:
    """Buyer and seller schedules with identical evenly-spaced limit lists.

    The induced supply and demand staircases intersect at the midpoint of
    the range, so the design equilibrium is known in closed form.
    """
    limits = evenly_spaced(low, high, traders_per_side)
    return (
        Schedule(role=BUYER, mode="list", limits=limits, interval=interval),
        Schedule(role=SELLER, mode="list", limits=limits, interval=interval),
    )


@dataclass(frozen=True)
class BlockOrder:
    """A large order injected at a non-crossing price near the touch."""

    fire_time: float
    side: str = BID
    level_offset: int = 1
    quantity: int = DEFAULT_BLOCK_QUANTITY

    def validate(self, duration: float) -> None:
        if not (0.0 <= self.fire_time <= duration):
            raise ConfigError("block fire_time outside session duration")
        if self.side not in (BID, ASK):
            raise ConfigError(f"bad block side {self.side!r}")
        if self.level_offset < 1 or self.quantity < 1:
            raise ConfigError("block level_offset and quantity must be >= 1")


@dataclass(frozen=True)
class TraderSpec:
    strategy: str
    count: int
    role: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SessionConfig:
    roster: tuple[TraderSpec, ...]
    buyer_schedule: Schedule
    seller_schedule: Schedule
    blocks: tuple[BlockOrder, ...] = ()
    duration: float = DEFAULT_DURATION
    step: float = 1.0
    seed: int = 0
    price_min: int = 1
    price_max: int = 500

    def validate(self) -> None:
        if self.duration <= 0 or self.step <= 0:
            raise ConfigError("duration and step must be positive")
        if self.price_min < 1 or self.price_max <= self.price_min:
            raise ConfigError("bad price range")
        if not self.roster:
            raise ConfigError("empty roster")
        for spec in self.roster:
            if spec.count < 1:
                raise ConfigError("roster counts must be >= 1")
            if spec.role not in (BUYER, SELLER):
                raise ConfigError(f"bad roster role {spec.role!r}")
        if not any(s.role == BUYER for s in self.roster) or not any(
            s.role == SELLER for s in self.roster
        ):
            raise ConfigError("need at least one buyer and one seller")
        self.buyer_schedule.validate(self.price_min, self.price_max)
        self.seller_schedule.validate(self.price_min, self.price_max)
        if self.buyer_schedule.role != BUYER or self.seller_schedule.role != SELLER:
            raise ConfigError("schedule roles must match their slots")
        for block in self.blocks:
            block.validate(self.duration)


@dataclass(frozen=True)
class TraderOutcome:
    trader_id: str
    strategy: str
    role: str
    profit: int
    n_trades: int


@dataclass
class SessionResult:
    outcomes: list[TraderOutcome]
    tape: tuple[Trade, ...]
    events: tuple[BookEvent, ...]
    quotes: list[tuple[float, str, str, int]]
    commands: tuple[tuple, ...]

    def profit_by_strategy(self) -> dict[str, float]:
        """Mean profit per trader, grouped by strategy name."""
        totals: dict[str, list[int]] = {}
        for o in self.outcomes:
            totals.setdefault(o.strategy, []).append(o.profit)
        return {k: sum(v) / len(v) for k, v in totals.items()}

    def mean_profit(self, strategy: str) -> float:
        return self.profit_by_strategy()[strategy]


def equilibrium_price(
    buyer_schedule: Schedule,
    seller_schedule: Schedule,
    n_buyers: int,
    n_sellers: int,
) -> Optional[float]:
    """Competitive equilibrium implied by the configured schedules.

    List mode intersects the supply and demand staircases; range mode
    intersects the expected linear curves. None when the curves never
    cross.
    """
    if buyer_schedule.mode == "range" and seller_schedule.mode == "range":
        db = n_buyers / (buyer_schedule.high - buyer_schedule.low)
        ds = n_sellers / (seller_schedule.high - seller_schedule.low)
        p = (db * buyer_schedule.high + ds * seller_schedule.low) / (db + ds)
        if p > buyer_schedule.high or p < seller_schedule.low:
            return None
        return p

    def limits_for(schedule: Schedule, count: int) -> list[int]:
        if schedule.mode == "range":
            # expected order statistics of the uniform draws
            return [
                round(schedule.low + (i + 0.5) * (schedule.high - schedule.low) / count)
                for i in range(count)
            ]
        return [schedule.limits[i % len(schedule.limits)] for i in range(count)]

    demand = sorted(limits_for(buyer_schedule, n_buyers), reverse=True)
    supply = sorted(limits_for(seller_schedule, n_sellers))
    pairs = [i for i in range(min(len(demand), len(supply))) if demand[i] >= supply[i]]
    if not pairs:
        return None
    k = pairs[-1]
    lo = max(supply[k], demand[k + 1] if k + 1 < len(demand) else supply[k])
    hi = min(demand[k], supply[k + 1] if k + 1 < len(supply) else demand[k])
    return (lo + hi) / 2.0


class _SessionRun:
    """Internal state of one run; kept off the public surface."""

    def __init__(self, config: SessionConfig):
        config.validate()
        self.config = config
        self.master = Random(config.seed)
        self.exchange = Exchange(price_min=config.price_min, price_max=config.price_max)
        self.traders: list[Trader] = []
        self.by_id: dict[str, Trader] = {}

        buyer_idx = seller_idx = 0
        for spec in config.roster:
            for _ in range(spec.count):
                if spec.role == BUYER:
                    trader_id = f"B{buyer_idx:02d}"
                    buyer_idx += 1
                else:
                    trader_id = f"S{seller_idx:02d}"
                    seller_idx += 1
                rng = Random(self.master.getrandbits(64))
                trader = build_trader(
                    spec.strategy,
                    trader_id,
                    spec.role,
                    rng,
                    price_min=config.price_min,
                    price_max=config.price_max,
                    params=spec.params,
                )
                self.traders.append(trader)
                self.by_id[trader_id] = trader
                self.exchange.register_trader(trader_id)
        self.buyers = [t for t in self.traders if t.role == BUYER]
        self.sellers = [t for t in self.traders if t.role == SELLER]

        self.block_ids = [f"BLOCK{i}" for i in range(len(config.blocks))]
        for bid_ in self.block_ids:
            self.exchange.register_trader(bid_)
        self.pending_blocks = sorted(
            zip(config.blocks, self.block_ids), key=lambda bw: bw[0].fire_time
        )

        self.levels = max(
            [getattr(t, "window").levels for t in self.traders if hasattr(t, "window")],
            default=5,
        )
        self.prev_snapshot = self.exchange.initial_snapshot
        self.quotes: list[tuple[float, str, str, int]] = []

        # per-side drip clocks (used only in stochastic-drip mode)
        self.next_drip: dict[str, float] = {}

    # -- event plumbing ------------------------------------------------------

    def broadcast(self, event: BookEvent) -> None:
        prev = self.prev_snapshot
        snap = event.snapshot_after
        bb = snap.best_bid()
        ba = snap.best_ask()
        pbb = prev.best_bid()
        pba = prev.best_ask()
        trade = event.trades[-1] if event.trades else None
        bid_improved = pbb is not None and bb is not None and bb[0] > pbb[0]
        ask_improved = pba is not None and ba is not None and ba[0] < pba[0]
        bid_hit = any(t.aggressor_side == ASK for t in event.trades)
        ask_lifted = any(t.aggressor_side == BID for t in event.trades)
        update = MarketUpdate(
            time=event.time,
            seq=event.seq,
            kind=event.kind,
            trade=trade,
            snapshot=snap,
            prev_snapshot=prev,
            best_bid=bb[0] if bb else None,
            best_bid_qty=bb[1] if bb else 0,
            best_ask=ba[0] if ba else None,
            best_ask_qty=ba[1] if ba else 0,
            bid_improved=bid_improved,
            bid_hit=bid_hit,
            ask_improved=ask_improved,
            ask_lifted=ask_lifted,
            deltas=level_flow_vector(prev, snap, self.levels),
        )
        for t in self.traders:
            t.observe(update)
        self.prev_snapshot = snap

    def route_fills(self, trades: list[Trade], time: float) -> None:
        for trade in trades:
            buyer = self.by_id.get(trade.buyer_id)
            if buyer is not None:
                buyer.on_fill(trade, time)
            seller = self.by_id.get(trade.seller_id)
            if seller is not None:
                seller.on_fill(trade, time)

    def withdraw_if_illegal(self, trader: Trader, new_limit: int, now: float) -> None:
        """Cancel a leftover quote that the fresh assignment makes illegal.

        Legal leftovers stay on the book (the trader's next quote supersedes
        them anyway), which keeps the book populated across replenishments.
        """
        resting = self.exchange.resting_order(trader.trader_id)
        if resting is None:
            return
        illegal = resting.price > new_limit if trader.role == BUYER else resting.price < new_limit
        if illegal:
            event = self.exchange.cancel(trader.trader_id, resting.order_id, now)
            if event is not None:
                self.broadcast(event)

    # -- assignment issuance ---------------------------------------------------

    def replenish_side(self, schedule: Schedule, traders: list[Trader], now: float, rng: Random) -> None:
        limits = schedule.draw(len(traders), rng)
        for trader, limit in zip(traders, limits):
            self.withdraw_if_illegal(trader, limit, now)
            trader.assign(limit, now)

    def drip_assign(self, schedule: Schedule, trader: Trader, now: float, rng: Random) -> None:
        limit = schedule.draw_one(rng)
        self.withdraw_if_illegal(trader, limit, now)
        trader.assign(limit, now)

    # -- block injection -----------------------------------------------------

    def fire_block(self, block: BlockOrder, owner: str, now: float) -> None:
        snap = self.exchange.snapshot()
        bb = snap.best_bid()
        ba = snap.best_ask()
        mid_fallback = (self.config.price_min + self.config.price_max) // 2
        if block.side == BID:
            ref = bb[0] if bb else (ba[0] - 1 if ba else mid_fallback)
            price = ref - block.level_offset
            if ba is not None and price >= ba[0]:
                price = ba[0] - 1
        else:
            ref = ba[0] if ba else (bb[0] + 1 if bb else mid_fallback)
            price = ref + block.level_offset
            if bb is not None and price <= bb[0]:
                price = bb[0] + 1
        if not (self.config.price_min <= price <= self.config.price_max):
            return  # no room to place the block without crossing
        trades, event = self.exchange.submit(owner, block.side, price, block.quantity, now)
        assert not trades, "block orders are placed non-crossing"
        self.broadcast(event)

    # -- main loop ---------------------------------------------------------

    def run(self) -> SessionResult:
        cfg = self.config
        now = 0.0
        next_periodic = {BUYER: 0.0, SELLER: 0.0}
        drip_next: dict[str, float] = {}
        for side, sched, side_traders in (
            (BUYER, cfg.buyer_schedule, self.buyers),
            (SELLER, cfg.seller_schedule, self.sellers),
        ):
            if sched.replenish == DRIP:
                for t in side_traders:
                    drip_next[t.trader_id] = 0.0

        block_queue = list(self.pending_blocks)
        order = list(range(len(self.traders)))

        while now < cfg.duration:
            for side, sched, side_traders in (
                (BUYER, cfg.buyer_schedule, self.buyers),
                (SELLER, cfg.seller_schedule, self.sellers),
            ):
                if sched.replenish == PERIODIC:
                    if now >= next_periodic[side]:
                        self.replenish_side(sched, side_traders, now, self.master)
                        next_periodic[side] += sched.interval
                else:
                    for t in side_traders:
                        if now >= drip_next[t.trader_id]:
                            self.drip_assign(sched, t, now, self.master)
                            drip_next[t.trader_id] = now + self.master.expovariate(1.0 / sched.interval)

            while block_queue and block_queue[0][0].fire_time <= now:
                block, owner = block_queue.pop(0)
                self.fire_block(block, owner, now)

            self.master.shuffle(order)
            for idx in order:
                trader = self.traders[idx]
                snap = self.exchange.snapshot()
                price = trader.quote(snap, now)
                if price is None:
                    continue
                self.quotes.append((now, trader.trader_id, trader.side, price))
                resting = self.exchange.resting_order(trader.trader_id)
                if resting is not None and resting.price == price and resting.side == trader.side:
                    continue  # an identical requote would not change the book
                trades, event = self.exchange.submit(trader.trader_id, trader.side, price, 1, now)
                if trades:
                    self.route_fills(trades, now)
                self.broadcast(event)

            now += cfg.step

        strategy_of = {}
        i = 0
        for spec in cfg.roster:
            for _ in range(spec.count):
                strategy_of[self.traders[i].trader_id] = spec.strategy
                i += 1
        outcomes = [
            TraderOutcome(
                trader_id=t.trader_id,
                strategy=strategy_of[t.trader_id],
                role=t.role,
                profit=t.balance,
                n_trades=t.n_trades,
            )
            for t in self.traders
        ]
        return SessionResult(
            outcomes=outcomes,
            tape=self.exchange.tape(),
            events=self.exchange.events(),
            quotes=self.quotes,
            commands=self.exchange.commands(),
        )


def run_session(config: SessionConfig) -> SessionResult:
    """Run one market session to completion; deterministic given the seed."""
    return _SessionRun(config).run()


# -- CSV exports ---------------------------------------------------------------


def write_profits_csv(result: SessionResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trader_id", "strategy", "role", "profit", "n_trades"])
        for o in result.outcomes:
            writer.writerow([o.trader_id, o.strategy, o.role, o.profit, o.n_trades])


def write_events_csv(result: SessionResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seq", "time", "kind", "trader", "side", "price", "quantity", "n_trades"])
        for e in result.events:
            writer.writerow(
                [e.seq, repr(e.time), e.kind, e.trader_id, e.side, e.price, e.quantity, len(e.trades)]
            )

"""A:B comparison harness.

Runs independent market trials of balanced two-strategy markets (N traders
of each type on each side), collects per-trial mean profits, and reduces
them to box summaries, confidence intervals and a Mann-Whitney U test.
Per-trial seeds are derived from the master seed by counter, so adding
trials never perturbs earlier ones, and trials may run in parallel with
identical results.
"""

from __future__ import annotations

import csv
import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .session import (
    DEFAULT_DURATION,
    DEFAULT_REPLENISH,
    BlockOrder,
    Schedule,
    SessionConfig,
    TraderSpec,
    run_session,
    symmetric_schedules,
)
from .stats import BoxSummary, box_summary, mann_whitney_u, t_confidence_interval
from .traders import BUYER, SELLER

DEFAULT_BLOCKS = (BlockOrder(fire_time=DEFAULT_DURATION / 2),)


def derive_seed(master_seed: int, counter: int) -> int:
    """Counter-split of the master seed, stable across runs and platforms."""
    digest = hashlib.sha256(f"{master_seed}:{counter}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class AbDesign:
    """One A:B profitability comparison.

    Each trial's market holds ``n_per_side`` type-A buyers, type-A sellers,
    type-B buyers and type-B sellers (4N traders). Schedules default to
    symmetric evenly-spaced limit lists sized to the side; ``blocks``
    defaults to one demand-side block order at mid-session.
    """

    type_a: str
    type_b: str
    n_per_side: int = 10
    trials: int = 100
    master_seed: int = 1
    duration: float = DEFAULT_DURATION
    step: float = 1.0
    replenish_interval: float = DEFAULT_REPLENISH
    price_min: int = 1
    price_max: int = 500
    blocks: tuple[BlockOrder, ...] = DEFAULT_BLOCKS
    buyer_schedule: Optional[Schedule] = None
    seller_schedule: Optional[Schedule] = None
    params_a: dict = field(default_factory=dict)
    params_b: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.n_per_side < 1:
            raise ValueError("n_per_side must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def schedules(self) -> tuple[Schedule, Schedule]:
        if self.buyer_schedule is not None and self.seller_schedule is not None:
            return self.buyer_schedule, self.seller_schedule
        buyer, seller = symmetric_schedules(
            traders_per_side=2 * self.n_per_side, interval=self.replenish_interval
        )
        return (self.buyer_schedule or buyer, self.seller_schedule or seller)

    def session_config(self, trial_index: int) -> SessionConfig:
        buyer_sched, seller_sched = self.schedules()
        n = self.n_per_side
        roster = (
            TraderSpec(self.type_a, n, BUYER, dict(self.params_a)),
            TraderSpec(self.type_b, n, BUYER, dict(self.params_b)),
            TraderSpec(self.type_a, n, SELLER, dict(self.params_a)),
            TraderSpec(self.type_b, n, SELLER, dict(self.params_b)),
        )
        return SessionConfig(
            roster=roster,
            buyer_schedule=buyer_sched,
            seller_schedule=seller_sched,
            blocks=self.blocks,
            duration=self.duration,
            step=self.step,
            seed=derive_seed(self.master_seed, trial_index),
            price_min=self.price_min,
            price_max=self.price_max,
        )

    def cohort_ids(self) -> tuple[frozenset[str], frozenset[str]]:
        """Trader ids of cohorts A and B (valid even when A and B share a name)."""
        n = self.n_per_side
        a = {f"B{i:02d}" for i in range(n)} | {f"S{i:02d}" for i in range(n)}
        b = {f"B{i + n:02d}" for i in range(n)} | {f"S{i + n:02d}" for i in range(n)}
        return frozenset(a), frozenset(b)


@dataclass(frozen=True)
class TrialResult:
    """Mean per-trader profit of each cohort in one market trial."""

    trial: int
    mean_profit_a: float
    mean_profit_b: float
    difference: float


def _run_trial(design: AbDesign, index: int) -> TrialResult:
    result = run_session(design.session_config(index))
    ids_a, ids_b = design.cohort_ids()
    a = [o.profit for o in result.outcomes if o.trader_id in ids_a]
    b = [o.profit for o in result.outcomes if o.trader_id in ids_b]
    mean_a = sum(a) / len(a)
    mean_b = sum(b) / len(b)
    return TrialResult(index, mean_a, mean_b, mean_a - mean_b)


def run_ab(design: AbDesign, parallel: int = 1) -> list[TrialResult]:
    """Run every trial of the design; results ordered by trial index.

    ``parallel`` > 1 fans trials out over processes; the results are
    identical to a sequential run.
    """
    design.validate()
    indices = list(range(design.trials))
    if parallel <= 1:
        return [_run_trial(design, i) for i in indices]
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(_run_trial, [design] * len(indices), indices, chunksize=1))


@dataclass(frozen=True)
class AbSummary:
    box_a: BoxSummary
    box_b: BoxSummary
    box_difference: BoxSummary
    mean_a: float
    mean_b: float
    mean_difference: float
    ci_a: tuple[float, float]
    ci_b: tuple[float, float]
    ci_difference: tuple[float, float]


def summarize(results: Sequence[TrialResult]) -> AbSummary:
    """Box summaries plus means with 95% t-intervals; needs >= 2 trials."""
    if len(results) < 2:
        raise ValueError("need at least 2 trial results to summarise")
    a = [r.mean_profit_a for r in results]
    b = [r.mean_profit_b for r in results]
    d = [r.difference for r in results]
    return AbSummary(
        box_a=box_summary(a),
        box_b=box_summary(b),
        box_difference=box_summary(d),
        mean_a=sum(a) / len(a),
        mean_b=sum(b) / len(b),
        mean_difference=sum(d) / len(d),
        ci_a=t_confidence_interval(a),
        ci_b=t_confidence_interval(b),
        ci_difference=t_confidence_interval(d),
    )


def u_test(results: Sequence[TrialResult]) -> tuple[float, float]:
    """Mann-Whitney U of cohort A's per-trial means against cohort B's."""
    return mann_whitney_u(
        [r.mean_profit_a for r in results], [r.mean_profit_b for r in results]
    )


# -- emission -------------------------------------------------------------------


def emit(
    results: Sequence[TrialResult],
    summary: AbSummary,
    u_stat: float,
    p_value: float,
    destination,
) -> list[str]:
    """Write trials.csv, summary.csv and boxdata.csv under ``destination``.

    Floats are written with full precision so parsing the files back
    reproduces the in-memory values exactly. Returns the paths written.
    """
    os.makedirs(destination, exist_ok=True)
    paths = []

    path = os.path.join(destination, "trials.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "mean_profit_a", "mean_profit_b", "difference"])
        for r in results:
            writer.writerow([r.trial, repr(r.mean_profit_a), repr(r.mean_profit_b), repr(r.difference)])
    paths.append(path)

    path = os.path.join(destination, "summary.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        rows = [
            ("trials", len(results)),
            ("mean_a", summary.mean_a),
            ("ci_a_low", summary.ci_a[0]),
            ("ci_a_high", summary.ci_a[1]),
            ("mean_b", summary.mean_b),
            ("ci_b_low", summary.ci_b[0]),
            ("ci_b_high", summary.ci_b[1]),
            ("mean_difference", summary.mean_difference),
            ("ci_difference_low", summary.ci_difference[0]),
            ("ci_difference_high", summary.ci_difference[1]),
            ("u_statistic", u_stat),
            ("p_value", p_value),
        ]
        for key, value in rows:
            writer.writerow([key, repr(value)])
    paths.append(path)

    path = os.path.join(destination, "boxdata.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["distribution", "whisker_low", "q1", "median", "q3", "whisker_high", "outliers"]
        )
        for name, box in (
            ("profit_a", summary.box_a),
            ("profit_b", summary.box_b),
            ("difference", summary.box_difference),
        ):
            writer.writerow(
                [
                    name,
                    repr(box.whisker_low),
                    repr(box.q1),
                    repr(box.median),
                    repr(box.q3),
                    repr(box.whisker_high),
                    "|".join(repr(v) for v in box.outliers),
                ]
            )
    paths.append(path)
    return paths


def load_trials(path) -> list[TrialResult]:
    """Parse a trials.csv back into TrialResults (exact round-trip)."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                TrialResult(
                    trial=int(row["trial"]),
                    mean_profit_a=float(row["mean_profit_a"]),
                    mean_profit_b=float(row["mean_profit_b"]),
                    difference=float(row["difference"]),
                )
            )
    return out

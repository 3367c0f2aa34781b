"""The four worked multi-level imbalance cases, as reusable fixtures.

These are the canonical hand-worked examples for the per-level flow rules:
a reference book, four single-event successors, and the expected 3-level
imbalance vectors. Both the test suite and the ``golden`` CLI command run
them.

Note the reference book shows 5 units at bid 90 while the "new order at
the top" successor shows 7 there; the successor states are kept exactly as
the worked example states them, which is why they are fixtures rather than
operations replayed through the matching engine.
"""

from __future__ import annotations

from dataclasses import dataclass

from .book import LobSnapshot
from .imbalance import level_flow_vector

GOLDEN_LEVELS = 3

_FIG2_BIDS = ((90, 5), (87, 2), (82, 4))
_FIG2_ASKS = ((95, 3), (98, 5), (100, 1), (105, 4))


def reference_book(event_seq: int = 0, time: float = 0.0) -> LobSnapshot:
    """The worked example's starting book state."""
    return LobSnapshot.from_levels(_FIG2_BIDS, _FIG2_ASKS, event_seq=event_seq, time=time)


def case_books() -> dict[str, tuple[LobSnapshot, tuple[int, ...]]]:
    """Successor state and expected 3-level vector for each case."""
    succ = lambda bids, asks: LobSnapshot.from_levels(bids, asks, event_seq=1, time=1.0)
    return {
        "new_order_at_best_bid": (
            succ(((93, 5), (90, 7), (87, 2), (82, 4)), _FIG2_ASKS),
            (5, 7, 2),
        ),
        "partial_fill_or_cancel_at_best_bid": (
            succ(((90, 2), (87, 2), (82, 4)), _FIG2_ASKS),
            (-3, 0, 0),
        ),
        "full_fill_or_cancel_of_best_ask": (
            succ(_FIG2_BIDS, ((98, 5), (100, 1), (105, 4))),
            (3, 5, 1),
        ),
        "large_order_at_second_bid_level": (
            succ(((90, 5), (89, 100), (87, 2), (82, 4)), _FIG2_ASKS),
            (0, 100, 2),
        ),
    }


@dataclass(frozen=True)
class GoldenOutcome:
    name: str
    expected: tuple[int, ...]
    computed: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return self.expected == self.computed


def run_golden() -> list[GoldenOutcome]:
    """Evaluate all four cases against the level-flow implementation."""
    start = reference_book()
    outcomes = []
    for name, (successor, expected) in case_books().items():
        deltas = level_flow_vector(start, successor, GOLDEN_LEVELS)
        outcomes.append(
            GoldenOutcome(name=name, expected=expected, computed=tuple(d.e for d in deltas))
        )
    return outcomes

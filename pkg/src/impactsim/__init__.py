"""impactsim: a limit-order-book market simulator with imbalance-sensitive
trader agents and an A:B experiment harness."""

from .book import ASK, BID, LobLevel, LobSnapshot, Order, OrderBook
from .exchange import BookEvent, Exchange, OrderRejected, Trade, replay
from .imbalance import (
    EmptyWindowError,
    ImbalanceParams,
    LevelDelta,
    MlofiWindow,
    NonConsecutiveSnapshots,
    delta_m,
    level_flow,
    level_flow_vector,
    offset,
    write_analytics_csv,
)
from .session import (
    BlockOrder,
    ConfigError,
    Schedule,
    SessionConfig,
    SessionResult,
    TraderSpec,
    equilibrium_price,
    run_session,
    symmetric_schedules,
)
from .experiments import AbDesign, TrialResult, derive_seed, run_ab, summarize, u_test
from .stats import BoxSummary, box_summary, mann_whitney_u, t_confidence_interval
from .traders import STRATEGIES, build_trader

__version__ = "0.1.0"

"""Scratch scan of experiment-template designs (not part of the package)."""
import sys
from dataclasses import replace

from impactsim.experiments import AbDesign, run_ab, u_test, summarize
from impactsim.session import BlockOrder, symmetric_schedules


def blocks_every(period, duration=600.0, quantity=100):
    return tuple(
        BlockOrder(fire_time=float(t), quantity=quantity)
        for t in range(int(period), int(duration), int(period))
    )


def schedules(n_side, mode, interval):
    b, s = symmetric_schedules(traders_per_side=n_side, interval=interval)
    if mode == "drip":
        b = replace(b, replenish="stochastic-drip")
        s = replace(s, replenish="stochastic-drip")
    return b, s


def run(pair, design, trials, seed):
    a, b, pa = pair
    d = replace(design, type_a=a, type_b=b, trials=trials, master_seed=seed, params_a=pa)
    results = run_ab(d, parallel=2)
    u, p = u_test(results)
    s = summarize(results)
    pos = sum(1 for r in results if r.difference > 0)
    return s.mean_difference, p, pos


PAIRS = {
    "ZIP": ("ZZIZIP", "ZIP", {}),
    "AA": ("ZZIAA", "AA", {}),
    "SHV": ("ZZISHV", "ISHV", {"holdout_threshold": 50.0}),
}


def main():
    trials = int(sys.argv[1]) if len(sys.argv) > 1 else 30
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 7
    designs = {}
    for mode in ("periodic", "drip"):
        for period in (30, 60):
            bs, ss = schedules(20, mode, 30.0)
            designs[f"{mode}-blk{period}"] = AbDesign(
                type_a="ZIP", type_b="ZIP",
                buyer_schedule=bs, seller_schedule=ss,
                blocks=blocks_every(period),
            )
    for name, design in designs.items():
        row = [name]
        for label, pair in PAIRS.items():
            diff, p, pos = run(pair, design, trials, seed)
            row.append(f"{label}: {diff:+6.2f} p={p:.4f} {pos:>2}/{trials}")
        print(" | ".join(row), flush=True)


if __name__ == "__main__":
    main()

"""Command-line interface: run experiments, recompute stats, check goldens."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import parse_ab_design, override_design
from .experiments import emit, load_trials, run_ab, summarize, u_test
from .golden import run_golden


def _cmd_run(args) -> int:
    design = parse_ab_design(Path(args.config).read_text())
    design = override_design(design, seed=args.seed, trials=args.trials)
    results = run_ab(design, parallel=args.parallel)
    summary = summarize(results)
    u_stat, p_value = u_test(results)
    paths = emit(results, summary, u_stat, p_value, args.out)
    print(f"{design.type_a} vs {design.type_b}: {design.trials} trials, seed {design.master_seed}")
    print(
        f"mean profit A={summary.mean_a:.3f} B={summary.mean_b:.3f} "
        f"difference={summary.mean_difference:.3f} U={u_stat:.1f} p={p_value:.5f}"
    )
    for path in paths:
        print(f"wrote {path}")
    return 0


def _cmd_stats(args) -> int:
    trials_path = Path(args.indir) / "trials.csv"
    if not trials_path.exists():
        print(f"no trials.csv under {args.indir}", file=sys.stderr)
        return 1
    results = load_trials(trials_path)
    summary = summarize(results)
    u_stat, p_value = u_test(results)
    print(f"trials: {len(results)}")
    print(f"mean_a: {summary.mean_a:.6f}  ci95: [{summary.ci_a[0]:.6f}, {summary.ci_a[1]:.6f}]")
    print(f"mean_b: {summary.mean_b:.6f}  ci95: [{summary.ci_b[0]:.6f}, {summary.ci_b[1]:.6f}]")
    print(
        f"mean_difference: {summary.mean_difference:.6f}  "
        f"ci95: [{summary.ci_difference[0]:.6f}, {summary.ci_difference[1]:.6f}]"
    )
    for name, box in (
        ("profit_a", summary.box_a),
        ("profit_b", summary.box_b),
        ("difference", summary.box_difference),
    ):
        print(
            f"{name}: whiskers [{box.whisker_low:.4f}, {box.whisker_high:.4f}] "
            f"q1={box.q1:.4f} median={box.median:.4f} q3={box.q3:.4f} "
            f"outliers={len(box.outliers)}"
        )
    print(f"U={u_stat:.1f} p={p_value:.6f}")
    return 0


def _cmd_golden(args) -> int:
    outcomes = run_golden()
    failed = 0
    for case in outcomes:
        status = "PASS" if case.passed else "FAIL"
        print(f"{status} {case.name}: expected {case.expected}, got {case.computed}")
        if not case.passed:
            failed += 1
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="impactsim",
        description="Limit-order-book market simulator with imbalance-sensitive traders",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an A:B experiment from a config file")
    run_p.add_argument("--config", required=True, help="experiment config file (INI)")
    run_p.add_argument("--out", required=True, help="output directory for CSV results")
    run_p.add_argument("--seed", type=int, default=None, help="override the master seed")
    run_p.add_argument("--trials", type=int, default=None, help="override the trial count")
    run_p.add_argument("--parallel", type=int, default=1, help="worker processes")
    run_p.set_defaults(func=_cmd_run)

    stats_p = sub.add_parser("stats", help="recompute statistics from an output directory")
    stats_p.add_argument("--in", dest="indir", required=True, help="directory with trials.csv")
    stats_p.set_defaults(func=_cmd_stats)

    golden_p = sub.add_parser("golden", help="check the four worked imbalance cases")
    golden_p.set_defaults(func=_cmd_golden)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

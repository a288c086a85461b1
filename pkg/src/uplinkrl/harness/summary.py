"""Final-window statistics and paired arm comparisons."""

from __future__ import annotations

import json
import math
from pathlib import Path

from ..errors import UsageError


def final_window_mean(values, window: int) -> float:
    """Mean of the last `window` entries."""
    values = list(values)
    if window <= 0:
        raise UsageError(f"window must be positive, got {window}")
    if window > len(values):
        raise UsageError(f"window {window} exceeds the {len(values)} recorded episodes")
    tail = values[-window:]
    return float(sum(tail) / len(tail))


def default_window(n_episodes: int) -> int:
    """Last 10% of episodes, but never fewer than 10 (capped at the run)."""
    return min(n_episodes, max(10, round(0.1 * n_episodes)))


def rolling_mean(values, width: int):
    out = []
    acc = 0.0
    vals = list(values)
    for i, v in enumerate(vals):
        acc += v
        if i >= width:
            acc -= vals[i - width]
        out.append(acc / min(i + 1, width))
    return out


def convergence_episode(values, window: int, fraction: float = 0.95):
    """First episode whose 10-episode rolling mean reaches `fraction` of the
    final-window level; None when the curve never gets there."""
    final = final_window_mean(values, window)
    threshold = final - (1.0 - fraction) * abs(final)
    for i, m in enumerate(rolling_mean(values, 10)):
        if m >= threshold:
            return i
    return None


def sign_test_p(deltas) -> float | None:
    """Exact one-sided sign test for the hypothesis "deltas lean positive".

    Returns None for fewer than two pairs (a single seed cannot support a
    p-value). Ties are dropped before counting; when every pair is a tie the
    arms are indistinguishable and p is 1.
    """
    if len(deltas) < 2:
        return None
    signs = [d for d in deltas if d != 0.0]
    n = len(signs)
    if n == 0:
        return 1.0
    wins = sum(1 for d in signs if d > 0.0)
    total = sum(math.comb(n, k) for k in range(wins, n + 1))
    return total / 2.0**n


def summarize(arm_a, arm_b, window: int, *, higher_is_better: bool = True) -> dict:
    """Compare two arms of paired runs (lists of per-episode metric series).

    Relative improvement is (mean_a - mean_b) / |mean_b|; the sign test
    pairs seeds positionally and counts how often arm A beats arm B in
    the chosen direction.
    """
    if len(arm_a) != len(arm_b):
        raise UsageError(f"arm sizes differ: {len(arm_a)} vs {len(arm_b)}")
    if not arm_a:
        raise UsageError("nothing to compare")
    means_a = [final_window_mean(series, window) for series in arm_a]
    means_b = [final_window_mean(series, window) for series in arm_b]
    mean_a = sum(means_a) / len(means_a)
    mean_b = sum(means_b) / len(means_b)
    improvement = (mean_a - mean_b) / abs(mean_b) if mean_b != 0.0 else math.inf
    deltas = [a - b for a, b in zip(means_a, means_b)]
    if not higher_is_better:
        deltas = [-d for d in deltas]
    return {
        "window": window,
        "seeds": len(arm_a),
        "mean_a": mean_a,
        "mean_b": mean_b,
        "std_a": _std(means_a),
        "std_b": _std(means_b),
        "per_seed_a": means_a,
        "per_seed_b": means_b,
        "improvement_a_over_b": improvement,
        "wins_a": sum(1 for d in deltas if d > 0.0),
        "p_value": sign_test_p(deltas),
    }


def _std(xs) -> float:
    n = len(xs)
    if n < 2:
        return 0.0
    mu = sum(xs) / n
    return math.sqrt(sum((x - mu) ** 2 for x in xs) / (n - 1))


# -- artifact loading -----------------------------------------------------------


def load_metric_series(run_dir, metric: str) -> list:
    """Per-episode metric values from one run directory's episodes.jsonl."""
    path = Path(run_dir) / "episodes.jsonl"
    if not path.exists():
        raise UsageError(f"no episodes.jsonl under {run_dir}")
    series = []
    for line in path.read_text().splitlines():
        row = json.loads(line)
        if metric not in row:
            raise UsageError(f"metric {metric!r} missing from rows in {path}")
        series.append(float(row[metric]))
    return series


def load_arm(arm_dir, metric: str) -> tuple:
    """All seed runs under a directory, ordered by seed for stable pairing."""
    base = Path(arm_dir)
    runs = sorted(base.glob("seed*"), key=lambda p: int(p.name[4:]))
    if not runs:
        raise UsageError(f"no seed* run directories under {arm_dir}")
    seeds = [int(p.name[4:]) for p in runs]
    return seeds, [load_metric_series(p, metric) for p in runs]


def compare_dirs(dir_a, dir_b, metric: str, window: int | None = None, *,
                 higher_is_better: bool = True) -> dict:
    seeds_a, arm_a = load_arm(dir_a, metric)
    seeds_b, arm_b = load_arm(dir_b, metric)
    if seeds_a != seeds_b:
        raise UsageError(f"seed sets differ: {seeds_a} vs {seeds_b}")
    if window is None:
        window = default_window(min(len(s) for s in arm_a + arm_b))
    report = summarize(arm_a, arm_b, window, higher_is_better=higher_is_better)
    report.update({"metric": metric, "seeds_list": seeds_a,
                   "dir_a": str(dir_a), "dir_b": str(dir_b)})
    return report


def comparison_csv(report: dict) -> str:
    """Plot-ready CSV: one row per seed plus an aggregate row."""
    lines = ["seed,mean_a,mean_b,delta"]
    for seed, a, b in zip(report["seeds_list"], report["per_seed_a"], report["per_seed_b"]):
        lines.append(f"{seed},{a:.6f},{b:.6f},{a - b:.6f}")
    p = report["p_value"]
    lines.append(
        "aggregate,{:.6f},{:.6f},{:.6f}".format(
            report["mean_a"], report["mean_b"], report["mean_a"] - report["mean_b"]
        )
    )
    lines.append(f"# improvement_a_over_b={report['improvement_a_over_b']:.6f}")
    lines.append(f"# p_value={'n/a' if p is None else format(p, '.6f')}")
    return "\n".join(lines) + "\n"

"""Compare the compiled kernels against the numpy reference kernels.

The kernel backend binds at import time, so this script re-launches
itself twice with UPLINKRL_BACKEND forced to each value and reports a
table of wall times per training step (forward + backward + Adam) over
a few layer stacks.

Usage: python3 benchmarks/bench_backends.py [--repeats N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

SHAPES = [
    ("agent-size", [16, 48, 48, 16], 64),
    ("wider", [23, 64, 64, 32], 64),
    ("heavy", [64, 256, 256, 64], 128),
]


def run_workload(repeats: int) -> dict:
    import numpy as np

    from uplinkrl.nn import Adam, Mlp
    from uplinkrl.nn.backend import backend_name

    rng = np.random.default_rng(0)
    results = {"backend": backend_name(), "timings": {}}
    for label, sizes, batch in SHAPES:
        net = Mlp(sizes, seed=0)
        opt = Adam(net, lr=1e-3)
        x = rng.standard_normal((batch, sizes[0]))
        g = rng.standard_normal((batch, sizes[-1])) / batch
        # one untimed pass warms caches and forces lazy allocations
        net.forward_batch(x, keep_cache=True)
        opt.step(net.backward(x, g))
        t0 = time.perf_counter()
        for _ in range(repeats):
            net.forward_batch(x, keep_cache=True)
            grads = net.backward(x, g)
            opt.step(grads)
        elapsed = time.perf_counter() - t0
        results["timings"][label] = elapsed / repeats
    return results


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=2000)
    parser.add_argument("--_worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args._worker:
        print(json.dumps(run_workload(args.repeats)))
        return 0

    reports = {}
    for backend in ("fast", "pure"):
        env = dict(os.environ, UPLINKRL_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, __file__, "--_worker", "--repeats", str(args.repeats)],
            env=env,
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            return proc.returncode
        report = json.loads(proc.stdout)
        reports[report["backend"]] = report["timings"]

    if "fast" not in reports:
        print("compiled extension unavailable; only the numpy kernels ran")
        print(json.dumps(reports, indent=2))
        return 0

    print(f"{'workload':<12} {'fast (us)':>10} {'pure (us)':>10} {'speedup':>8}")
    for label, _, _ in SHAPES:
        fast = reports["fast"][label] * 1e6
        pure = reports["pure"][label] * 1e6
        print(f"{label:<12} {fast:>10.1f} {pure:>10.1f} {pure / fast:>7.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())

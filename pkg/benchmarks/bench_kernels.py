"""Throughput comparison of the numba kernels against the numpy fallback.

Each backend runs in a fresh subprocess (the backend is chosen at import
time via RWRE_SLOWDOWN_NO_NUMBA), simulates a batch of walks, and reports
jumps per second plus a digest of the outcomes.  The digests must match:
both backends consume identical random streams.

Usage: python3 benchmarks/bench_kernels.py [--t T] [--replicas N]
"""

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
from rwre_slowdown import _kernels
from rwre_slowdown._bits import derive_key
from rwre_slowdown.environment import Environment, OmegaLaw
from rwre_slowdown.laws import make_mean_one
from rwre_slowdown.sim import simulate_x

t, replicas = float(sys.argv[1]), int(sys.argv[2])
env = Environment(OmegaLaw(variant="uniform", a=0.6, b=0.8),
                  make_mean_one("pareto", alpha=2.0), 42)
simulate_x(env, 10.0, derive_key(1, 0))  # warm up (jit compile)
start = time.perf_counter()
jumps = 0
digest = 0
for r in range(replicas):
    out = simulate_x(env, t, derive_key(9, r))
    jumps += out.jumps
    digest = (digest * 1000003 + out.position * 8191 + out.jumps) & (2**61 - 1)
elapsed = time.perf_counter() - start
print(json.dumps({"backend": _kernels.BACKEND, "seconds": elapsed,
                  "jumps": jumps, "jumps_per_sec": jumps / elapsed,
                  "digest": digest}))
"""


def run_backend(no_numba: bool, t: float, replicas: int) -> dict:
    env = dict(os.environ)
    env["RWRE_SLOWDOWN_NO_NUMBA"] = "1" if no_numba else "0"
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, str(t), str(replicas)],
        capture_output=True, text=True, env=env, check=True,
    )
    return json.loads(out.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--t", type=float, default=2000.0, help="horizon per walk")
    parser.add_argument("--replicas", type=int, default=50, help="walks per backend")
    args = parser.parse_args()

    results = [run_backend(False, args.t, args.replicas),
               run_backend(True, args.t, args.replicas)]
    for res in results:
        print(f"{res['backend']:>6}: {res['jumps']:>12d} jumps in "
              f"{res['seconds']:8.3f} s  ({res['jumps_per_sec']:12.0f} jumps/s)")
    if results[0]["digest"] != results[1]["digest"]:
        print("ERROR: backends produced different walks", file=sys.stderr)
        return 1
    speedup = results[1]["seconds"] / results[0]["seconds"]
    print(f"identical outcomes; {results[0]['backend']} speedup x{speedup:.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

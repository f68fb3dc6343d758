"""Compare the compiled and pure-Python counting kernels.

    python3 benchmarks/bench_kernels.py --bounds 10000,100000 --repeat 3
"""
from __future__ import annotations

import argparse
import time

from torsorcount import kernels
from torsorcount.cox import DivisorTag
from torsorcount.enumeration import count_orbits


def best_time(d: DivisorTag, B: int, backend: str, repeat: int) -> tuple[float, int]:
    best, value = float("inf"), -1
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = count_orbits(d, B, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, 4 * value


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bounds", default="10000,100000")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    bounds = [int(b) for b in args.bounds.split(",")]
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the fallback is timed")
    print(f"{'divisor':>7} {'B':>9} {'backend':>8} {'count':>10} {'seconds':>9} {'speedup':>8}")
    for d in DivisorTag:
        for B in bounds:
            times = {}
            counts = set()
            for name in backends:
                t, n = best_time(d, B, name, args.repeat)
                times[name] = t
                counts.add(n)
            assert len(counts) == 1, f"backends disagree at {d.value}, B = {B}"
            for name in backends:
                speedup = times["python"] / times[name] if times[name] > 0 else float("inf")
                print(f"{d.value:>7} {B:>9} {name:>8} {n:>10} {times[name]:>9.4f} {speedup:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

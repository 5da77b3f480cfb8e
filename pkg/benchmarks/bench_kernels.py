"""Times the compiled float kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from riccati import kernels


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    # a 3-periodic system whose orbit from 0.3 runs the full length without a pole
    coeffs = np.array([[1.0, -5.0, 1.0, 0.0], [2.0, 1.0, -1.0, 1.0], [1.0, 0.0, 0.5, 1.0]])
    backends = kernels.backends()
    values = backends["python"].iterate_float(coeffs, 0.3, args.steps, 1e-12)[0]

    print(f"steps={args.steps} repeat={args.repeat} default backend={kernels.BACKEND}")
    print(f"{'kernel':<16}{'backend':<10}{'best (ms)':>12}{'speedup':>10}")
    for kernel, call in (
        ("iterate_float", lambda m: m.iterate_float(coeffs, 0.3, args.steps, 1e-12)),
        ("angle_histogram", lambda m: m.angle_histogram(values, 64)),
    ):
        baseline = None
        for name in ("python", "cython"):
            if name not in backends:
                print(f"{kernel:<16}{name:<10}{'missing':>12}")
                continue
            best = min(timeit.repeat(lambda: call(backends[name]), number=1, repeat=args.repeat))
            baseline = baseline or best
            print(f"{kernel:<16}{name:<10}{best * 1e3:>12.2f}{baseline / best:>9.1f}x")


if __name__ == "__main__":
    main()

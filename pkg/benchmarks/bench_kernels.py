"""Compare the numba and numpy sampling kernels on identical uniforms.

Run with ``python benchmarks/bench_kernels.py [--trials N] [--repeat R]``.
"""

import argparse
import time

import numpy as np

from weakval import kernels
from weakval._accel import HAVE_NUMBA


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=1 << 20)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(0)
    u3 = rng.random((args.trials, 3))
    u1 = rng.random(args.trials)
    cdf = np.cumsum([0.3, 0.2, 0.4, 0.1])
    flip = np.array([0.45, 0.3])

    cases = {
        "classical": (
            lambda: kernels.classical_counts_numpy(u3, 1.0, 0.55, flip),
            lambda: kernels.classical_counts_loop(u3, 1.0, 0.55, flip),
        ),
        "categorical": (
            lambda: kernels.categorical_counts_numpy(u1, cdf),
            lambda: kernels.categorical_counts_loop(u1, cdf),
        ),
    }
    label = "numba" if HAVE_NUMBA else "loop (numba missing, pure python)"
    print(f"trials={args.trials} repeat={args.repeat}")
    print(f"{'kernel':<12} {'numpy [ms]':>11} {label + ' [ms]':>12} {'speedup':>8} identical")
    for name, (vec, loop) in cases.items():
        same = np.array_equal(vec(), loop())
        t_vec, t_loop = best_of(vec, args.repeat), best_of(loop, args.repeat)
        print(f"{name:<12} {t_vec * 1e3:11.2f} {t_loop * 1e3:12.2f} {t_vec / t_loop:8.2f} {same}")


if __name__ == "__main__":
    main()

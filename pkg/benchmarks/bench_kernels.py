"""Compare the compiled and NumPy Pauli-frame kernels.

    python benchmarks/bench_kernels.py [--trials 20000] [--repeat 3]

Both backends run the shipped telecorrection round on identical random
streams; the script checks that their per-trial results agree and prints
trials per second for each.
"""

import argparse
import time

import numpy as np

from bellsim.ftsim import engine
from bellsim.ftsim.circuit import default_circuit
from bellsim.ftsim.model import level1_error_model


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--eta", type=float, default=2e-3)
    ap.add_argument("--n", type=int, default=4)
    args = ap.parse_args(argv)

    circuit = default_circuit()
    rates = level1_error_model(args.n, args.eta)
    results = {}
    print(f"{'backend':<8} {'seconds':>9} {'trials/s':>12}")
    for name in sorted(engine.BACKENDS):
        secs, status = best_time(
            lambda: engine.run_status(circuit, rates, args.trials, 1, 0, backend=name, workers=1),
            args.repeat,
        )
        results[name] = (secs, status)
        print(f"{name:<8} {secs:9.3f} {args.trials / secs:12.0f}")
    if len(results) == 2:
        (tc, sc), (tp, sp) = results["cython"], results["python"]
        print(f"speedup  {tp / tc:.1f}x, identical results: {np.array_equal(sc, sp)}")
    else:
        print("compiled kernel not available; only the NumPy backend was timed")


if __name__ == "__main__":
    main()

"""Throughput comparison of the compiled and pure-Python chain kernels.

Times chain_kcbs on a fixed batch of random search-style inputs, which is
the call the optimizer makes once per objective evaluation.  Run with
python3 benchmarks/bench_kernels.py [--calls N].
"""

import argparse
import math
import time

import numpy as np

from pentaspin import _chainkernel_py as pure

try:
    from pentaspin import _chainkernel as compiled
except ImportError:
    compiled = None


def make_inputs(n, seed=0):
    rng = np.random.Generator(np.random.Philox(seed))
    inputs = []
    for _ in range(n):
        q, r = np.linalg.qr(rng.normal(size=(3, 3)))
        q = q * np.sign(np.diag(r))
        triad = np.ascontiguousarray(q.T.reshape(9))
        a = rng.uniform(0.0, math.pi)
        b = rng.uniform(-math.pi, math.pi)
        t = rng.uniform(-math.pi, math.pi, size=3)
        pr = np.ascontiguousarray(rng.normal(size=3))
        pi = np.ascontiguousarray(rng.normal(size=3))
        inputs.append((a, b, t[0], t[1], t[2], triad, pr, pi))
    return inputs


def bench(fn, inputs, repeats=5):
    best = math.inf
    sink = 0.0
    for _ in range(repeats):
        start = time.perf_counter()
        for args in inputs:
            sink += fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, sink


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--calls", type=int, default=20000,
                        help="chain_kcbs calls per timed pass")
    args = parser.parse_args()

    inputs = make_inputs(args.calls)
    t_pure, _ = bench(pure.chain_kcbs, inputs)
    rate_pure = args.calls / t_pure
    print(f"pure python : {t_pure:8.4f} s  ({rate_pure:10.0f} calls/s)")

    if compiled is None:
        print("compiled    : extension not built")
        return

    t_comp, _ = bench(compiled.chain_kcbs, inputs)
    rate_comp = args.calls / t_comp
    print(f"compiled    : {t_comp:8.4f} s  ({rate_comp:10.0f} calls/s)")
    print(f"speedup     : {t_pure / t_comp:8.2f}x")

    # the two backends must agree to the last few ulps
    worst = 0.0
    for a in inputs[:2000]:
        worst = max(worst, abs(pure.chain_kcbs(*a) - compiled.chain_kcbs(*a)))
    print(f"max |diff|  : {worst:.3e}")


if __name__ == "__main__":
    main()

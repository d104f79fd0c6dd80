"""Time the compiled trial kernel against the pure-Python fallback.

Usage::

    python benchmarks/bench_kernels.py --trials 100000 --repeat 3
"""

import argparse
import time

import numpy as np

from ssbsim import kernels
from ssbsim.measurement import bell_measurement_operator, bell_state


def _bell_args():
    meas = np.array([bell_measurement_operator(m).entries for m in (0, 1)])
    rev = meas[::-1].copy()
    psi = bell_state("psi+").amps
    return dict(start=psi, prep=np.eye(4), outcome_index=(1, 2), meas_ops=meas,
                renormalize=False, rev_ops=rev, reverse=True, discard=-1, target=psi)


def bench(backend, trials, repeat):
    args = _bell_args()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = kernels.run_trials(42, trials, backend=backend, **args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    results = {b: bench(b, args.trials, args.repeat) for b in kernels.BACKENDS}
    for name, (secs, _) in results.items():
        print(f"{name:>8}: {secs:8.4f} s  ({args.trials / secs:,.0f} trials/s)")
    if len(results) == 2:
        (py, a), (cy, b) = results["python"], results["cython"]
        same = a.reversed.tobytes() == b.reversed.tobytes() and a.outcomes.tobytes() == b.outcomes.tobytes()
        print(f" speedup: {py / cy:.1f}x, outputs bit-identical: {same}")
    else:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()

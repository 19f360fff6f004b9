#!/usr/bin/env python3
"""Benchmark the compiled steps-to-block kernel against its pure twin.

Both kernels walk the same trial orders over the same cover matrices,
so their outputs must agree element for element; this script checks
that first and then reports wall-clock timings per problem size.

Run from a checkout with the package installed:

    python3 benchmarks/bench_sim.py --trials 20000 --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from mitiplan import _mcsim_py
from mitiplan.fixtures import paper_v13_catalog
from mitiplan.simulator import Campaign, _cover_matrix, resolve_campaign, trial_orders

try:
    from mitiplan import _mcsim
except ImportError:
    _mcsim = None


def _reference_case():
    catalog = paper_v13_catalog()
    campaign = Campaign(techniques=("T1053", "T1059", "T1562", "T1574"))
    covers = _cover_matrix(catalog, resolve_campaign(campaign, catalog))
    return "paper_v13 4-technique campaign", covers, 1


def _synthetic_case(rng, m, t, threshold):
    covers = (rng.random((m, t)) < 0.3).astype(np.uint8)
    covers[rng.integers(0, m, size=t), np.arange(t)] = 1
    return f"synthetic {m}x{t}, threshold {threshold}", covers, threshold


def _time_kernel(kernel, orders, covers, threshold, repeat):
    out = np.empty(orders.shape[0], dtype=np.int64)
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        kernel.steps_to_block_batch(orders, covers, threshold, out)
        best = min(best, time.perf_counter() - start)
    return best, out.copy()


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    cases = [
        _reference_case(),
        _synthetic_case(rng, 50, 10, 2),
        _synthetic_case(rng, 200, 25, 3),
    ]

    if _mcsim is None:
        print("compiled kernel not built; timing the python kernel only")

    for label, covers, threshold in cases:
        orders = trial_orders(covers.shape[0], args.trials, args.seed)
        py_time, py_out = _time_kernel(_mcsim_py, orders, covers, threshold, args.repeat)
        line = f"{label}: python {py_time * 1000:8.1f} ms"
        if _mcsim is not None:
            c_time, c_out = _time_kernel(_mcsim, orders, covers, threshold, args.repeat)
            if not np.array_equal(py_out, c_out):
                print(f"{label}: KERNELS DISAGREE")
                return 1
            line += f", compiled {c_time * 1000:8.1f} ms, speedup {py_time / c_time:5.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Time the hot kernels on both backends and print a comparison table.

Run:

    python3 benchmarks/bench_kernels.py [n_rows]

The jitted backend is warmed up once before timing, so numbers reflect
steady-state throughput, not compilation.
"""

import sys
import time

import numpy as np

from pmtbn import Variable, default_pmt_structure
from pmtbn.harness import random_ground_truth
from pmtbn import _kernels_numpy as knp

try:
    from pmtbn import _kernels_numba as knb
except ImportError:
    knb = None


def best_of(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    schema, dag, _ = default_pmt_structure()
    model = random_ground_truth(schema, dag, seed=7, gamma=2.0)
    comp = model.compiled()
    v = len(schema)
    seed = np.uint64(12345)

    uniforms = (knp.splitmix64_fill(seed, n * v).astype(np.float64) * 2.0**-64)
    uniforms = uniforms.reshape(n, v)

    def tasks(k):
        rows = k.ancestral_states(
            comp.topo_cols, comp.par_cols, comp.par_off, comp.par_strides,
            comp.cdf_flat, comp.row_off, comp.cards, uniforms,
        )
        ci = schema.index_of("purchase_protection")
        return {
            "splitmix64_fill": lambda: k.splitmix64_fill(seed, n * v),
            "ancestral_states": lambda: k.ancestral_states(
                comp.topo_cols, comp.par_cols, comp.par_off, comp.par_strides,
                comp.cdf_flat, comp.row_off, comp.cards, uniforms,
            ),
            "joint_counts": lambda: k.joint_counts(rows, comp.cards),
            "full_evidence_scores": lambda: k.full_evidence_scores(
                comp.topo_cols, comp.par_cols, comp.par_off, comp.par_strides,
                comp.table_flat, comp.row_off, comp.cards, rows, ci,
                int(comp.cards[ci]),
            ),
        }

    backends = [("numpy", knp)]
    if knb is not None:
        for fn in tasks(knb).values():
            fn()  # trigger jit compilation
        backends.append(("numba", knb))

    print(f"rows: {n}, variables: {v}")
    print(f"{'kernel':<22}" + "".join(f"{name:>12}" for name, _ in backends)
          + ("     speedup" if len(backends) == 2 else ""))
    names = list(tasks(knp))
    timings = {name: {} for name in names}
    for bname, mod in backends:
        fns = tasks(mod)
        for name in names:
            timings[name][bname] = best_of(fns[name])
    for name in names:
        row = f"{name:<22}"
        for bname, _ in backends:
            row += f"{timings[name][bname] * 1e3:>10.2f}ms"
        if len(backends) == 2:
            row += f"{timings[name]['numpy'] / timings[name]['numba']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()

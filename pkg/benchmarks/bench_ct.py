#!/usr/bin/env python3
"""Benchmark the two constant-term fold kernels on representative workloads.

The packed kernel rides coefficient arithmetic on single big integers
(balanced base-2^B digits); the dict kernel keeps plain exponent->int maps.
Both are exact and interchangeable via the QCT_KERNEL environment variable;
this script times them side by side and checks they agree.

Usage: python3 benchmarks/bench_ct.py
"""

import time

from qct.laurent import ct_fold
from qct.products import Shape, bf_factors, qdyson_factors


def bench(label, arity, factors, target):
    row = {"case": label}
    results = {}
    for kernel in ("packed", "dict"):
        best = None
        for _ in range(3):
            t0 = time.perf_counter()
            results[kernel] = ct_fold(arity, factors, target, target, kernel=kernel)
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        row[kernel] = best
    assert results["packed"] == results["dict"], f"kernel mismatch on {label}"
    row["speedup"] = row["dict"] / row["packed"]
    return row


def main():
    cases = []
    a = (2, 2, 2, 2)
    cases.append(("qdyson a=(2,2,2,2)", len(a), qdyson_factors(a), (0,) * len(a)))
    for shape, abc in [((1, 2, 2), (2, 2, 2)), ((2, 3), (2, 2, 2)), ((2, 3), (1, 1, 2))]:
        s = Shape(shape)
        label = f"bf shape={shape} a,b,c={abc}"
        cases.append((label, s.n, bf_factors(s, *abc), (0,) * s.n))

    print(f"{'case':<34} {'packed':>9} {'dict':>9} {'speedup':>8}")
    for label, arity, factors, target in cases:
        row = bench(label, arity, factors, target)
        print(f"{row['case']:<34} {row['packed']*1000:>7.1f}ms {row['dict']*1000:>7.1f}ms "
              f"{row['speedup']:>7.1f}x")


if __name__ == "__main__":
    main()

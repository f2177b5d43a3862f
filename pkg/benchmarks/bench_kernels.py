"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage:
    python benchmarks/bench_kernels.py [--csv OUT.csv] [--repeat N]

Covers the three hot paths: the fixed-point iteration, code assignment,
and bit packing/unpacking.
"""
import argparse
import csv
import sys
import time

import numpy as np

from dfq import _kernels_py
from dfq.distributions import ModelKind
from dfq.quantizer import init_spec

try:
    from dfq import _kernels
except ImportError:
    _kernels = None

BACKENDS = [("python", _kernels_py)]
if _kernels is not None:
    BACKENDS.insert(0, ("cython", _kernels))


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_lloyd(impl, bits, repeat):
    levels = init_spec(bits, ModelKind.GAUSSIAN).levels
    return timeit(lambda: impl.lloyd_iterate(0, levels, 1e-9, 2_000_000),
                  repeat)


def bench_assign(impl, n, repeat):
    rng = np.random.default_rng(0)
    values = rng.normal(0, 1, n).astype(np.float32)
    interior = np.sort(rng.normal(size=255))
    return timeit(lambda: impl.assign_codes(values, interior, 0.0, 1.0),
                  repeat)


def bench_pack(impl, n, bits, repeat):
    rng = np.random.default_rng(1)
    codes = rng.integers(0, 2**bits, n).astype(np.uint32)
    return timeit(lambda: impl.pack_bits(codes, bits), repeat)


def bench_unpack(impl, n, bits, repeat):
    rng = np.random.default_rng(1)
    codes = rng.integers(0, 2**bits, n).astype(np.uint32)
    packed = bytes(impl.pack_bits(codes, bits))
    return timeit(lambda: impl.unpack_bits(packed, bits, n), repeat)


CASES = [
    ("lloyd_iterate M=6", lambda impl, r: bench_lloyd(impl, 6, r)),
    ("lloyd_iterate M=8", lambda impl, r: bench_lloyd(impl, 8, max(1, r // 3))),
    ("assign_codes 1e7", lambda impl, r: bench_assign(impl, 10**7, r)),
    ("pack_bits 1e7 M=4", lambda impl, r: bench_pack(impl, 10**7, 4, r)),
    ("pack_bits 1e7 M=7", lambda impl, r: bench_pack(impl, 10**7, 7, r)),
    ("unpack_bits 1e7 M=7", lambda impl, r: bench_unpack(impl, 10**7, 7, r)),
]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--csv", help="also write results as CSV")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    if _kernels is None:
        print("note: compiled extension not available; python backend only")

    rows = []
    width = max(len(name) for name, _ in CASES)
    header = f"{'case':<{width}}  " + "  ".join(
        f"{name:>10}" for name, _ in BACKENDS)
    if len(BACKENDS) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    for name, runner in CASES:
        times = [runner(impl, args.repeat) for _, impl in BACKENDS]
        line = f"{name:<{width}}  " + "  ".join(f"{t:>9.4f}s" for t in times)
        row = {"case": name}
        for (bname, _), t in zip(BACKENDS, times):
            row[bname] = t
        if len(times) == 2:
            line += f"  {times[1] / times[0]:>7.1f}x"
            row["speedup"] = times[1] / times[0]
        rows.append(row)
        print(line)

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

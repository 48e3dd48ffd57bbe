"""Compare the compiled and numpy kernels on the workloads the CLI actually runs.

    python benchmarks/bench_kernels.py --umax 1000 --repeat 5

Both backends must return identical results; the script exits non-zero if
they disagree or if the compiled extension is not built.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time

import numpy as np

from quadfunc import _pykernels

try:
    from quadfunc import _ckernels
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None


def _time(fn, repeat):
    times, result = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), result


def workloads(k: int, umax: int):
    nmax = umax * umax * (1 + k)
    counts = _pykernels.representation_counts(k, nmax)
    linear = np.arange(nmax + 1, dtype=np.int64)
    broken = linear.copy()
    broken[umax // 2] += 1
    return {
        "representation_counts": lambda m: m.representation_counts(k, nmax),
        "grid_pass (linear family)": lambda m: m.first_grid_failure(linear, 1, k, umax),
        "grid_fail (mutated at umax/2)": lambda m: m.first_grid_failure(broken, 1, k, umax),
        "splitmix_signs": lambda m: m.splitmix_signs(12345, nmax),
    }, int(counts.sum())


def _same(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    return a == b


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--umax", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)

    if _ckernels is None:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 2
    jobs, total_reps = workloads(args.k, args.umax)
    rows, mismatch = [], False
    for name, job in jobs.items():
        t_py, r_py = _time(lambda: job(_pykernels), args.repeat)
        t_c, r_c = _time(lambda: job(_ckernels), args.repeat)
        same = _same(r_py, r_c)
        mismatch |= not same
        rows.append({"workload": name, "python_s": t_py, "cython_s": t_c,
                     "speedup": t_py / t_c if t_c else float("inf"), "agree": same})

    if args.json:
        print(json.dumps({"k": args.k, "umax": args.umax, "representations": total_reps, "rows": rows}, indent=2))
    else:
        print(f"k={args.k} umax={args.umax} ({args.umax ** 2} pairs), median of {args.repeat}")
        print(f"{'workload':32} {'python':>10} {'cython':>10} {'speedup':>8}  agree")
        for r in rows:
            print(f"{r['workload']:32} {r['python_s']:10.4f} {r['cython_s']:10.4f} {r['speedup']:8.1f}  {r['agree']}")
    return 1 if mismatch else 0


if __name__ == "__main__":
    sys.exit(main())

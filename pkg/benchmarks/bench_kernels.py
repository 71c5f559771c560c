"""Time the compiled and numpy paths of the batched kernel evaluations.

    python3 benchmarks/bench_kernels.py --n 20000 --repeat 3

The numpy column is measured in-process through ``backend="numpy"``;
``--subprocess`` additionally reruns everything with ``IMPGREEN_NUMBA=0``
so that no compiled code is loaded at all.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from impgreen import NUMBA_ENABLED
from impgreen.kernel import psi_fixed, theta_batch
from impgreen.transform import KernelParams, split_difference

CASES = [
    ("d=2 beta=0.5 s=1+i", KernelParams(1 + 1j, 0.5, 2)),
    ("d=3 beta=1 s=0.1+10i", KernelParams(0.1 + 10j, 1.0, 3)),
    ("d=4 beta=2 s=3", KernelParams(3.0, 2.0, 4)),
]


def _points(n: int, d: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    X = np.column_stack([rng.uniform(0, 1, (n, d - 1)), rng.uniform(0.5, 1.5, n)])
    Y = X.copy()
    Y[:, 0] += rng.uniform(3, 6, n)
    return X, Y


def _best(fn, repeat: int) -> float:
    fn()  # compile or warm caches
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def run(n: int, repeat: int) -> list[dict]:
    backends = ["numba", "numpy"] if NUMBA_ENABLED else ["numpy"]
    rows = []
    for label, params in CASES:
        X, Y = _points(n, params.d)
        Z = X - Y * np.append(np.ones(params.d - 1), -1.0)
        omega2, zd, r = split_difference(Z)
        for what, make in (
            ("psi_fixed", lambda b: lambda: psi_fixed(omega2, zd, r, params, b)),
            ("theta_batch", lambda b: lambda: theta_batch(X, Y, params, backend=b)),
        ):
            row = {"case": label, "kernel": what, "n": n}
            for b in backends:
                row[b] = _best(make(b), repeat)
            if "numba" in row:
                row["speedup"] = row["numpy"] / row["numba"]
            rows.append(row)
    return rows


def _print(rows: list[dict], title: str) -> None:
    print(title)
    print(f"{'case':24s} {'kernel':12s} {'n':>7s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for row in rows:
        nb = f"{row['numba']:.4f}" if "numba" in row else "-"
        sp = f"{row['speedup']:.1f}x" if "speedup" in row else "-"
        print(f"{row['case']:24s} {row['kernel']:12s} {row['n']:7d} {nb:>10s} {row['numpy']:10.4f} {sp:>8s}")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--n", type=int, default=20000, help="point pairs per case")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true", help="print rows as JSON only")
    ap.add_argument("--subprocess", action="store_true", help="also time a run with IMPGREEN_NUMBA=0")
    args = ap.parse_args(argv)
    rows = run(args.n, args.repeat)
    if args.json:
        print(json.dumps(rows))
        return 0
    _print(rows, f"in-process ({'numba enabled' if NUMBA_ENABLED else 'numba disabled'})")
    if args.subprocess and NUMBA_ENABLED:
        env = {**os.environ, "IMPGREEN_NUMBA": "0"}
        out = subprocess.run([sys.executable, __file__, "--n", str(args.n), "--repeat", str(args.repeat), "--json"],
                             env=env, capture_output=True, text=True, check=True)
        _print(json.loads(out.stdout), "\nsubprocess with IMPGREEN_NUMBA=0")
    return 0


if __name__ == "__main__":
    sys.exit(main())

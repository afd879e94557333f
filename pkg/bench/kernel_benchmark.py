"""Compare the compiled sweep kernel against the pure-Python twin.

Both backends march the identical corner scheme; this script seeds the
same boundary data into fresh arrays for each, times the sweeps, checks
that the marched fields agree bitwise, and prints a speedup table.

Usage: python bench/kernel_benchmark.py [--sizes 101 201] [--repeats 3]
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from cpwave import _sweep, _sweep_py

FP_TOL = 1e-12
MAX_FP_ITER = 50
SING_THRESHOLD = 1e-8
W_CAP = 300.0


def seed_fields(n: int, general: bool) -> dict[str, np.ndarray]:
    """Boundary row (axis 0) and initial column of U = -log(f + g)."""
    th = np.linspace(0.0, 1.0, n)
    v = np.linspace(0.0, 1.0, n)
    F0 = (1.0 + th * th) + v[0]
    Fb = (1.0 + th[0] * th[0]) + v
    fields = {name: np.full((n, n), np.nan) for name in ("M", "U", "V", "W")}
    lines = {
        "M": (0.5 * np.log(Fb), 0.5 * np.log(F0)),
        "U": (-np.log(Fb), -np.log(F0)),
        "V": (np.zeros(n), np.zeros(n)),
        "W": (np.zeros(n), np.zeros(n)),
    }
    if general:
        lines["W"] = (0.05 * np.sin(math.pi * v), np.zeros(n))
    for name, (boundary, initial) in lines.items():
        fields[name][0, :] = boundary
        fields[name][:, 0] = initial
    return fields


def run(kernel, n: int, general: bool, repeats: int):
    h = 1.0 / (n - 1)
    best = math.inf
    out = None
    for _ in range(repeats):
        fields = seed_fields(n, general)
        t0 = time.perf_counter()
        status, *_ = kernel.goursat_sweep(
            fields["M"], fields["U"], fields["V"], fields["W"],
            h, h, general, FP_TOL, MAX_FP_ITER, SING_THRESHOLD, W_CAP,
        )
        elapsed = time.perf_counter() - t0
        if status != kernel.COMPLETED:
            raise RuntimeError(f"{kernel.BACKEND} sweep ended with status {status}")
        if elapsed < best:
            best, out = elapsed, fields
    return best, out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[101, 201])
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    print(f"{'case':>16} {'compiled [s]':>14} {'python [s]':>12} {'speedup':>9}")
    for n in args.sizes:
        for general in (False, True):
            t_c, fields_c = run(_sweep, n, general, args.repeats)
            t_p, fields_p = run(_sweep_py, n, general, args.repeats)
            for name in ("M", "U", "V", "W"):
                if not np.array_equal(fields_c[name], fields_p[name]):
                    raise RuntimeError(f"backends disagree on {name} at n={n}")
            label = f"{'general' if general else 'polarized'} {n}x{n}"
            print(f"{label:>16} {t_c:>14.6f} {t_p:>12.6f} {t_p / t_c:>8.1f}x")
    print("fields agree bitwise across backends for every case")


if __name__ == "__main__":
    main()

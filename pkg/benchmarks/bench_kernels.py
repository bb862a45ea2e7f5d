"""Compare the numba kernels with their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--end-to-end]

Kernel timings call both implementations in one process.  With
``--end-to-end`` the correspondence check for n=7 is also timed in two
subprocesses, once with ``GCSO_DISABLE_NUMBA=1``.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from gcso import _kernels
from gcso.polytope import _masks_to_words


def _skew(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((n, n))
    return a - a.T


def _order_inputs(count: int, rng: np.random.Generator):
    def masks(bits: int) -> np.ndarray:
        return _masks_to_words([int.from_bytes(rng.bytes(bits // 8), "little") for _ in range(count)])

    return masks(128), masks(64), masks(64), masks(256)


def _time(fn, repeat: int) -> float:
    fn()  # compile / warm up
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_table(repeat: int) -> list[tuple[str, float, float | None]]:
    rng = np.random.default_rng(0)
    rows = []

    mats = [_skew(12, rng) for _ in range(2000)]
    rows.append(
        (
            "pfaffian 12x12 x2000",
            _time(lambda: [_kernels.pfaffian_numpy(m) for m in mats], repeat),
            _time(lambda: [_kernels.pfaffian_float(m) for m in mats], repeat) if _kernels.HAVE_NUMBA else None,
        )
    )

    chain = np.round(rng.random((20000, 9)) * 3)
    rows.append(
        (
            "run labels 20000x9",
            _time(lambda: _kernels.run_labels_numpy(chain, 1e-9), repeat),
            _time(lambda: _kernels.run_labels(chain, 1e-9), repeat) if _kernels.HAVE_NUMBA else None,
        )
    )

    e, d, rel, vm = _order_inputs(800, rng)
    rows.append(
        (
            "order check 800 faces",
            _time(lambda: _kernels.order_mismatches_numpy(e, d, rel, vm), repeat),
            _time(lambda: _kernels.order_mismatches(e, d, rel, vm), repeat) if _kernels.HAVE_NUMBA else None,
        )
    )
    return rows


def end_to_end() -> list[tuple[str, float]]:
    out = []
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, GCSO_DISABLE_NUMBA=flag)
        start = time.perf_counter()
        subprocess.run(
            [sys.executable, "-m", "gcso.cli", "verify", "correspondence", "-n", "7", "-l", "3,2,1"],
            env=env,
            check=True,
            capture_output=True,
        )
        out.append((label, time.perf_counter() - start))
    return out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--end-to-end", action="store_true")
    args = parser.parse_args()

    print(f"backend in this process: {_kernels.BACKEND}")
    print(f"{'kernel':<24}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, slow, fast in kernel_table(args.repeat):
        if fast is None:
            print(f"{name:<24}{slow:>12.4f}{'n/a':>12}{'':>10}")
        else:
            print(f"{name:<24}{slow:>12.4f}{fast:>12.4f}{slow / fast:>9.1f}x")
    if args.end_to_end:
        for label, seconds in end_to_end():
            print(f"verify correspondence n=7 lambda=(3,2,1) [{label}]: {seconds:.1f} s")


if __name__ == "__main__":
    main()

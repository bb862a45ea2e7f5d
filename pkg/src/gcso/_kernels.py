"""Hot loops with a numba implementation and a pure-numpy fallback.

Set ``GCSO_DISABLE_NUMBA=1`` to force the numpy versions (useful for
debugging and for platforms without numba).
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("GCSO_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by GCSO_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# --- Pfaffian ---------------------------------------------------------------


def pfaffian_numpy(a: np.ndarray) -> float:
    """Parlett-Reid style Pfaffian with partial pivoting."""
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    if n % 2:
        return 0.0
    result = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1 :, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            result = -result
        pivot = a[k + 1, k]
        if pivot == 0.0:
            return 0.0
        result *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2 :] / a[k, k + 1]
            a[k + 2 :, k + 2 :] += np.outer(tau, a[k + 2 :, k + 1]) - np.outer(a[k + 2 :, k + 1], tau)
    return float(result)


def _pfaffian_loop(a):
    n = a.shape[0]
    if n % 2 == 1:
        return 0.0
    result = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1
        best = abs(a[k + 1, k])
        for r in range(k + 2, n):
            if abs(a[r, k]) > best:
                best = abs(a[r, k])
                kp = r
        if kp != k + 1:
            for c in range(n):
                t = a[k + 1, c]
                a[k + 1, c] = a[kp, c]
                a[kp, c] = t
            for r in range(n):
                t = a[r, k + 1]
                a[r, k + 1] = a[r, kp]
                a[r, kp] = t
            result = -result
        if a[k + 1, k] == 0.0:
            return 0.0
        result *= a[k, k + 1]
        if k + 2 < n:
            piv = a[k, k + 1]
            for i in range(k + 2, n):
                ti = a[k, i] / piv
                for j in range(k + 2, n):
                    tj = a[k, j] / piv
                    a[i, j] += ti * a[j, k + 1] - a[i, k + 1] * tj
    return result


# --- run rule ---------------------------------------------------------------


def run_labels_numpy(chain: np.ndarray, tol: float) -> np.ndarray:
    """Label maximal runs of equal values in each row of ``chain``.

    Entry ``[r, k]`` is the run index of position ``k``; a new run starts
    where consecutive values differ by more than ``tol``.
    """
    chain = np.asarray(chain, dtype=np.float64)
    if chain.shape[1] == 0:
        return np.zeros(chain.shape, dtype=np.int64)
    breaks = np.abs(np.diff(chain, axis=1)) > tol
    labels = np.zeros(chain.shape, dtype=np.int64)
    labels[:, 1:] = np.cumsum(breaks, axis=1)
    return labels


def _run_labels_loop(chain, tol):
    rows, cols = chain.shape
    labels = np.zeros((rows, cols), dtype=np.int64)
    for r in range(rows):
        cur = 0
        for k in range(1, cols):
            if abs(chain[r, k] - chain[r, k - 1]) > tol:
                cur += 1
            labels[r, k] = cur
    return labels


# --- order comparison -------------------------------------------------------


def order_mismatches_numpy(e, d, rel, vm):
    """Count pairs whose diagram order and polytope order disagree.

    Diagram order: ``e[a] <= e[b]`` as sets and ``d[a] & rel[a] <= d[b]``.
    Polytope order: ``vm[a] <= vm[b]``.  Returns (count, first_a, first_b).
    """
    n = e.shape[0]
    count = 0
    first_a = first_b = -1
    for a in range(n):
        dia = np.all((e[a] & ~e) == 0, axis=1) & np.all((d[a] & rel[a] & ~d) == 0, axis=1)
        pol = np.all((vm[a] & ~vm) == 0, axis=1)
        bad = np.flatnonzero(dia != pol)
        if bad.size:
            if count == 0:
                first_a, first_b = a, int(bad[0])
            count += int(bad.size)
    return count, first_a, first_b


def _order_mismatches_loop(e, d, rel, vm):
    n = e.shape[0]
    we, wd, wv = e.shape[1], d.shape[1], vm.shape[1]
    count = 0
    first_a = -1
    first_b = -1
    for a in range(n):
        for b in range(n):
            dia = True
            for w in range(we):
                if e[a, w] & ~e[b, w]:
                    dia = False
                    break
            if dia:
                for w in range(wd):
                    if d[a, w] & rel[a, w] & ~d[b, w]:
                        dia = False
                        break
            pol = True
            for w in range(wv):
                if vm[a, w] & ~vm[b, w]:
                    pol = False
                    break
            if dia != pol:
                if count == 0:
                    first_a = a
                    first_b = b
                count += 1
    return count, first_a, first_b


if HAVE_NUMBA:
    _pfaffian_jit = njit(cache=True)(_pfaffian_loop)
    _run_labels_jit = njit(cache=True)(_run_labels_loop)
    _order_jit = njit(cache=True)(_order_mismatches_loop)

    def pfaffian_float(a: np.ndarray) -> float:
        return float(_pfaffian_jit(np.array(a, dtype=np.float64, copy=True)))

    def run_labels(chain: np.ndarray, tol: float) -> np.ndarray:
        return _run_labels_jit(np.ascontiguousarray(chain, dtype=np.float64), float(tol))

    def order_mismatches(e, d, rel, vm):
        return _order_jit(e, d, rel, vm)

else:
    pfaffian_float = pfaffian_numpy
    run_labels = run_labels_numpy
    order_mismatches = order_mismatches_numpy

BACKEND = "numba" if HAVE_NUMBA else "numpy"

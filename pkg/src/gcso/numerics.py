"""Numerical and exact linear algebra for skew-symmetric matrices.

This is the matrix-side oracle: it evaluates the GC map on orbit points,
computes Pfaffians, builds the bordered matrices ``Z_{a,b}(x, y)`` whose
spectra encode a fiber at one stage, and inverts the stagewise
construction to rebuild a matrix over a given point of the polytope.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import prod
from typing import Sequence

import numpy as np
import sympy

from . import _kernels
from .errors import UsageError, ValidationError
from .ladder import LadderSpec, to_fraction
from .polytope import GCPoint

SKEW_TOL = 1e-9


def skew_block(value) -> list[list]:
    """The 2x2 block ``[[0, value], [-value, 0]]``, whose Pfaffian is ``value``."""
    return [[0 * value, value], [-value, 0 * value]]


def standard_matrix(spec: LadderSpec, exact: bool = False) -> np.ndarray:
    """Block-diagonal representative ``I_lambda`` of the orbit."""
    n = spec.n
    dtype = object if exact else np.float64
    zero = Fraction(0) if exact else 0.0
    a = np.full((n, n), zero, dtype=dtype)
    for k, lam in enumerate(spec.lam):
        val = lam if exact else float(lam)
        a[2 * k, 2 * k + 1] = val
        a[2 * k + 1, 2 * k] = -val
    return a


def _is_exact(a: np.ndarray) -> bool:
    return a.dtype == object


def check_skew(a: np.ndarray, tol: float = SKEW_TOL) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    if _is_exact(a):
        if any(a[i, j] != -a[j, i] for i in range(a.shape[0]) for j in range(a.shape[0])):
            raise ValidationError("matrix is not skew-symmetric")
    elif np.max(np.abs(a + a.T), initial=0.0) > tol:
        raise ValidationError("matrix is not skew-symmetric")
    return a


# ---------------------------------------------------------------------------
# Pfaffians and determinants


def pfaffian_exact(a: np.ndarray) -> Fraction:
    """Pfaffian by expansion along the first row, memoized on index sets."""
    m = a.shape[0]
    if m % 2:
        raise UsageError(f"Pfaffian needs an even size, got {m}")
    entries = [[to_fraction(a[i, j]) for j in range(m)] for i in range(m)]

    @lru_cache(maxsize=None)
    def pf(idx: tuple[int, ...]) -> Fraction:
        if not idx:
            return Fraction(1)
        first, rest = idx[0], idx[1:]
        total = Fraction(0)
        for k, j in enumerate(rest):
            if entries[first][j]:
                sign = -1 if k % 2 else 1
                total += sign * entries[first][j] * pf(rest[:k] + rest[k + 1 :])
        return total

    return pf(tuple(range(m)))


def pfaffian(a: np.ndarray):
    """Pfaffian of an even skew matrix; exact for object arrays of rationals."""
    a = check_skew(np.asarray(a))
    if a.shape[0] % 2:
        raise UsageError(f"Pfaffian needs an even size, got {a.shape[0]}")
    if _is_exact(a):
        return pfaffian_exact(a)
    return _kernels.pfaffian_float(a)


def det_exact(a: np.ndarray) -> Fraction:
    mat = sympy.Matrix(a.shape[0], a.shape[1], lambda i, j: sympy.Rational(str(to_fraction(a[i, j]))))
    d = mat.det()
    return Fraction(int(d.p), int(d.q))


# ---------------------------------------------------------------------------
# GC map and orbit sampling


def _stage_values(sub: np.ndarray) -> list[float]:
    """Nonnegative imaginary parts of eigenvalues, largest first, with Pfaffian sign."""
    m = sub.shape[0]
    sv = np.linalg.svd(sub, compute_uv=False)
    vals = [(sv[2 * i] + sv[2 * i + 1]) / 2 for i in range(m // 2)]
    if m % 2 == 0 and m and _kernels.pfaffian_float(sub) < 0:
        vals[-1] = -vals[-1]
    return vals


def gc_map(a: np.ndarray, spec: LadderSpec | None = None) -> GCPoint:
    """Evaluate the GC system on a skew matrix.

    ``u[i, m - i]`` is the i-th largest nonnegative imaginary part of the
    eigenvalues of the leading ``m x m`` block, with the last one negated
    for even ``m`` when that block has negative Pfaffian.  When ``spec`` is
    omitted it is inferred from the spectrum of the whole matrix, rounded
    to rationals.
    """
    a = check_skew(np.asarray(a, dtype=np.float64))
    n = a.shape[0]
    if spec is None:
        lam = _stage_values(a)
        spec = LadderSpec(n, [Fraction(x).limit_denominator(10**9) for x in lam])
    elif spec.n != n:
        raise ValidationError(f"matrix size {n} does not match n = {spec.n}")
    values = {}
    for m in range(2, n):
        for i, v in enumerate(_stage_values(a[:m, :m]), start=1):
            values[(i, m - i)] = float(v)
    return GCPoint(spec, values)


def random_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormalized Gaussian matrix with determinant +1."""
    g = rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def sample_orbit_point(spec: LadderSpec, seed: int) -> np.ndarray:
    """``Q^T I_lambda Q`` for a seeded random rotation ``Q``."""
    rng = np.random.default_rng(seed)
    q = random_rotation(spec.n, rng)
    return q.T @ standard_matrix(spec) @ q


# ---------------------------------------------------------------------------
# bordered matrices Z_{a,b}(x, y)


@dataclass(frozen=True)
class FiberMatrixFamily:
    """A bordered matrix over the block-diagonal ``b``.

    ``x`` has ``len(b)`` entries for odd size and ``len(b) + 1`` for even
    size (the extra entry is ``x_{l+1}``); ``y`` always has ``len(b)``.
    """

    m: int
    b: tuple
    x: tuple
    y: tuple

    def __post_init__(self):
        ell = (self.m - 1) // 2
        if len(self.b) != ell or len(self.y) != ell:
            raise ValidationError(f"size {self.m} needs {ell} b and y entries")
        want = ell + (1 if self.m % 2 == 0 else 0)
        if len(self.x) != want:
            raise ValidationError(f"size {self.m} needs {want} x entries, got {len(self.x)}")

    def matrix(self) -> np.ndarray:
        m = self.m
        exact = all(isinstance(v, (int, Fraction)) for v in self.b + self.x + self.y)
        zero = Fraction(0) if exact else 0.0
        z = np.full((m, m), zero, dtype=object if exact else np.float64)
        for k, bk in enumerate(self.b):
            z[2 * k, 2 * k + 1] = bk
            z[2 * k + 1, 2 * k] = -bk
            z[2 * k, m - 1] = self.x[k]
            z[2 * k + 1, m - 1] = self.y[k]
        if m % 2 == 0:
            z[m - 2, m - 1] = self.x[-1]
        z[m - 1, :] = -z[:, m - 1]
        return z


def char_poly_z(fam: FiberMatrixFamily) -> list:
    """Coefficients (highest degree first) of ``det(xi I - Z)`` from the closed form."""
    xi = sympy.Symbol("xi")
    b2 = [sympy.nsimplify(v) ** 2 for v in fam.b]
    r = [sympy.nsimplify(fam.x[j]) ** 2 + sympy.nsimplify(fam.y[j]) ** 2 for j in range(len(fam.b))]
    base = sympy.Mul(*[xi**2 + v for v in b2])
    partial = [sympy.Mul(*[xi**2 + v for i, v in enumerate(b2) if i != j]) for j in range(len(b2))]
    if fam.m % 2:
        expr = xi * (base + sum((r[j] * partial[j] for j in range(len(b2))), sympy.Integer(0)))
    else:
        last = sympy.nsimplify(fam.x[-1]) ** 2
        expr = (xi**2 + last) * base + xi**2 * sum((r[j] * partial[j] for j in range(len(b2))), sympy.Integer(0))
    return sympy.Poly(sympy.expand(expr), xi).all_coeffs()


def char_poly_direct(fam: FiberMatrixFamily) -> list:
    """Coefficients of ``det(xi I - Z)`` by direct symbolic expansion."""
    z = fam.matrix()
    mat = sympy.Matrix(fam.m, fam.m, lambda i, j: sympy.nsimplify(z[i, j]))
    xi = sympy.Symbol("xi")
    return sympy.Poly(mat.charpoly(xi).as_expr(), xi).all_coeffs()


def terminal_x(a: Sequence, b: Sequence):
    """Fixed value of ``x_{l+1}`` at an even stage; ``None`` if some ``b`` is 0."""
    if len(a) != len(b) + 1:
        raise ValidationError("terminal_x needs len(a) = len(b) + 1")
    if any(v == 0 for v in b):
        return None
    return prod(a) / prod(b)


# ---------------------------------------------------------------------------
# sphere radii


def _poly_mul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return out


def _poly_divexact(p: list[Fraction], root: Fraction, times: int, clamp: float = 0.0) -> list[Fraction]:
    """Divide ``p`` (low degree first) by ``(t + root)^times``, requiring no remainder."""
    for _ in range(times):
        high = p[::-1]
        acc = [high[0]]
        for c in high[1:]:
            acc.append(c - root * acc[-1])
        rem, quotient = acc[-1], acc[:-1]
        if rem != 0 and not clamp:
            raise ValidationError("strings do not interlace (characteristic identity fails)")
        p = quotient[::-1]
    return p


def _poly_eval(p: list[Fraction], t: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * t + c
    return acc


@dataclass(frozen=True)
class SphereRadii:
    """One constant per group of equal ``|b|`` values.

    ``groups`` holds ``(b_squared, multiplicity, C)``; the group contributes
    a sphere of dimension ``2k - 1`` (or ``2k`` for the zero group at an
    even stage) when ``C > 0`` and a point when ``C = 0``.
    """

    m: int
    groups: tuple[tuple[Fraction, int, Fraction], ...]
    terminal_x: Fraction | None

    def sphere_dims(self) -> tuple[int, ...]:
        dims = []
        for value, k, c in self.groups:
            if c > 0:
                dims.append(2 * k if (self.m % 2 == 0 and value == 0) else 2 * k - 1)
        return tuple(sorted(dims, reverse=True))


def sphere_radii(m: int, a: Sequence, b: Sequence, clamp: float = 0.0) -> SphereRadii:
    """Exact constants of the product-of-spheres description of one stage.

    ``clamp`` lets constants in ``[-clamp, 0)`` count as zero, for strings
    read off floating point matrices.
    """
    a = [to_fraction(v) for v in a]
    b = [to_fraction(v) for v in b]
    if len(a) != m // 2 or len(b) != (m - 1) // 2:
        raise ValidationError(f"stage {m} needs {m // 2} a-values and {(m - 1) // 2} b-values")
    counts: dict[Fraction, int] = {}
    for v in b:
        counts[v * v] = counts.get(v * v, 0) + 1
    order = sorted(counts, reverse=True)
    numer = [Fraction(1)]
    for v in a:
        numer = _poly_mul(numer, [v * v, Fraction(1)])
    q = numer
    for beta in order:
        q = _poly_divexact(q, beta, counts[beta] - 1, clamp)
    groups = []
    for g in order:
        others = prod((h - g for h in order if h != g), start=Fraction(1))
        if m % 2:
            c = _poly_eval(q, -g) / others
        elif g != 0:
            c = _poly_eval(q, -g) / (-g * others)
        else:
            c = _poly_divexact(q, Fraction(0), 1, clamp)[0] / others
        if -clamp <= c < 0:
            c = Fraction(0)
        if c < 0:
            raise ValidationError("strings do not interlace (negative radius)")
        groups.append((g, counts[g], c))
    tx = terminal_x(a, b) if m % 2 == 0 else None
    return SphereRadii(m, tuple(groups), tx)


# ---------------------------------------------------------------------------
# reconstruction


def _normal_form(a: np.ndarray, target: Sequence[float], tol: float = 1e-7) -> np.ndarray:
    """Rotation ``P`` (det +1) with ``P^T a P`` block diagonal with blocks ``B(target)``."""
    m = a.shape[0]
    nonzero = sum(1 for v in target if abs(v) > tol)
    w, vecs = np.linalg.eigh(1j * a)
    order = np.argsort(-w)
    cols = []
    for k in order[:nonzero]:
        v = vecs[:, k] * np.sqrt(2)
        p, q = v.real, v.imag
        cols.append((q, p))
    if m - 2 * nonzero > 0:
        _, _, vt = np.linalg.svd(a)
        null = vt[2 * nonzero :].T
        # project out the span of the nonzero pairs, then orthonormalize
        basis = np.column_stack([c for pair in cols for c in pair]) if cols else np.zeros((m, 0))
        null = null - basis @ (basis.T @ null)
        null, _ = np.linalg.qr(null)
    else:
        null = np.zeros((m, 0))
    if nonzero and m % 2 == 0 and nonzero == m // 2 and target[-1] < 0:
        q, p = cols[-1]
        cols[-1] = (p, q)
    flat = [c for pair in cols for c in pair] + [null[:, k] for k in range(null.shape[1])]
    pmat = np.column_stack(flat) if flat else np.zeros((m, 0))
    if m and np.linalg.det(pmat) < 0:
        if null.shape[1]:
            pmat[:, -1] = -pmat[:, -1]
        else:
            q, p = cols[-1]
            pmat[:, 2 * nonzero - 2], pmat[:, 2 * nonzero - 1] = p, q
    return pmat


def _unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def stage_strings_of(u: GCPoint) -> list[tuple]:
    """``a^(m)`` for m = 2..n as tuples (index 0 holds stage 2)."""
    n = u.spec.n
    return [tuple(u.value(i, m - i) for i in range(1, m // 2 + 1)) for m in range(2, n + 1)]


def reconstruct_matrix(u: GCPoint, seed: int) -> np.ndarray:
    """A skew matrix whose GC image is ``u``, built one stage at a time."""
    rng = np.random.default_rng(seed)
    clamp = 0.0 if u.is_exact else 1e-9
    exact = GCPoint(u.spec, {k: to_fraction(v) for k, v in u.values.items()})
    strings = stage_strings_of(exact)
    current = np.array([[0.0, float(strings[0][0])], [-float(strings[0][0]), 0.0]])
    for m in range(3, u.spec.n + 1):
        a, b = strings[m - 2], strings[m - 3]
        radii = sphere_radii(m, a, b, clamp)
        bf = [float(v) for v in b]
        pmat = _normal_form(current, bf)
        ell = len(b)
        x = np.zeros(ell + (1 if m % 2 == 0 else 0))
        y = np.zeros(ell)
        for value, k, c in radii.groups:
            members = [j for j in range(ell) if b[j] * b[j] == value]
            zero_even = m % 2 == 0 and value == 0
            dim = 2 * k + (1 if zero_even else 0)
            vec = _unit_vector(dim, rng) * np.sqrt(float(c))
            for pos, j in enumerate(members):
                x[j], y[j] = vec[2 * pos], vec[2 * pos + 1]
            if zero_even:
                x[-1] = vec[-1]
        if m % 2 == 0 and radii.terminal_x is not None:
            x[-1] = float(radii.terminal_x)
        z = FiberMatrixFamily(m, tuple(bf), tuple(x), tuple(y)).matrix()
        big = np.eye(m)
        big[: m - 1, : m - 1] = pmat
        current = big @ z @ big.T
        current = (current - current.T) / 2
    return current

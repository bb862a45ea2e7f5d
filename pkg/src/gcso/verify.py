"""Cross-check suites shared by the command line and the test-suite.

Each suite returns a small report object with an ``ok`` flag and a one
line ``summary()``; nothing here prints.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np
import sympy

from .fibers import interlaces, regions_fiber, stage_fiber, string_regions
from .ladder import LadderSpec
from .numerics import (
    det_exact,
    gc_map,
    pfaffian_exact,
    reconstruct_matrix,
    sample_orbit_point,
    sphere_radii,
    standard_matrix,
)
from .polytope import build_hrep, correspondence

# Integer patterns covering distinct entries, repeats, trailing zeros and
# negative last entries for even n.
CORPUS: tuple[tuple[int, tuple[int, ...]], ...] = (
    (2, (0,)),
    (2, (1,)),
    (3, (2,)),
    (3, (0,)),
    (4, (2, 1)),
    (4, (1, 0)),
    (4, (2, -1)),
    (4, (1, -1)),
    (5, (2, 1)),
    (5, (2, 2)),
    (5, (3, 0)),
    (6, (3, 2, 1)),
    (6, (3, 3, 3)),
    (6, (2, 2, 1)),
    (6, (2, 1, 0)),
    (6, (3, 2, -1)),
    (6, (2, 2, -2)),
    (7, (3, 2, 1)),
    (7, (2, 2, 1)),
    (7, (2, 1, 0)),
    (7, (2, 2, 0)),
)

ROUND_TRIP_TOL = 1e-8
CONTAINMENT_TOL = 1e-9


def corpus_specs(max_n: int = 7) -> list[LadderSpec]:
    return [LadderSpec(n, lam) for n, lam in CORPUS if n <= max_n]


# ---------------------------------------------------------------------------
# exhaustive strings


def interlacing_pairs(max_len: int, max_value: int) -> Iterator[tuple[int, tuple, tuple]]:
    """All interlacing ``(m, a^(m), a^(m-1))`` whose strings fit the bounds.

    Entries range over ``0..max_value``; the last entry of an even-stage
    string also takes negative values.
    """

    def strings(stage: int) -> Iterable[tuple]:
        length = stage // 2
        if length == 0:
            yield ()
            return
        signed = stage % 2 == 0
        last = range(-max_value, max_value + 1) if signed else range(max_value + 1)
        for head in itertools.product(range(max_value, -1, -1), repeat=length - 1):
            if any(x < y for x, y in zip(head, head[1:])):
                continue
            for tail in last:
                yield head + (tail,)

    m = 3
    while m // 2 <= max_len:
        for a in strings(m):
            for b in strings(m - 1):
                if interlaces(m, a, b):
                    yield m, a, b
        m += 1


@dataclass
class StringReport:
    checked: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.checked > 0 and not self.mismatches

    def summary(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        return f"{verdict} strings: {self.checked} pairs checked, {len(self.mismatches)} mismatches"


def verify_strings(max_len: int = 4, max_value: int = 3) -> StringReport:
    """Run rule, string cutting and sphere radii on every interlacing pair."""
    report = StringReport()
    for m, a, b in interlacing_pairs(max_len, max_value):
        run = stage_fiber(m, a, b)
        cut = regions_fiber(string_regions(m, a, b))
        radii = sphere_radii(m, a, b).sphere_dims()
        report.checked += 1
        if not run == cut == radii:
            report.mismatches.append({"m": m, "a": a, "b": b, "run": run, "cut": cut, "radii": radii})
    return report


# ---------------------------------------------------------------------------
# numeric sampling


def cayley_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Rational rotation ``(I - S)(I + S)^-1`` for a small integer skew ``S``."""
    s = sympy.zeros(n, n)
    for i in range(n):
        for j in range(i + 1, n):
            v = int(rng.integers(-2, 3))
            s[i, j], s[j, i] = v, -v
    eye = sympy.eye(n)
    q = (eye - s) * (eye + s).inv()
    return np.array([[Fraction(int(x.p), int(x.q)) for x in q.row(i)] for i in range(n)], dtype=object)


def _rational_interior_point(spec: LadderSpec, rng: np.random.Generator) -> list[Fraction]:
    lattice = correspondence(spec).lattice
    verts = lattice.vertices
    weights = [Fraction(int(w)) for w in rng.integers(1, 10, size=len(verts))]
    # Push some samples onto proper faces, where eigenvalues collide.
    if len(verts) > 1 and rng.random() < 0.5:
        keep = rng.random(len(verts)) < 0.5
        if keep.any():
            weights = [w if k else Fraction(0) for w, k in zip(weights, keep)]
    total = sum(weights)
    dim = len(verts[0])
    return [sum(w * v[k] for w, v in zip(weights, verts)) / total for k in range(dim)]


@dataclass
class NumericReport:
    spec: LadderSpec
    samples: int
    max_containment_violation: float = 0.0
    max_round_trip_error: float = 0.0
    pfaffian_failures: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.pfaffian_failures == 0

    def summary(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        return (
            f"{verdict} {self.spec.label()}: {self.samples} samples, "
            f"containment slack {self.max_containment_violation:.2e}, "
            f"round trip {self.max_round_trip_error:.2e}, "
            f"{self.pfaffian_failures} pfaffian failures"
        )


def verify_numeric(spec: LadderSpec, samples: int = 100, seed: int = 0) -> NumericReport:
    """Orbit containment, reconstruction round trips and exact Pfaffians."""
    report = NumericReport(spec, samples)
    full = build_hrep(spec, reduce=False)
    poly = correspondence(spec).polytope
    seeds = np.random.SeedSequence(seed).generate_state(samples)
    for k, s in enumerate(seeds):
        s = int(s)
        rng = np.random.default_rng(s)

        u = gc_map(sample_orbit_point(spec, s), spec)
        x = full.point_vector(u)
        worst = max((-float(q.slack(x)) for q in full.inequalities), default=0.0)
        report.max_containment_violation = max(report.max_containment_violation, worst)
        if worst > CONTAINMENT_TOL:
            report.failures.append(("containment", k, worst))

        target = poly.vector_to_point(_rational_interior_point(spec, rng))
        back = gc_map(reconstruct_matrix(target, s), spec)
        err = max((abs(float(back.values[key]) - float(val)) for key, val in target.values.items() if key in back.values), default=0.0)
        report.max_round_trip_error = max(report.max_round_trip_error, err)
        if not err < ROUND_TRIP_TOL:
            report.failures.append(("round trip", k, err))

        for a in _rational_skew_inputs(spec, rng):
            if pfaffian_exact(a) ** 2 != det_exact(a):
                report.pfaffian_failures += 1
    return report


def _rational_skew_inputs(spec: LadderSpec, rng: np.random.Generator) -> list[np.ndarray]:
    """A random rational skew matrix of even size, plus an exact orbit point for even n."""
    size = spec.n + spec.n % 2
    a = np.full((size, size), Fraction(0), dtype=object)
    for i in range(size):
        for j in range(i + 1, size):
            v = Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5)))
            a[i, j], a[j, i] = v, -v
    out = [a]
    if spec.n % 2 == 0:
        q = cayley_rotation(spec.n, rng)
        out.append(q @ standard_matrix(spec, exact=True) @ q.T)
    return out


def verify_corpus_numeric(specs: Sequence[LadderSpec], samples: int = 100, seed: int = 0) -> list[NumericReport]:
    return [verify_numeric(spec, samples, seed) for spec in specs]

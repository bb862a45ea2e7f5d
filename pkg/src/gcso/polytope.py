"""Exact polytope oracle for GC polytopes.

The polytope is given by interlacing inequalities with absolute values on
the diagonal.  Absolute values are expanded into pairs of linear
inequalities, coordinates pinned by repeated or zero entries of lambda are
substituted, and vertices are enumerated exactly over the integers by a
double description sweep.  The face lattice is then generated by
intersecting vertex sets with tight sets of the inequalities.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import CapacityError, ContainmentError, UsageError, ValidationError
from .ladder import (
    Box,
    DiagramFace,
    LadderDiagram,
    LadderSpec,
    box_edges,
    build_ladder,
    enumerate_faces,
    to_fraction,
)

DEFAULT_ORACLE_CAP = 10
FLOAT_TOL = 1e-9


def oracle_cap() -> int:
    raw = os.environ.get("GCSO_ORACLE_CAP")
    if raw is None:
        return DEFAULT_ORACLE_CAP
    try:
        return int(raw)
    except ValueError as exc:
        raise ValidationError(f"GCSO_ORACLE_CAP must be an integer, got {raw!r}") from exc


def _fmt(box: Box) -> str:
    return f"u_{{{box[0]},{box[1]}}}"


@dataclass(frozen=True)
class GCPoint:
    """Values of all non-boundary coordinates ``u[i, j]`` of a pattern.

    Values are Fractions for exact points or floats for sampled ones.
    Boundary values ``u[i, n - i] = lambda_i`` are supplied by ``spec``.
    """

    spec: LadderSpec
    values: Mapping[Box, object]

    def __post_init__(self):
        missing = set(self.spec.coordinates()) - set(self.values)
        if missing:
            raise ValidationError(f"point is missing coordinates {sorted(missing)}")

    @classmethod
    def from_boxes(cls, spec: LadderSpec, box_values: Sequence, exact: bool = True) -> "GCPoint":
        """Build a point from values on the diagram's boxes, in box order.

        Coordinates outside the diagram take their pinned values.
        """
        diagram = build_ladder(spec)
        if len(box_values) != len(diagram.boxes):
            raise ValidationError(
                f"expected {len(diagram.boxes)} box values "
                f"({', '.join(_fmt(b) for b in diagram.boxes)}), got {len(box_values)}"
            )
        conv = to_fraction if exact else float
        values = {b: conv(pinned_value(spec, b)) for b in spec.coordinates() if b not in diagram.box_set}
        for b, x in zip(diagram.boxes, box_values):
            values[b] = conv(x)
        return cls(spec, values)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, (Fraction, int)) for v in self.values.values())

    def value(self, i: int, j: int):
        """``u[i, j]`` including boundary entries."""
        if i + j == self.spec.n:
            return self.spec.boundary_value(i)
        return self.values[(i, j)]

    def box_vector(self, diagram: LadderDiagram) -> tuple:
        return tuple(self.values[b] for b in diagram.boxes)


def pinned_value(spec: LadderSpec, box: Box) -> Fraction:
    """The value forced on a coordinate that is not a box of the diagram."""
    return spec.abs_lambda[box[0] - 1]


@dataclass(frozen=True)
class Inequality:
    coeffs: tuple[Fraction, ...]
    const: Fraction
    label: str

    def slack(self, x: Sequence) -> object:
        return sum(c * v for c, v in zip(self.coeffs, x)) - self.const


@dataclass(frozen=True)
class HPolytope:
    """``coeffs . u >= const`` over the free coordinates ``variables``."""

    spec: LadderSpec
    variables: tuple[Box, ...]
    inequalities: tuple[Inequality, ...]
    fixed: Mapping[Box, Fraction] = field(default_factory=dict)

    @property
    def dim_ambient(self) -> int:
        return len(self.variables)

    def point_vector(self, u: GCPoint) -> tuple:
        return tuple(u.values[v] for v in self.variables)

    def vector_to_point(self, x: Sequence) -> GCPoint:
        values = dict(self.fixed)
        values.update(zip(self.variables, x))
        return GCPoint(self.spec, values)

    def check_contains(self, x: Sequence, tol: float = FLOAT_TOL) -> None:
        exact = all(isinstance(v, (Fraction, int)) for v in x)
        for ineq in self.inequalities:
            s = ineq.slack(x)
            if (s < 0) if exact else (s < -tol):
                raise ContainmentError(f"point violates {ineq.label} (slack {float(s):.6g})")

    def tight_set(self, x: Sequence, tol: float = FLOAT_TOL) -> int:
        exact = all(isinstance(v, (Fraction, int)) for v in x)
        mask = 0
        for k, ineq in enumerate(self.inequalities):
            s = ineq.slack(x)
            if (s == 0) if exact else (abs(s) <= tol):
                mask |= 1 << k
        return mask

    def export(self) -> str:
        """Plain-text half-space format: coefficients then constant per line."""
        lines = ["# " + " ".join(_fmt(v) for v in self.variables) + " const  (coeffs . u >= const)"]
        for ineq in self.inequalities:
            lines.append(" ".join(str(c) for c in ineq.coeffs) + " " + str(ineq.const))
        return "\n".join(lines) + "\n"


def _raw_inequalities(spec: LadderSpec):
    """Yield ``(larger, smaller, abs_on_smaller, text)`` for every defining inequality."""
    n = spec.n
    for i, j in itertools.product(range(1, n), repeat=2):
        if i > j or i + j > n - 1:
            continue
        # u[i, j+1] >= u[i, j], with |.| on the diagonal
        yield (i, j + 1), (i, j), i == j
        if i + 1 <= j:
            yield (i, j), (i + 1, j), i + 1 == j


def build_hrep(spec: LadderSpec, reduce: bool = True) -> HPolytope:
    """Half-space representation of the GC polytope of ``spec``.

    With ``reduce`` the coordinates outside the ladder diagram are
    substituted by their pinned values and the variables are exactly the
    diagram boxes.  Without it every non-boundary coordinate is a variable.
    """
    diagram = build_ladder(spec)
    coords = spec.coordinates()
    if reduce:
        variables = tuple(diagram.boxes)
        fixed = {b: pinned_value(spec, b) for b in coords if b not in diagram.box_set}
    else:
        variables = tuple(coords)
        fixed = {}
    index = {v: k for k, v in enumerate(variables)}
    d = len(variables)

    def term(box):
        """Return (coeff vector, constant) for the affine expression u[box]."""
        vec = [Fraction(0)] * d
        if box[0] + box[1] == spec.n:
            return vec, spec.boundary_value(box[0])
        if box in index:
            vec[index[box]] = Fraction(1)
            return vec, Fraction(0)
        return vec, fixed[box]

    out: list[Inequality] = []
    seen = set()
    for big, small, absolute in _raw_inequalities(spec):
        text = f"{_fmt(big)} >= {'|' + _fmt(small) + '|' if absolute else _fmt(small)}"
        bv, bc = term(big)
        sv, sc = term(small)
        signs = (1, -1) if absolute else (1,)
        small_const = not any(sv)
        if absolute and small_const:
            signs = (1,)
            sc = abs(sc)
        for s in signs:
            coeffs = tuple(b - s * x for b, x in zip(bv, sv))
            const = s * sc - bc
            label = text if len(signs) == 1 else f"{text} [{'+' if s > 0 else '-'} branch]"
            if not any(coeffs):
                if const > 0:
                    raise ValidationError(f"pinned values violate {text}")
                continue
            key = (coeffs, const)
            if key in seen:
                continue
            seen.add(key)
            out.append(Inequality(coeffs, const, label))
    return HPolytope(spec, variables, tuple(out), fixed)


# ---------------------------------------------------------------------------
# exact vertex enumeration


def _integer_rows(p: HPolytope) -> list[list[int]]:
    """Homogenized integer rows ``(a, -b)`` with ``(a, -b) . (x, t) >= 0``."""
    rows = []
    for ineq in p.inequalities:
        vals = list(ineq.coeffs) + [-ineq.const]
        den = lcm(*(v.denominator for v in vals))
        rows.append([int(v * den) for v in vals])
    return rows


def _normalize(vec: list[int]) -> list[int]:
    g = 0
    for v in vec:
        g = gcd(g, v)
    if g > 1:
        return [v // g for v in vec]
    return vec


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def double_description(rows: list[list[int]], dim: int) -> list[list[int]]:
    """Extreme rays of the pointed cone ``{z : row . z >= 0}`` in ``Z^dim``.

    Lineality is carried explicitly and turned into rays as constraints
    arrive; ray pairs are combined only when they pass the combinatorial
    adjacency test on their tight sets.
    """
    lineality = [[int(i == k) for i in range(dim)] for k in range(dim)]
    rays: list[list[int]] = []
    tight: list[int] = []
    for idx, h in enumerate(rows):
        bit = 1 << idx
        pivot = next((l for l in lineality if _dot(h, l) != 0), None)
        if pivot is not None:
            hp = _dot(h, pivot)
            if hp < 0:
                pivot = [-v for v in pivot]
                hp = -hp
            new_lin = []
            for l in lineality:
                if l is pivot or l == pivot or l == [-v for v in pivot]:
                    continue
                hl = _dot(h, l)
                new_lin.append(_normalize([hp * a - hl * b for a, b in zip(l, pivot)]) if hl else l)
            lineality = new_lin
            new_rays = []
            for r in rays:
                hr = _dot(h, r)
                new_rays.append(_normalize([hp * a - hr * b for a, b in zip(r, pivot)]) if hr else r)
            rays = new_rays + [_normalize(pivot)]
            tight = [z | bit for z in tight] + [tight_all_prev(idx)]
            continue
        vals = [_dot(h, r) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zero = [k for k, v in enumerate(vals) if v == 0]
        new_rays = [rays[k] for k in pos] + [rays[k] for k in zero]
        new_tight = [tight[k] for k in pos] + [tight[k] | bit for k in zero]
        for p in pos:
            for q in neg:
                common = tight[p] & tight[q]
                adjacent = True
                for k in range(len(rays)):
                    if k != p and k != q and common & ~tight[k] == 0:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vp, vq = vals[p], -vals[q]
                new_rays.append(_normalize([vp * a + vq * b for a, b in zip(rays[q], rays[p])]))
                new_tight.append(common | bit)
        rays, tight = new_rays, new_tight
    if lineality:
        raise UsageError("cone is not pointed; the polytope is unbounded")
    return rays


def tight_all_prev(idx: int) -> int:
    """Tight set of a former lineality direction: every earlier constraint."""
    return (1 << idx) - 1


def vertices_dd(p: HPolytope) -> list[tuple[Fraction, ...]]:
    """Vertices of ``p`` by double description on the homogenized cone."""
    d = p.dim_ambient
    if d == 0:
        return [()]
    rows = [[0] * d + [1]] + _integer_rows(p)
    verts = []
    for r in double_description(rows, d + 1):
        t = r[-1]
        if t <= 0:
            raise UsageError("unbounded direction found in a GC polytope")
        verts.append(tuple(Fraction(v, t) for v in r[:-1]))
    return sorted(set(verts))


def _solve_exact(a: list[list[Fraction]], b: list[Fraction]) -> tuple[Fraction, ...] | None:
    n = len(a)
    m = [row[:] + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(row[-1] for row in m)


def vertices_subsets(p: HPolytope) -> list[tuple[Fraction, ...]]:
    """Vertices by solving every d-subset of inequalities; slow cross-check."""
    d = p.dim_ambient
    if d == 0:
        return [()]
    found = set()
    for subset in itertools.combinations(p.inequalities, d):
        x = _solve_exact([list(q.coeffs) for q in subset], [q.const for q in subset])
        if x is not None and all(q.slack(x) >= 0 for q in p.inequalities):
            found.add(x)
    return sorted(found)


@lru_cache(maxsize=None)
def _rank_cached(rows: tuple[tuple[Fraction, ...], ...]) -> int:
    return exact_rank([list(r) for r in rows])


def exact_rank(rows: list[list[Fraction]]) -> int:
    m = [r[:] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rank + 1, len(m)):
            if m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# face lattice


@dataclass(frozen=True)
class PolytopeFace:
    """A nonempty face: its vertex set, active inequalities, dimension, sample."""

    vertex_mask: int
    active_mask: int
    dim: int
    sample: tuple[Fraction, ...]


@dataclass
class FaceLattice:
    polytope: HPolytope
    vertices: list[tuple[Fraction, ...]]
    faces: list[PolytopeFace]

    @cached_property
    def by_vertex_mask(self) -> dict[int, int]:
        return {f.vertex_mask: k for k, f in enumerate(self.faces)}

    def leq(self, a: PolytopeFace, b: PolytopeFace) -> bool:
        return a.vertex_mask & ~b.vertex_mask == 0

    def f_vector(self) -> tuple[int, ...]:
        top = max(f.dim for f in self.faces)
        return tuple(sum(1 for f in self.faces if f.dim == k) for k in range(top + 1))

    @cached_property
    def tight_masks(self) -> list[int]:
        """For each inequality, the bitmask of vertices on which it is tight."""
        out = []
        for ineq in self.polytope.inequalities:
            m = 0
            for k, v in enumerate(self.vertices):
                if ineq.slack(v) == 0:
                    m |= 1 << k
            out.append(m)
        return out


def enumerate_faces_bruteforce(p: HPolytope, cap: int | None = None) -> FaceLattice:
    """Exact face lattice of ``p`` (the empty face excluded)."""
    cap = oracle_cap() if cap is None else cap
    if p.dim_ambient > cap:
        raise CapacityError(
            f"ambient dimension {p.dim_ambient} exceeds the oracle cap {cap} (set GCSO_ORACLE_CAP)"
        )
    verts = vertices_dd(p)
    lattice = FaceLattice(p, verts, [])
    tight = lattice.tight_masks
    d = p.dim_ambient
    full = (1 << len(verts)) - 1
    rows = [ineq.coeffs for ineq in p.inequalities]

    def active_of(vmask: int) -> int:
        a = 0
        for k, t in enumerate(tight):
            if vmask & ~t == 0:
                a |= 1 << k
        return a

    def make(vmask: int) -> PolytopeFace:
        active = active_of(vmask)
        sel = tuple(rows[k] for k in range(len(rows)) if active >> k & 1)
        dim = d - (_rank_cached(sel) if sel else 0)
        members = [verts[k] for k in range(len(verts)) if vmask >> k & 1]
        sample = tuple(sum(col, Fraction(0)) / len(members) for col in zip(*members)) if d else ()
        return PolytopeFace(vmask, active, dim, sample)

    seen = {full}
    queue = [full]
    while queue:
        cur = queue.pop()
        for t in tight:
            g = cur & t
            if g and g not in seen:
                seen.add(g)
                queue.append(g)
    faces = sorted((make(m) for m in seen), key=lambda f: (f.dim, f.vertex_mask))
    lattice.faces = faces
    return lattice


# ---------------------------------------------------------------------------
# correspondence with diagram faces


def _v(x, box: Box):
    """Absolute value on the diagonal, identity elsewhere."""
    return abs(x) if box[0] == box[1] else x


@dataclass(frozen=True)
class FaceSupport:
    """Equalities ``v[p] = v[q]`` (``v = |u|`` on the diagonal) plus sign constraints."""

    equalities: tuple[tuple[Box, Box], ...]
    nonnegative: tuple[Box, ...]
    nonpositive: tuple[Box, ...]

    def holds(self, u: GCPoint, tol: float = 0.0) -> bool:
        for p, q in self.equalities:
            a = _v(u.value(*p), p)
            b = _v(u.value(*q), q)
            if abs(a - b) > tol:
                return False
        if any(u.value(*b) < -tol for b in self.nonnegative):
            return False
        return not any(u.value(*b) > tol for b in self.nonpositive)

    def describe(self) -> list[str]:
        def name(b):
            return f"|{_fmt(b)}|" if b[0] == b[1] else _fmt(b)

        out = [f"{name(p)} = {name(q)}" for p, q in self.equalities]
        out += [f"{_fmt(b)} >= 0" for b in self.nonnegative]
        out += [f"{_fmt(b)} <= 0" for b in self.nonpositive]
        return out


def face_support(face: DiagramFace) -> FaceSupport:
    """Equalities and sign constraints that cut out the polytope face of ``face``."""
    d = face.diagram
    spec = d.spec
    iso = face.isogram
    coords = set(spec.coordinates())
    equalities = []
    for box in d.boxes:
        i, j = box
        e = box_edges(box)
        if not iso.contains(e["top"]):
            up = (i, j + 1)
            if up in coords or sum(up) == spec.n:
                equalities.append((box, up))
        if i != j and not iso.contains(e["right"]):
            right = (i + 1, j)
            if right in coords or sum(right) == spec.n:
                equalities.append((box, right))
    nonneg, nonpos = [], []
    for j, chosen in enumerate(face.coastline.choices):
        lo, hi = min(chosen), max(chosen)
        for b in range(j + 1, d.strip_tops[j] + 1):
            box = (j + 1, b)
            if box not in d.box_set:
                continue
            if b > hi:
                nonneg.append(box)
            elif b <= lo:
                nonpos.append(box)
    return FaceSupport(tuple(equalities), tuple(nonneg), tuple(nonpos))


@dataclass
class CorrespondenceReport:
    spec: LadderSpec
    n_diagram_faces: int
    n_polytope_faces: int
    matched: int
    dim_mismatches: list = field(default_factory=list)
    unmatched: list = field(default_factory=list)
    collisions: list = field(default_factory=list)
    sample_failures: list = field(default_factory=list)
    order_mismatches: int = 0
    first_order_mismatch: tuple | None = None

    @property
    def ok(self) -> bool:
        return (
            self.matched == self.n_diagram_faces == self.n_polytope_faces
            and not self.dim_mismatches
            and not self.unmatched
            and not self.collisions
            and not self.sample_failures
            and self.order_mismatches == 0
        )

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return (
            f"{status} {self.spec.label()}: {self.matched}/{self.n_polytope_faces} matched, "
            f"{len(self.dim_mismatches)} dim mismatches, {self.order_mismatches} order mismatches"
        )


@dataclass
class Correspondence:
    """Diagram faces, the exact lattice, and the map between them."""

    diagram: LadderDiagram
    faces: list[DiagramFace]
    polytope: HPolytope
    lattice: FaceLattice
    psi: list[int | None]
    report: CorrespondenceReport

    def polytope_face(self, face: DiagramFace) -> PolytopeFace:
        k = self.psi[self._index[face]]
        if k is None:
            raise UsageError(f"face {face.id} has no polytope counterpart")
        return self.lattice.faces[k]

    @cached_property
    def _index(self) -> dict[DiagramFace, int]:
        return {f: k for k, f in enumerate(self.faces)}

    @cached_property
    def inverse(self) -> dict[int, DiagramFace]:
        return {k: self.faces[i] for i, k in enumerate(self.psi) if k is not None}

    def sample_point(self, face: DiagramFace) -> GCPoint:
        return self.polytope.vector_to_point(self.polytope_face(face).sample)

    def face_of_vector(self, x: Sequence) -> DiagramFace:
        pf = face_of_point(self.polytope, self.polytope.vector_to_point(x), self.lattice)
        return self.inverse[self.lattice.by_vertex_mask[pf.vertex_mask]]


def _masks_to_words(masks: Sequence[int]) -> np.ndarray:
    width = max(1, max((m.bit_length() for m in masks), default=1))
    words = (width + 63) // 64
    out = np.zeros((len(masks), words), dtype=np.uint64)
    for r, m in enumerate(masks):
        for w in range(words):
            out[r, w] = (m >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    return out


class _SupportTables:
    """Per-constraint vertex bitmasks so supports reduce to bitwise ANDs."""

    def __init__(self, points: list[GCPoint]):
        self.points = points
        self.full = (1 << len(points)) - 1
        self.cache: dict[tuple, int] = {}

    def _mask(self, key: tuple, test) -> int:
        got = self.cache.get(key)
        if got is None:
            got = 0
            for k, pt in enumerate(self.points):
                if test(pt):
                    got |= 1 << k
            self.cache[key] = got
        return got

    def vertex_mask(self, sup: FaceSupport) -> int:
        mask = self.full
        for p, q in sup.equalities:
            mask &= self._mask(("eq", p, q), lambda pt: _v(pt.value(*p), p) == _v(pt.value(*q), q))
        for b in sup.nonnegative:
            mask &= self._mask(("ge", b), lambda pt: pt.value(*b) >= 0)
        for b in sup.nonpositive:
            mask &= self._mask(("le", b), lambda pt: pt.value(*b) <= 0)
        return mask


def verify_correspondence(faces: list[DiagramFace], lattice: FaceLattice) -> tuple[CorrespondenceReport, list]:
    """Match each diagram face to a lattice face through its support.

    Returns the report and the list ``psi`` of lattice indices (``None``
    where no lattice face matched).
    """
    p = lattice.polytope
    spec = p.spec
    points = [p.vector_to_point(v) for v in lattice.vertices]
    report = CorrespondenceReport(spec, len(faces), len(lattice.faces), 0)
    psi: list[int | None] = []
    used: dict[int, int] = {}
    tables = _SupportTables(points)
    for idx, f in enumerate(faces):
        sup = face_support(f)
        vmask = tables.vertex_mask(sup)
        target = lattice.by_vertex_mask.get(vmask)
        if target is None:
            report.unmatched.append(f.id)
            psi.append(None)
            continue
        pf = lattice.faces[target]
        if pf.dim != f.dim:
            report.dim_mismatches.append((f.id, f.dim, pf.dim))
        if not sup.holds(p.vector_to_point(pf.sample)):
            report.sample_failures.append(f.id)
        if target in used:
            report.collisions.append((faces[used[target]].id, f.id))
        else:
            used[target] = idx
            report.matched += 1
        psi.append(target)
    if not report.unmatched:
        report.order_mismatches, report.first_order_mismatch = _order_check(faces, lattice, psi)
    return report, psi


def _order_check(faces, lattice, psi) -> tuple[int, tuple | None]:
    e = _masks_to_words([f.isogram.mask for f in faces])
    dmask = _masks_to_words([f.coastline.segment_mask for f in faces])
    rel = _masks_to_words([f.relevant_mask for f in faces])
    width = max(dmask.shape[1], rel.shape[1])
    dmask = np.pad(dmask, ((0, 0), (0, width - dmask.shape[1])))
    rel = np.pad(rel, ((0, 0), (0, width - rel.shape[1])))
    vm = _masks_to_words([lattice.faces[k].vertex_mask for k in psi])
    count, first_a, first_b = _kernels.order_mismatches(e, dmask, rel, vm)
    first = None if count == 0 else (faces[first_a].id, faces[first_b].id)
    return int(count), first


def face_of_point(p: HPolytope, u: GCPoint, lattice: FaceLattice | None = None, tol: float = FLOAT_TOL) -> PolytopeFace:
    """The face whose relative interior contains ``u``.

    Without a lattice only the active set and dimension are reported; the
    vertex mask is then 0.
    """
    x = p.point_vector(u)
    for b, val in p.fixed.items():
        got = u.values[b]
        if (got != val) if u.is_exact else abs(got - val) > tol:
            raise ContainmentError(f"{_fmt(b)} must equal its pinned value {val}, got {got}")
    p.check_contains(x, tol)
    active = p.tight_set(x, tol)
    rows = tuple(q.coeffs for k, q in enumerate(p.inequalities) if active >> k & 1)
    dim = p.dim_ambient - (_rank_cached(rows) if rows else 0)
    if lattice is None:
        return PolytopeFace(0, active, dim, tuple(x))
    vmask = (1 << len(lattice.vertices)) - 1
    for k, t in enumerate(lattice.tight_masks):
        if active >> k & 1:
            vmask &= t
    return lattice.faces[lattice.by_vertex_mask[vmask]]


@lru_cache(maxsize=64)
def diagram_faces(spec: LadderSpec) -> tuple[DiagramFace, ...]:
    return tuple(enumerate_faces(build_ladder(spec)))


def locate_face(spec: LadderSpec, u: GCPoint, tol: float = FLOAT_TOL) -> DiagramFace:
    """The diagram face whose polytope face has ``u`` in its relative interior.

    Uses only the half-space description and the diagram supports, so it
    works beyond the brute-force oracle cap.  The carrier face is the
    lowest-dimensional face whose support holds at ``u``.
    """
    face_of_point(build_hrep(spec), u, None, tol)
    slack = 0.0 if u.is_exact else tol
    holding = [f for f in diagram_faces(spec) if face_support(f).holds(u, slack)]
    low = min(f.dim for f in holding)
    carriers = [f for f in holding if f.dim == low]
    if len(carriers) != 1:
        raise ValidationError(f"point lies on {len(carriers)} faces of dimension {low}; tolerance too loose?")
    return carriers[0]


@lru_cache(maxsize=64)
def correspondence(spec: LadderSpec) -> Correspondence:
    """Build (and cache) the diagram/polytope correspondence for ``spec``."""
    diagram = build_ladder(spec)
    faces = enumerate_faces(diagram)
    poly = build_hrep(spec)
    lattice = enumerate_faces_bruteforce(poly)
    report, psi = verify_correspondence(faces, lattice)
    return Correspondence(diagram, faces, poly, lattice, psi, report)


def parse_point(spec: LadderSpec, text: str | Iterable) -> GCPoint:
    values = text.split(",") if isinstance(text, str) else list(text)
    return GCPoint.from_boxes(spec, [to_fraction(v) for v in values])

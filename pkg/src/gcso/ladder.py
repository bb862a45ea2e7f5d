"""Ladder diagrams of SO(n) type and their faces.

A ladder diagram is a staircase-shaped subgraph of the square grid built
from ``(n, lambda)``.  Unit boxes are labelled by their top-right corner
``(i, j)``, and box ``(i, j)`` carries the coordinate ``u[i, j]`` of a
Gelfand-Cetlin pattern.  Faces of the diagram are pairs of an isogram (a
union of monotone origin-to-terminal paths) and a coastline (a per-column
choice of horizontal segments that records signs of diagonal coordinates).

Edge sets are stored as Python integers used as bitmasks over the
diagram's edge list, which keeps unions and containment tests cheap.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import UsageError, ValidationError

Vertex = tuple[int, int]
Edge = tuple[Vertex, Vertex]
Box = tuple[int, int]


def to_fraction(value) -> Fraction:
    """Parse an int, Fraction, float or ``"p/q"`` string into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f"not a number: {value!r}")
    if isinstance(value, (int, float)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse {value!r} as a rational") from exc
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"cannot parse {value!r} as a rational") from exc


@dataclass(frozen=True)
class LadderSpec:
    """The pair ``(n, lambda)`` with its multiplicity structure.

    ``lam`` has ``n // 2`` entries.  For odd ``n`` they must satisfy
    ``lam[0] >= ... >= lam[-1] >= 0``; for even ``n`` the last entry may be
    negative as long as ``lam[-2] >= |lam[-1]|``.  The polytope only sees
    ``|lam[-1]|`` in that case, so the multiplicity data is computed from
    the absolute values.
    """

    n: int
    lam: tuple[Fraction, ...]

    def __init__(self, n: int, lam: Iterable):
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise ValidationError(f"n must be an integer >= 2, got {n!r}")
        values = tuple(to_fraction(x) for x in lam)
        nu = n // 2
        if len(values) != nu:
            raise ValidationError(
                f"lambda must have floor(n/2) = {nu} entries for n = {n}, got {len(values)}"
            )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "lam", values)
        self._check_chamber()

    def _check_chamber(self) -> None:
        lam, nu = self.lam, self.nu
        last_ordered = nu - 1 if self.n % 2 == 0 else nu
        for k in range(1, last_ordered):
            if lam[k - 1] < lam[k]:
                raise ValidationError(
                    f"lambda_{k} >= lambda_{k + 1} violated: {lam[k - 1]} < {lam[k]}"
                )
        if self.n % 2 == 1:
            if lam[-1] < 0:
                raise ValidationError(f"lambda_{nu} >= 0 violated: {lam[-1]} < 0")
        elif nu >= 2 and lam[-2] < abs(lam[-1]):
            raise ValidationError(
                f"lambda_{nu - 1} >= |lambda_{nu}| violated: {lam[-2]} < {abs(lam[-1])}"
            )

    @property
    def nu(self) -> int:
        return self.n // 2

    @cached_property
    def abs_lambda(self) -> tuple[Fraction, ...]:
        if self.n % 2 == 0 and self.lam:
            return self.lam[:-1] + (abs(self.lam[-1]),)
        return self.lam

    @cached_property
    def multiplicity_breaks(self) -> tuple[int, ...]:
        """End indices (1-based) of the maximal constant runs of ``|lambda|``."""
        lam = self.abs_lambda
        breaks = [k for k in range(1, len(lam)) if lam[k - 1] != lam[k]]
        return tuple(breaks) + (len(lam),)

    def iota(self, j: int) -> int:
        """Index (1-based) of the run containing ``lambda_j``."""
        if not 1 <= j <= self.nu:
            raise UsageError(f"iota is defined on 1..{self.nu}, got {j}")
        for r, end in enumerate(self.multiplicity_breaks, start=1):
            if j <= end:
                return r
        raise AssertionError("unreachable")

    @cached_property
    def n_lambda(self) -> int:
        """Number of nonzero entries of ``|lambda|``."""
        breaks = self.multiplicity_breaks
        if self.abs_lambda[-1] == 0:
            return breaks[-2] if len(breaks) >= 2 else 0
        return self.nu

    def boundary_value(self, i: int) -> Fraction:
        """The fixed value of ``u[i, n - i]``."""
        return self.lam[i - 1]

    def coordinates(self) -> list[Box]:
        """All non-boundary pattern coordinates, ordered column by column, top first."""
        return [
            (i, j)
            for i in range(1, self.nu + 1)
            for j in range(self.n - 1 - i, i - 1, -1)
        ]

    def label(self) -> str:
        return f"n={self.n} lambda=({','.join(str(x) for x in self.lam)})"


def _h_edge(strip: int, height: int) -> Edge:
    return ((strip, height), (strip + 1, height))


def _v_edge(x: int, y: int) -> Edge:
    return ((x, y), (x, y + 1))


def box_edges(box: Box) -> dict[str, Edge]:
    i, j = box
    return {
        "top": ((i - 1, j), (i, j)),
        "bottom": ((i - 1, j - 1), (i, j - 1)),
        "left": ((i - 1, j - 1), (i - 1, j)),
        "right": ((i, j - 1), (i, j)),
    }


@dataclass(frozen=True)
class LadderDiagram:
    spec: LadderSpec
    vertices: frozenset
    edges: tuple[Edge, ...]
    boxes: tuple[Box, ...]
    terminals: tuple[Vertex, ...]
    lowest_terminal: Vertex
    strip_tops: tuple[int, ...] = field(repr=False)

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: k for k, e in enumerate(self.edges)}

    @property
    def area(self) -> int:
        return len(self.boxes)

    @property
    def n_strips(self) -> int:
        return len(self.strip_tops)

    @cached_property
    def diagonal_boxes(self) -> tuple[Box, ...]:
        return tuple(b for b in self.boxes if b[0] == b[1])

    @cached_property
    def box_set(self) -> frozenset:
        return frozenset(self.boxes)

    def mask_of(self, edges: Iterable[Edge]) -> int:
        idx = self.edge_index
        mask = 0
        for e in edges:
            mask |= 1 << idx[e]
        return mask

    def edges_of(self, mask: int) -> list[Edge]:
        return [e for k, e in enumerate(self.edges) if mask >> k & 1]

    def has_edge(self, e: Edge) -> bool:
        return e in self.edge_index

    def bit(self, e: Edge) -> int:
        """Bitmask of a single edge, or 0 if the edge is not in the diagram."""
        k = self.edge_index.get(e)
        return 0 if k is None else 1 << k

    @cached_property
    def horizontal_bits(self) -> dict[tuple[int, int], int]:
        """Map ``(strip, height)`` to the bit of that horizontal edge."""
        out = {}
        for k, (p, q) in enumerate(self.edges):
            if p[1] == q[1]:
                out[(p[0], p[1])] = 1 << k
        return out

    @cached_property
    def vertical_mask(self) -> int:
        mask = 0
        for k, (p, q) in enumerate(self.edges):
            if p[0] == q[0]:
                mask |= 1 << k
        return mask

    def strip_mask(self, strip: int) -> int:
        mask = 0
        for (s, _), bit in self.horizontal_bits.items():
            if s == strip:
                mask |= bit
        return mask

    @cached_property
    def positive_paths(self) -> tuple[int, ...]:
        """Edge masks of all monotone paths from the origin to a terminal."""
        if not self.edges:
            return (0,)
        terminals = set(self.terminals)
        idx = self.edge_index
        paths = []

        def walk(v: Vertex, mask: int) -> None:
            if v in terminals:
                paths.append(mask)
                return
            for w in ((v[0] + 1, v[1]), (v[0], v[1] + 1)):
                k = idx.get((v, w))
                if k is not None:
                    walk(w, mask | (1 << k))

        walk((0, 0), 0)
        return tuple(sorted(paths))

    @cached_property
    def terminal_masks(self) -> tuple[int, ...]:
        """For each terminal, the bitmask of diagram edges incident to it."""
        out = []
        for t in self.terminals:
            m = 0
            for k, (p, q) in enumerate(self.edges):
                if p == t or q == t:
                    m |= 1 << k
            out.append(m)
        return tuple(out)


def build_ladder(spec: LadderSpec) -> LadderDiagram:
    """Construct the ladder diagram of ``spec`` from its vertex-set formula."""
    n = spec.n
    tops = []
    vertices: set[Vertex] = set()
    for j in range(spec.n_lambda):
        top = n - 1 - spec.multiplicity_breaks[spec.iota(j + 1) - 1]
        tops.append(top)
        for a in (j, j + 1):
            for b in range(j, top + 1):
                vertices.add((a, b))
    if not vertices:
        # Degenerate orbit: keep the origin so the diagram has a base point.
        vertices.add((0, 0))
    edges = []
    for v in sorted(vertices):
        for w in ((v[0] + 1, v[1]), (v[0], v[1] + 1)):
            if w in vertices:
                edges.append((v, w))
    edges.sort(key=lambda e: (e[0][0], e[0][1], e[1][0], e[1][1]))
    boxes = sorted(
        (i, j)
        for (i, j) in vertices
        if {(i - 1, j - 1), (i - 1, j), (i, j - 1)} <= vertices
    )
    boxes.sort(key=lambda b: (b[0], -b[1]))
    far = max(a + b for a, b in vertices)
    terminals = tuple(sorted((v for v in vertices if sum(v) == far), key=lambda v: v[1]))
    return LadderDiagram(
        spec=spec,
        vertices=frozenset(vertices),
        edges=tuple(edges),
        boxes=tuple(boxes),
        terminals=terminals,
        lowest_terminal=terminals[0],
        strip_tops=tuple(tops),
    )


@dataclass(frozen=True)
class Isogram:
    """A union of positive paths covering every terminal vertex."""

    diagram: LadderDiagram = field(compare=False, repr=False)
    mask: int
    spec: LadderSpec = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "spec", self.diagram.spec)

    @cached_property
    def edges(self) -> frozenset:
        return frozenset(self.diagram.edges_of(self.mask))

    def contains(self, e: Edge) -> bool:
        bit = self.diagram.bit(e)
        return bool(bit) and bool(self.mask & bit)

    @cached_property
    def base_heights(self) -> tuple[int, ...]:
        """Height of the lowest horizontal segment of the isogram in each strip."""
        heights = []
        for j in range(self.diagram.n_strips):
            hs = [h for (s, h), bit in self.diagram.horizontal_bits.items() if s == j and self.mask & bit]
            heights.append(min(hs))
        return tuple(heights)

    @cached_property
    def base(self) -> int:
        """Edge mask of the lowest positive path contained in the isogram."""
        d = self.diagram
        if not d.n_strips:
            return 0
        mask = 0
        y = 0
        for j, h in enumerate(self.base_heights):
            for yy in range(y, h):
                mask |= d.bit(_v_edge(j, yy))
            mask |= d.bit(_h_edge(j, h))
            y = h
        x, top = d.lowest_terminal
        for yy in range(y, top):
            mask |= d.bit(_v_edge(x, yy))
        return mask

    @cached_property
    def cycles(self) -> int:
        """Number of bounded regions (the graph is connected and planar)."""
        if not self.mask:
            return 0
        verts = set()
        for p, q in self.edges:
            verts.add(p)
            verts.add(q)
        return len(self.edges) - len(verts) + 1


def _has_forbidden_pattern(diagram: LadderDiagram, mask: int) -> bool:
    for box in diagram.diagonal_boxes:
        e = box_edges(box)
        top, left = diagram.bit(e["top"]), diagram.bit(e["left"])
        if top and left and mask & top and mask & left:
            need = diagram.bit(e["bottom"]) | diagram.bit(e["right"])
            if mask & need != need:
                return True
    return False


def is_isogram_mask(diagram: LadderDiagram, mask: int) -> bool:
    """Check the isogram definition directly on an arbitrary edge mask."""
    if not diagram.edges:
        return mask == 0
    if any(not (mask & t) for t in diagram.terminal_masks):
        return False
    if _has_forbidden_pattern(diagram, mask):
        return False
    covered = 0
    for p in diagram.positive_paths:
        if p & ~mask == 0:
            covered |= p
    return covered == mask


def enumerate_isograms(diagram: LadderDiagram) -> list[Isogram]:
    """All isograms of ``diagram``, sorted by edge mask.

    Unions are built path by path; a union is kept once it reaches every
    terminal and avoids the forbidden diagonal pattern.
    """
    if not diagram.edges:
        return [Isogram(diagram, 0)]
    unions = {0}
    for p in diagram.positive_paths:
        unions |= {u | p for u in unions}
    out = []
    for u in unions:
        if u and all(u & t for t in diagram.terminal_masks) and not _has_forbidden_pattern(diagram, u):
            out.append(Isogram(diagram, u))
    out.sort(key=lambda g: g.mask)
    return out


FORCED, BOTH, CHOICE = "forced", "both", "choice"


@dataclass(frozen=True)
class Coastline:
    """Per-strip choice of horizontal segments, stored as sets of heights."""

    isogram: Isogram = field(repr=False)
    choices: tuple[frozenset, ...]
    rules: tuple[str, ...] = field(compare=False)

    @cached_property
    def segment_mask(self) -> int:
        hb = self.isogram.diagram.horizontal_bits
        mask = 0
        for j, heights in enumerate(self.choices):
            for h in heights:
                mask |= hb.get((j, h), 0)
        return mask

    @cached_property
    def paths(self) -> int:
        """Edge mask of the union of positive paths using only chosen segments."""
        return _realize(self.isogram.diagram, self.segment_mask)[1]

    def heights(self, strip: int) -> tuple[int, int]:
        hs = self.choices[strip]
        return min(hs), max(hs)


def _realize(diagram: LadderDiagram, horizontal: int) -> tuple[set, int]:
    """Forward/backward reachability with all verticals and the chosen horizontals.

    Returns the set of chosen horizontal edges lying on some admissible path
    together with the edge mask of the union of those paths.
    """
    allowed = diagram.vertical_mask | horizontal
    edges = [e for k, e in enumerate(diagram.edges) if allowed >> k & 1]
    fwd = {(0, 0)}
    for p, q in sorted(edges):
        if p in fwd:
            fwd.add(q)
    bwd = set(diagram.terminals)
    for p, q in sorted(edges, reverse=True):
        if q in bwd:
            bwd.add(p)
    used = set()
    mask = 0
    for p, q in edges:
        if p in fwd and q in bwd:
            mask |= diagram.bit((p, q))
            if p[1] == q[1]:
                used.add((p, q))
    return used, mask


def coastline_options(isogram: Isogram) -> list[tuple[str, list[frozenset]]]:
    """The rule that applies in each strip and the candidate segment sets."""
    d = isogram.diagram
    out = []
    for j, beta in enumerate(isogram.base_heights):
        diag = (j + 1, j + 1)
        if beta > j + 1:
            out.append((FORCED, [frozenset({beta})]))
            continue
        if diag in d.box_set:
            e = box_edges(diag)
            if all(isogram.contains(x) for x in e.values()):
                out.append((BOTH, [frozenset({j, j + 1})]))
                continue
        out.append((CHOICE, [frozenset({j}), frozenset({j + 1})]))
    return out


def enumerate_coastlines(isogram: Isogram) -> list[Coastline]:
    """All realizable coastlines of ``isogram``.

    A choice vector is kept only if every chosen segment exists in the
    diagram and lies on a positive path whose horizontal edges are all
    chosen segments.
    """
    d = isogram.diagram
    options = coastline_options(isogram)
    rules = tuple(r for r, _ in options)
    out = []
    for combo in itertools.product(*(opts for _, opts in options)):
        segs = [(j, h) for j, hs in enumerate(combo) for h in hs]
        if any((j, h) not in d.horizontal_bits for j, h in segs):
            continue
        mask = 0
        for j, h in segs:
            mask |= d.horizontal_bits[(j, h)]
        used, _ = _realize(d, mask)
        if len(used) != len(segs):
            continue
        out.append(Coastline(isogram, tuple(combo), rules))
    return out


@dataclass(frozen=True)
class DiagramFace:
    isogram: Isogram
    coastline: Coastline

    @property
    def dim(self) -> int:
        return self.isogram.cycles

    @property
    def diagram(self) -> LadderDiagram:
        return self.isogram.diagram

    @cached_property
    def encoding(self) -> str:
        d = self.diagram
        edges = ";".join(f"{p[0]},{p[1]}-{q[0]},{q[1]}" for p, q in sorted(self.isogram.edges))
        coast = ";".join(",".join(str(h) for h in sorted(c)) for c in self.coastline.choices)
        lam = ",".join(str(x) for x in d.spec.lam)
        return f"n={d.spec.n}|lam={lam}|E={edges}|C={coast}"

    @cached_property
    def id(self) -> str:
        return hashlib.sha1(self.encoding.encode()).hexdigest()[:12]

    @cached_property
    def sign_strips(self) -> tuple[int, ...]:
        """Strips whose coastline carries sign information for this face.

        When the base passes at or above the diagonal box of strip ``j`` the
        box lies below the base, its coordinate vanishes on the whole face,
        and the segment choice there says nothing about signs.
        """
        return tuple(j for j, beta in enumerate(self.isogram.base_heights) if beta <= j)

    @cached_property
    def relevant_mask(self) -> int:
        """Horizontal edges of the strips in ``sign_strips``."""
        d = self.diagram
        mask = 0
        for j in self.sign_strips:
            mask |= d.strip_mask(j)
        return mask


def enumerate_faces(diagram: LadderDiagram) -> list[DiagramFace]:
    """All faces of the diagram, sorted by dimension then by encoding."""
    faces = [
        DiagramFace(g, c) for g in enumerate_isograms(diagram) for c in enumerate_coastlines(g)
    ]
    faces.sort(key=lambda f: (f.dim, f.isogram.mask, tuple(tuple(sorted(c)) for c in f.coastline.choices)))
    return faces


def face_leq(f1: DiagramFace, f2: DiagramFace) -> bool:
    """Partial order: isogram containment plus coastline containment.

    Coastlines are compared only on the sign-carrying strips of ``f1``.
    Those strips have base height at most ``j`` in ``f1``, hence also in
    the larger isogram of ``f2``.
    """
    if f1.diagram.spec != f2.diagram.spec:
        raise UsageError("faces belong to different diagrams")
    if f1.isogram.mask & ~f2.isogram.mask:
        return False
    return all(f1.coastline.choices[j] <= f2.coastline.choices[j] for j in f1.sign_strips)


def f_vector(dims: Sequence[int]) -> tuple[int, ...]:
    if not dims:
        return ()
    top = max(dims)
    return tuple(sum(1 for d in dims if d == k) for k in range(top + 1))

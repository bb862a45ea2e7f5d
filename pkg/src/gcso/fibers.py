"""Topology of GC fibers, one stage at a time.

The fiber over a point is an iterated bundle whose stage-``m`` fiber is a
product of spheres read off the pair of strings ``(a^(m), a^(m-1))``.
Three independent routes compute those factors:

* the run rule on the interleaved chain of absolute values,
* cutting the anti-diagonal strip ``W_m`` into regions and matching them
  against the M- and N-block templates (from strings or from a face's
  isogram),
* the exact sphere radii of the bordered matrices in :mod:`gcso.numerics`.

The fiber dimension is also recovered by filling the diagram with L- and
I-blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import ValidationError
from .ladder import Box, DiagramFace, LadderDiagram, box_edges
from .polytope import GCPoint, correspondence

RUN_TOL = 1e-9

Stage = tuple[int, ...]  # sphere dimensions, largest first; () is a point


def stage_label(stage: Stage) -> str:
    return "x".join(f"S{d}" for d in stage) if stage else "pt"


# ---------------------------------------------------------------------------
# strings


def _exact(values: Sequence) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def interlaces(m: int, a: Sequence, b: Sequence, tol: float = RUN_TOL) -> bool:
    """Interlacing of ``a = a^(m)`` over ``b = a^(m-1)``."""
    if len(a) != m // 2 or len(b) != (m - 1) // 2:
        return False
    slack = 0 if _exact(list(a) + list(b)) else tol
    chain = []
    for i in range(len(b)):
        chain += [a[i], b[i]]
    if m % 2 == 0:
        chain.append(a[-1])
    if not chain:
        return True
    for k in range(len(chain) - 2):
        if chain[k] < chain[k + 1] - slack:
            return False
    return not (len(chain) >= 2 and chain[-2] < abs(chain[-1]) - slack)


@dataclass(frozen=True)
class StageStrings:
    """``a^(m)`` for ``m = 2..n``."""

    n: int
    strings: tuple[tuple, ...]

    def __getitem__(self, m: int) -> tuple:
        return self.strings[m - 2]


def stage_strings(u: GCPoint) -> StageStrings:
    n = u.spec.n
    strings = tuple(tuple(u.value(i, m - i) for i in range(1, m // 2 + 1)) for m in range(2, n + 1))
    out = StageStrings(n, strings)
    for m in range(3, n + 1):
        if not interlaces(m, out[m], out[m - 1]):
            raise ValidationError(f"strings at stages {m - 1} and {m} do not interlace: {out[m]} / {out[m - 1]}")
    return out


def _chain(m: int, a: Sequence, b: Sequence) -> tuple[list, list[str]]:
    """Interleaved absolute values ``|a1|, |b1|, |a2|, ...`` and their kinds."""
    values, kinds = [], []
    for i in range(len(b)):
        values += [abs(a[i]), abs(b[i])]
        kinds += ["a", "b"]
    if m % 2 == 0:
        values.append(abs(a[-1]))
        kinds.append("a")
    return values, kinds


def _runs(values: list, tol: float) -> list[tuple[int, int]]:
    """Maximal runs of equal values as ``(start, end)`` inclusive index pairs."""
    if not values:
        return []
    if _exact(values):
        labels = [0]
        for k in range(1, len(values)):
            labels.append(labels[-1] + (values[k] != values[k - 1]))
    else:
        labels = list(_kernels.run_labels(np.array([values], dtype=np.float64), tol)[0])
    runs, start = [], 0
    for k in range(1, len(values) + 1):
        if k == len(values) or labels[k] != labels[start]:
            runs.append((start, k - 1))
            start = k
    return runs


def stage_fiber(m: int, a: Sequence, b: Sequence, tol: float = RUN_TOL) -> Stage:
    """Sphere factors at stage ``m`` by the run rule.

    A run from a b-entry to a b-entry with ``p`` b-entries gives
    ``S^(2p-1)``; at an even stage a zero run from a b-entry to the final
    a-entry gives ``S^(2p)``; every other run is a point.
    """
    if not interlaces(m, a, b, tol):
        raise ValidationError(f"stage {m}: {tuple(a)} does not interlace over {tuple(b)}")
    values, kinds = _chain(m, a, b)
    dims = []
    for s, e in _runs(values, tol):
        p = kinds[s : e + 1].count("b")
        if kinds[s] == "b" and kinds[e] == "b":
            dims.append(2 * p - 1)
        elif m % 2 == 0 and kinds[s] == "b" and e == len(values) - 1 and abs(values[e]) <= (0 if _exact(values) else tol):
            dims.append(2 * p)
    return tuple(sorted(dims, reverse=True))


@dataclass(frozen=True)
class FiberDescriptor:
    """Stage factors for ``k = 3..n`` and the fiber dimension."""

    n: int
    stages: tuple[Stage, ...]

    @property
    def total_dim(self) -> int:
        return sum(sum(s) for s in self.stages)

    def stage(self, k: int) -> Stage:
        return self.stages[k - 3]

    def labels(self) -> list[str]:
        return [stage_label(s) for s in self.stages]

    def is_torus(self) -> bool:
        return all(all(d == 1 for d in s) for s in self.stages)


def fiber_descriptor(u: GCPoint, tol: float = RUN_TOL) -> FiberDescriptor:
    strings = stage_strings(u)
    n = u.spec.n
    return FiberDescriptor(n, tuple(stage_fiber(k, strings[k], strings[k - 1], tol) for k in range(3, n + 1)))


# ---------------------------------------------------------------------------
# W-block cutting


@dataclass(frozen=True)
class StageRegion:
    """One closed region of ``W_m`` after cutting."""

    stage: int
    kind: str  # "M", "N", "unit" or "other"
    size: int
    boxes: tuple[Box, ...]
    chain: tuple[int, int]
    contains_bottom: bool
    zero: bool

    @property
    def sphere(self) -> int:
        """Dimension of the sphere this region contributes, 0 for a point."""
        if self.kind == "M" and self.contains_bottom:
            return 2 * self.size - 1
        if self.kind == "N" and self.zero:
            return 2 * self.size
        return 0


def wblock_boxes(m: int) -> tuple[list[Box], list[str]]:
    """Boxes of ``W_m`` in chain order ``a1, b1, a2, b2, ...`` with kinds."""
    boxes, kinds = [], []
    nb = (m - 1) // 2
    for i in range(1, nb + 1):
        boxes += [(i, m - i), (i, m - 1 - i)]
        kinds += ["a", "b"]
    if m % 2 == 0:
        boxes.append((m // 2, m // 2))
        kinds.append("a")
    return boxes, kinds


def _template(kind: str, size: int) -> set[Box]:
    out = set()
    for a in range(1, size + 2):
        for b in range(1, size + 2):
            s = a + b
            if not size + 1 <= s <= size + 2:
                continue
            if (a, b) == (1, size + 1):
                continue
            if kind == "M" and (a, b) == (size + 1, 1):
                continue
            out.add((a, b))
    return out


def classify_region(boxes: Sequence[Box]) -> tuple[str, int]:
    """Match a set of boxes against the M and N templates up to translation."""
    region = set(boxes)
    x0 = min(b[0] for b in region) - 1
    y0 = min(b[1] for b in region) - 1
    shifted = {(a - x0, b - y0) for a, b in region}
    for size in range(1, len(region) + 1):
        if shifted == _template("M", size):
            return "M", size
        if shifted == _template("N", size):
            return "N", size
    return "other", 0


def _region(m: int, boxes: list[Box], kinds: list[str], s: int, e: int, zero: bool) -> StageRegion:
    members = tuple(boxes[s : e + 1])
    kind, size = classify_region(members)
    bottom = "b" in kinds[s : e + 1]
    if kind == "M" and size == 1 and not bottom:
        kind = "unit"
    return StageRegion(m, kind, size, members, (s, e), bottom, zero)


def string_regions(m: int, a: Sequence, b: Sequence, tol: float = RUN_TOL) -> list[StageRegion]:
    """Cut ``W_m`` wherever adjacent boxes carry different absolute values."""
    values, _ = _chain(m, a, b)
    boxes, kinds = wblock_boxes(m)
    eps = 0 if _exact(values) else tol
    return [_region(m, boxes, kinds, s, e, abs(values[s]) <= eps) for s, e in _runs(values, tol)]


def regions_fiber(regions: Sequence[StageRegion]) -> Stage:
    return tuple(sorted((r.sphere for r in regions if r.sphere), reverse=True))


def _shared_edge(p: Box, q: Box):
    """The unit edge shared by two consecutive chain boxes."""
    if p[0] == q[0]:  # q directly below p
        return ((p[0] - 1, q[1]), (p[0], q[1]))
    return ((p[0], p[1] - 1), (p[0], p[1]))  # q directly right of p


def extended_base(diagram: LadderDiagram, face: DiagramFace) -> list[int]:
    """Base height per strip, continued at the lowest terminal's height."""
    heights = list(face.isogram.base_heights)
    tail = diagram.lowest_terminal[1]
    return heights + [tail] * (diagram.spec.nu + 1 - len(heights))


def cut_wblock(m: int, face: DiagramFace, u: GCPoint | None = None) -> list[StageRegion]:
    """Cut ``W_m`` along the face's isogram.

    Shared edges that belong to the isogram separate regions; edges outside
    the diagram never do.  A region counts as zero when all of its boxes
    lie on or below the base.  ``u`` is accepted for symmetry with the
    string route and only checked for membership in the same spec.
    """
    diagram = face.diagram
    if u is not None and u.spec != diagram.spec:
        raise ValidationError("point and face belong to different specs")
    boxes, kinds = wblock_boxes(m)
    base = extended_base(diagram, face)
    iso = face.isogram

    def below(box: Box) -> bool:
        return box[1] <= base[box[0] - 1]

    regions, start = [], 0
    for k in range(1, len(boxes) + 1):
        if k == len(boxes) or iso.contains(_shared_edge(boxes[k - 1], boxes[k])):
            zero = all(below(bx) for bx in boxes[start:k])
            regions.append(_region(m, boxes, kinds, start, k - 1, zero))
            start = k
    return regions


def fiber_descriptor_cut(face: DiagramFace) -> FiberDescriptor:
    n = face.diagram.spec.n
    return FiberDescriptor(n, tuple(regions_fiber(cut_wblock(k, face)) for k in range(3, n + 1)))


def face_sample_point(face: DiagramFace) -> GCPoint:
    return correspondence(face.diagram.spec).sample_point(face)


def fiber_descriptor_face(face: DiagramFace) -> FiberDescriptor:
    """Fiber descriptor at the canonical relative-interior point of the face."""
    return fiber_descriptor(face_sample_point(face))


# ---------------------------------------------------------------------------
# L- and I-block fillings


@dataclass(frozen=True)
class BlockFilling:
    L_blocks: tuple[tuple[int, Box], ...]
    I_blocks: tuple[tuple[int, Box], ...]
    cells: dict = field(compare=False, repr=False)

    @property
    def covered_area(self) -> int:
        return sum(2 * k - 1 for k, _ in self.L_blocks) + sum(k for k, _ in self.I_blocks)


def l_block_boxes(k: int, corner: Box) -> list[Box]:
    a, b = corner
    return [(a, b)] + [(a + i, b) for i in range(1, k)] + [(a, b + i) for i in range(1, k)]


def i_block_boxes(k: int, anchor: Box) -> list[Box]:
    a, b = anchor
    return [(a, b + i) for i in range(k)]


def li_fill(face: DiagramFace) -> BlockFilling:
    """Maximal filling of the diagram by L- and I-blocks.

    I-blocks hang from the bottom of each diagonal box up to the base.  An
    L-block sits at every box above the base whose first isogram edge going
    up and first isogram edge going right are reached after the same number
    of boxes.
    """
    diagram = face.diagram
    iso = face.isogram
    boxes = diagram.box_set
    base = extended_base(diagram, face)
    cells: dict[Box, tuple[str, int]] = {}
    i_blocks, l_blocks = [], []

    for j, beta in enumerate(iso.base_heights):
        anchor = (j + 1, j + 1)
        if beta > j and anchor in boxes:
            k = beta - j
            i_blocks.append((k, anchor))
            for bx in i_block_boxes(k, anchor):
                cells[bx] = ("I", len(i_blocks) - 1)

    def arm(start: Box, step: Box, edge_name: str) -> int | None:
        k, cur = 1, start
        while cur in boxes:
            if iso.contains(box_edges(cur)[edge_name]):
                return k
            cur = (cur[0] + step[0], cur[1] + step[1])
            k += 1
        return None

    for corner in diagram.boxes:
        a, b = corner
        if b <= base[a - 1]:
            continue
        up = arm(corner, (0, 1), "top")
        right = arm(corner, (1, 0), "right")
        if up is None or up != right:
            continue
        members = l_block_boxes(up, corner)
        if any(m in cells for m in members):
            raise ValidationError(f"L-block at {corner} overlaps another block")
        l_blocks.append((up, corner))
        for bx in members:
            cells[bx] = ("L", len(l_blocks) - 1)
    return BlockFilling(tuple(l_blocks), tuple(i_blocks), cells)


def is_lagrangian(face: DiagramFace) -> bool:
    """Whether the L/I filling covers the whole diagram.

    Equivalently, the fiber over the face's relative interior has half the
    orbit dimension.
    """
    return li_fill(face).covered_area == face.diagram.area

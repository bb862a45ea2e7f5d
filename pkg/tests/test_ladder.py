from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gcso.errors import UsageError, ValidationError
from gcso.ladder import (
    box_edges,
    LadderSpec,
    build_ladder,
    enumerate_coastlines,
    enumerate_faces,
    enumerate_isograms,
    f_vector,
    face_leq,
    is_isogram_mask,
)
from gcso.polytope import correspondence
from gcso.verify import CORPUS


def faces_of(n, lam):
    return enumerate_faces(build_ladder(LadderSpec(n, lam)))


# --- LadderSpec -------------------------------------------------------------


def test_spec_multiplicity_data():
    spec = LadderSpec(7, (2, 2, 0))
    assert spec.nu == 3
    assert spec.multiplicity_breaks == (2, 3)
    assert [spec.iota(j) for j in (1, 2, 3)] == [1, 1, 2]
    assert spec.n_lambda == 2
    assert LadderSpec(6, (3, 3, 3)).n_lambda == 3


def test_spec_accepts_rationals():
    spec = LadderSpec(5, ("5/2", 1))
    assert spec.lam == (Fraction(5, 2), Fraction(1))


@pytest.mark.parametrize(
    "n, lam, fragment",
    [
        (5, (0, 3), "lambda_1 >= lambda_2"),
        (5, (3, -1), ">= 0"),
        (4, (1, -2), "|lambda_2|"),
        (5, (3,), "floor(n/2) = 2"),
        (1, (), "integer >= 2"),
    ],
)
def test_spec_rejects_bad_input(n, lam, fragment):
    with pytest.raises(ValidationError) as info:
        LadderSpec(n, lam)
    assert fragment in str(info.value)


# --- build_ladder -----------------------------------------------------------


def test_single_column_for_og15():
    d = build_ladder(LadderSpec(5, (3, 0)))
    assert set(d.boxes) == {(1, 1), (1, 2), (1, 3)}
    assert d.area == 3


def test_point_orbit_has_empty_diagram():
    d = build_ladder(LadderSpec(2, (0,)))
    assert d.boxes == ()
    assert d.area == 0


def test_column_heights_n7():
    d = build_ladder(LadderSpec(7, (3, 2, 1)))
    heights = [sum(1 for b in d.boxes if b[0] == col) for col in (1, 2, 3)]
    assert heights == [5, 3, 1]
    assert d.area == 9


def test_vertex_set_formula():
    spec = LadderSpec(7, (2, 2, 0))
    d = build_ladder(spec)
    expected = set()
    breaks = (0,) + spec.multiplicity_breaks
    for j in range(spec.n_lambda):
        top = spec.n - 1 - breaks[spec.iota(j + 1)]
        expected |= {(a, b) for a in (j, j + 1) for b in range(j, top + 1)}
    assert set(d.vertices) == expected


@pytest.mark.parametrize(
    "n, lam, half_dim",
    [(5, (3, 0), 3), (6, (3, 3, 3), 3), (7, (3, 2, 1), 9), (4, (2, 1), 2), (6, (3, 2, 1), 6), (3, (2,), 1)],
)
def test_area_is_half_orbit_dimension(n, lam, half_dim):
    assert build_ladder(LadderSpec(n, lam)).area == half_dim


# --- isograms and coastlines ------------------------------------------------


def small_diagrams():
    for n, lam in CORPUS:
        d = build_ladder(LadderSpec(n, lam))
        if d.area <= 4:
            yield pytest.param(d, id=d.spec.label())


@pytest.mark.parametrize("diagram", list(small_diagrams()))
def test_isograms_match_edge_subset_filter(diagram):
    n_edges = len(diagram.edges)
    brute = {mask for mask in range(1 << n_edges) if is_isogram_mask(diagram, mask)}
    found = {iso.mask for iso in enumerate_isograms(diagram)}
    assert found == brute


def test_forbidden_pattern_rejected():
    d = build_ladder(LadderSpec(7, (3, 2, 1)))
    edges = box_edges((1, 1))
    left, top, bottom = (d.bit(edges[k]) for k in ("left", "top", "bottom"))
    # Union of every positive path that climbs the left side of the first
    # diagonal box and then runs along its top: covers all terminals but
    # never uses the bottom edge.
    mask = 0
    for path in d.positive_paths:
        if path & left and path & top:
            mask |= path
    assert mask and not mask & bottom
    assert all(mask & t for t in d.terminal_masks)
    assert not is_isogram_mask(d, mask)
    assert mask not in {iso.mask for iso in enumerate_isograms(d)}


def test_trivial_isogram_of_empty_diagram():
    d = build_ladder(LadderSpec(2, (0,)))
    isos = enumerate_isograms(d)
    assert len(isos) == 1
    assert len(enumerate_coastlines(isos[0])) == 1


def test_coastline_counts_n7():
    d = build_ladder(LadderSpec(7, (3, 2, 1)))
    counts = {len(enumerate_coastlines(iso)) for iso in enumerate_isograms(d)}
    assert {2, 8} <= counts
    assert max(counts) == 8


def test_forced_bases_give_one_coastline():
    d = build_ladder(LadderSpec(7, (3, 2, 1)))
    for iso in enumerate_isograms(d):
        if all(h > j + 1 for j, h in enumerate(iso.base_heights)):
            assert len(enumerate_coastlines(iso)) == 1


# --- faces and order --------------------------------------------------------


def test_f_vector_og15():
    faces = faces_of(5, (3, 0))
    assert len(faces) == 15
    assert f_vector([f.dim for f in faces]) == (4, 6, 4, 1)


def test_single_face_for_point_orbit():
    faces = faces_of(2, (0,))
    assert len(faces) == 1 and faces[0].dim == 0


def test_dim_counts_bounded_regions():
    for f in faces_of(6, (3, 2, 1)):
        assert f.dim == f.isogram.cycles


def test_face_ids_are_stable():
    faces = faces_of(5, (3, 0))
    assert faces[0].id == "346e6abd8954"
    assert len({f.id for f in faces}) == len(faces)


def test_order_examples_og15():
    faces = faces_of(5, (3, 0))
    vertices = [f for f in faces if f.dim == 0]
    top = faces[-1]
    assert all(face_leq(f, f) for f in faces)
    assert all(face_leq(v, top) for v in vertices)
    for v in vertices:
        for w in vertices:
            if v is not w:
                assert not face_leq(v, w)


def test_face_leq_rejects_mixed_diagrams():
    a = faces_of(5, (3, 0))[0]
    b = faces_of(5, (2, 1))[0]
    with pytest.raises(UsageError):
        face_leq(a, b)


def test_poset_matches_oracle_for_og36():
    c = correspondence(LadderSpec(6, (3, 3, 3)))
    assert c.report.ok
    assert c.report.matched == len(c.faces) == 19


specs = st.sampled_from([(n, lam) for n, lam in CORPUS if n <= 6])


@given(specs, st.data())
def test_grading_and_unique_top(spec, data):
    faces = faces_of(*spec)
    area = faces[0].diagram.area
    tops = [f for f in faces if f.dim == area]
    assert len(tops) == 1
    f = data.draw(st.sampled_from(faces))
    g = data.draw(st.sampled_from(faces))
    assert face_leq(f, tops[0])
    if face_leq(f, g) and f != g:
        assert f.dim < g.dim


@given(specs)
def test_vertex_count_matches_oracle(spec):
    c = correspondence(LadderSpec(*spec))
    assert sum(1 for f in c.faces if f.dim == 0) == len(c.lattice.vertices)

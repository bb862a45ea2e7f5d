from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gcso.errors import UsageError, ValidationError
from gcso.ladder import LadderSpec
from gcso.numerics import (
    FiberMatrixFamily,
    char_poly_direct,
    char_poly_z,
    det_exact,
    gc_map,
    pfaffian,
    random_rotation,
    reconstruct_matrix,
    sample_orbit_point,
    sphere_radii,
    standard_matrix,
    terminal_x,
)
from gcso.polytope import build_hrep, correspondence, face_of_point, parse_point
from gcso.verify import CORPUS, cayley_rotation

F = Fraction
OG15 = LadderSpec(5, (3, 0))


def block_diag(*values):
    n = 2 * len(values)
    a = np.zeros((n, n))
    for k, v in enumerate(values):
        a[2 * k, 2 * k + 1] = v
        a[2 * k + 1, 2 * k] = -v
    return a


# --- gc_map ------------------------------------------------------------------


def test_gc_map_of_standard_matrix():
    a = np.zeros((5, 5))
    a[:4, :4] = block_diag(3, 0)
    u = gc_map(a, OG15)
    assert [u.value(1, 3), u.value(1, 2), u.value(1, 1)] == pytest.approx([3, 3, 3])
    assert u.value(2, 2) == pytest.approx(0)


def test_gc_map_negative_branch():
    u = gc_map(block_diag(-1, -2))
    assert u.spec.lam == (2, 1)
    assert u.value(1, 1) == pytest.approx(-1)
    assert u.value(1, 2) == pytest.approx(1)


def test_gc_map_rejects_non_skew():
    with pytest.raises(ValidationError, match="skew"):
        gc_map(np.eye(3))
    with pytest.raises(ValidationError, match="does not match"):
        gc_map(block_diag(1, 1), OG15)


# --- Pfaffians ---------------------------------------------------------------


def test_pfaffian_of_blocks():
    assert pfaffian(standard_matrix(LadderSpec(4, (2, -1)), exact=True)) == -2
    assert pfaffian(block_diag(3, 2, 1)) == pytest.approx(6)
    assert pfaffian(np.zeros((0, 0))) == 1


def test_pfaffian_odd_size():
    with pytest.raises(UsageError, match="even"):
        pfaffian(np.zeros((3, 3)))


def test_pfaffian_squared_is_determinant_exactly():
    rng = np.random.default_rng(5)
    for size in (2, 4, 6):
        a = np.empty((size, size), dtype=object)
        for i in range(size):
            a[i, i] = F(0)
            for j in range(i + 1, size):
                a[i, j] = F(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
                a[j, i] = -a[i, j]
        assert pfaffian(a) ** 2 == det_exact(a)


def test_pfaffian_invariant_on_orbit():
    spec = LadderSpec(6, (3, 2, -1))
    for seed in range(5):
        assert pfaffian(sample_orbit_point(spec, seed)) == pytest.approx(-6)


def test_exact_rotation_preserves_pfaffian():
    q = cayley_rotation(4, np.random.default_rng(2))
    assert all(isinstance(x, Fraction) for x in q.flat)
    a = standard_matrix(LadderSpec(4, (2, -1)), exact=True)
    assert pfaffian(q.T.dot(a).dot(q)) == -2


@given(st.sampled_from([s for s in CORPUS if s[0] >= 3]), st.integers(0, 10**6))
def test_orbit_points_keep_spectrum(spec, seed):
    spec = LadderSpec(*spec)
    a = sample_orbit_point(spec, seed)
    u = gc_map(a, spec)
    lam = [float(x) for x in spec.lam]
    if spec.n % 2 == 0:
        lam[-1] = abs(lam[-1])
    sv = np.sort(np.linalg.svd(a, compute_uv=False))[::-1]
    assert sv[0 : 2 * len(lam) : 2] == pytest.approx(lam, abs=1e-9)
    assert face_of_point(build_hrep(spec, reduce=False), u, tol=1e-9) is not None


def test_random_rotation_is_special_orthogonal():
    q = random_rotation(5, np.random.default_rng(0))
    assert np.allclose(q @ q.T, np.eye(5))
    assert np.linalg.det(q) == pytest.approx(1)


# --- bordered matrices --------------------------------------------------------


def test_char_poly_closed_form_m3():
    fam = FiberMatrixFamily(3, (2,), (1,), (1,))
    assert char_poly_z(fam) == [1, 0, 6, 0]
    assert char_poly_z(fam) == char_poly_direct(fam)


@pytest.mark.parametrize("m", [4, 5, 6, 7])
def test_char_poly_closed_form_matches_direct(m):
    rng = np.random.default_rng(m)
    ell = (m - 1) // 2

    def draw(k):
        return tuple(F(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for _ in range(k))

    fam = FiberMatrixFamily(m, draw(ell), draw(ell + (m % 2 == 0)), draw(ell))
    assert char_poly_z(fam) == char_poly_direct(fam)


def test_family_shape_checked():
    with pytest.raises(ValidationError, match="x entries"):
        FiberMatrixFamily(4, (1,), (1,), (1,))


def test_terminal_x():
    assert terminal_x((2, 1), (2,)) == 1
    assert terminal_x((3, 0), (1,)) == 0
    assert terminal_x((3, 0), (0,)) is None
    with pytest.raises(ValidationError):
        terminal_x((1,), (1,))


def test_terminal_x_carries_pfaffian_sign():
    fam = FiberMatrixFamily(4, (F(2),), (F(0), F(-1, 2)), (F(0),))
    z = fam.matrix()
    assert pfaffian(z) == -1
    assert terminal_x((2, F(-1, 2)), (2,)) == F(-1, 2)


# --- sphere radii -------------------------------------------------------------


def test_radii_vanish_at_vertex():
    radii = sphere_radii(5, (3, 0), (3, 0))
    assert all(c == 0 for _, _, c in radii.groups)
    assert radii.sphere_dims() == ()


def test_radii_example():
    radii = sphere_radii(5, (3, 1), (2, 0))
    assert radii.groups == ((4, 1, F(15, 4)), (0, 1, F(9, 4)))
    assert radii.sphere_dims() == (1, 1)


def test_radii_reject_non_interlacing():
    with pytest.raises(ValidationError, match="interlace"):
        sphere_radii(5, (1, 0), (2, 0))


# --- reconstruction -----------------------------------------------------------


def test_reconstruct_identity_point():
    u = gc_map(sample_orbit_point(OG15, 3), OG15)
    a = reconstruct_matrix(u, seed=0)
    back = gc_map(a, OG15)
    assert max(abs(back.values[k] - u.values[k]) for k in u.values) < 1e-8


def test_reconstruct_fiber_over_apex_is_not_a_point():
    u = parse_point(OG15, [0, 0, 0])
    a1 = reconstruct_matrix(u, seed=1)
    a2 = reconstruct_matrix(u, seed=2)
    assert np.abs(a1 - a2).max() > 1e-3
    for a in (a1, a2):
        assert max(abs(v) for v in gc_map(a, OG15).values.values()) < 1e-9


def test_reconstruct_over_vertex_is_unique():
    u = parse_point(OG15, [3, 3, 3])
    assert np.allclose(reconstruct_matrix(u, 1), reconstruct_matrix(u, 7))


@given(st.sampled_from([s for s in CORPUS if 4 <= s[0] <= 6]), st.data())
def test_reconstruct_round_trip_on_faces(spec, data):
    c = correspondence(LadderSpec(*spec))
    face = data.draw(st.sampled_from(c.faces))
    u = c.sample_point(face)
    a = reconstruct_matrix(u, data.draw(st.integers(0, 1000)))
    back = gc_map(a, u.spec)
    assert max(abs(back.values[k] - float(u.values[k])) for k in u.values) < 1e-8

from pathlib import Path

import numpy as np
import pytest

from lwx.simplex import (
    DiscretePath,
    DiscreteTriangle,
    LatticeError,
    LWX2Element,
    TangentPath,
    TangentTriangle,
    TriangleBoundaryTriple,
    boundary_triple,
    constant_path,
    degeneracy,
    dump_lattice,
    face,
    horn_fill,
    horn_of,
    load_lattice,
    path_face,
    truncation_tangent_model,
)

DATA = Path(__file__).parent / "data"


def dyadic_triangle(rng, N=6, n=3):
    x = rng.integers(-64, 65, size=(N + 1, N + 1, n)) / 16.0
    xi = rng.integers(-64, 65, size=(N + 1, N + 1, 2, n)) / 16.0
    return DiscreteTriangle(x, xi)


def golden_triangle():
    N, n = 2, 2
    i, j = np.indices((N + 1, N + 1))
    x = np.stack([i / 4.0, j / 8.0 - 1.0], axis=-1)
    xi = np.stack([np.stack([i + 0.5, -j * 1.0], -1), np.stack([i * j * 0.25, i - j + 0.0], -1)], axis=2)
    return DiscreteTriangle(x, xi)


def test_face_of_constant_triangle():
    N, x0 = 5, np.array([0.5, -1.0, 2.0])
    tri = DiscreteTriangle(np.broadcast_to(x0, (N + 1, N + 1, 3)), np.zeros((N + 1, N + 1, 2, 3)))
    for i in range(3):
        assert face(tri, i).same(constant_path(x0, N))


def test_face_zero_of_constant_slots():
    N = 4
    a, b = np.array([1.0, 2.0, 0.0]), np.array([0.5, -1.0, 3.0])
    xi = np.zeros((N + 1, N + 1, 2, 3))
    xi[..., 0, :], xi[..., 1, :] = a, b
    tri = DiscreteTriangle(np.zeros((N + 1, N + 1, 3)), xi)
    assert np.array_equal(face(tri, 0).xi, np.tile(b - a, (N + 1, 1)))
    assert np.array_equal(face(tri, 1).xi, np.tile(b, (N + 1, 1)))
    assert np.array_equal(face(tri, 2).xi, np.tile(a, (N + 1, 1)))


def test_face_face_identities(rng):
    tri = DiscreteTriangle(rng.normal(size=(8, 8, 3)), rng.normal(size=(8, 8, 2, 3)))
    for j in range(3):
        for i in range(j):
            assert np.array_equal(path_face(face(tri, j), i), path_face(face(tri, i), j - 1))


def test_face_degeneracy_identities(rng):
    N = 7
    p = DiscretePath(rng.normal(size=(N + 1, 3)), rng.normal(size=(N + 1, 3)))
    for j in (0, 1):
        assert face(degeneracy(p, j), j).same(p)
        assert face(degeneracy(p, j), j + 1).same(p)
    assert face(degeneracy(p, 1), 0).same(constant_path(path_face(p, 0), N))
    assert face(degeneracy(p, 0), 2).same(constant_path(path_face(p, 1), N))


def test_tangent_faces_commute_with_shifts(rng):
    T = dyadic_triangle(rng)
    X = TangentTriangle(*(a for a in (dyadic_triangle(rng).x, dyadic_triangle(rng).xi)))
    moved = DiscreteTriangle(T.x + X.v, T.xi + X.chi)
    for i in range(3):
        f, fx, fm = face(T, i), face(X, i), face(moved, i)
        assert np.array_equal(fm.x, f.x + fx.v) and np.array_equal(fm.xi, f.xi + fx.chi)


def test_horn_zero_edges():
    N = 5
    f = np.zeros((N + 1, N + 1, 2))
    horn = {0: constant_path(np.zeros(2), N), 2: constant_path(np.zeros(2), N)}
    filled = horn_fill(horn, 1, f)
    assert np.all(filled.xi == 0)


def test_horn_one_with_constant_covectors():
    N = 6
    tri = DiscreteTriangle(np.zeros((N + 1, N + 1, 2)), np.zeros((N + 1, N + 1, 2, 2)))
    p0 = DiscretePath(np.zeros((N + 1, 2)), np.tile([1.0, -2.0], (N + 1, 1)))
    p2 = DiscretePath(np.zeros((N + 1, 2)), np.tile([0.5, 3.0], (N + 1, 1)))
    filled = horn_fill({0: p0, 2: p2}, 1, tri.x)
    assert face(filled, 0).same(p0) and face(filled, 2).same(p2)


@pytest.mark.parametrize("ell", [0, 1, 2])
def test_horn_fill_reproduces_faces_exactly(rng, ell):
    for _ in range(10):
        tri = dyadic_triangle(rng)
        horn = horn_of(tri, ell)
        filled = horn_fill(horn, ell, tri.x)
        for k, p in horn.items():
            assert face(filled, k).same(p)


@pytest.mark.parametrize("ell", [0, 1, 2])
def test_horn_fill_idempotent(rng, ell):
    tri = dyadic_triangle(rng)
    once = horn_fill(horn_of(tri, ell), ell, tri.x)
    twice = horn_fill(horn_of(once, ell), ell, once.x)
    assert twice.same(once)


def test_horn_fill_float_data_to_rounding(rng):
    # face 0 slots are a difference, so generic doubles agree to a few ulps
    tri = DiscreteTriangle(rng.normal(size=(9, 9, 3)), rng.normal(size=(9, 9, 2, 3)))
    for ell in range(3):
        horn = horn_of(tri, ell)
        filled = horn_fill(horn, ell, tri.x)
        for k, p in horn.items():
            np.testing.assert_allclose(face(filled, k).xi, p.xi, rtol=0, atol=1e-14)


def test_horn_rejects_bad_input(rng):
    tri = dyadic_triangle(rng)
    with pytest.raises(LatticeError):
        horn_fill(horn_of(tri, 0), 1, tri.x)
    with pytest.raises(LatticeError):
        horn_fill(horn_of(tri, 0), 0, tri.x + 1.0)


def test_boundary_triple_constraints(rng):
    tri = DiscreteTriangle(rng.normal(size=(6, 6, 3)), rng.normal(size=(6, 6, 2, 3)))
    b = boundary_triple(tri)
    assert np.array_equal(path_face(b[2], 0), path_face(b[0], 1))
    assert np.array_equal(path_face(b[1], 0), path_face(b[0], 0))
    assert np.array_equal(path_face(b[1], 1), path_face(b[2], 1))
    with pytest.raises(LatticeError):
        TriangleBoundaryTriple((b[0], b[1], DiscretePath(b[2].x + 1.0, b[2].xi)))
    elem = LWX2Element.from_triangle(tri)
    assert np.array_equal(elem.f, tri.x)


def test_truncation_of_zero_tangent():
    X = TangentTriangle(np.zeros((5, 5, 2)), np.zeros((5, 5, 2, 2)))
    for p in truncation_tangent_model(X).paths:
        assert np.all(p.v == 0) and np.all(p.chi == 0)


def test_constant_triangle_triple():
    tri = DiscreteTriangle(np.ones((4, 4, 2)), np.zeros((4, 4, 2, 2)))
    for p in boundary_triple(tri).paths:
        assert p.same(constant_path(np.ones(2), 3))


@pytest.mark.parametrize("make", [
    lambda r: DiscretePath(r.normal(size=(5, 3)), r.normal(size=(5, 3))),
    lambda r: TangentPath(r.normal(size=(5, 3)), r.normal(size=(5, 3))),
    lambda r: DiscreteTriangle(r.normal(size=(5, 5, 3)), r.normal(size=(5, 5, 2, 3))),
    lambda r: TangentTriangle(r.normal(size=(5, 5, 3)), r.normal(size=(5, 5, 2, 3))),
], ids=["path", "tangent-path", "triangle", "tangent-triangle"])
def test_dump_round_trip_exact(rng, make):
    obj = make(rng)
    back = load_lattice(dump_lattice(obj))
    assert type(back) is type(obj) and back.same(obj)


def test_dump_golden():
    assert dump_lattice(golden_triangle()) == (DATA / "golden_triangle.txt").read_text()


def test_non_finite_rejected():
    with pytest.raises(LatticeError):
        DiscretePath(np.array([[0.0], [np.nan]]), np.zeros((2, 1)))

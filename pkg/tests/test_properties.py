import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import poly, random_terms
from lwx import forms as F
from lwx.courant import GeneralizedSection, TwistClass, bracket, pairing, pairing_field
from lwx.dirac import graph_of_bivector, structure_functions
from lwx.geometry import exterior_derivative
from lwx.scenario import fitted_orders
from lwx.simplex import (
    DiscretePath,
    DiscreteTriangle,
    TangentPath,
    TangentTriangle,
    dump_lattice,
    face,
    horn_fill,
    horn_of,
    load_lattice,
)

PROFILE = settings(max_examples=40, deadline=None)
seeds = st.integers(0, 2**32 - 1)
finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
dyadic = st.integers(-256, 256).map(lambda k: k / 32.0)


def random_section(rng, dim):
    return GeneralizedSection(poly("vector", dim, random_terms(rng, "vector", dim)),
                              poly("one-form", dim, random_terms(rng, "one-form", dim)))


@PROFILE
@given(seeds, st.integers(2, 5))
def test_pairing_symmetric(seed, dim):
    rng = np.random.default_rng(seed)
    a, b = random_section(rng, dim), random_section(rng, dim)
    x = rng.uniform(-1, 1, (5, dim))
    assert np.array_equal(pairing(a, b, x), pairing(b, a, x))


@PROFILE
@given(seeds, st.booleans())
def test_bracket_symmetric_part_is_d_pairing(seed, twisted):
    rng = np.random.default_rng(seed)
    a, b = random_section(rng, 3), random_section(rng, 3)
    x = rng.uniform(-1, 1, (4, 3))
    tw = TwistClass(poly("three-form", 3, random_terms(rng, "three-form", 3))) if twisted else None
    sym = (bracket(a, b, tw) + bracket(b, a, tw))(x)
    expected = np.concatenate([np.zeros((4, 3)), exterior_derivative(pairing_field(a, b))(x)], axis=-1)
    np.testing.assert_allclose(sym, expected, atol=1e-9)


@PROFILE
@given(seeds, st.integers(3, 5), st.sampled_from(["scalar", "one-form", "two-form"]))
def test_d_squared_zero(seed, dim, kind):
    rng = np.random.default_rng(seed)
    a = poly(kind, dim, random_terms(rng, kind, dim))
    x = rng.uniform(-1, 1, (4, dim))
    assert np.max(np.abs(exterior_derivative(exterior_derivative(a))(x))) < 1e-9


@PROFILE
@given(seeds)
def test_constant_bivector_structure_functions_antisymmetric(seed):
    rng = np.random.default_rng(seed)
    terms = [(float(rng.normal()), (0, 0, 0), s) for s in ((0, 1), (1, 2), (0, 2))]
    C, res = structure_functions(graph_of_bivector(poly("bivector", 3, terms)), rng.normal(size=3))
    assert np.array_equal(C, -np.swapaxes(C, 0, 1)) and res < 1e-12


@st.composite
def dyadic_triangles(draw):
    N = draw(st.integers(1, 6))
    n = draw(st.integers(1, 3))
    x = draw(arrays(float, (N + 1, N + 1, n), elements=dyadic))
    xi = draw(arrays(float, (N + 1, N + 1, 2, n), elements=dyadic))
    return DiscreteTriangle(x, xi)


@PROFILE
@given(dyadic_triangles(), st.integers(0, 2))
def test_horn_fill_exact_on_dyadic_data(tri, ell):
    horn = horn_of(tri, ell)
    filled = horn_fill(horn, ell, tri.x)
    for k, p in horn.items():
        assert face(filled, k).same(p)


@PROFILE
@given(dyadic_triangles(), st.data())
def test_faces_commute_with_shifts(tri, data):
    X = TangentTriangle(data.draw(arrays(float, tri.x.shape, elements=dyadic)),
                        data.draw(arrays(float, tri.xi.shape, elements=dyadic)))
    moved = DiscreteTriangle(tri.x + X.v, tri.xi + X.chi)
    for i in range(3):
        f, fx, fm = face(tri, i), face(X, i), face(moved, i)
        assert np.array_equal(fm.x, f.x + fx.v) and np.array_equal(fm.xi, f.xi + fx.chi)


@PROFILE
@given(st.integers(1, 6), st.integers(1, 4), st.data())
def test_dump_round_trip(N, n, data):
    x = data.draw(arrays(float, (N + 1, n), elements=finite))
    xi = data.draw(arrays(float, (N + 1, n), elements=finite))
    for obj in (DiscretePath(x, xi), TangentPath(x, xi)):
        back = load_lattice(dump_lattice(obj))
        assert type(back) is type(obj) and back.same(obj)


@PROFILE
@given(seeds, st.integers(2, 12), finite.filter(lambda c: abs(c) < 1e3))
def test_path_forms_alternating_and_linear(seed, N, c):
    rng = np.random.default_rng(seed)
    base = DiscretePath(rng.normal(size=(N + 1, 3)), rng.normal(size=(N + 1, 3)))
    X, Y, Z = (TangentPath(rng.normal(size=(N + 1, 3)), rng.normal(size=(N + 1, 3))) for _ in range(3))
    vol = TwistClass(poly("three-form", 3, [(1.0, (1, 0, 0), (0, 1, 2))]))
    for form in (F.OMEGA1, F.phi_H_1_form(vol)):
        assert abs(form(base, X, Y) + form(base, Y, X)) <= 1e-12 * (1 + abs(form(base, X, Y)))
        lhs, rhs = form(base, X + Z * c, Y), form(base, X, Y) + c * form(base, Z, Y)
        assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


@PROFILE
@given(st.floats(0.5, 4.0), st.floats(1e-6, 1e3))
def test_fitted_orders_recover_power_laws(p, scale):
    ladder = [8, 16, 32, 64]
    res = [scale * N**-p for N in ladder]
    assert all(abs(o - p) < 1e-9 for o in fitted_orders(ladder, res)[1:] if o is not None)

import numpy as np
import pytest
import sympy as sp

from conftest import poly, random_terms, sym_components, sym_coords, sym_eval, sym_exterior_derivative
from lwx.fields import DegreeError, DimensionError, SmoothField
from lwx.geometry import (
    edge_derivative,
    edge_weights,
    evaluate_form,
    exterior_derivative,
    interior_product,
    lattice_gradient,
    lie_bracket,
    lie_derivative_coordinate,
    lie_derivative_form,
    quadrature_edge,
    quadrature_triangle,
)
from lwx.simplex import lattice_points


def const(kind, dim, value):
    return SmoothField.constant(kind, dim, value)


def test_d_of_x2_dx1():
    alpha = poly("one-form", 3, [(1.0, (0, 1, 0), (0,))])
    d = exterior_derivative(alpha)(np.array([[0.3, -0.2, 0.5]]))[0]
    assert d[0, 1] == -1.0 and d[1, 0] == 1.0
    assert np.count_nonzero(d) == 2


def test_d_constant_one_form_vanishes():
    d = exterior_derivative(const("one-form", 3, [1.0, 2.0, 3.0]))
    assert np.all(d(np.zeros((4, 3))) == 0.0)


def test_dd_x1x2_dx3():
    alpha = poly("one-form", 3, [(1.0, (1, 1, 0), (2,))])
    dd = exterior_derivative(exterior_derivative(alpha))
    assert np.max(np.abs(dd(np.random.default_rng(0).uniform(-1, 1, (10, 3))))) < 1e-12


@pytest.mark.parametrize("kind", ["scalar", "one-form", "two-form", "three-form"])
def test_exterior_derivative_matches_sympy(rng, kind):
    dim = 4
    terms = random_terms(rng, kind, dim)
    xs = sym_coords(dim)
    k = {"scalar": 0, "one-form": 1, "two-form": 2, "three-form": 3}[kind]
    oracle = sym_exterior_derivative(sym_components(kind, dim, terms, xs), dim, k, xs)
    field = exterior_derivative(poly(kind, dim, terms))
    for x in rng.uniform(-1, 1, (3, dim)):
        np.testing.assert_allclose(field(x), sym_eval(oracle, xs, x), atol=1e-9)


@pytest.mark.parametrize("kind", ["scalar", "one-form", "two-form"])
def test_d_squared_vanishes(rng, kind):
    f = poly(kind, 4, random_terms(rng, kind, 4))
    dd = exterior_derivative(exterior_derivative(f))
    assert np.max(np.abs(dd(rng.uniform(-1, 1, (20, 4))))) < 1e-10


def test_lie_bracket_examples():
    x = np.random.default_rng(1).uniform(-1, 1, (5, 3))
    d1, d2 = const("vector", 3, [1, 0, 0]), const("vector", 3, [0, 1, 0])
    assert np.all(lie_bracket(d1, d2)(x) == 0.0)
    x1d2 = poly("vector", 3, [(1.0, (1, 0, 0), (1,))])
    np.testing.assert_allclose(lie_bracket(x1d2, d1)(x), np.tile([0, -1, 0], (5, 1)))
    x1d1 = poly("vector", 3, [(1.0, (1, 0, 0), (0,))])
    expected = np.stack([0 * x[:, 0], x[:, 0], 0 * x[:, 0]], axis=-1)
    np.testing.assert_allclose(lie_bracket(x1d1, x1d2)(x), expected, atol=1e-14)


def test_lie_bracket_jacobi(rng):
    X, Y, Z = (poly("vector", 3, random_terms(rng, "vector", 3)) for _ in range(3))
    jac = (lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X))
           + lie_bracket(Z, lie_bracket(X, Y)))
    assert np.max(np.abs(jac(rng.uniform(-1, 1, (10, 3))))) < 1e-10


def test_lie_derivative_examples(rng):
    x = rng.uniform(-1, 1, (6, 3))
    X = poly("vector", 3, [(1.0, (0, 1, 0), (0,))])
    L = lie_derivative_form(X, const("one-form", 3, [1, 0, 0]))
    np.testing.assert_allclose(L(x), np.tile([0, 1, 0], (6, 1)), atol=1e-14)
    d1 = const("vector", 3, [1, 0, 0])
    B = const("two-form", 3, [[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    assert np.all(lie_derivative_form(d1, B)(x) == 0.0)
    f = poly("scalar", 3, [(1.0, (1, 1, 0), ())])
    V = poly("vector", 3, random_terms(rng, "vector", 3))
    lhs = lie_derivative_form(V, exterior_derivative(f))
    Vf = SmoothField("scalar", interior_product(V, exterior_derivative(f)).node)
    np.testing.assert_allclose(lhs(x), exterior_derivative(Vf)(x), atol=1e-12)


@pytest.mark.parametrize("kind", ["one-form", "two-form", "three-form"])
def test_cartan_two_ways(rng, kind):
    X = poly("vector", 4, random_terms(rng, "vector", 4))
    f = poly(kind, 4, random_terms(rng, kind, 4))
    x = rng.uniform(-1, 1, (10, 4))
    diff = lie_derivative_form(X, f)(x) - lie_derivative_coordinate(X, f)(x)
    assert np.max(np.abs(diff)) < 1e-10


def test_interior_product_examples(rng):
    vol = const("three-form", 3, np.zeros((3, 3, 3)))
    vol = poly("three-form", 3, [(1.0, (0, 0, 0), (0, 1, 2))])
    d2 = const("vector", 3, [0, 1, 0])
    out = interior_product(d2, vol)(np.zeros(3))
    # dx^3 ^ dx^1 has component +1 at (3, 1)
    assert out[2, 0] == 1.0 and out[0, 2] == -1.0 and np.count_nonzero(out) == 2
    assert np.all(interior_product(const("vector", 3, [1, 0, 0]), const("one-form", 3, [0, 1, 0]))(np.zeros(3)) == 0)
    X = poly("vector", 3, random_terms(rng, "vector", 3))
    B = poly("two-form", 3, random_terms(rng, "two-form", 3))
    assert np.max(np.abs(interior_product(X, interior_product(X, B))(rng.uniform(-1, 1, (5, 3))))) < 1e-13


def test_evaluate_form_constant_volume():
    vol = poly("three-form", 3, [(1.0, (0, 0, 0), (0, 1, 2))])
    assert evaluate_form(vol, np.zeros(3), [1, 0, 0], [0, 1, 0], [0, 0, 1]) == 1.0
    assert evaluate_form(vol, np.zeros(3), [0, 1, 0], [1, 0, 0], [0, 0, 1]) == -1.0


def test_kind_and_dimension_errors():
    with pytest.raises(DegreeError):
        poly("two-form", 3, [(1.0, (0, 0, 0), (0,))])
    with pytest.raises(DimensionError):
        poly("one-form", 3, [(1.0, (0, 0, 0), (5,))])
    with pytest.raises(ValueError):
        SmoothField.constant("two-form", 2, [[0, 1], [1, 0]])


def test_finite_difference_derivatives_order_two():
    fn = lambda x: np.stack([np.sin(x[..., 0]) * x[..., 1] ** 3, np.exp(x[..., 1])], axis=-1)
    exact = np.array([[np.cos(0.3) * 0.7**3, 3 * np.sin(0.3) * 0.7**2], [0.0, np.exp(0.7)]])
    errs = []
    for h in (1e-2, 5e-3, 2.5e-3):
        f = SmoothField.from_function("vector", 2, fn, step=h)
        errs.append(np.max(np.abs(f.jacobian(np.array([0.3, 0.7])) - exact)))
    assert np.log2(errs[0] / errs[1]) > 1.8 and np.log2(errs[1] / errs[2]) > 1.8


def test_quadrature_examples():
    assert quadrature_edge(np.ones(9)) == 1.0
    assert quadrature_edge(np.linspace(0, 1, 9)) == 0.5


def test_triangle_quadrature_order_two():
    s1, s2 = sp.symbols("s1 s2")
    exact = float(sp.integrate(sp.integrate(s1 * s2, (s2, 0, 1 - s1)), (s1, 0, 1)))
    assert exact == pytest.approx(1 / 24)
    errs = []
    for N in (4, 8, 16):
        s = lattice_points(N)
        errs.append(abs(quadrature_triangle(s[..., 0] * s[..., 1]) - exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.9)


def test_triangle_quadrature_exact_on_affine():
    s = lattice_points(7)
    assert quadrature_triangle(1 + 2 * s[..., 0] - s[..., 1]) == pytest.approx(0.5 + 1 / 3 - 1 / 6, abs=1e-14)


def test_sbp_derivative_integrates_exactly(rng):
    g = rng.normal(size=17)
    D = edge_derivative(g, "sbp")
    assert np.sum(edge_weights(16) * D) == pytest.approx(g[-1] - g[0], abs=1e-13)


def test_lattice_gradient_exact_on_affine():
    s = lattice_points(6)
    f = 2 * s[..., 0] - 3 * s[..., 1] + 1
    g = lattice_gradient(f)
    mask = s[..., 0] + s[..., 1] <= 1 + 1e-12
    np.testing.assert_allclose(g[mask], np.tile([2.0, -3.0], (mask.sum(), 1)), atol=1e-12)

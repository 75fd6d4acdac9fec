"""Differential forms on the discretized mapping spaces C_1(M) and C_2(M).

Triangle forms are evaluated on the boundary: each is the alternating sum of
its path form over the three faces, which is the Stokes form of the interior
integral. Interior-integral versions are kept separately as an independent
route for convergence checks.
"""

from __future__ import annotations

import math
import string

import numpy as np

from .courant import TwistClass
from .geometry import (
    edge_weights,
    exterior_derivative,
    lattice_exterior_derivative,
    lattice_gradient,
    quadrature_edge,
    quadrature_triangle,
)
from .simplex import (
    DiscretePath,
    DiscreteTriangle,
    LatticeError,
    TangentPath,
    TangentTriangle,
    face,
)

H_MAP = 1e-4
GAUSS_POINTS = 5


class MappingSpaceForm:
    """A k-form on a discretized mapping space, given by its evaluator."""

    def __init__(self, degree, evaluator, name=""):
        self.degree = degree
        self.evaluator = evaluator
        self.name = name or getattr(evaluator, "__name__", "form")

    def __call__(self, base, *tangents):
        if len(tangents) != self.degree:
            raise TypeError(f"{self.name} takes {self.degree} tangents, got {len(tangents)}")
        return float(self.evaluator(base, *tangents))

    def __add__(self, other):
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        return MappingSpaceForm(self.degree, lambda b, *t: self(b, *t) + other(b, *t),
                                f"{self.name}+{other.name}")

    def __neg__(self):
        return MappingSpaceForm(self.degree, lambda b, *t: -self(b, *t), f"-{self.name}")

    def __repr__(self):
        return f"MappingSpaceForm({self.name}, degree {self.degree})"


def _check_path(base, *tangents):
    if not isinstance(base, DiscretePath):
        raise LatticeError("expected a DiscretePath base")
    for X in tangents:
        if not isinstance(X, TangentPath) or X.v.shape != base.x.shape:
            raise LatticeError("tangent shape does not match the base path")


def _check_triangle(base, *tangents):
    if not isinstance(base, DiscreteTriangle):
        raise LatticeError("expected a DiscreteTriangle base")
    for X in tangents:
        if not isinstance(X, TangentTriangle) or X.v.shape != base.x.shape:
            raise LatticeError("tangent shape does not match the base triangle")


# ---------------------------------------------------------------------------
# path forms


def omega1(base: DiscretePath, X: TangentPath, Y: TangentPath) -> float:
    """Trapezoid integral of v . chi' - v' . chi."""
    _check_path(base, X, Y)
    integrand = np.einsum("ki,ki->k", X.v, Y.chi) - np.einsum("ki,ki->k", Y.v, X.chi)
    return float(quadrature_edge(integrand))


def lambda1(base: DiscretePath, X: TangentPath) -> float:
    """Trapezoid integral of v . xi against the base covectors."""
    _check_path(base, X)
    return float(quadrature_edge(np.einsum("ki,ki->k", X.v, base.xi)))


def _gauss(m=GAUSS_POINTS):
    nodes, weights = np.polynomial.legendre.leggauss(m)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def transgress(beta, base: DiscretePath, *tangents) -> float:
    """Integral over the path of beta(x)(v_1, ..., v_k, dx/dt).

    The lattice path is read as its piecewise-linear interpolant: on each
    segment the velocity is the difference quotient of the end nodes (the
    centered difference at the segment midpoint) and the integrand is
    integrated by Gauss-Legendre. Only base data enters.
    """
    if isinstance(beta, TwistClass):
        beta = beta.H
    k = len(tangents)
    if beta.degree != k + 1:
        raise ValueError(f"a {beta.degree}-form needs {beta.degree - 1} tangents")
    x = base.x
    N = base.N
    tau, w = _gauss()
    lo = x[:-1, None, :]
    hi = x[1:, None, :]
    pts = lo + tau[None, :, None] * (hi - lo)              # (N, G, n)
    vel = (x[1:] - x[:-1]) * N                              # (N, n)
    vals = beta(pts)                                        # (N, G, n, ..., n)
    letters = string.ascii_lowercase[: k + 1]
    ops = []
    subs = []
    for idx, T in enumerate(tangents):
        tv = T.v
        interp = tv[:-1, None, :] + tau[None, :, None] * (tv[1:, None, :] - tv[:-1, None, :])
        ops.append(interp)
        subs.append(f"sg{letters[idx]}")
    ops.append(vel)
    subs.append(f"s{letters[k]}")
    expr = f"sg{letters}," + ",".join(subs) + "->sg"
    integrand = np.einsum(expr, vals, *ops)
    return float(np.einsum("sg,g->", integrand, w) / N)


def phi_H_1(base: DiscretePath, X: TangentPath, Y: TangentPath, tw: TwistClass) -> float:
    """The transgression of H: integral of H(x)(v, v', dx/dt)."""
    _check_path(base, X, Y)
    if tw is None or tw.is_zero:
        return 0.0
    return transgress(tw.H, base, X, Y)


def omega1_H(base, X, Y, tw):
    return omega1(base, X, Y) + phi_H_1(base, X, Y, tw)


# ---------------------------------------------------------------------------
# triangle forms (boundary evaluation)


def simplicial_coboundary(form: MappingSpaceForm) -> MappingSpaceForm:
    """delta(alpha) = sum_i (-1)^i d_i^* alpha, evaluated through the faces."""

    def evaluator(base, *tangents):
        _check_triangle(base, *tangents)
        total = 0.0
        for i in range(3):
            fb = face(base, i)
            ft = [face(T, i) for T in tangents]
            total += (-1) ** i * form(fb, *ft)
        return total

    return MappingSpaceForm(form.degree, evaluator, f"delta({form.name})")


def omega2(base: DiscreteTriangle, X: TangentTriangle, Y: TangentTriangle) -> float:
    """Boundary integral of the canonical 1-form eta_{X,Y} over the oriented edges."""
    _check_triangle(base, X, Y)
    return sum((-1) ** i * omega1(face(base, i), face(X, i), face(Y, i)) for i in range(3))


def lambda2(base: DiscreteTriangle, X: TangentTriangle) -> float:
    _check_triangle(base, X)
    return sum((-1) ** i * lambda1(face(base, i), face(X, i)) for i in range(3))


def phi_H_2(base: DiscreteTriangle, X: TangentTriangle, Y: TangentTriangle, tw: TwistClass) -> float:
    _check_triangle(base, X, Y)
    if tw is None or tw.is_zero:
        return 0.0
    return sum((-1) ** i * phi_H_1(face(base, i), face(X, i), face(Y, i), tw) for i in range(3))


def omega2_H(base, X, Y, tw):
    return omega2(base, X, Y) + phi_H_2(base, X, Y, tw)


def omega_H(base, X, Y, tw=None):
    """omega + phi^H on paths or triangles, dispatched on the base type."""
    if isinstance(base, DiscretePath):
        return omega1_H(base, X, Y, tw)
    if isinstance(base, DiscreteTriangle):
        return omega2_H(base, X, Y, tw)
    raise LatticeError(f"no twisted form on {type(base).__name__}")


# ---------------------------------------------------------------------------
# interior-integral route


def _eta_slots(X, Y):
    # slot a of the 1-form v . chi'_a - v' . chi_a
    return np.einsum("ijk,ijak->ija", X.v, Y.chi) - np.einsum("ijk,ijak->ija", Y.v, X.chi)


def omega2_interior(base, X, Y):
    """Integral over the triangle of d(eta_{X,Y}) from lattice derivatives."""
    _check_triangle(base, X, Y)
    return float(quadrature_triangle(lattice_exterior_derivative(_eta_slots(X, Y))))


def lambda2_interior(base, X):
    _check_triangle(base, X)
    theta = np.einsum("ijk,ijak->ija", X.v, base.xi)
    return float(quadrature_triangle(lattice_exterior_derivative(theta)))


def phi_H_2_interior(base, X, Y, tw):
    _check_triangle(base, X, Y)
    dx = lattice_gradient(base.x)                          # (N+1, N+1, n, 2)
    Hx = tw.H(base.x)
    slots = np.einsum("ijabc,ija,ijb,ijcs->ijs", Hx, X.v, Y.v, dx)
    return float(quadrature_triangle(lattice_exterior_derivative(slots)))


# ---------------------------------------------------------------------------
# exterior derivative on the discretized mapping space


def shift(base, X, eps):
    """The point base + eps X of the (linear) discretized mapping space."""
    if isinstance(base, DiscretePath):
        return DiscretePath(base.x + eps * X.v, base.xi + eps * X.chi)
    return DiscreteTriangle(base.x + eps * X.v, base.xi + eps * X.chi)


def _norm(X):
    return math.sqrt(float(np.sum(X.v ** 2) + np.sum(X.chi ** 2)))


def directional_derivative(fn, base, X, h=H_MAP):
    """D_X fn at base by central differences along the normalized direction."""
    s = _norm(X)
    if s == 0.0:
        return 0.0
    Xh = X * (1.0 / s)
    return s * (fn(shift(base, Xh, h)) - fn(shift(base, Xh, -h))) / (2.0 * h)


def exterior_derivative_mapping(form: MappingSpaceForm, h=H_MAP) -> MappingSpaceForm:
    """d alpha(X_0..X_k) = sum_i (-1)^i D_{X_i} alpha(.., X_i omitted, ..).

    Tangents are extended as constant vector fields of the linear space, so
    no bracket terms appear.
    """
    k = form.degree

    def evaluator(base, *tangents):
        total = 0.0
        for i, Xi in enumerate(tangents):
            rest = tangents[:i] + tangents[i + 1:]
            total += (-1) ** i * directional_derivative(lambda b: form(b, *rest), base, Xi, h)
        return total

    return MappingSpaceForm(k + 1, evaluator, f"d({form.name})")


def delta_H(base: DiscretePath, X, Y, Z, tw) -> float:
    """(delta H)(X, Y, Z) = H at x(1) on the end values minus H at x(0) on the start values."""
    H = tw.H if isinstance(tw, TwistClass) else tw
    out = 0.0
    for sign, k in ((1.0, -1), (-1.0, 0)):
        Hx = H(base.x[k])
        out += sign * np.einsum("abc,a,b,c->", Hx, X.v[k], Y.v[k], Z.v[k])
    return float(out)


def phi_dH_1(base, X, Y, Z, tw) -> float:
    H = tw.H if isinstance(tw, TwistClass) else tw
    if H.dim < 4:
        return 0.0
    return transgress(exterior_derivative(H), base, X, Y, Z)


# ready-made forms
OMEGA1 = MappingSpaceForm(2, omega1, "omega1")
LAMBDA1 = MappingSpaceForm(1, lambda1, "lambda1")
OMEGA2 = MappingSpaceForm(2, omega2, "omega2")
LAMBDA2 = MappingSpaceForm(1, lambda2, "lambda2")


def phi_H_1_form(tw):
    return MappingSpaceForm(2, lambda b, X, Y: phi_H_1(b, X, Y, tw), "phiH1")


def phi_H_2_form(tw):
    return MappingSpaceForm(2, lambda b, X, Y: phi_H_2(b, X, Y, tw), "phiH2")


def omega_H_form(tw, simplex=1):
    fn = omega1_H if simplex == 1 else omega2_H
    return MappingSpaceForm(2, lambda b, X, Y: fn(b, X, Y, tw), f"omegaH{simplex}")


def edge_gram(N, n, form_pair):
    """Matrix of a path 2-form in quadrature-normalized nodal coordinates.

    Coordinates are sqrt(w_k) v_k and sqrt(w_k) chi_k; ``form_pair(X, Y)``
    evaluates the form on two TangentPaths.
    """
    m = 2 * (N + 1) * n
    scale = np.concatenate([np.repeat(np.sqrt(edge_weights(N)), n)] * 2)
    basis = np.eye(m) / scale[None, :]
    tangents = [TangentPath.from_flat(basis[a], N, n) for a in range(m)]
    G = np.zeros((m, m))
    for a in range(m):
        for b in range(a + 1, m):
            G[a, b] = form_pair(tangents[a], tangents[b])
            G[b, a] = -G[a, b]
    return G

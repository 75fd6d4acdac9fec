"""Exterior calculus on a single chart, plus the quadrature and lattice
difference kernels shared by the mapping-space code."""

from __future__ import annotations

import math
import string

import numpy as np

from .fields import (
    FORM_KINDS,
    Constant,
    DegreeError,
    DimensionError,
    Einsum,
    SmoothField,
    Sum,
    alternator,
)

MAX_FORM_DEGREE = 3


def _require_form(f, name="argument"):
    if not f.is_form:
        raise DegreeError(f"{name} must be a differential form, got {f.kind}")


def _require_vector(X):
    if X.kind != "vector":
        raise DegreeError(f"expected a vector field, got {X.kind}")


def _same_chart(*fields):
    dims = {f.dim for f in fields}
    if len(dims) != 1:
        raise DimensionError(f"fields live on charts of different dimension: {sorted(dims)}")


def exterior_derivative(f: SmoothField) -> SmoothField:
    """d of a k-form, k <= 3, as the antisymmetrized gradient."""
    _require_form(f)
    k = f.degree
    if k > MAX_FORM_DEGREE:
        raise DegreeError(f"exterior derivative supports degree <= {MAX_FORM_DEGREE}, got {k}")
    n = f.dim
    grad = f.node.grad  # components (i1..ik, j) = d_j f_{i1..ik}
    if k == 0:
        return SmoothField("one-form", grad, check=False)
    letters = string.ascii_lowercase
    out = letters[: k + 1]
    src = letters[k + 1: 2 * k + 2]
    # result_{out} = sum_perm sign * T[perm], T_{j i1..ik} = grad_{i1..ik j}
    spec = f"{out}{src},{src[1:]}{src[0]}->{out}"
    alt = Einsum(spec, Constant(n, alternator(n, k + 1)), grad)
    return SmoothField(FORM_KINDS[k + 1], Sum([alt], [1.0 / math.factorial(k)]), check=False)


def interior_product(X: SmoothField, f: SmoothField) -> SmoothField:
    """Contract X into the first slot of a k-form, k >= 1."""
    _require_vector(X)
    _require_form(f)
    _same_chart(X, f)
    k = f.degree
    if k == 0:
        raise DegreeError("interior product of a function is undefined")
    rest = string.ascii_lowercase[1:k]
    node = Einsum(f"a,a{rest}->{rest}", X.node, f.node)
    return SmoothField(FORM_KINDS[k - 1], node, check=False)


def lie_bracket(X: SmoothField, Y: SmoothField) -> SmoothField:
    """[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i."""
    _require_vector(X)
    _require_vector(Y)
    _same_chart(X, Y)
    node = Sum(
        [Einsum("j,ij->i", X.node, Y.node.grad), Einsum("j,ij->i", Y.node, X.node.grad)],
        [1.0, -1.0],
    )
    return SmoothField("vector", node, check=False)


def lie_derivative_form(X: SmoothField, f: SmoothField) -> SmoothField:
    """L_X f by the Cartan formula, for forms of degree <= 3."""
    _require_vector(X)
    _require_form(f)
    _same_chart(X, f)
    if f.degree > MAX_FORM_DEGREE:
        raise DegreeError(f"Lie derivative supports forms of degree <= {MAX_FORM_DEGREE}")
    if f.degree == 0:
        return interior_product(X, exterior_derivative(f))
    return interior_product(X, exterior_derivative(f)) + exterior_derivative(interior_product(X, f))


def lie_derivative_coordinate(X: SmoothField, f: SmoothField) -> SmoothField:
    """L_X f from the coordinate formula X^j d_j f + sum_a f(.., d X, ..)."""
    _require_vector(X)
    _require_form(f)
    _same_chart(X, f)
    k = f.degree
    idx = string.ascii_lowercase[:k]
    terms = [Einsum(f"z,{idx}z->{idx}", X.node, f.node.grad)]
    for a in range(k):
        swapped = idx[:a] + "z" + idx[a + 1:]
        terms.append(Einsum(f"{swapped},z{idx[a]}->{idx}", f.node, X.node.grad))
    return SmoothField(f.kind, Sum(terms), check=False)


def lie_derivative(X: SmoothField, f: SmoothField) -> SmoothField:
    if f.kind == "vector":
        return lie_bracket(X, f)
    return lie_derivative_form(X, f)


def evaluate_form(f, x, *vectors):
    """f_x(v1, ..., vk) for a form and k vectors (arrays broadcast over points)."""
    vals = f(x)
    for v in vectors:
        vals = _contract_first(vals, v)
    return vals


def _contract_first(vals, v):
    v = np.asarray(v, dtype=float)
    k = vals.ndim - (v.ndim - 1)
    batch = vals.shape[: vals.ndim - k]
    v = np.broadcast_to(v, batch + v.shape[-1:])
    rest = string.ascii_lowercase[1:k]
    return np.einsum(f"...a{rest},...a->...{rest}", vals, v)


# ---------------------------------------------------------------------------
# quadrature


def quadrature_edge(samples, axis=0):
    """Composite trapezoid rule on the uniform partition of [0, 1]."""
    samples = np.asarray(samples, dtype=float)
    m = samples.shape[axis]
    if m < 2:
        raise ValueError("edge quadrature needs at least 2 nodes")
    return np.trapezoid(samples, dx=1.0 / (m - 1), axis=axis)


def edge_weights(N):
    w = np.full(N + 1, 1.0 / N)
    w[0] = w[-1] = 0.5 / N
    return w


def triangle_mask(N):
    i, j = np.indices((N + 1, N + 1))
    return i + j <= N


def triangle_weights(N):
    """Node weights of the composite vertex-average rule on the N^2 subtriangles.

    The vertex average equals the centroid value for affine integrands, so
    the rule is the midpoint rule on each subtriangle for those.
    """
    if N < 1:
        raise ValueError("triangle quadrature needs at least 2 nodes per edge")
    count = np.zeros((N + 1, N + 1))
    i, j = np.indices((N, N))
    up = i + j <= N - 1
    for di, dj in ((0, 0), (1, 0), (0, 1)):
        np.add.at(count, (i[up] + di, j[up] + dj), 1)
    down = i + j <= N - 2
    for di, dj in ((1, 0), (0, 1), (1, 1)):
        np.add.at(count, (i[down] + di, j[down] + dj), 1)
    return count / (6.0 * N * N)


def quadrature_triangle(samples):
    """Integrate lattice samples ``(N+1, N+1, ...)`` over the standard triangle."""
    samples = np.asarray(samples, dtype=float)
    N = samples.shape[0] - 1
    if N < 1 or samples.shape[1] != N + 1:
        raise ValueError("triangle quadrature needs an (N+1, N+1) lattice with N >= 1")
    w = triangle_weights(N)
    masked = np.where(triangle_mask(N).reshape(w.shape + (1,) * (samples.ndim - 2)), samples, 0.0)
    return np.tensordot(w, masked, axes=([0, 1], [0, 1]))


# ---------------------------------------------------------------------------
# lattice derivatives


def edge_derivative(values, scheme="central"):
    """d/dt of node values on the uniform partition of [0, 1] (axis 0).

    ``central``: second order everywhere (one-sided second-order ends).
    ``sbp``: centered interior and first-order one-sided ends; with trapezoid
    weights W it satisfies W D + (W D)^T = diag(-1, 0, ..., 0, 1), so the
    discrete integral of D g is exactly g(1) - g(0).
    """
    values = np.asarray(values, dtype=float)
    m = values.shape[0]
    if m < 2:
        raise ValueError("need at least 2 nodes to differentiate")
    h = 1.0 / (m - 1)
    if scheme == "central":
        return np.gradient(values, h, axis=0, edge_order=2 if m >= 3 else 1)
    if scheme != "sbp":
        raise ValueError(f"unknown difference scheme {scheme!r}")
    out = np.empty_like(values)
    out[1:-1] = (values[2:] - values[:-2]) / (2 * h)
    out[0] = (values[1] - values[0]) / h
    out[-1] = (values[-1] - values[-2]) / h
    return out


def sbp_matrix(N):
    """Matrix of the ``sbp`` edge derivative on N+1 nodes."""
    return edge_derivative(np.eye(N + 1), "sbp")


def _line_derivative(line):
    m = line.shape[0]
    if m >= 3:
        return np.gradient(line, 1.0, axis=0, edge_order=2), True
    if m == 2:
        d = line[1] - line[0]
        return np.stack([d, d]), False
    return np.full_like(line, np.nan), False


def lattice_gradient(values, face_exact=False):
    """Slot values (d/ds1, d/ds2) of a function sampled on the triangle lattice.

    ``values`` has shape ``(N+1, N+1, ...)``; returns ``(N+1, N+1, ..., 2)``.
    Derivatives are second order at every node (using the anti-diagonal
    direction e2 - e1 near the corners). With ``face_exact`` the boundary
    slots are overwritten so that every face restriction equals the ``sbp``
    edge derivative of the restricted values.
    """
    values = np.asarray(values, dtype=float)
    N = values.shape[0] - 1
    if N < 2:
        raise ValueError("lattice gradient needs N >= 2")
    h = 1.0 / N
    tail = values.shape[2:]
    nan = np.full(values.shape, np.nan)
    row, col, anti = nan.copy(), nan.copy(), nan.copy()
    row_ok = np.zeros((N + 1, N + 1), bool)
    col_ok = np.zeros((N + 1, N + 1), bool)
    for j in range(N + 1):
        d, ok = _line_derivative(values[: N - j + 1, j])
        row[: N - j + 1, j] = d / h
        row_ok[: N - j + 1, j] = ok
    for i in range(N + 1):
        d, ok = _line_derivative(values[i, : N - i + 1])
        col[i, : N - i + 1] = d / h
        col_ok[i, : N - i + 1] = ok
    for m in range(1, N + 1):
        k = np.arange(m + 1)
        d, _ = _line_derivative(values[m - k, k])
        anti[m - k, k] = d / h
    ok1 = row_ok.reshape(row_ok.shape + (1,) * len(tail))
    ok2 = col_ok.reshape(col_ok.shape + (1,) * len(tail))
    d1 = np.where(ok1, row, col - anti)
    d2 = np.where(ok2, col, row + anti)
    # both lines short only happens for N == 2 at (1, 1)
    d1 = np.where(np.isnan(d1), row, d1)
    d2 = np.where(np.isnan(d2), col, d2)
    if face_exact:
        k = np.arange(N + 1)
        d1[k, 0] = edge_derivative(values[k, 0], "sbp")
        d2[0, k] = edge_derivative(values[0, k], "sbp")
        hyp = edge_derivative(values[N - k, k], "sbp")
        d2[N - k[:-1], k[:-1]] = d1[N - k[:-1], k[:-1]] + hyp[:-1]
        d1[0, N] = d2[0, N] - hyp[-1]
    mask = triangle_mask(N).reshape((N + 1, N + 1) + (1,) * len(tail))
    d1 = np.where(mask, d1, 0.0)
    d2 = np.where(mask, d2, 0.0)
    return np.stack([d1, d2], axis=-1)


def lattice_exterior_derivative(slots, face_exact=False):
    """d of a lattice 1-form given by its slot values ``(N+1, N+1, ..., 2)``.

    Returns the coefficient of ds1 ^ ds2, i.e. d/ds1 slot2 - d/ds2 slot1.
    """
    g1 = lattice_gradient(slots[..., 0], face_exact)
    g2 = lattice_gradient(slots[..., 1], face_exact)
    return g2[..., 0] - g1[..., 1]

"""Lattice models of paths and triangles in T*M, their faces and degeneracies,
the horn filler for 2-simplices and the boundary-triple model.

A triangle lives on the lattice s = (i/N, j/N), i + j <= N, with vertices
v0 = (0, 0), v1 = (1, 0), v2 = (0, 1). Its covector data is stored as the two
slot values xi[..., 0] = phi(e1) and xi[..., 1] = phi(e2). Entries outside
the lattice are kept at zero.

Edges inherit N, so faces and degeneracies are exact re-indexing:

    face 0: v1 -> v2, nodes (N - k, k), direction e2 - e1
    face 1: v0 -> v2, nodes (0, k),     direction e2
    face 2: v0 -> v1, nodes (k, 0),     direction e1
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import triangle_mask

# slot coefficients of each face direction: direction = c[0] e1 + c[1] e2
FACE_DIRECTIONS = {0: (-1, 1), 1: (0, 1), 2: (1, 0)}


class LatticeError(ValueError):
    pass


def _finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise LatticeError("lattice data has non-finite entries")


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True, eq=False)
class DiscretePath:
    """A path in T*M sampled at t_k = k/N: base points x[k] and covectors xi[k]."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        xi = np.asarray(self.xi, dtype=float)
        if x.ndim != 2 or x.shape[0] < 2 or xi.shape != x.shape:
            raise LatticeError(f"path arrays must both be (N+1, n), got {x.shape} and {xi.shape}")
        _finite(x, xi)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)

    @property
    def N(self):
        return self.x.shape[0] - 1

    @property
    def n(self):
        return self.x.shape[1]

    @property
    def t(self):
        return np.linspace(0.0, 1.0, self.N + 1)

    def same(self, other):
        return np.array_equal(self.x, other.x) and np.array_equal(self.xi, other.xi)


@dataclass(frozen=True, eq=False)
class TangentPath:
    """A tangent to C_1: base variation v[k] and covector variation chi[k]."""

    v: np.ndarray
    chi: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        chi = np.asarray(self.chi, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2 or chi.shape != v.shape:
            raise LatticeError(f"tangent arrays must both be (N+1, n), got {v.shape} and {chi.shape}")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "chi", chi)

    @property
    def N(self):
        return self.v.shape[0] - 1

    def __add__(self, other):
        return TangentPath(self.v + other.v, self.chi + other.chi)

    def __mul__(self, c):
        return TangentPath(self.v * c, self.chi * c)

    __rmul__ = __mul__

    def flat(self):
        return np.concatenate([self.v.ravel(), self.chi.ravel()])

    @classmethod
    def from_flat(cls, vec, N, n):
        m = (N + 1) * n
        return cls(vec[:m].reshape(N + 1, n), vec[m:].reshape(N + 1, n))

    def same(self, other):
        return np.array_equal(self.v, other.v) and np.array_equal(self.chi, other.chi)


def _mask_tail(N, a):
    return triangle_mask(N).reshape((N + 1, N + 1) + (1,) * (a.ndim - 2))


@dataclass(frozen=True, eq=False)
class DiscreteTriangle:
    """A bundle map T(simplex^2) -> T*M on the lattice: x (N+1, N+1, n), xi (N+1, N+1, 2, n)."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        xi = np.asarray(self.xi, dtype=float)
        if x.ndim != 3 or x.shape[0] != x.shape[1] or x.shape[0] < 2:
            raise LatticeError(f"triangle base must be (N+1, N+1, n), got {x.shape}")
        if xi.shape != x.shape[:2] + (2,) + x.shape[2:]:
            raise LatticeError(f"triangle slots must be (N+1, N+1, 2, n), got {xi.shape}")
        N = x.shape[0] - 1
        x = np.where(_mask_tail(N, x), x, 0.0)
        xi = np.where(_mask_tail(N, xi), xi, 0.0)
        _finite(x, xi)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)

    @property
    def N(self):
        return self.x.shape[0] - 1

    @property
    def n(self):
        return self.x.shape[-1]

    def same(self, other):
        return np.array_equal(self.x, other.x) and np.array_equal(self.xi, other.xi)


@dataclass(frozen=True, eq=False)
class TangentTriangle:
    """A tangent to C_2: v (N+1, N+1, n) and slot variations chi (N+1, N+1, 2, n)."""

    v: np.ndarray
    chi: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        chi = np.asarray(self.chi, dtype=float)
        if v.ndim != 3 or v.shape[0] != v.shape[1] or chi.shape != v.shape[:2] + (2,) + v.shape[2:]:
            raise LatticeError(f"bad tangent triangle shapes {v.shape}, {chi.shape}")
        N = v.shape[0] - 1
        object.__setattr__(self, "v", np.where(_mask_tail(N, v), v, 0.0))
        object.__setattr__(self, "chi", np.where(_mask_tail(N, chi), chi, 0.0))

    @property
    def N(self):
        return self.v.shape[0] - 1

    def __add__(self, other):
        return TangentTriangle(self.v + other.v, self.chi + other.chi)

    def __mul__(self, c):
        return TangentTriangle(self.v * c, self.chi * c)

    __rmul__ = __mul__

    def same(self, other):
        return np.array_equal(self.v, other.v) and np.array_equal(self.chi, other.chi)


def lattice_points(N):
    """Simplex coordinates s = (i/N, j/N) of the full (N+1, N+1) index grid."""
    i, j = np.indices((N + 1, N + 1))
    return np.stack([i / N, j / N], axis=-1)


def path_from_functions(N, x_fn, xi_fn):
    t = np.linspace(0.0, 1.0, N + 1)
    return DiscretePath(x_fn(t), xi_fn(t))


def triangle_from_functions(N, x_fn, xi1_fn, xi2_fn):
    """Sample ``x_fn(s)`` and the slot functions on the lattice (s has shape (..., 2))."""
    s = lattice_points(N)
    return DiscreteTriangle(x_fn(s), np.stack([xi1_fn(s), xi2_fn(s)], axis=2))


# ---------------------------------------------------------------------------
# faces and degeneracies


def face_indices(N, i):
    k = np.arange(N + 1)
    if i == 0:
        return N - k, k
    if i == 1:
        return np.zeros_like(k), k
    if i == 2:
        return k, np.zeros_like(k)
    raise LatticeError(f"face index must be 0, 1 or 2, got {i}")


def _face_slots(slots, i, N):
    rows, cols = face_indices(N, i)
    s = slots[rows, cols]
    if i == 0:
        return s[:, 1] - s[:, 0]
    return s[:, 1] if i == 1 else s[:, 0]


def face(tri, i):
    """The i-th face of a triangle (or of a tangent triangle) as a path."""
    if isinstance(tri, TangentTriangle):
        rows, cols = face_indices(tri.N, i)
        return TangentPath(tri.v[rows, cols], _face_slots(tri.chi, i, tri.N))
    if not isinstance(tri, DiscreteTriangle):
        raise TypeError("face() takes a DiscreteTriangle or TangentTriangle")
    rows, cols = face_indices(tri.N, i)
    return DiscretePath(tri.x[rows, cols], _face_slots(tri.xi, i, tri.N))


def path_face(path, i):
    """Vertex faces of a path: d0 is the endpoint x(1), d1 the start x(0)."""
    if i == 0:
        return path.x[-1] if isinstance(path, DiscretePath) else path.v[-1]
    if i == 1:
        return path.x[0] if isinstance(path, DiscretePath) else path.v[0]
    raise LatticeError(f"path face index must be 0 or 1, got {i}")


def constant_path(x0, N):
    """Degeneracy C_0 -> C_1: the constant path with zero covector."""
    x0 = np.asarray(x0, dtype=float)
    return DiscretePath(np.tile(x0, (N + 1, 1)), np.zeros((N + 1, x0.size)))


def degeneracy(path, j):
    """s_j : C_1 -> C_2, pulling back along the collapse of the j-th edge.

    s_0 collapses v0, v1 (t = s2), s_1 collapses v1, v2 (t = s1 + s2).
    """
    N = path.N
    i, jj = np.indices((N + 1, N + 1))
    inside = i + jj <= N
    if j == 0:
        idx = np.where(inside, jj, 0)
        c = (0.0, 1.0)
    elif j == 1:
        idx = np.where(inside, i + jj, 0)
        c = (1.0, 1.0)
    else:
        raise LatticeError(f"degeneracy index must be 0 or 1, got {j}")
    if isinstance(path, TangentPath):
        base, cov, cls = path.v, path.chi, TangentTriangle
    else:
        base, cov, cls = path.x, path.xi, DiscreteTriangle
    x = base[idx]
    xi = np.stack([c[0] * cov[idx], c[1] * cov[idx]], axis=2)
    return cls(x, xi)


# ---------------------------------------------------------------------------
# horn filling


def _barycentric_indices(N):
    i, j = np.indices((N + 1, N + 1))
    return np.stack([N - i - j, i, j])


def _projection_coefficients(i, ell):
    """Barycentric weights c with t = sum c_k b_k for the retraction onto face i.

    The retraction moves the weight b_i onto the vertex ell; the face is
    parametrized by the barycentric coordinate of its larger vertex.
    """
    lo, hi = sorted({0, 1, 2} - {i})
    c = np.zeros(3, dtype=int)
    c[hi] = 1
    if hi == ell:
        c[i] += 1
    return c


def horn_fill(psi, ell, f):
    """Fill the horn missing face ``ell`` over the base lattice ``f``.

    ``psi`` maps each face index i != ell to a DiscretePath. The result is
    phi = sum_i psi_i o T p_i where p_i retracts the triangle onto face i by
    moving b_i onto vertex ell; the term of the shared corner is a point and
    carries no covector. Transport between base points is the identity of
    the flat chart.
    """
    if ell not in (0, 1, 2):
        raise LatticeError(f"horn index must be 0, 1 or 2, got {ell}")
    faces = sorted(k for k in (0, 1, 2) if k != ell)
    if sorted(psi) != faces:
        raise LatticeError(f"horn {ell} needs faces {faces}, got {sorted(psi)}")
    f = np.asarray(f, dtype=float)
    N = f.shape[0] - 1
    for k in faces:
        if psi[k].N != N:
            raise LatticeError("horn edges and base lattice have different N")
    _check_corners({k: psi[k].x for k in faces})
    for k in faces:
        rows, cols = face_indices(N, k)
        if not np.array_equal(f[rows, cols], psi[k].x):
            raise LatticeError(f"base lattice does not restrict to the base of face {k}")
    bary = _barycentric_indices(N)
    inside = bary[0] >= 0
    xi = np.zeros(f.shape[:2] + (2, f.shape[-1]))
    for k in faces:
        c = _projection_coefficients(k, ell)
        t_idx = np.where(inside, np.tensordot(c, bary, axes=1), 0)
        vals = psi[k].xi[t_idx]
        for slot, coef in enumerate((c[1] - c[0], c[2] - c[0])):
            if coef:
                xi[:, :, slot] += coef * vals
    return DiscreteTriangle(f, xi)


def horn_of(tri, ell):
    return {k: face(tri, k) for k in (0, 1, 2) if k != ell}


# ---------------------------------------------------------------------------
# boundary triples


def _check_corners(bases):
    """Corner compatibility d0 p2 = d1 p0, d0 p1 = d0 p0, d1 p1 = d1 p2 on given edges."""
    pairs = [((2, -1), (0, 0)), ((1, -1), (0, -1)), ((1, 0), (2, 0))]
    for (a, ia), (b, ib) in pairs:
        if a in bases and b in bases and not np.array_equal(bases[a][ia], bases[b][ib]):
            raise LatticeError(f"edges {a} and {b} do not share their common corner")


@dataclass(frozen=True, eq=False)
class TriangleBoundaryTriple:
    """Three corner-compatible paths (or path tangents) psi_0, psi_1, psi_2."""

    paths: tuple

    def __post_init__(self):
        if len(self.paths) != 3:
            raise LatticeError("a boundary triple has three edges")
        bases = {k: (p.x if isinstance(p, DiscretePath) else p.v) for k, p in enumerate(self.paths)}
        _check_corners(bases)

    def __getitem__(self, k):
        return self.paths[k]


def boundary_triple(tri):
    return TriangleBoundaryTriple(tuple(face(tri, k) for k in range(3)))


def truncation_tangent_model(tangent: TangentTriangle):
    """Push a C_2 tangent to its compatible triple of face tangents."""
    return boundary_triple(tangent)


@dataclass(frozen=True, eq=False)
class LWX2Element:
    """A base-map representative f plus a boundary triple restricting to it."""

    f: np.ndarray
    boundary: TriangleBoundaryTriple

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        N = f.shape[0] - 1
        for k in range(3):
            rows, cols = face_indices(N, k)
            if not np.array_equal(f[rows, cols], self.boundary[k].x):
                raise LatticeError(f"boundary edge {k} does not restrict the base map")
        object.__setattr__(self, "f", f)

    @classmethod
    def from_triangle(cls, tri):
        return cls(tri.x, boundary_triple(tri))


# ---------------------------------------------------------------------------
# text dump format


_KINDS = {DiscretePath: "path", TangentPath: "tangent-path",
          DiscreteTriangle: "triangle", TangentTriangle: "tangent-triangle"}


def _num(v):
    return format(float(v), ".17g")


def dump_lattice(obj) -> str:
    """Row-major text dump: a header, then one record per lattice node.

    Path records are ``k x_1..x_n xi_1..xi_n``; triangle records are
    ``i j x_1..x_n xi1_1..xi1_n xi2_1..xi2_n``.
    """
    kind = _KINDS.get(type(obj))
    if kind is None:
        raise TypeError(f"cannot dump {type(obj).__name__}")
    base, cov = (obj.x, obj.xi) if kind in ("path", "triangle") else (obj.v, obj.chi)
    n = base.shape[-1]
    lines = ["# lattice", f"kind {kind}", f"n {n}", f"N {obj.N}"]
    if kind.endswith("path"):
        for k in range(obj.N + 1):
            lines.append(" ".join([str(k)] + [_num(v) for v in base[k]] + [_num(v) for v in cov[k]]))
    else:
        for i in range(obj.N + 1):
            for j in range(obj.N + 1 - i):
                vals = list(base[i, j]) + list(cov[i, j, 0]) + list(cov[i, j, 1])
                lines.append(" ".join([str(i), str(j)] + [_num(v) for v in vals]))
    return "\n".join(lines) + "\n"


def load_lattice(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    header = {}
    for ln in lines[:3]:
        key, val = ln.split(None, 1)
        header[key] = val.strip()
    kind, n, N = header["kind"], int(header["n"]), int(header["N"])
    rows = [ln.split() for ln in lines[3:]]
    if kind.endswith("path"):
        base = np.zeros((N + 1, n))
        cov = np.zeros((N + 1, n))
        for r in rows:
            k = int(r[0])
            vals = np.array(r[1:], dtype=float)
            base[k], cov[k] = vals[:n], vals[n:]
        return DiscretePath(base, cov) if kind == "path" else TangentPath(base, cov)
    base = np.zeros((N + 1, N + 1, n))
    cov = np.zeros((N + 1, N + 1, 2, n))
    for r in rows:
        i, j = int(r[0]), int(r[1])
        vals = np.array(r[2:], dtype=float)
        base[i, j], cov[i, j, 0], cov[i, j, 1] = vals[:n], vals[n:2 * n], vals[2 * n:]
    if kind == "triangle":
        return DiscreteTriangle(base, cov)
    if kind == "tangent-triangle":
        return TangentTriangle(base, cov)
    raise LatticeError(f"unknown lattice kind {kind!r}")

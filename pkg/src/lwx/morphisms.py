"""Lie algebroid morphisms T(simplex) -> D, their push into C_n(M), and the
isotropy and Lagrangian tests for the induced subspaces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dirac import DiracFrame, FrameError
from .fields import Polynomial
from .forms import (
    H_MAP,
    delta_H,
    omega1_H,
    omega2_H,
)
from .geometry import edge_derivative, edge_weights, lattice_exterior_derivative, lattice_gradient
from .simplex import (
    DiscretePath,
    DiscreteTriangle,
    TangentPath,
    TangentTriangle,
    face,
    lattice_points,
    truncation_tangent_model,
)

SIGMA_CUT = 1e-6


# ---------------------------------------------------------------------------
# smooth maps out of a simplex


class SimplexMap:
    """A polynomial map from the k-simplex (k = 1, 2) to R^m with exact derivatives."""

    def __init__(self, k, coeffs, powers):
        self.k = k
        self.node = Polynomial(k, coeffs, powers)
        self.m = self.node.shape[0]

    @classmethod
    def random(cls, k, m, degree, rng, scale=1.0, offset=None):
        powers = [p for p in np.ndindex(*(degree + 1,) * k) if sum(p) <= degree]
        coeffs = rng.normal(size=(m, len(powers))) * scale
        if offset is not None:
            coeffs[:, 0] = offset
        return cls(k, coeffs, powers)

    @classmethod
    def constant(cls, k, value):
        value = np.asarray(value, dtype=float)
        return cls(k, value[:, None], [(0,) * k])

    def _grid(self, N):
        if self.k == 1:
            return np.linspace(0.0, 1.0, N + 1)[:, None]
        return lattice_points(N)

    def values(self, N):
        return self.node(self._grid(N))

    def slots(self, N):
        """Derivative values with the simplex direction last: (..., m, k)."""
        return self.node.grad(self._grid(N))

    def at(self, s):
        return self.node(np.asarray(s, dtype=float))

    def __add__(self, other):
        if self.k != other.k or self.m != other.m:
            raise ValueError("maps have different shapes")
        coeffs = np.concatenate([self.node.coeffs, other.node.coeffs], axis=-1)
        powers = np.concatenate([self.node.powers, other.node.powers])
        return SimplexMap(self.k, coeffs, powers)

    def linear(self, A, b=None):
        """The map s -> A @ self(s) + b."""
        A = np.asarray(A, dtype=float)
        out = SimplexMap(self.k, A @ self.node.coeffs, self.node.powers)
        if b is not None:
            out = out + SimplexMap.constant(self.k, b)
        return out


# ---------------------------------------------------------------------------
# elements and tangents of the morphism spaces


@dataclass(frozen=True, eq=False)
class AlgebroidTriangle:
    """A bundle map T(simplex^2) -> D: base lattice f and coefficient slots psi.

    ``psi`` has shape (N+1, N+1, 2, r): psi[..., a, alpha] = psi^alpha(e_a).
    """

    frame: DiracFrame
    f: np.ndarray
    psi: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def N(self):
        return self.f.shape[0] - 1


@dataclass(frozen=True, eq=False)
class AlgebroidTangent:
    """Variation (v, mu) of an AlgebroidTriangle: v (N+1, N+1, n), mu (N+1, N+1, 2, r)."""

    v: np.ndarray
    mu: np.ndarray


@dataclass(frozen=True, eq=False)
class APath:
    """A path in T*M with its coefficients a(t) in a frame."""

    path: DiscretePath
    a: np.ndarray
    frame: DiracFrame


def _mask(N):
    i, j = np.indices((N + 1, N + 1))
    return i + j <= N


def _slot_array(grad):
    # (..., m, k) -> (..., k, m)
    return np.swapaxes(grad, -1, -2)


def build_morphism_bgraph(frame: DiracFrame, f, N=None) -> AlgebroidTriangle:
    """Graph of B: any base map f, with psi^i the slot values of df^i.

    ``f`` is a SimplexMap (exact derivatives) or a base lattice, in which
    case psi comes from the face-exact lattice gradient.
    """
    if frame.kind != "bgraph":
        raise FrameError(f"expected a graph-of-B frame, got {frame.kind}")
    if isinstance(f, SimplexMap):
        if N is None:
            raise ValueError("need N to sample a smooth base map")
        return AlgebroidTriangle(frame, f.values(N), _slot_array(f.slots(N)), {"f": f})
    f = np.asarray(f, dtype=float)
    return AlgebroidTriangle(frame, f, _slot_array(lattice_gradient(f, face_exact=True)))


def build_morphism_constpi(frame: DiracFrame, g: SimplexMap, f0, N) -> AlgebroidTriangle:
    """Constant Poisson graph: psi = dg and f = f0 + pi^{alpha i}(g^alpha - g^alpha(0))."""
    if frame.kind != "pigraph":
        raise FrameError(f"expected a graph-of-pi frame, got {frame.kind}")
    f0 = np.asarray(f0, dtype=float)
    Q = frame.q(f0)                                    # q^i_alpha, constant
    if np.max(np.abs(frame.dq(f0[None, :]))) > 0.0:
        raise FrameError("the Poisson family needs a constant bivector")
    g0 = g.at(np.zeros(g.k))
    fmap = g.linear(Q, f0 - Q @ g0)
    return AlgebroidTriangle(frame, fmap.values(N), _slot_array(g.slots(N)), {"f": fmap, "g": g})


def tangent_bgraph(T: AlgebroidTriangle, v: SimplexMap) -> AlgebroidTangent:
    """Tangent v with mu^i the slot values of dv^i."""
    return AlgebroidTangent(v.values(T.N), _slot_array(v.slots(T.N)))


def tangent_constpi(T: AlgebroidTriangle, h: SimplexMap, v0) -> AlgebroidTangent:
    """Tangent mu = dh, v = v0 + pi^{alpha i}(h^alpha - h^alpha(0))."""
    v0 = np.asarray(v0, dtype=float)
    Q = T.frame.q(T.f[0, 0])
    vmap = h.linear(Q, v0 - Q @ h.at(np.zeros(h.k)))
    return AlgebroidTangent(vmap.values(T.N), _slot_array(h.slots(T.N)))


def morphism_residual(T: AlgebroidTriangle):
    """(r1, r2): defects of df = q(f) psi and d psi + 1/2 C(f) psi ^ psi on the lattice."""
    frame = T.frame
    mask = _mask(T.N)
    df = _slot_array(lattice_gradient(T.f))            # (.., 2, n)
    q = frame.q(T.f)                                   # (.., n, r)
    r1 = df - np.einsum("...ia,...sa->...si", q, T.psi)
    C, _ = frame.structure_functions_batch(T.f)        # (.., a, b, c)
    dpsi = lattice_exterior_derivative(np.swapaxes(T.psi, -1, -2))   # (.., r)
    quad = np.einsum("...abc,...a,...b->...c", C, T.psi[..., 0, :], T.psi[..., 1, :])
    r2 = dpsi + quad
    return float(np.max(np.abs(r1[mask]))), float(np.max(np.abs(r2[mask])))


def _structure_derivative(frame, x, h=1e-5):
    out = []
    for k in range(frame.dim):
        e = np.zeros(frame.dim)
        e[k] = h
        Cp, _ = frame.structure_functions_batch(x + e)
        Cm, _ = frame.structure_functions_batch(x - e)
        out.append((Cp - Cm) / (2 * h))
    return np.stack(out, axis=-1)                      # (.., a, b, c, k)


def tangent_residual(T: AlgebroidTriangle, t: AlgebroidTangent):
    """Residuals of the linearized morphism equations."""
    frame = T.frame
    mask = _mask(T.N)
    dv = _slot_array(lattice_gradient(t.v))
    q = frame.q(T.f)
    dq = frame.dq(T.f)                                 # (.., i, a, k)
    r1 = (dv - np.einsum("...k,...iak,...sa->...si", t.v, dq, T.psi)
          - np.einsum("...ia,...sa->...si", q, t.mu))
    C, _ = frame.structure_functions_batch(T.f)
    dC = _structure_derivative(frame, T.f)
    p1, p2 = T.psi[..., 0, :], T.psi[..., 1, :]
    m1, m2 = t.mu[..., 0, :], t.mu[..., 1, :]
    dmu = lattice_exterior_derivative(np.swapaxes(t.mu, -1, -2))
    r2 = (dmu + np.einsum("...k,...abck,...a,...b->...c", t.v, dC, p1, p2)
          + np.einsum("...abc,...a,...b->...c", C, m1, p2)
          + np.einsum("...abc,...a,...b->...c", C, p1, m2))
    return float(np.max(np.abs(r1[mask]))), float(np.max(np.abs(r2[mask])))


def F_map(T: AlgebroidTriangle) -> DiscreteTriangle:
    """The induced element of C_2: covector slots p_{i alpha}(f) psi^alpha."""
    p = T.frame.p(T.f)
    return DiscreteTriangle(T.f, np.einsum("...ia,...sa->...si", p, T.psi))


def F_tangent(T: AlgebroidTriangle, t: AlgebroidTangent) -> TangentTriangle:
    """chi_i = v^k d_k p_{i alpha}(f) psi^alpha + p_{i alpha}(f) mu^alpha on each slot."""
    p = T.frame.p(T.f)
    dp = T.frame.dp(T.f)
    chi = (np.einsum("...k,...iak,...sa->...si", t.v, dp, T.psi)
           + np.einsum("...ia,...sa->...si", p, t.mu))
    return TangentTriangle(t.v, chi)


def recover_morphism_base(tri: DiscreteTriangle):
    """The base lattice of F(T); F is injective on the base part."""
    return tri.x


def isotropy_values(T, tangent_pairs, tw=None, normalize=True):
    """|omega^H_2(F X, F Y)| for each pair, optionally divided by |FX| |FY|.

    The norms are quadrature-weighted RMS norms of the pushed tangents, so
    the ratio is independent of the amplitude of the random data.
    """
    base = F_map(T)
    tw = tw if tw is not None else T.frame.twist
    out = []
    for X, Y in tangent_pairs:
        FX, FY = F_tangent(T, X), F_tangent(T, Y)
        val = abs(omega2_H(base, FX, FY, tw))
        if normalize:
            val /= max(tangent_norm(FX) * tangent_norm(FY), 1e-300)
        out.append(val)
    return np.array(out)


def tangent_norm(X):
    total = 0.0
    for i in range(3):
        b = face(X, i)
        w = edge_weights(b.N)
        total += float(np.sum(w[:, None] * (b.v ** 2 + b.chi ** 2)))
    return np.sqrt(total)


def thm41_check(T, tangent_pairs, tw=None, normalize=True) -> float:
    """Largest isotropy value of pushed tangent pairs; zero in the continuum."""
    return float(np.max(isotropy_values(T, tangent_pairs, tw, normalize)))


# ---------------------------------------------------------------------------
# A-paths and the one-simplex family


def apath_residual(p: APath) -> float:
    """Largest distance of (dx/dt, xi) from the frame span along the path."""
    x, xi = p.path.x, p.path.xi
    xdot = edge_derivative(x, "central")
    M = p.frame.matrix(x)                              # (N+1, 2n, r)
    rhs = np.concatenate([xdot, xi], axis=-1)
    coef = np.einsum("kri,ki->kr", np.linalg.pinv(M), rhs)
    off = np.einsum("kir,kr->ki", M, coef) - rhs
    return float(np.max(np.linalg.norm(off, axis=-1)))


class PathFamily:
    """A linear family of A-paths theta -> (f_theta, psi_theta) with exact Jacobian.

    ``base`` is a SimplexMap on the 1-simplex, ``directions`` a list of
    SimplexMaps; f_theta = base + sum theta_a directions_a in the graph-of-B
    case, and g_theta likewise in the Poisson case.
    """

    def __init__(self, frame, base, directions, N, f0=None):
        self.frame = frame
        self.base = base
        self.directions = directions
        self.N = N
        self.f0 = None if f0 is None else np.asarray(f0, dtype=float)
        if frame.kind not in ("bgraph", "pigraph"):
            raise FrameError("path families exist for graph-of-B and Poisson frames")
        if frame.kind == "pigraph":
            if self.f0 is None:
                raise ValueError("the Poisson family needs a base point f0")
            self.Q = frame.q(self.f0)

    @property
    def size(self):
        return len(self.directions)

    def _curve(self, theta):
        vals = self.base.values(self.N)
        der = self.base.slots(self.N)[..., 0]
        for c, d in zip(theta, self.directions):
            vals = vals + c * d.values(self.N)
            der = der + c * d.slots(self.N)[..., 0]
        return vals, der

    def _base(self, g, dg):
        if self.frame.kind == "bgraph":
            return g, dg
        return self.f0 + (g - g[0]) @ self.Q.T, dg

    def point(self, theta) -> DiscretePath:
        g, dg = self._curve(theta)
        f, psi = self._base(g, dg)
        xi = np.einsum("kia,ka->ki", self.frame.p(f), psi)
        return DiscretePath(f, xi)

    def apath(self, theta) -> APath:
        g, dg = self._curve(theta)
        f, psi = self._base(g, dg)
        return APath(self.point(theta), psi, self.frame)

    def jacobian(self, theta, a) -> TangentPath:
        g, dg = self._curve(theta)
        f, psi = self._base(g, dg)
        h = self.directions[a].values(self.N)
        dh = self.directions[a].slots(self.N)[..., 0]
        if self.frame.kind == "bgraph":
            v, mu = h, dh
        else:
            v, mu = (h - h[0]) @ self.Q.T, dh
        chi = (np.einsum("kj,kiaj,ka->ki", v, self.frame.dp(f), psi)
               + np.einsum("kia,ka->ki", self.frame.p(f), mu))
        return TangentPath(v, chi)


def pullback_form(family: PathFamily, tw=None):
    """theta -> matrix (F^* omega^H_1)(e_a, e_b) on the parameter space."""
    tw = tw if tw is not None else family.frame.twist

    def beta(theta):
        P = family.point(theta)
        J = [family.jacobian(theta, a) for a in range(family.size)]
        m = family.size
        out = np.zeros((m, m))
        for a in range(m):
            for b in range(a + 1, m):
                out[a, b] = omega1_H(P, J[a], J[b], tw)
                out[b, a] = -out[a, b]
        return out

    return beta


def pullback_closedness(family: PathFamily, theta, tw=None, h=H_MAP, subtract_delta_H=False):
    """max |d(F^* omega^H_1)| over coordinate triples, by central differences.

    With ``subtract_delta_H`` the pulled-back endpoint term F^*(delta H) is
    removed first, which is the expected value of d(F^* omega^H_1) for a
    nonzero closed H.
    """
    theta = np.asarray(theta, dtype=float)
    beta = pullback_form(family, tw)
    m = family.size
    grads = []
    for k in range(m):
        e = np.zeros(m)
        e[k] = h
        grads.append((beta(theta + e) - beta(theta - e)) / (2 * h))
    worst = 0.0
    P = family.point(theta)
    J = [family.jacobian(theta, a) for a in range(m)]
    tw = tw if tw is not None else family.frame.twist
    for a in range(m):
        for b in range(a + 1, m):
            for c in range(b + 1, m):
                d = grads[a][b, c] - grads[b][a, c] + grads[c][a, b]
                if subtract_delta_H and not tw.is_zero:
                    d -= delta_H(P, J[a], J[b], J[c], tw)
                worst = max(worst, abs(d))
    return worst


# ---------------------------------------------------------------------------
# Lagrangian tests


class TripleModel:
    """Corner-compatible triples of path tangents in weighted coordinates.

    Free coordinates are the base variation at the 3N boundary nodes (each
    corner once) and the covector variation at every node of every face.
    Coordinates are scaled by the square roots of their quadrature weights,
    so the Euclidean norm approximates the L2 norm of the triple.
    """

    def __init__(self, N, n):
        self.N, self.n = N, n
        self.E = self._embedding()
        self.E_pinv = np.linalg.pinv(self.E)
        w = edge_weights(N)
        wfull = np.concatenate([np.repeat(np.tile(w, 3), n)] * 2)
        metric = self.E.T @ (wfull[:, None] * self.E)
        self.scale = np.sqrt(np.diag(metric))
        self.dim = self.E.shape[1]

    def _node(self, face_idx, k):
        """Index of the boundary node for node k of a face (corners shared)."""
        N = self.N
        # corners: v0 -> 0, v1 -> 1, v2 -> 2; interiors follow
        ends = {0: (1, 2), 1: (0, 2), 2: (0, 1)}[face_idx]
        if k == 0:
            return ends[0]
        if k == N:
            return ends[1]
        return 3 + face_idx * (N - 1) + (k - 1)

    def _embedding(self):
        N, n = self.N, self.n
        nv = 3 * N * n
        nc = 3 * (N + 1) * n
        E = np.zeros((2 * nc, nv + nc))
        for fi in range(3):
            for k in range(N + 1):
                node = self._node(fi, k)
                for d in range(n):
                    row = (fi * (N + 1) + k) * n + d
                    E[row, node * n + d] = 1.0
                    E[nc + row, nv + row] = 1.0
        return E

    def full_from_triple(self, triple):
        v = np.concatenate([triple[i].v.ravel() for i in range(3)])
        chi = np.concatenate([triple[i].chi.ravel() for i in range(3)])
        return np.concatenate([v, chi])

    def coords(self, triple):
        """Weighted free coordinates of a corner-compatible triple."""
        full = self.full_from_triple(triple)
        return (self.E_pinv @ full) * self.scale

    def omega_matrix(self, bases=None, tw=None):
        """Matrix of sum_i (-1)^i omega^H_1 on the faces, in weighted free coordinates."""
        N, n = self.N, self.n
        m = (N + 1) * n
        w = np.repeat(edge_weights(N), n)
        full = np.zeros((6 * m, 6 * m))
        for fi in range(3):
            sign = (-1) ** fi
            vs = slice(fi * m, (fi + 1) * m)
            cs = slice(3 * m + fi * m, 3 * m + (fi + 1) * m)
            full[vs, cs] += sign * np.diag(w)
            full[cs, vs] -= sign * np.diag(w)
            if tw is not None and not tw.is_zero and bases is not None:
                full[vs, vs] += sign * transgression_matrix(tw.H, bases[fi].x)
        Om = self.E.T @ full @ self.E
        return Om / np.outer(self.scale, self.scale)


def transgression_matrix(H, x):
    """Matrix of (v, v') -> integral of H(x)(v, v', dx/dt) over nodal values.

    Same piecewise-linear reading and Gauss-Legendre rule as the transgression
    form, so ``u^T M u'`` equals phi^H_1 on the path.
    """
    from .forms import _gauss

    N = x.shape[0] - 1
    n = x.shape[1]
    tau, w = _gauss()
    pts = x[:-1, None, :] + tau[None, :, None] * (x[1:, None, :] - x[:-1, None, :])
    vel = (x[1:] - x[:-1]) * N
    A = np.einsum("sgijk,sk->sgij", H(pts), vel)             # (N, G, n, n)
    phi = np.stack([1.0 - tau, tau])                         # (2, G)
    M = np.zeros((N + 1, n, N + 1, n))
    for a in range(2):
        for b in range(2):
            blk = np.einsum("g,g,g,sgij->sij", w, phi[a], phi[b], A) / N
            idx = np.arange(N)
            M[idx + a, :, idx + b, :] += blk
    return M.reshape((N + 1) * n, (N + 1) * n)


def _orth(A, sigma_cut, report):
    """Orthonormal basis of the column space with a spectral-gap check."""
    if A.shape[1] == 0:
        return A
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return U[:, :0]
    rel = s / s[0]
    _gap_check(rel, sigma_cut, report)
    return U[:, rel > sigma_cut]


def _null(A, sigma_cut, report, scale=None):
    """Orthonormal basis of the null space of A (rows act on column vectors)."""
    _, s, Vt = np.linalg.svd(A)
    ref = scale if scale is not None else (s[0] if s.size and s[0] > 0 else 1.0)
    full = np.zeros(Vt.shape[0])
    full[: s.size] = s / ref
    _gap_check(full[: s.size], sigma_cut, report)
    return Vt[full <= sigma_cut].T


def _gap_check(rel, sigma_cut, report, width=100.0):
    ambiguous = (rel > sigma_cut / width) & (rel < sigma_cut * width)
    if np.any(ambiguous):
        report["gap_ok"] = False


@dataclass
class LagrangianReport:
    isotropy_residual: float
    coisotropy_defect: float
    dim_model: int
    dim_subspace: int
    dim_kernel: int
    status: str

    def as_dict(self):
        return dict(self.__dict__)


def _subspace_report(model, Om, probes, sigma_cut, report):
    L = _orth(probes, sigma_cut, report)
    K = _null(Om, sigma_cut, report, scale=1.0)
    iso = float(np.max(np.abs(L.T @ Om @ L))) if L.shape[1] else 0.0
    perp = _null(L.T @ Om, sigma_cut, report, scale=1.0)
    LK = _orth(np.concatenate([L, K], axis=1), sigma_cut, report)
    if perp.shape[1]:
        outside = perp - LK @ (LK.T @ perp)
        defect = float(np.linalg.norm(outside, 2))
    else:
        defect = 0.0
    status = "ok" if report.get("gap_ok", True) else "inconclusive"
    return LagrangianReport(iso, defect, model.dim, L.shape[1], K.shape[1], status)


def lagrangian_at_unit(frame: DiracFrame, x0, N, n_probe=None, seed=0, sigma_cut=SIGMA_CUT):
    """Isotropy and coisotropy of the tangent space to L_D at the unit over x0.

    Probes are pushed (g, c) families: v = q(x0) g + c and mu = dg, sent
    through F_tangent at the constant morphism and cut to boundary triples.
    """
    x0 = np.asarray(x0, dtype=float)
    n, r = frame.dim, frame.rank
    model = TripleModel(N, n)
    Om = model.omega_matrix()
    dim_L = 3 * N * r + n - r
    n_probe = n_probe or 4 * dim_L
    rng = np.random.default_rng(seed)
    f = np.broadcast_to(x0, (N + 1, N + 1, n)).copy()
    T = AlgebroidTriangle(frame, f, np.zeros((N + 1, N + 1, 2, r)))
    q0 = frame.q(x0)
    G = rng.normal(size=(N + 1, N + 1, n_probe, r))
    c = rng.normal(size=(n_probe, n))
    mu = np.moveaxis(lattice_gradient(G, face_exact=True), -1, -3)   # (.., 2, P, r)
    cols = []
    for k in range(n_probe):
        v = np.einsum("ia,...a->...i", q0, G[:, :, k]) + c[k]
        t = AlgebroidTangent(v, mu[:, :, :, k])
        triple = truncation_tangent_model(F_tangent(T, t))
        col = model.coords(triple)
        cols.append(col / np.linalg.norm(col))
    report = {}
    return _subspace_report(model, Om, np.array(cols).T, sigma_cut, report)


def lagrangian_general_bgraph(frame: DiracFrame, T: AlgebroidTriangle, n_probe=None, seed=0,
                              sigma_cut=SIGMA_CUT):
    """Same test at a non-unit point of L_D for a graph-of-B frame.

    Probes are arbitrary base variations v with mu the face-exact lattice
    derivative of v; the form includes the transgression of the frame's twist.
    """
    if frame.kind != "bgraph":
        raise FrameError("the general-point test is for graph-of-B frames")
    if frame.involutivity > 1e-7:
        raise FrameError("frame is not involutive")
    N, n = T.N, frame.dim
    model = TripleModel(N, n)
    base = F_map(T)
    bases = [face(base, i) for i in range(3)]
    Om = model.omega_matrix(bases, frame.twist)
    dim_L = 3 * N * n
    n_probe = n_probe or 4 * dim_L
    rng = np.random.default_rng(seed)
    V = rng.normal(size=(N + 1, N + 1, n_probe, n))
    mu = np.moveaxis(lattice_gradient(V, face_exact=True), -1, -3)
    cols = []
    for k in range(n_probe):
        t = AlgebroidTangent(V[:, :, k], mu[:, :, :, k])
        triple = truncation_tangent_model(F_tangent(T, t))
        col = model.coords(triple)
        cols.append(col / np.linalg.norm(col))
    report = {}
    return _subspace_report(model, Om, np.array(cols).T, sigma_cut, report)


def smooth_probe_isotropy(T: AlgebroidTriangle, maps) -> float:
    """max |Omega| on normalized pushes of smooth tangents (graph-of-B family)."""
    N, n = T.N, T.frame.dim
    model = TripleModel(N, n)
    base = F_map(T)
    Om = model.omega_matrix([face(base, i) for i in range(3)], T.frame.twist)
    cols = []
    for m in maps:
        col = model.coords(truncation_tangent_model(F_tangent(T, tangent_bgraph(T, m))))
        cols.append(col / np.linalg.norm(col))
    L = np.array(cols).T
    return float(np.max(np.abs(L.T @ Om @ L)))


def nondegeneracy_probe(N, n, base=None, tw=None):
    """Smallest singular value of omega^H_1 in weighted nodal coordinates."""
    w = np.repeat(np.sqrt(edge_weights(N)), n)
    m = (N + 1) * n
    G = np.zeros((2 * m, 2 * m))
    G[:m, m:] = np.eye(m)
    G[m:, :m] = -np.eye(m)
    if tw is not None and not tw.is_zero and base is not None:
        G[:m, :m] = transgression_matrix(tw.H, base.x) / np.outer(w, w)
    return float(np.linalg.svd(G, compute_uv=False)[-1])

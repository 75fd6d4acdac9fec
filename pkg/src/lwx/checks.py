"""Named verification checks run by the scenario runner.

A check maps (context, N) to a residual plus a small details dict. Checks
that do not depend on the lattice size declare ``ladder=False`` and run once.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from . import forms as F
from .courant import GeneralizedSection, jacobi_residual, pairing, skew_anomaly_residual
from .dirac import coordinate_identity_residual, involutivity_residual, isotropy_residual
from .fields import SmoothField
from .geometry import edge_weights, quadrature_triangle
from .morphisms import (
    PathFamily,
    SimplexMap,
    apath_residual,
    build_morphism_bgraph,
    build_morphism_constpi,
    F_map,
    F_tangent,
    lagrangian_at_unit,
    lagrangian_general_bgraph,
    morphism_residual,
    nondegeneracy_probe,
    pullback_closedness,
    smooth_probe_isotropy,
    tangent_bgraph,
    tangent_constpi,
    isotropy_values,
    tangent_residual,
    tangent_norm,
)
from .simplex import (
    DiscretePath,
    DiscreteTriangle,
    TangentPath,
    TangentTriangle,
    face,
    horn_fill,
    horn_of,
    lattice_points,
)


@dataclass(frozen=True)
class Check:
    name: str
    fn: object
    tolerance: float
    expected_order: float | None = None
    ladder: bool = True
    mode: str = "below"          # below: residual under tolerance; monotone: bounded below and non-decreasing
    description: str = ""


REGISTRY: dict[str, Check] = {}


def register(name, tolerance, expected_order=None, ladder=True, mode="below"):
    def wrap(fn):
        REGISTRY[name] = Check(name, fn, tolerance, expected_order, ladder, mode,
                               (fn.__doc__ or "").strip().splitlines()[0])
        return fn
    return wrap


def check_rng(ctx, name, N):
    """Generator seeded by scenario seed, check id and N only."""
    key = zlib.crc32(f"{name}:{N}".encode())
    return np.random.default_rng([ctx.seed, key])


# ---------------------------------------------------------------------------
# random smooth data


def _tri_norm(X):
    w = quadrature_triangle(np.ones((X.N + 1, X.N + 1)))
    sq = np.sum(X.v ** 2, axis=-1) + np.sum(X.chi ** 2, axis=(-1, -2))
    return float(np.sqrt(quadrature_triangle(sq) / w))


def _path_norm(X):
    w = edge_weights(X.N)
    return float(np.sqrt(np.sum(w[:, None] * (X.v ** 2 + X.chi ** 2))))


class _TriangleData:
    """Random polynomial base triangle and tangents, resampled at any N."""

    def __init__(self, n, rng, degree=3, base_scale=0.4, tangent_scale=1.0, count=6):
        self.base = [SimplexMap.random(2, n, degree, rng, base_scale) for _ in range(3)]
        self.tangents = [[SimplexMap.random(2, n, degree, rng, tangent_scale) for _ in range(3)]
                         for _ in range(count)]

    def triangle(self, N):
        x, a, b = (m.values(N) for m in self.base)
        return DiscreteTriangle(x, np.stack([a, b], axis=2))

    def tangent(self, k, N):
        v, a, b = (m.values(N) for m in self.tangents[k])
        return TangentTriangle(v, np.stack([a, b], axis=2))


def _triangle_data(ctx, name):
    # one draw per check, shared across the ladder so residuals are comparable
    return _TriangleData(ctx.dim, check_rng(ctx, name, 0))


def _pairs(count):
    return [(2 * k, 2 * k + 1) for k in range(count // 2)]


# ---------------------------------------------------------------------------
# courant algebra


def _random_poly_section(n, rng, degree=3, terms=4):
    def field(kind):
        items = []
        for _ in range(terms):
            powers = rng.multinomial(rng.integers(0, degree + 1), np.ones(n) / n)
            items.append((float(rng.normal()), tuple(int(p) for p in powers), (int(rng.integers(n)),)))
        return SmoothField.polynomial(kind, n, items)
    return GeneralizedSection(field("vector"), field("one-form"))


@register("courant_axioms", 1e-8, ladder=False)
def courant_axioms(ctx, N):
    """Pairing symmetry, Leibniz-Jacobi identity and the [a,a] anomaly on polynomial sections."""
    rng = check_rng(ctx, "courant_axioms", 0)
    n = ctx.dim
    tw = ctx.twist if ctx.twist is not None and ctx.twist.closed else None
    pts = rng.uniform(-1, 1, size=(8, n))
    sym = jac = anom = 0.0
    for _ in range(3):
        a, b, c = (_random_poly_section(n, rng) for _ in range(3))
        sym = max(sym, float(np.max(np.abs(pairing(a, b, pts) - pairing(b, a, pts)))))
        jac = max(jac, jacobi_residual(a, b, c, tw, pts))
        anom = max(anom, skew_anomaly_residual(a, pts, tw))
    return max(sym, jac, anom), {"symmetry": sym, "jacobi": jac, "anomaly": anom}


@register("dirac_frame", 1e-7, ladder=False)
def dirac_frame(ctx, N):
    """Isotropy, involutivity and the coordinate bracket identity of the scenario frame."""
    frame = ctx.frame
    rng = check_rng(ctx, "dirac_frame", 0)
    pts = rng.uniform(-1, 1, size=(100, ctx.dim))
    iso = isotropy_residual(frame, pts)
    inv = involutivity_residual(frame, pts[:20])
    coord = max(coordinate_identity_residual(frame, x) for x in pts[:20])
    return max(iso, inv, coord), {"isotropy": iso, "involutivity": inv, "coordinate_identity": coord}


# ---------------------------------------------------------------------------
# mapping-space forms


@register("coboundary_omega", 1e-2, expected_order=2.0)
def coboundary_omega(ctx, N):
    """delta(omega_1) against the interior Stokes integral of omega_2, scaled by |X||Y|."""
    data = _triangle_data(ctx, "coboundary_omega")
    T = data.triangle(N)
    delta = F.simplicial_coboundary(F.OMEGA1)
    worst = 0.0
    for a, b in _pairs(6):
        X, Y = data.tangent(a, N), data.tangent(b, N)
        diff = abs(delta(T, X, Y) - F.omega2_interior(T, X, Y))
        worst = max(worst, diff / (_tri_norm(X) * _tri_norm(Y)))
    return worst, {}


@register("coboundary_phiH", 1e-2, expected_order=2.0)
def coboundary_phiH(ctx, N):
    """delta(phi^H_1) against the interior Stokes integral of phi^H_2, scaled by |X||Y|."""
    data = _triangle_data(ctx, "coboundary_phiH")
    T = data.triangle(N)
    tw = ctx.require_twist()
    delta = F.simplicial_coboundary(F.phi_H_1_form(tw))
    worst = 0.0
    for a, b in _pairs(6):
        X, Y = data.tangent(a, N), data.tangent(b, N)
        diff = abs(delta(T, X, Y) - F.phi_H_2_interior(T, X, Y, tw))
        worst = max(worst, diff / (_tri_norm(X) * _tri_norm(Y)))
    return worst, {}


@register("coboundary_lambda", 1e-2, expected_order=2.0)
def coboundary_lambda(ctx, N):
    """delta(lambda_1) against the interior Stokes integral of lambda_2, scaled by |X| |T|."""
    data = _triangle_data(ctx, "coboundary_lambda")
    T = data.triangle(N)
    delta = F.simplicial_coboundary(F.LAMBDA1)
    scale = float(np.sqrt(quadrature_triangle(np.sum(T.xi ** 2, axis=(-1, -2))) * 2))
    worst = 0.0
    for k in range(4):
        X = data.tangent(k, N)
        diff = abs(delta(T, X) - F.lambda2_interior(T, X))
        worst = max(worst, diff / (_tri_norm(X) * scale))
    return worst, {}


@register("coboundary_boundary_form", 1e-12)
def coboundary_boundary_form(ctx, N):
    """delta(omega_1 + phi^H_1) against the boundary-evaluated omega^H_2 (identical by construction)."""
    data = _triangle_data(ctx, "coboundary_boundary_form")
    T = data.triangle(N)
    tw = ctx.twist
    delta = F.simplicial_coboundary(F.omega_H_form(tw, 1))
    worst = 0.0
    for a, b in _pairs(6):
        X, Y = data.tangent(a, N), data.tangent(b, N)
        worst = max(worst, abs(delta(T, X, Y) - F.omega2_H(T, X, Y, tw)))
    return worst, {}


def _path_data(ctx, name, N, count=3, base_scale=0.4):
    rng = check_rng(ctx, name, 0)
    n = ctx.dim
    maps = [SimplexMap.random(1, n, 3, rng, base_scale) for _ in range(2)]
    tans = [[SimplexMap.random(1, n, 3, rng, 1.0) for _ in range(2)] for _ in range(count)]
    base = DiscretePath(maps[0].values(N), maps[1].values(N))
    tangents = [TangentPath(a.values(N), b.values(N)) for a, b in tans]
    return base, tangents


@register("lambda_exactness", 1e-6)
def lambda_exactness(ctx, N):
    """omega_1 + d(lambda_1) on random path data."""
    base, (X, Y, _) = _path_data(ctx, "lambda_exactness", N)
    dl = F.exterior_derivative_mapping(F.LAMBDA1)
    return abs(F.omega1(base, X, Y) + dl(base, X, Y)), {}


@register("omega1_closed", 1e-6)
def omega1_closed(ctx, N):
    """d(omega_1) on random path data."""
    base, (X, Y, Z) = _path_data(ctx, "omega1_closed", N)
    return abs(F.exterior_derivative_mapping(F.OMEGA1)(base, X, Y, Z)), {}


@register("dphiH", 1e-6)
def dphiH(ctx, N):
    """d(phi^H_1) against phi^{dH}_1 + delta H on random path data."""
    tw = ctx.require_twist()
    base, (X, Y, Z) = _path_data(ctx, "dphiH", N)
    d = F.exterior_derivative_mapping(F.phi_H_1_form(tw))(base, X, Y, Z)
    endpoint = F.delta_H(base, X, Y, Z, tw)
    bulk = F.phi_dH_1(base, X, Y, Z, tw)
    return abs(d - bulk - endpoint), {"d_phiH": d, "delta_H": endpoint, "phi_dH": bulk,
                                      "H_closed": bool(tw.closed)}


def _basic_tangent(N, n, rng):
    v = rng.normal(size=(N + 1, N + 1, n))
    chi = rng.normal(size=(N + 1, N + 1, 2, n))
    k = np.arange(N + 1)
    v[k, 0] = 0.0
    v[0, k] = 0.0
    v[N - k, k] = 0.0
    chi[k, 0, 0] = 0.0                   # face 2 direction e1
    chi[0, k, 1] = 0.0                   # face 1 direction e2
    chi[N - k, k, 1] = chi[N - k, k, 0]  # face 0 direction e2 - e1
    chi[0, 0] = chi[N, 0] = chi[0, N] = 0.0  # corners sit on two faces
    return TangentTriangle(v, chi)


@register("basic_kernel", 1e-8)
def basic_kernel(ctx, N):
    """omega_2(X, .) for a tangent with vanishing face pushes, over random probes."""
    rng = check_rng(ctx, "basic_kernel", N)
    n = ctx.dim
    data = _triangle_data(ctx, "basic_kernel")
    T = data.triangle(N)
    X = _basic_tangent(N, n, rng)
    pushes = max(float(np.max(np.abs(face(X, i).v)) + np.max(np.abs(face(X, i).chi))) for i in range(3))
    worst = 0.0
    for _ in range(20):
        Y = TangentTriangle(rng.normal(size=X.v.shape), rng.normal(size=X.chi.shape))
        worst = max(worst, abs(F.omega2_H(T, X, Y, ctx.twist)) / (_tri_norm(X) * _tri_norm(Y)))
    return max(worst, pushes), {"face_push_norm": pushes}


@register("horn_fill", 0.0)
def horn_fill_check(ctx, N):
    """Faces of filled horns against their inputs, 50 random horns on dyadic data."""
    rng = check_rng(ctx, "horn_fill", N)
    n = ctx.dim
    worst = 0.0
    worst_float = 0.0
    for trial in range(50):
        ell = trial % 3
        # dyadic values keep every sum exact, so equality is tested bitwise
        x = rng.integers(-256, 257, size=(N + 1, N + 1, n)) / 64.0
        xi = rng.integers(-256, 257, size=(N + 1, N + 1, 2, n)) / 64.0
        T = DiscreteTriangle(x, xi)
        horn = horn_of(T, ell)
        filled = horn_fill(horn, ell, T.x)
        for k, p in horn.items():
            fk = face(filled, k)
            if not (np.array_equal(fk.x, p.x) and np.array_equal(fk.xi, p.xi)):
                worst = max(worst, float(np.max(np.abs(fk.xi - p.xi)) + np.max(np.abs(fk.x - p.x))))
        Tf = DiscreteTriangle(rng.normal(size=x.shape), rng.normal(size=xi.shape))
        hf = horn_of(Tf, ell)
        ff = horn_fill(hf, ell, Tf.x)
        for k, p in hf.items():
            worst_float = max(worst_float, float(np.max(np.abs(face(ff, k).xi - p.xi))))
    return worst, {"float_data_max_deviation": worst_float}


@register("nondegeneracy", 1e-4, mode="monotone")
def nondegeneracy(ctx, N):
    """Smallest singular value of omega^H_1 in weighted nodal coordinates on a straight path."""
    n = ctx.dim
    t = np.linspace(0.0, 1.0, N + 1)
    x = ctx.path_origin[None, :] + np.outer(t, ctx.path_direction)
    base = DiscretePath(x, np.zeros_like(x))
    return nondegeneracy_probe(N, n, base, ctx.transgression_twist), {}


# ---------------------------------------------------------------------------
# Dirac morphisms


def _morphism_family(ctx, name, N, count):
    rng = check_rng(ctx, name, 0)
    frame = ctx.frame
    n = frame.dim
    r = frame.rank
    fmap = SimplexMap.random(2, n if frame.kind == "bgraph" else r, 3, rng, 0.4)
    maps = [SimplexMap.random(2, n if frame.kind == "bgraph" else r, 3, rng, 1.0) for _ in range(count)]
    offsets = [rng.normal(size=n) for _ in range(count)]
    if frame.kind == "bgraph":
        T = build_morphism_bgraph(frame, fmap.linear(np.eye(n), ctx.base_point), N)
        tangents = [tangent_bgraph(T, m) for m in maps]
    elif frame.kind == "pigraph":
        T = build_morphism_constpi(frame, fmap, ctx.base_point, N)
        tangents = [tangent_constpi(T, m, o) for m, o in zip(maps, offsets)]
    else:
        raise ValueError(f"no morphism family for a {frame.kind} frame")
    return T, tangents


@register("morphism_residual", 1e-2, expected_order=2.0)
def morphism_residual_check(ctx, N):
    """Lattice residuals of the morphism equations and their linearization."""
    T, tangents = _morphism_family(ctx, "morphism_residual", N, 2)
    r1, r2 = morphism_residual(T)
    s1, s2 = tangent_residual(T, tangents[0])
    return max(r1, r2, s1, s2), {"r1": r1, "r2": r2, "tangent_r1": s1, "tangent_r2": s2}


@register("morphism_isotropy", 1e-5, expected_order=2.0)
def morphism_isotropy(ctx, N):
    """max |omega^H_2(F X, F Y)| / (|FX| |FY|) over 20 random tangent pairs."""
    T, tangents = _morphism_family(ctx, "morphism_isotropy", N, 40)
    pairs = [(tangents[2 * k], tangents[2 * k + 1]) for k in range(20)]
    vals = isotropy_values(T, pairs, ctx.transgression_twist)
    raw = isotropy_values(T, pairs, ctx.transgression_twist, normalize=False)
    return float(np.max(vals)), {"max_unnormalized": float(np.max(raw))}


@register("pullback_multiplicative", 1e-5, expected_order=2.0)
def pullback_multiplicative(ctx, N):
    """delta(F_1^* omega^H_1) on boundary triples of pushed tangents, scaled by |FX| |FY|."""
    T, tangents = _morphism_family(ctx, "pullback_multiplicative", N, 40)
    base = F_map(T)
    delta = F.simplicial_coboundary(F.omega_H_form(ctx.transgression_twist, 1))
    worst = 0.0
    for k in range(20):
        FX, FY = F_tangent(T, tangents[2 * k]), F_tangent(T, tangents[2 * k + 1])
        worst = max(worst, abs(delta(base, FX, FY)) / (tangent_norm(FX) * tangent_norm(FY)))
    return worst, {}


def _path_family(ctx, name, N):
    rng = check_rng(ctx, name, 0)
    frame = ctx.frame
    m = frame.dim if frame.kind == "bgraph" else frame.rank
    base = SimplexMap.random(1, m, 3, rng, 0.3)
    if frame.kind == "bgraph":
        base = base.linear(np.eye(m), ctx.base_point)
    dirs = [SimplexMap.random(1, m, 2, rng, 1.0) for _ in range(4)]
    theta = rng.normal(size=4) * 0.1
    return PathFamily(frame, base, dirs, N, f0=ctx.base_point), theta


@register("pullback_closed", 1e-5)
def pullback_closed(ctx, N):
    """d(F_1^* omega^H_1) on a four-parameter family of A-paths."""
    fam, theta = _path_family(ctx, "pullback_closed", N)
    return pullback_closedness(fam, theta, ctx.transgression_twist), {}


@register("pullback_closed_mod_deltaH", 1e-5)
def pullback_closed_mod_deltaH(ctx, N):
    """d(F_1^* omega^H_1) - F_1^*(delta H) on a four-parameter family of A-paths."""
    fam, theta = _path_family(ctx, "pullback_closed_mod_deltaH", N)
    return pullback_closedness(fam, theta, ctx.transgression_twist, subtract_delta_H=True), {}


@register("apath_residual", 1e-2, expected_order=2.0)
def apath_residual_check(ctx, N):
    """Distance of (dx/dt, xi) from the frame along an A-path of the family."""
    fam, theta = _path_family(ctx, "apath_residual", N)
    return apath_residual(fam.apath(theta)), {}


@register("lagrangian_unit", 1e-6, ladder=True)
def lagrangian_unit(ctx, N):
    """Isotropy residual and coisotropy defect of T L_D at the unit over the base point."""
    rep = lagrangian_at_unit(ctx.frame, ctx.base_point, N, seed=int(check_rng(ctx, "lagrangian_unit", N).integers(2**31)))
    details = rep.as_dict()
    expect = ctx.options.get("lagrangian_expect", "lagrangian")
    details["expect"] = expect
    details["inconclusive"] = rep.status != "ok"
    if expect == "lagrangian":
        details["pass"] = rep.isotropy_residual < ctx.tolerance("lagrangian_unit") and \
            rep.coisotropy_defect < ctx.options.get("coisotropy_tol", 1e-4)
        return max(rep.isotropy_residual, rep.coisotropy_defect), details
    details["pass"] = rep.isotropy_residual < ctx.tolerance("lagrangian_unit") and \
        rep.coisotropy_defect > ctx.options.get("control_defect_min", 1e-2)
    return rep.isotropy_residual, details


@register("lagrangian_general", 1e-6)
def lagrangian_general(ctx, N):
    """The same test at a non-unit point of L_D for a graph-of-B frame (straight base map)."""
    s = lattice_points(N)
    n = ctx.dim
    A = np.eye(n, 2) * 0.5
    f = ctx.base_point + np.einsum("ia,...a->...i", A, s)
    T = build_morphism_bgraph(ctx.frame, f)
    rep = lagrangian_general_bgraph(ctx.frame, T, seed=int(check_rng(ctx, "lagrangian_general", N).integers(2**31)))
    details = rep.as_dict()
    details["inconclusive"] = rep.status != "ok"
    # grid-scale probes are where the lattice model loses exact isotropy; smooth ones converge
    rng = check_rng(ctx, "lagrangian_general", 0)
    maps = [SimplexMap.random(2, n, 3, rng, 1.0) for _ in range(12)]
    details["smooth_probe_isotropy"] = smooth_probe_isotropy(T, maps)
    details["pass"] = rep.isotropy_residual < ctx.tolerance("lagrangian_general") and \
        rep.coisotropy_defect < ctx.options.get("coisotropy_tol", 1e-4)
    return max(rep.isotropy_residual, rep.coisotropy_defect), details


def list_checks():
    return sorted(REGISTRY)


__all__ = ["REGISTRY", "Check", "list_checks", "register"]

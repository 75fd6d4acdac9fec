"""Dirac structures presented by global frames of generalized sections."""

from __future__ import annotations

import numpy as np

from .courant import GeneralizedSection, TwistClass, bracket
from .fields import DimensionError, SmoothField
from .geometry import exterior_derivative, interior_product

INVOLUTIVE_TOL = 1e-7
ISOTROPIC_TOL = 1e-9


class FrameError(ValueError):
    """A frame failed one of its defining checks."""


def _sample_points(dim, samples, seed, box=1.0):
    rng = np.random.default_rng(seed)
    return rng.uniform(-box, box, size=(samples, dim))


class DiracFrame:
    """Sections Theta_a = q^i_a d_i + p_ia dx^i spanning an isotropic subbundle.

    ``kind`` is a free-form tag (``"bgraph"``, ``"pigraph"``, ``"constant"``)
    that downstream constructors use to pick an exact morphism family.
    """

    def __init__(self, sections, twist=None, *, kind="generic", data=None,
                 strict=True, maximal=True, samples=24, seed=7):
        sections = list(sections)
        if not sections:
            raise FrameError("a frame needs at least one section")
        dim = sections[0].dim
        if any(s.dim != dim for s in sections):
            raise DimensionError("frame sections live on different charts")
        if maximal and len(sections) != dim:
            raise FrameError(f"a maximal frame on R^{dim} needs {dim} sections, got {len(sections)}")
        self.sections = sections
        self._brackets = {}
        self.dim = dim
        self.rank = len(sections)
        self.twist = twist if twist is not None else TwistClass.zero(dim)
        if self.twist.dim != dim:
            raise DimensionError("twist lives on a different chart")
        self.kind = kind
        self.data = data or {}
        self.maximal = maximal
        pts = _sample_points(dim, samples, seed)
        self.check_points = pts
        if np.min(self.singular_values(pts)) < 1e-10:
            raise FrameError("frame sections are linearly dependent at a sample point")
        iso = isotropy_residual(self, pts)
        if iso > ISOTROPIC_TOL:
            raise FrameError(f"frame is not isotropic (residual {iso:.3e})")
        self.involutivity = involutivity_residual(self, pts)
        if strict and self.involutivity > INVOLUTIVE_TOL:
            raise FrameError(f"frame is not involutive (off-span residual {self.involutivity:.3e})")

    # coefficient matrices --------------------------------------------------

    def q(self, x):
        """q^i_a at ``x`` with shape (..., n, r)."""
        return np.stack([s.X(x) for s in self.sections], axis=-1)

    def p(self, x):
        """p_ia at ``x`` with shape (..., n, r)."""
        return np.stack([s.xi(x) for s in self.sections], axis=-1)

    def dq(self, x):
        """d_k q^i_a with shape (..., n_i, r, n_k)."""
        return np.stack([s.X.jacobian(x) for s in self.sections], axis=-2)

    def dp(self, x):
        """d_k p_ia with shape (..., n_i, r, n_k)."""
        return np.stack([s.xi.jacobian(x) for s in self.sections], axis=-2)

    def matrix(self, x):
        """The stacked 2n x r matrix [q; p]."""
        return np.concatenate([self.q(x), self.p(x)], axis=-2)

    def singular_values(self, x):
        return np.linalg.svd(self.matrix(np.atleast_2d(x)), compute_uv=False)

    def bracket(self, a, b):
        key = (a, b)
        if key not in self._brackets:
            self._brackets[key] = bracket(self.sections[a], self.sections[b], self.twist)
        return self._brackets[key]

    def structure_functions_batch(self, x):
        """C[..., a, b, c] and the off-span residual at a batch of points."""
        x = np.asarray(x, dtype=float)
        M = self.matrix(x)
        Minv = np.linalg.pinv(M)
        r = self.rank
        C = np.zeros(x.shape[:-1] + (r, r, r))
        resid = np.zeros(x.shape[:-1])
        for a in range(r):
            for b in range(a + 1, r):
                rhs = self.bracket(a, b)(x)
                coef = np.einsum("...ci,...i->...c", Minv, rhs)
                C[..., a, b, :] = coef
                C[..., b, a, :] = -coef
                off = np.einsum("...ic,...c->...i", M, coef) - rhs
                resid = np.maximum(resid, np.linalg.norm(off, axis=-1))
        return C, resid

    def __repr__(self):
        return f"DiracFrame({self.kind}, R^{self.dim}, rank {self.rank})"


def _unit(dim, i):
    return SmoothField.constant("vector", dim, np.eye(dim)[i])


def graph_of_two_form(B: SmoothField, tw: TwistClass | None = None, *, strict=True) -> DiracFrame:
    """Frame Theta_a = d_a + B_ia dx^i of the graph of B.

    Involutive for the twist H exactly when dB = H; the constructor refuses
    other inputs unless ``strict`` is off.
    """
    if B.kind != "two-form":
        raise ValueError(f"expected a two-form, got {B.kind}")
    n = B.dim
    tw = tw if tw is not None else TwistClass.zero(n)
    pts = _sample_points(n, 16, 11)
    defect = float(np.max(np.abs(exterior_derivative(B)(pts) - tw.H(pts))))
    if strict and defect > INVOLUTIVE_TOL:
        raise FrameError(f"graph of B is not involutive: |dB - H| = {defect:.3e}")
    # B_ia dx^i = -(i_{d_a} B)
    sections = [GeneralizedSection(_unit(n, a), -interior_product(_unit(n, a), B)) for a in range(n)]
    return DiracFrame(sections, tw, kind="bgraph", data={"B": B}, strict=strict)


def graph_of_bivector(pi: SmoothField, *, strict=True) -> DiracFrame:
    """Frame Theta_a = pi^{ai} d_i + dx^a of the graph of a Poisson bivector."""
    if pi.kind != "bivector":
        raise ValueError(f"expected a bivector, got {pi.kind}")
    n = pi.dim
    sections = []
    for a in range(n):
        onehot = SmoothField.constant("one-form", n, np.eye(n)[a])
        X = SmoothField("vector", _contract_bivector(pi, a), check=False)
        sections.append(GeneralizedSection(X, onehot))
    return DiracFrame(sections, TwistClass.zero(n), kind="pigraph", data={"pi": pi}, strict=strict)


def _contract_bivector(pi, a):
    from .fields import Constant, Einsum

    return Einsum("a,ai->i", Constant(pi.dim, np.eye(pi.dim)[a]), pi.node)


def constant_frame(q, p, tw=None, *, maximal=True, strict=True) -> DiracFrame:
    """Frame with constant coefficient matrices q (n x r) and p (n x r)."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.shape != p.shape or q.ndim != 2:
        raise DimensionError("q and p must be n x r matrices of the same shape")
    n, r = q.shape
    sections = [GeneralizedSection.constant(q[:, a], p[:, a]) for a in range(r)]
    return DiracFrame(sections, tw, kind="constant", data={"q": q, "p": p},
                      maximal=maximal, strict=strict)


def isotropy_residual(frame: DiracFrame, points) -> float:
    """max |<Theta_a, Theta_b>| over the points and all pairs."""
    x = np.atleast_2d(points)
    q, p = frame.q(x), frame.p(x)
    g = np.einsum("...ia,...ib->...ab", q, p)
    return float(np.max(np.abs(g + np.swapaxes(g, -1, -2))))


def structure_functions(frame: DiracFrame, x):
    """Least-squares C^c_ab(x) with [Theta_a, Theta_b] = C^c_ab Theta_c.

    Returns ``(C, residual)`` where ``C[a, b, c]`` is antisymmetric in (a, b)
    and ``residual`` is the largest off-span remainder.
    """
    x = np.asarray(x, dtype=float).reshape(1, frame.dim)
    M = frame.matrix(x)[0]
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] < 1e-10 * max(1.0, s[0]):
        raise FrameError("frame is rank deficient at the requested point")
    r = frame.rank
    C = np.zeros((r, r, r))
    residual = 0.0
    for a in range(r):
        for b in range(a + 1, r):
            rhs = frame.bracket(a, b)(x)[0]
            coef, *_ = np.linalg.lstsq(M, rhs, rcond=None)
            C[a, b] = coef
            C[b, a] = -coef
            residual = max(residual, float(np.linalg.norm(M @ coef - rhs)))
    return C, residual


def involutivity_residual(frame: DiracFrame, points) -> float:
    return max(structure_functions(frame, x)[1] for x in np.atleast_2d(points))


def coordinate_identity_residual(frame: DiracFrame, x) -> float:
    """Check C^c_ab p_ic against the coordinate form of the bracket relation.

    The covector part of [Theta_a, Theta_b]_H in coordinates reads
    q^j_a d_j p_ib - q^j_b d_j p_ia + p_jb d_i q^j_a + q^j_b d_i p_ja
    + H_kli q^k_a q^l_b, and it has to equal C^c_ab p_ic.
    """
    C, _ = structure_functions(frame, x)
    x = np.asarray(x, dtype=float).reshape(1, frame.dim)
    q, p = frame.q(x)[0], frame.p(x)[0]
    dq, dp = frame.dq(x)[0], frame.dp(x)[0]
    H = frame.twist.H(x)[0]
    lhs = np.einsum("abc,ic->abi", C, p)
    rhs = (np.einsum("ja,ibj->abi", q, dp) - np.einsum("jb,iaj->abi", q, dp)
           + np.einsum("jb,jai->abi", p, dq) + np.einsum("jb,jai->abi", q, dp)
           + np.einsum("kli,ka,lb->abi", H, q, q))
    return float(np.max(np.abs(lhs - rhs)))

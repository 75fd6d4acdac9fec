"""The standard (optionally H-twisted) Courant algebroid TM + T*M on a chart."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import DimensionError, SmoothField
from .geometry import (
    exterior_derivative,
    interior_product,
    lie_bracket,
    lie_derivative_form,
)

CLOSED_TOL = 1e-9


@dataclass(frozen=True)
class GeneralizedSection:
    """A section X + xi of TM + T*M."""

    X: SmoothField
    xi: SmoothField

    def __post_init__(self):
        if self.X.kind != "vector" or self.xi.kind != "one-form":
            raise ValueError("a generalized section is a (vector field, 1-form) pair")
        if self.X.dim != self.xi.dim:
            raise DimensionError("vector and covector parts live on different charts")

    @property
    def dim(self):
        return self.X.dim

    @classmethod
    def zero(cls, dim):
        return cls(SmoothField.zero("vector", dim), SmoothField.zero("one-form", dim))

    @classmethod
    def constant(cls, X, xi):
        X = np.asarray(X, dtype=float)
        return cls(SmoothField.constant("vector", len(X), X),
                   SmoothField.constant("one-form", len(X), xi))

    def __call__(self, x):
        """Stacked components (X^1..X^n, xi_1..xi_n) at the points ``x``."""
        return np.concatenate([self.X(x), self.xi(x)], axis=-1)

    def __add__(self, other):
        return GeneralizedSection(self.X + other.X, self.xi + other.xi)

    def __sub__(self, other):
        return GeneralizedSection(self.X - other.X, self.xi - other.xi)

    def __mul__(self, c):
        return GeneralizedSection(self.X * c, self.xi * c)

    __rmul__ = __mul__


class TwistClass:
    """A 3-form H twisting the bracket; ``closed`` records whether dH vanished on samples."""

    def __init__(self, H: SmoothField | None, dim: int | None = None, *, samples=16, seed=0, tol=CLOSED_TOL):
        if H is None:
            if dim is None:
                raise ValueError("need a dimension for the zero twist")
            H = SmoothField.zero("three-form", dim)
        if H.kind != "three-form":
            raise ValueError(f"twist must be a three-form, got {H.kind}")
        self.H = H
        self.dim = H.dim
        self.is_zero = H.node.__class__.__name__ == "Zero"
        if self.dim < 4 and not self.is_zero:
            self.dH_norm = 0.0
        elif self.is_zero:
            self.dH_norm = 0.0
        else:
            rng = np.random.default_rng(seed)
            pts = rng.uniform(-1.0, 1.0, size=(samples, self.dim))
            self.dH_norm = float(np.max(np.abs(exterior_derivative(H)(pts))))
        self.closed = self.dH_norm < tol

    @classmethod
    def zero(cls, dim):
        return cls(None, dim)

    def scaled(self, c):
        return TwistClass(self.H * c)

    def __repr__(self):
        return f"TwistClass(R^{self.dim}, closed={self.closed})"


def _check(a, b):
    if a.dim != b.dim:
        raise DimensionError(f"sections on R^{a.dim} and R^{b.dim}")


def pairing(a: GeneralizedSection, b: GeneralizedSection, x) -> np.ndarray:
    """<a, b> = xi_b(X_a) + xi_a(X_b)."""
    _check(a, b)
    return np.einsum("...i,...i->...", b.xi(x), a.X(x)) + np.einsum("...i,...i->...", a.xi(x), b.X(x))


def pairing_field(a: GeneralizedSection, b: GeneralizedSection) -> SmoothField:
    """<a, b> as a scalar field."""
    _check(a, b)
    from .fields import Einsum, Sum

    node = Sum([Einsum("i,i->", b.xi.node, a.X.node), Einsum("i,i->", a.xi.node, b.X.node)])
    return SmoothField("scalar", node, check=False)


def courant_bracket(a: GeneralizedSection, b: GeneralizedSection) -> GeneralizedSection:
    """[X1 + xi1, X2 + xi2] = [X1, X2] + L_{X1} xi2 - i_{X2} d xi1."""
    _check(a, b)
    X = lie_bracket(a.X, b.X)
    xi = lie_derivative_form(a.X, b.xi) - interior_product(b.X, exterior_derivative(a.xi))
    return GeneralizedSection(X, xi)


def twist_term(X1: SmoothField, X2: SmoothField, H: SmoothField) -> SmoothField:
    """The 1-form Z -> H(X1, X2, Z) added by the twist."""
    return interior_product(X2, interior_product(X1, H))


def twisted_bracket(a: GeneralizedSection, b: GeneralizedSection, tw: TwistClass) -> GeneralizedSection:
    """Courant bracket plus the twist 1-form Z -> H(X1, X2, Z).

    With this binding the graph of a 2-form B, spanned by d_j + B_ij dx^i,
    is involutive exactly when H = dB; it is also the binding under which
    graphs integrate to isotropic pieces of the twisted 2-groupoid form.
    """
    _check(a, b)
    base = courant_bracket(a, b)
    if tw is None or tw.is_zero:
        return base
    if tw.dim != a.dim:
        raise DimensionError("twist lives on a different chart")
    return GeneralizedSection(base.X, base.xi + twist_term(a.X, b.X, tw.H))


def bracket(a, b, tw=None):
    return courant_bracket(a, b) if tw is None else twisted_bracket(a, b, tw)


def jacobi_residual(a, b, c, tw, x) -> float:
    """Norm at x of the Leibniz defect [a,[b,c]] - [[a,b],c] - [b,[a,c]]."""
    lhs = bracket(a, bracket(b, c, tw), tw)
    r1 = bracket(bracket(a, b, tw), c, tw)
    r2 = bracket(b, bracket(a, c, tw), tw)
    defect = lhs - r1 - r2
    return float(np.max(np.linalg.norm(np.atleast_2d(defect(x)), axis=-1)))


def skew_anomaly_residual(a, x, tw=None) -> float:
    """Distance of [a, a] from (0, 1/2 d<a, a>) at x."""
    aa = bracket(a, a, tw)
    half_d = exterior_derivative(pairing_field(a, a)) * 0.5
    vec = np.atleast_2d(aa.X(x))
    form = np.atleast_2d(aa.xi(x) - half_d(x))
    return float(max(np.max(np.abs(vec)), np.max(np.abs(form))))

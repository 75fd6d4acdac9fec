"""Chart-level tensor fields on R^n.

A field is a tree of nodes. Leaves are polynomials (exact derivatives of every
order), constants, or plain callables (derivatives by central differences).
Interior nodes are sums and einsum products; their derivatives are assembled
from the children's derivatives by the product rule, so nothing is ever
simplified symbolically.

Every node evaluates on a batch of points ``x`` of shape ``(..., n)`` and
returns an array of shape ``(..., *shape)`` where each component axis has
length ``n``.
"""

from __future__ import annotations

import itertools
import string
from functools import cached_property

import numpy as np

FD_STEP = 1e-5

KIND_DEGREE = {
    "scalar": 0,
    "vector": 1,
    "one-form": 1,
    "two-form": 2,
    "three-form": 3,
    "four-form": 4,
    "bivector": 2,
}
FORM_KINDS = {0: "scalar", 1: "one-form", 2: "two-form", 3: "three-form", 4: "four-form"}


class DegreeError(ValueError):
    pass


class DimensionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# nodes


class Node:
    dim: int
    shape: tuple

    def __call__(self, x):
        raise NotImplementedError

    def _grad(self) -> "Node":
        raise NotImplementedError

    @cached_property
    def grad(self) -> "Node":
        return self._grad()


class Zero(Node):
    def __init__(self, dim, shape):
        self.dim, self.shape = dim, tuple(shape)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape[:-1] + self.shape)

    def _grad(self):
        return Zero(self.dim, self.shape + (self.dim,))


class Constant(Node):
    def __init__(self, dim, value):
        self.dim = dim
        self.value = np.array(value, dtype=float)
        self.shape = self.value.shape

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self.value, x.shape[:-1] + self.shape).copy()

    def _grad(self):
        return Zero(self.dim, self.shape + (self.dim,))


class Polynomial(Node):
    """Tensor-valued polynomial: ``coeffs[..., t] * prod(x ** powers[t])``."""

    def __init__(self, dim, coeffs, powers):
        self.dim = dim
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.powers = np.asarray(powers, dtype=int).reshape(-1, dim)
        self.shape = self.coeffs.shape[:-1]
        if self.coeffs.shape[-1] != len(self.powers):
            raise ValueError("coefficient/power term counts differ")

    @classmethod
    def from_terms(cls, dim, shape, terms):
        """Build from ``(coeff, powers, index)`` triples, merging equal monomials."""
        table = {}
        for coeff, powers, index in terms:
            key = tuple(int(p) for p in powers)
            if len(key) != dim:
                raise DimensionError(f"monomial {key} does not have {dim} exponents")
            if key not in table:
                table[key] = np.zeros(shape)
            table[key][tuple(index)] += coeff
        keys = sorted(table)
        if not keys:
            return cls(dim, np.zeros(tuple(shape) + (0,)), np.zeros((0, dim), dtype=int))
        coeffs = np.stack([table[k] for k in keys], axis=-1)
        return cls(dim, coeffs, np.array(keys, dtype=int))

    @property
    def degree(self):
        return int(self.powers.sum(axis=1).max()) if len(self.powers) else 0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionError(f"point has {x.shape[-1]} coordinates, field lives in R^{self.dim}")
        if len(self.powers) == 0:
            return np.zeros(x.shape[:-1] + self.shape)
        mono = np.prod(x[..., None, :] ** self.powers, axis=-1)
        return np.einsum("...t,t->..." if not self.shape else "...t,{}t->...{}".format(
            _letters(len(self.shape)), _letters(len(self.shape))), mono, self.coeffs)

    def _grad(self):
        n = self.dim
        table = {}
        for t, pw in enumerate(self.powers):
            for j in range(n):
                if pw[j] == 0:
                    continue
                new = pw.copy()
                new[j] -= 1
                key = tuple(new)
                if key not in table:
                    table[key] = np.zeros(self.shape + (n,))
                table[key][..., j] += pw[j] * self.coeffs[..., t]
        keys = sorted(table)
        if not keys:
            return Zero(n, self.shape + (n,))
        coeffs = np.stack([table[k] for k in keys], axis=-1)
        return Polynomial(n, coeffs, np.array(keys, dtype=int))


class Function(Node):
    """Callable leaf; ``derivative`` (if given) is another node for its gradient."""

    def __init__(self, dim, shape, fn, derivative=None, step=FD_STEP):
        self.dim, self.shape, self.fn = dim, tuple(shape), fn
        self.derivative = derivative
        self.step = step

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.fn(x), dtype=float)
        return np.broadcast_to(out, x.shape[:-1] + self.shape)

    def _grad(self):
        if self.derivative is not None:
            return self.derivative
        return CentralDifference(self, self.step)


class CentralDifference(Node):
    def __init__(self, parent, step):
        self.parent, self.step = parent, step
        self.dim = parent.dim
        self.shape = parent.shape + (parent.dim,)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        h = self.step
        cols = []
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = h
            cols.append((self.parent(x + e) - self.parent(x - e)) / (2 * h))
        return np.stack(cols, axis=-1)

    def _grad(self):
        return CentralDifference(self, self.step)


class Sum(Node):
    def __init__(self, terms, weights=None):
        self.terms = list(terms)
        self.weights = [1.0] * len(self.terms) if weights is None else list(weights)
        self.dim = self.terms[0].dim
        self.shape = self.terms[0].shape
        for t in self.terms:
            if t.shape != self.shape or t.dim != self.dim:
                raise DimensionError("summands have different shapes")

    def __call__(self, x):
        out = 0.0
        for w, t in zip(self.weights, self.terms):
            if isinstance(t, Zero):
                continue
            out = out + w * t(x)
        if np.isscalar(out):
            x = np.asarray(x, dtype=float)
            return np.zeros(x.shape[:-1] + self.shape)
        return out

    def _grad(self):
        return Sum([t.grad for t in self.terms], self.weights)


class Einsum(Node):
    """Product of nodes contracted by an einsum subscript string (no batch axes)."""

    def __init__(self, subscripts, *operands):
        ins, out = subscripts.split("->")
        self.ins = ins.split(",")
        self.out = out
        self.operands = operands
        self.dim = operands[0].dim
        sizes = {}
        for sub, op in zip(self.ins, operands):
            if len(sub) != len(op.shape):
                raise DimensionError(f"subscript {sub!r} does not match shape {op.shape}")
            for c, m in zip(sub, op.shape):
                if sizes.setdefault(c, m) != m:
                    raise DimensionError(f"index {c!r} has inconsistent lengths")
        self.shape = tuple(sizes[c] for c in out)
        self._spec = ",".join("..." + s for s in self.ins) + "->..." + out

    def __call__(self, x):
        if any(isinstance(op, Zero) for op in self.operands):
            x = np.asarray(x, dtype=float)
            return np.zeros(x.shape[:-1] + self.shape)
        vals = [op(x) for op in self.operands]
        return np.einsum(self._spec, *vals)

    def _grad(self):
        used = set("".join(self.ins) + self.out)
        d = next(c for c in string.ascii_letters if c not in used)
        terms = []
        for k, op in enumerate(self.operands):
            if isinstance(op, (Zero, Constant)):
                continue
            ins = list(self.ins)
            ins[k] = ins[k] + d
            ops = list(self.operands)
            ops[k] = op.grad
            terms.append(Einsum(",".join(ins) + "->" + self.out + d, *ops))
        if not terms:
            return Zero(self.dim, self.shape + (self.dim,))
        return Sum(terms)


def _letters(k, start=0):
    return string.ascii_lowercase[start:start + k]


# ---------------------------------------------------------------------------
# antisymmetrization helpers


def _perm_sign(perm):
    sign, seen = 1, list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def alternator(dim, k):
    """Constant tensor A with A[i..., j...] = sign when (j...) is a permutation of (i...).

    Contracting a rank-k array against it gives ``sum_perm sign * T[perm]``.
    """
    A = np.zeros((dim,) * (2 * k))
    for idx in itertools.product(range(dim), repeat=k):
        if len(set(idx)) < k:
            continue
        for perm in itertools.permutations(range(k)):
            src = tuple(idx[p] for p in perm)
            A[idx + src] += _perm_sign(perm)
    return A


def levi_civita(dim=3):
    eps = np.zeros((dim,) * dim)
    for perm in itertools.permutations(range(dim)):
        eps[perm] = _perm_sign(perm)
    return eps


# ---------------------------------------------------------------------------
# public field type


class SmoothField:
    """A scalar, vector, k-form or bivector field on a single chart of R^n.

    Forms and bivectors carry fully antisymmetric component arrays, so that a
    two-form ``B = 1/2 B_ij dx^i ^ dx^j`` evaluates to the matrix ``B_ij``.
    """

    def __init__(self, kind, node, *, check=True):
        if kind not in KIND_DEGREE:
            raise ValueError(f"unknown field kind {kind!r}")
        self.kind = kind
        self.node = node
        self.dim = node.dim
        if len(node.shape) != KIND_DEGREE[kind]:
            raise DegreeError(f"{kind} needs {KIND_DEGREE[kind]} component axes, got {node.shape}")
        if check and KIND_DEGREE[kind] >= 2:
            self._check_antisymmetric()

    # construction ---------------------------------------------------------

    @classmethod
    def polynomial(cls, kind, dim, terms):
        """Sparse polynomial field from ``(coeff, powers, slots)`` terms.

        ``slots`` are 0-based component indices; for forms and bivectors each
        term stands for ``coeff * x**powers * dx^{s1} ^ dx^{s2} ^ ...`` and is
        antisymmetrized.
        """
        k = KIND_DEGREE[kind]
        shape = (dim,) * k
        expanded = []
        for coeff, powers, slots in terms:
            slots = tuple(slots)
            if len(slots) != k:
                raise DegreeError(f"{kind} term needs {k} slot indices, got {slots}")
            if any(s < 0 or s >= dim for s in slots):
                raise DimensionError(f"slot index out of range in {slots}")
            if k >= 2:
                if len(set(slots)) < k:
                    continue
                for perm in itertools.permutations(range(k)):
                    expanded.append((coeff * _perm_sign(perm), powers, tuple(slots[p] for p in perm)))
            else:
                expanded.append((coeff, powers, slots))
        return cls(kind, Polynomial.from_terms(dim, shape, expanded))

    @classmethod
    def constant(cls, kind, dim, value):
        value = np.asarray(value, dtype=float)
        return cls(kind, Constant(dim, value))

    @classmethod
    def zero(cls, kind, dim):
        return cls(kind, Zero(dim, (dim,) * KIND_DEGREE[kind]), check=False)

    @classmethod
    def from_function(cls, kind, dim, fn, derivative=None, step=FD_STEP):
        """Wrap a vectorized callable ``fn(x[..., n]) -> components``.

        Without ``derivative`` all partial derivatives come from central
        differences of step ``step``.
        """
        shape = (dim,) * KIND_DEGREE[kind]
        deriv_node = None
        if derivative is not None:
            deriv_node = Function(dim, shape + (dim,), derivative, step=step)
        return cls(kind, Function(dim, shape, fn, deriv_node, step))

    # evaluation -----------------------------------------------------------

    @property
    def degree(self):
        return KIND_DEGREE[self.kind]

    @property
    def is_form(self):
        return self.kind in FORM_KINDS.values()

    def __call__(self, x):
        return self.node(x)

    def jacobian(self, x):
        """Components with a trailing partial-derivative axis."""
        return self.node.grad(x)

    def hessian(self, x):
        return self.node.grad.grad(x)

    # arithmetic -----------------------------------------------------------

    def _same(self, other):
        if not isinstance(other, SmoothField) or other.kind != self.kind or other.dim != self.dim:
            raise DimensionError(f"cannot combine {self.kind}/R^{self.dim} with {other!r}")

    def __add__(self, other):
        self._same(other)
        return SmoothField(self.kind, Sum([self.node, other.node]), check=False)

    def __sub__(self, other):
        self._same(other)
        return SmoothField(self.kind, Sum([self.node, other.node], [1.0, -1.0]), check=False)

    def __neg__(self):
        return SmoothField(self.kind, Sum([self.node], [-1.0]), check=False)

    def __mul__(self, c):
        if isinstance(c, SmoothField):
            return NotImplemented
        return SmoothField(self.kind, Sum([self.node], [float(c)]), check=False)

    __rmul__ = __mul__

    def __repr__(self):
        return f"SmoothField({self.kind}, R^{self.dim})"

    def _check_antisymmetric(self, samples=4, tol=1e-9):
        rng = np.random.default_rng(12345)
        x = rng.uniform(-1.0, 1.0, size=(samples, self.dim))
        vals = self.node(x)
        k = self.degree
        scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
        for a in range(k - 1):
            axes = list(range(vals.ndim))
            axes[1 + a], axes[2 + a] = axes[2 + a], axes[1 + a]
            if np.max(np.abs(vals + np.transpose(vals, axes)), initial=0.0) > tol * scale:
                raise ValueError(f"{self.kind} components are not antisymmetric")


def as_points(x, dim):
    """Validate chart coordinates: trailing axis of length ``dim``, all finite."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (dim,):
        raise DimensionError(f"expected points in R^{dim}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("chart point has non-finite coordinates")
    return x

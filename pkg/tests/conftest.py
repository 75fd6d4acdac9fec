import itertools
import sys

import numpy as np
import pytest
import sympy as sp

from lwx.fields import KIND_DEGREE, SmoothField, _perm_sign


def sym_coords(dim):
    return sp.symbols(f"x0:{dim}", real=True)


def sym_components(kind, dim, terms, xs):
    """Dense sympy component array with the same antisymmetrization as SmoothField.polynomial."""
    k = KIND_DEGREE[kind]
    comp = sp.MutableDenseNDimArray.zeros(*((dim,) * k)) if k else sp.Integer(0)
    for coeff, powers, slots in terms:
        mono = sp.Rational(coeff).limit_denominator(10**9) * sp.prod([x**p for x, p in zip(xs, powers)])
        if k == 0:
            comp += mono
            continue
        perms = itertools.permutations(range(k)) if k >= 2 else [(0,)]
        for perm in perms:
            idx = tuple(slots[p] for p in perm)
            comp[idx] += (_perm_sign(perm) if k >= 2 else 1) * mono
    return comp


def sym_exterior_derivative(comp, dim, k, xs):
    """(d a)_{i0..ik} = sum_a (-1)^a d_{i_a} a_{i0..^i_a..ik}."""
    out = sp.MutableDenseNDimArray.zeros(*((dim,) * (k + 1)))
    for idx in itertools.product(range(dim), repeat=k + 1):
        total = 0
        for a in range(k + 1):
            rest = idx[:a] + idx[a + 1:]
            total += (-1) ** a * sp.diff(comp[rest] if k else comp, xs[idx[a]])
        out[idx] = total
    return out


def sym_eval(comp, xs, point):
    subs = dict(zip(xs, point))
    if isinstance(comp, sp.NDimArray):
        return np.array(comp.applyfunc(lambda e: e.subs(subs)).tolist(), dtype=float)
    return float(comp.subs(subs))


def random_terms(rng, kind, dim, count=4, degree=3):
    k = KIND_DEGREE[kind]
    terms = []
    for _ in range(count):
        deg = int(rng.integers(0, degree + 1))
        powers = tuple(int(p) for p in rng.multinomial(deg, np.ones(dim) / dim))
        slots = tuple(int(s) for s in rng.choice(dim, size=k, replace=False)) if k else ()
        coeff = float(np.round(rng.normal(), 3))
        terms.append((coeff, powers, slots))
    return terms


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def poly(kind, dim, terms):
    return SmoothField.polynomial(kind, dim, terms)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])

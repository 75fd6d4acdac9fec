"""delta(omega_1) against the interior integral of omega_2 on a random triangle.

The coboundary is a sum of path integrals over the three faces; the interior
integral is an independent Stokes route. Their gap shrinks at order two.
"""

import numpy as np

from lwx import forms as F
from lwx.morphisms import SimplexMap
from lwx.simplex import DiscreteTriangle, TangentTriangle

rng = np.random.default_rng(1)
maps = [SimplexMap.random(2, 3, 3, rng, 0.4) for _ in range(9)]
delta = F.simplicial_coboundary(F.OMEGA1)

prev = None
for N in (8, 16, 32, 64, 128):
    v = [m.values(N) for m in maps]
    T = DiscreteTriangle(v[0], np.stack(v[1:3], axis=2))
    X = TangentTriangle(v[3], np.stack(v[4:6], axis=2))
    Y = TangentTriangle(v[6], np.stack(v[7:9], axis=2))
    gap = abs(delta(T, X, Y) - F.omega2_interior(T, X, Y))
    order = "" if prev is None else f"  order {np.log2(prev / gap):.2f}"
    print(f"N={N:4d}  gap {gap:.3e}{order}")
    prev = gap

"""Isotropy of morphism tangents under the correct and the flipped twist sign.

With H = dB the pushed tangents of a B-graph morphism are isotropic for the
twisted 2-form up to quadrature error, which halves twice per refinement. With
the sign of the twist flipped the residual stalls at O(1).
"""

import numpy as np

from lwx import SimplexMap, TwistClass, build_morphism_bgraph, thm41_check
from lwx.dirac import graph_of_two_form
from lwx.fields import SmoothField
from lwx.geometry import exterior_derivative
from lwx.morphisms import tangent_bgraph

B = SmoothField.polynomial("two-form", 3, [(1.0, (0, 0, 1), (0, 1)), (1.0, (1, 0, 0), (1, 2))])
frame = graph_of_two_form(B, TwistClass(exterior_derivative(B)))
rng = np.random.default_rng(0)
f = SimplexMap.random(2, 3, 3, rng, 0.4).linear(np.eye(3), np.array([0.1, -0.2, 0.3]))
maps = [SimplexMap.random(2, 3, 3, rng) for _ in range(8)]

print(f"{'N':>4} {'H = dB':>12} {'H = -dB':>12}")
for N in (8, 16, 32, 64):
    T = build_morphism_bgraph(frame, f, N)
    ts = [tangent_bgraph(T, m) for m in maps]
    pairs = list(zip(ts[::2], ts[1::2]))
    good = thm41_check(T, pairs)
    bad = thm41_check(T, pairs, frame.twist.scaled(-1.0))
    print(f"{N:4d} {good:12.3e} {bad:12.3e}")

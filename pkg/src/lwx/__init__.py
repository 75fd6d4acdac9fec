"""Discrete Courant algebra, Dirac structures and the mapping-space 2-forms
on lattice models of paths and triangles in T*M."""

from .courant import (
    GeneralizedSection,
    TwistClass,
    bracket,
    courant_bracket,
    jacobi_residual,
    pairing,
    skew_anomaly_residual,
    twisted_bracket,
)
from .dirac import (
    DiracFrame,
    FrameError,
    constant_frame,
    coordinate_identity_residual,
    graph_of_bivector,
    graph_of_two_form,
    involutivity_residual,
    isotropy_residual,
    structure_functions,
)
from .fields import DegreeError, DimensionError, SmoothField
from .forms import (
    MappingSpaceForm,
    exterior_derivative_mapping,
    lambda1,
    lambda2,
    omega1,
    omega1_H,
    omega2,
    omega2_H,
    omega_H,
    phi_H_1,
    phi_H_2,
    simplicial_coboundary,
)
from .geometry import exterior_derivative, interior_product, lie_bracket, lie_derivative
from .morphisms import (
    AlgebroidTangent,
    AlgebroidTriangle,
    F_map,
    F_tangent,
    SimplexMap,
    build_morphism_bgraph,
    build_morphism_constpi,
    lagrangian_at_unit,
    lagrangian_general_bgraph,
    thm41_check,
)
from .simplex import (
    DiscretePath,
    DiscreteTriangle,
    LatticeError,
    TangentPath,
    TangentTriangle,
    degeneracy,
    face,
    horn_fill,
)

__version__ = "0.1.0"

"""Wodzicki-Chern-Simons densities on circle bundles over symplectic manifolds.

The package computes the curvature of the circle bundle ``M_p`` attached
to an integral symplectic form, evaluates the pulled-back WCS density as
a polynomial in the bundle parameter p, and checks it against closed
forms: the flat coefficient table, the Thurston manifold integral and
the Kahler trace-form identity.
"""

from .bundle import (
    BundleCurvature,
    ConnectionPotential,
    FrameError,
    bar_curvature,
    direct_bundle_curvature,
    linear_potential,
    orthonormal_frame,
)
from .geometry import (
    ChartMetric,
    CompatibleTriple,
    CurvatureData,
    DegeneracyError,
    GeometryError,
    christoffel,
    compatible_triple,
    nabla_J,
    riemann,
    sectional_curvature,
)
from .kahler import NotKahlerError, PontryaginForm, pontryagin_form, prop52_check
from .perms import chain_sequences, permutation_sign, permutations_with_parity
from .ppoly import PGradedTensor, PPoly, ppoly_interpolate
from .tensor import DenseTensor, ShapeError, contract, normal_form_J, pfaffian_sum, signed_chain_sum
from .thurston import (
    QuadratureSpec,
    ThurstonConfig,
    nonvanishing_check,
    quartic_roots,
    thurston_base,
    thurston_integral,
    thurston_integrand,
)
from .wcs import (
    WCSDensity,
    cancellation_check,
    dim_4n_plus_2_vanishing,
    random_compatible,
    top_coefficient_closed_form,
    wcs_density,
)

__version__ = "0.1.0"

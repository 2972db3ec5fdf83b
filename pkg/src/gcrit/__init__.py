"""Limits on the critical coupling of attractive radial potentials.

For ``V(r) = -g v(r)`` with ``v >= 0`` the package computes converging upper
and lower limits on the smallest ``g`` that binds an ``l``-wave state, the
classic closed-form limits, and a reference value by zero-energy shooting.
"""
from .classic_bounds import (OptimizerConfig, TrialFunctionSpec, calogero_upper_linear,
                             calogero_upper_nonlinear, chadan_upper, glaser_lower,
                             rayleigh_upper, variational_upper_closed)
from .errors import GcritError, InputError, NumericError
from .jost import (JostSeries, dalembert_estimate, jost_coefficients, jost_series,
                   reciprocal_coefficients, verify_convolution)
from .kernel import Operator, apply_operator, green_function, trace_iterated, weighted_inner
from .oracle import (BACKEND, ShootingConfig, critical_g, exponential_closed_form, shoot,
                     square_well_closed_form)
from .potential import (AngularMomentum, PotentialShape, from_table, load_table,
                        make_exponential, make_r_exponential, make_square_well,
                        reduce_to_s_wave, resolve_potential)
from .quadrature import DEFAULT_SCHEME, QuadratureScheme, RadialGrid, build_grid, integrate
from .sequences import (Bracket, BoundSequence, alpha_omega, best_bracket, first_order_bracket,
                        kellogg_sequence, kolomy_sequence, power_sequence)

__version__ = "0.1.0"

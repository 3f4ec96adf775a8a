"""Angular spread measures, packet centres and uncertainty relations for
wavefunctions on the circle and the sphere."""
from .quadrature import (ConvergenceResult, DivergentIntegral, GridSpec, NonIntegrableSample,
                         QuadratureError, Status, integrate_circle, integrate_sphere)
from .states import (CircleState, SphereState, StateError, StateParams, legendre_P,
                     make_azimuthal_eigenstate, make_cs_state, make_delocalized_state,
                     make_f_state, make_reference_states, make_state, make_uniform_state,
                     normalize, rotate)
from .circle import (centroid_measure, circle_measures, kr_measures, make_circle_reference_states,
                     trig_variances, ursin_check)
from .measures import (CenterSearchError, MeasureSet, PacketCenterResult, centered_phi_variance,
                       combined_measures, find_packet_centers, stereo_second_moments,
                       theta_variance, variance_phi_at, windowed_phi_moments)
from .operators import (PHI, THETA, DiffOperator, HermiticityError, expectation, generalized_cov,
                        operator_variance, p_phi, p_theta_n, p_theta_naive, parse_operator,
                        symmetry_defect)
from .uncertainty import (GramReport, best_complementary_study, characteristic_coefficients,
                          check_schrodinger_ur, gram_matrix)
from ._kernels import BACKEND

__version__ = "0.1.0"

"""Numerical toolkit for quasilinear differential inequalities on Carnot groups."""

from .groups import (CarnotGroup, ball_volume_estimate, compose, dilate,
                     frame_vector, inverse, make_euclidean, make_heisenberg)
from .profiles import PhiProfile, best_p, mean_curvature, p_laplacian, wpc_check
from .fields import (CallableField, ConstantField, GridField, MaxField,
                     PastedField, RadialField)
from .calculus import (horizontal_gradient, phi_laplacian_grid,
                       phi_laplacian_radial, sub_laplacian)
from .keller_osserman import (KOReport, NonlinearityTriple, K_inverse, big_F,
                              big_K, ko_test, mean_curvature_family,
                              power_triple)
from .ranges import (ParamSet, RangeVerdict, classify_main, classify_main2,
                     classify_superlevel, compare_literature, eta, h_constant,
                     sigma_star)
from .witnesses import (MarginReport, exponential_witness,
                        ode_nonexistence_probe, power_witness,
                        verify_exponent_counterexample,
                        verify_growth_sharpness, verify_radial_lower_bound)
from .weakform import (BumpTestFunction, WeakFormReport, max_solution_check,
                       paste, paste_verify, weak_residual)

__version__ = "0.1.0"

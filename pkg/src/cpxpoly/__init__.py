"""Complex polytope norms, best approximation and minimal projections in C^n."""

from .algebra import Subspace, is_real_subspace, phase_normalize
from .approx import (AlphaProbeReport, ApproxInstance, BestApproxResult, UniquenessReport,
                     alpha_probe, alpha_probe_points, best_approximation, certify,
                     certify_adjoint, certify_l1, certify_vertex, estimate_alpha_constant,
                     general_2strong_check, smarzewski_constant)
from .convexcore import MinMaxProblem, SumModuliProblem, solve_min_max_affine, solve_min_sum_moduli
from .duality import (find_equalizing_scalar, find_regular_face, non_self_duality_witness)
from .norms import (AdjointNorm, LpNorm, PolytopeNorm, dual_norm_eval, essentialize, l1, linf,
                    make_norm, norm_eval, norming_functional)
from .projections import (CMOperator, ProjectionRep, chalmers_metcalf, hyperplane_proj_norm_linfty,
                          linfty_hyperplane_minimal, minimal_projection_search,
                          onedim_alpha_probe, onedim_projection_norm, operator_norm,
                          proj_alpha_probe, projection_norm, realify_and_certify)

__version__ = "0.1.0"

"""Blind identification of graph filters via lifted convex relaxations."""

from .graph import Graph, read_edge_list, write_edge_list, read_matrix_csv, write_matrix_csv
from .spectral import (ShiftSpectrum, FilterBasis, build_shift, build_filter_basis, gft, igft,
                       apply_filter, simulate_diffusion, frequency_response)
from .lifting import LiftedOperator, RealSplitSystem, build_lifting, real_split, resampled_lifting, operator_norm
from .solvers import (SolverConfig, LiftedSolution, MultiOutputProblem, solve_l1, solve_nuclear_l21,
                      solve_reweighted, solve_multi, solve_noisy, extract_rank_one, baseline_ls, baseline_am,
                      rmse, SUCCESS_RMSE)
from .theory import (CoherenceProfile, RecoveryBound, rho, coherence_profile, theorem1_bound, spark,
                     check_identifiability)

__version__ = "0.1.0"

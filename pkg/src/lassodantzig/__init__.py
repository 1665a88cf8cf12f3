"""Lasso and Dantzig selector estimation with restricted-eigenvalue analysis,
theoretical bound checks and seeded Monte Carlo experiments."""

from .bounds import (BoundCheck, OracleApproximation, best_sparse_approx, c_constants,
                     dantzig_bounds, equivalence_bounds, lasso_bounds, oracle_inequality_rhs,
                     weak_sparsity_check)
from .core import (CoefficientVector, DesignMatrix, GramMatrix, InfeasibleError,
                   InvalidInputError, PenaltyLevel, PivotLimitError, PreconditionError,
                   RegressionInstance, SolverError, cone_membership, empirical_norm,
                   event_probability, gram, linear_instance, losses, penalty_level,
                   select_j01, sparsity_and_support)
from .dantzig import DantzigConfig, DantzigResult, dantzig_feasibility, fit_dantzig
from .harness import (CoverageSummary, ExperimentConfig, TrialRecord, detect_events,
                      emit_report, generate_instance, run_montecarlo, run_trial)
from .lasso import LassoConfig, LassoResult, fit_lasso, lasso_kkt_check, soft_threshold
from .re_analysis import (analyze, certified_kappa, check_assumptions, estimate_kappa,
                          kappa_lower_bounds, kernel_sparsity_check, projector_cone_check,
                          restricted_correlation, restricted_eigenvalues)
from .simplex import simplex_lp

__version__ = "0.1.0"

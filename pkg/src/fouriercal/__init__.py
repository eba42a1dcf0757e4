"""Blind calibration of Fourier sensing: recover a sparse signal together
with unknown perturbations of the measurement frequencies."""

from .altmin import (AltMinConfig, RecoveryResult, alternating_recovery,
                     beta_search_grouped, delta_search_independent,
                     multistart, perturbation_grid)
from .analysis import (CoherenceReport, ExpectationModel, build_G, coherence,
                       expectation_recovery_experiment, expected_gram,
                       mc_expected_gram, mc_mean_forward,
                       verify_coherence_bound)
from .bases import SparsityBasis
from .baselines import BaselineReport, baseline1, baseline2
from .estimators import BasisPursuitRecovery, PerturbedFourierRecovery
from .experiments import (ExperimentSpec, ResultRecord, Tomo2DReport,
                          add_noise, build_instance, cross_validate_lambda,
                          gen_antisymmetric_frequencies, gen_frequencies,
                          gen_sparse_signal, min_frequency_gap, rrmse,
                          run_method, run_sweep, run_tomo2d)
from .linearized import (DegenerateMeasurements, LinearizedSolution, SingularH,
                         forward_linearized, solve_linearized_compressive,
                         solve_linearized_exact)
from .operators import (FourierMatrix, FrequencySet, adjoint, adjoint_2d,
                        build_matrix, build_matrix_2d, centered_indices,
                        derivative_matrix, even_odd_parts, forward,
                        forward_2d, modulation_vector)
from .perturbations import (PerturbationModel, expand, identity_group_model,
                            independent_model, make_radial_spokes)
from .solvers import (SolveReport, SolverConfig, default_lambda, kkt_residual,
                      real_stack, solve_bp, solve_sqlasso)

__version__ = "0.1.0"

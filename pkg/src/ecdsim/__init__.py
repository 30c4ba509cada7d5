"""Energy-regularized qubit-qumode (ECD) circuit simulator and
barren-plateau analysis toolkit.

Subpackages: gaussian-state formalism, exact branch simulation,
truncated Fock backend, closed-form/Monte Carlo correlators,
gradient-variance statistics and bounds, random target generation,
energy-matched training, and a CLI experiment runner.
"""

from .circuits import (BranchState, CircuitParams, EnsembleSpec, branch_phase,
                       branch_sign_vectors, closed_form_weight, cost_branch,
                       overlap, run_circuit, sample_circuit, state_energy)
from .correlators import (CorrelatorEstimate, c1_closed, c2_closed,
                          c2_fock_asymptotic, c2_fock_full, c3_closed_gaussian,
                          hyp2f1_eta, mc_correlator)
from .errors import AccuracyError, CapacityError, ConfigError, NumericalError
from .fock import (DisplacementMatrix, FockVector, cost_fock, default_cutoff,
                   displacement_matrix, overlap_fock, run_circuit_fock)
from .gaussian import (GaussianState, OneModeGaussianParams, fidelity_pure,
                       coherent_fidelity, haar_unitary, one_mode_gaussian,
                       random_distributed_squeezed, tmsv)
from .streams import as_rng, substream
from .targets import (FockExpansion, FockTarget, MultiModeGaussianTarget,
                      OneModeGaussianTarget, ProductTarget, RandomFockTarget,
                      TmsvTarget, auto_expand, coherent_overlap_sq,
                      coherent_target, fock_expand, sample_random_target,
                      target_energy_per_mode, target_mode_count, vacuum_target)
from .training import (TrainConfig, TrainHistory, histories_to_csv,
                       mean_history, train)
from .variance import (BoundsResult, VarianceEstimate, critical_depth,
                       critical_energy, default_k, evaluate_cost,
                       mc_gradient_variance, parameter_shift_gradient,
                       shallow_variance, variance_bounds)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

"""Sampling/distortion tradeoffs for retrieving a remote Gaussian signal from
noisy, nonuniform samples of its corrupted versions."""

from .bounds import (BoundReport, PhiFunctionals, asymptotic_remote_floor, bound_corrupted,
                     bound_remote, closed_form_high_rate_corrupted, phi)
from .errors import (BudgetExceedsGrid, BudgetTooSmall, DegenerateDenominator, InvalidConfig,
                     NumericalFailure, OutOfRangeTime, PreconditionViolated, SamplingError,
                     SearchSpaceTooLarge)
from .estimator import (DistortionReport, distortion, error_cov_corrupted, error_cov_remote,
                        reconstruct)
from .harmonics import (HarmonicSystem, assemble, build_Qi, check_fact_grid, check_fact_uniform,
                        gamma_matrix)
from .model import (ModelConfig, Realization, SamplingPlan, draw_realization, evaluate_signal,
                    validate_config)
from .strategies import (AllocationResult, allocate_high_rate, allocate_low_rate, grid_plan,
                         random_plan, uniform_plan)

__version__ = "0.1.0"

"""Photon-counting phase estimation through a lossy Mach-Zehnder interferometer.

Exact outcome probabilities for Fock and N00N inputs, classical Fisher
information, mutual-information fidelity and Bayesian phase posteriors,
with non-ideal preparation and detection stages.
"""

from .core import PhasePolynomial, TrigSpectrum, abs_square, poly_mul, poly_pow, spectrum_derivative
from .engine import (OutcomeDistribution, PureState, evolve, expand_input_mode, fock_state,
                     mixed_outcome_distribution, noon_state, outcome_distribution, vacuum)
from .interferometer import (LossParameters, ScatteringMatrix, build_lossless_mz_2x2,
                             build_lossy_mz, unitarity_defect)
from .metrics import (ConvergenceError, FisherReport, PhasePrior, UnreachableOutcomeError,
                      fidelity, fidelity_detailed, fisher_information, posterior,
                      small_loss_fidelity_series)
from .pipeline import (DetectionModel, MeasurementModel, PreparationModel, binary_flip_detection,
                       ideal_detection, pipeline_distribution, pipeline_values, full_angle_transfer)

__version__ = "0.1.0"

"""Certify quantum non-Gaussianity of light from two vacuum probabilities.

The state is characterized by its vacuum probability ``p0`` and the vacuum
probability ``q0`` after a lossy channel of transmittance ``T``.  A pair
lying above the best Gaussian value of ``q0`` at the same ``p0`` cannot be
a mixture of Gaussian states.
"""

__version__ = "0.1.0"

from .errors import DomainError, InvalidDistributionError, NonphysicalPairError, NotCertifiableError
from .photon_stats import PhotonNumberDistribution, attenuate, mean_photon, vacuum_after_loss
from .gaussian_boundary import (
    AdvisoryWarning,
    BoundaryPoint,
    GaussianStateParams,
    boundary_point,
    nbar_threshold,
    q0_threshold,
    solve_V_for_p0,
)
from .state_models import MultimodeProductState, NoisySinglePhotonModel, eta_threshold, load_state_spec
from .certification import CertificationResult, VacuumPair, certify, optimal_witness
from .measurement_sim import DetectorConfig, simulate_double, simulate_single
from .planner import PlanResult, required_runs, rds_min

__all__ = [
    "AdvisoryWarning", "BoundaryPoint", "CertificationResult", "DetectorConfig", "DomainError",
    "GaussianStateParams", "InvalidDistributionError", "MultimodeProductState",
    "NoisySinglePhotonModel", "NonphysicalPairError", "NotCertifiableError",
    "PhotonNumberDistribution", "PlanResult", "VacuumPair", "attenuate", "boundary_point",
    "certify", "eta_threshold", "load_state_spec", "mean_photon", "nbar_threshold",
    "optimal_witness", "q0_threshold", "rds_min", "required_runs", "simulate_double",
    "simulate_single", "solve_V_for_p0", "vacuum_after_loss",
]

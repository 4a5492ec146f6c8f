"""Bayesian nonparametric estimators of the [m:k]-discovery probability
under Gibbs-type and two-parameter Poisson-Dirichlet priors."""

from ._backend import BACKEND
from .estimators import (
    DiscoveryProfile,
    KDiscovery,
    correction_delta,
    discovery_profile,
    flp2012_new_species_k_discovery,
    new_species_k_discovery,
    old_species_k_discovery,
    pd_correction_delta,
    pd_correction_deltas,
    pd_k_discovery,
    pd_zero_discovery,
    zero_step_discovery,
)
from .gibbs import GibbsModel, PDParams, SampleSummary, TableGibbsModel, eppf, eppf_counts, pd_weight
from .logspace import LogNumber
from .simulation import UrnState, enumerate_exact, monte_carlo, predictive_step
from .special import (
    StirlingTriangle,
    beta_binomial_pmf,
    binomial,
    build_stirling_triangle,
    gen_rising_factorial,
    rising_factorial,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DiscoveryProfile",
    "GibbsModel",
    "KDiscovery",
    "LogNumber",
    "PDParams",
    "SampleSummary",
    "StirlingTriangle",
    "TableGibbsModel",
    "UrnState",
    "beta_binomial_pmf",
    "binomial",
    "build_stirling_triangle",
    "correction_delta",
    "discovery_profile",
    "enumerate_exact",
    "eppf",
    "eppf_counts",
    "flp2012_new_species_k_discovery",
    "gen_rising_factorial",
    "monte_carlo",
    "new_species_k_discovery",
    "old_species_k_discovery",
    "pd_correction_delta",
    "pd_correction_deltas",
    "pd_k_discovery",
    "pd_weight",
    "pd_zero_discovery",
    "predictive_step",
    "rising_factorial",
    "zero_step_discovery",
]

"""Gibbs and anti-Gibbs distributions over the subsets of a finite event set.

Build a base distribution ``p*`` and a nonnegative value function ``V`` on
all ``2**n`` subsets, tilt ``p*`` by ``exp(alpha * V)``, fit ``alpha`` to a
target mean of ``V``, and check numerically that the tilted member has the
smallest relative entropy to ``p*`` among all distributions with that mean.
"""

from ._backend import BACKEND
from .entropy import (
    FeasibleSampler,
    MeanEntropyRelation,
    VerificationReport,
    decomposition_sum,
    max_pointwise_residual,
    mean_entropy_relation,
    pointwise_value_identity_residual,
    relative_entropy,
    sample_feasible,
    trial_rng,
    verify_h_theorem,
    xlogx_excess,
)
from .errors import *  # noqa: F401,F403
from .gibbs import (
    Direction,
    GibbsModel,
    MeanRange,
    alpha_from_rate,
    attainable_mean_range,
    gibbs_distribution,
    gibbs_factor,
    mean_alpha_derivative,
    ratio_form,
    solve_alpha_for_mean,
)
from .oracle import OracleConfig, OracleResult, minimize_kl, polytope_vertices
from .powerset import (
    EventSet,
    PowersetDistribution,
    ValueFunction,
    default_eventset,
    enumerate_subsets,
    mean_value,
    support,
    uniform,
    validate_distribution,
)
from .sampling import SampleBatch, empirical_distribution, sample

__version__ = "0.1.0"

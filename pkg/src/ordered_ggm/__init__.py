"""Ordered transmissions for testing the covariance of a decomposable
Gaussian graphical model over clustered sensors."""

from .graph import (
    DecomposableGraph,
    binary_tree_graph,
    chain_graph,
    validate_perfect_sequence,
    zero_fill,
)
from .model import (
    GgmScenario,
    Hypothesis,
    assemble_global,
    make_chain_scenario,
    make_tree_scenario,
    random_spd_with_spectrum,
    sample,
)
from .statistic import (
    Decision,
    LocalStatisticSet,
    SplitCoefficients,
    bayes_threshold,
    build_local_set,
    centralized_decide,
    centralized_stat,
    gamma_schedule,
    local_stat,
)
from .protocol import ProtocolTrace, run_ordered, verify_equivalence
from .bounds import BoundReport, deltas, estimate_pd_pf, theorem2_bound, theorem3_limit
from .kernels import BACKEND

__version__ = "0.1.0"

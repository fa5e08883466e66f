"""Slicing-tree GA, Monte Carlo evaluation and ANOVA-driven flow search for stochastic facility layout."""

from .ga import GaConfig, GaResult, run_ga
from .hybrid import HybridConfig, HybridError, HybridResult, run_hybrid
from .instance import (
    Department,
    FlowModel,
    InstanceError,
    ParseError,
    ProblemInstance,
    candidate_flows,
    load_instance,
    parse_instance,
    render_instance,
)
from .objective import PenaltyState, handling_cost, penalized_objective
from .sim import SimConfig, SimSummary, simulate_batch
from .slicing import Chromosome, Layout, count_solutions, decode, rectilinear_distances
from .stats import one_way_anova, studentized_range_q, tukey_hsd

__version__ = "0.1.0"

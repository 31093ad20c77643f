"""Diversified influence maximization for graph data selection.

Pipeline: CSR graph -> parameter-free feature propagation -> normalized
influence model -> submodular diversity functions -> greedy seed selection,
plus model-free baselines and a linear-probe evaluator.
"""

from .graph import SparseGraph, TransitionKind, build_transition, from_edges, \
    generate_sbm, triangle_adjacency
from .propagation import PropagatedFeatures, PropagationConfig, propagate, \
    propagation_operator
from .influence import InfluenceModel, ActivatedSet, activated_set, \
    build_influence, marginal_activation
from .diversity import BallIndex, DiversityState, FeatureMetric, \
    build_ball_index, compute_dmax
from .selection import ObjectiveConfig, SelectionState, objective_value, \
    prune_candidates, select
from .baselines import BaselineConfig, select_degree, select_kcenter, select_random
from .probe import EvalConfig, ProbeModel, evaluate, train_probe

__version__ = "0.1.0"

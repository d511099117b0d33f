"""Incentive analysis for single-decision causal influence diagrams."""

from .criteria import IncentiveKind, IncentiveReport, analyze
from .graph import Cid, GraphError, NodeKind, UnknownNodeError, d_separated, descendants, minimal_reduction
from .io import load_fixture, load_model, dump_model
from .scim import (
    EnumerationLimitError,
    FunctionTable,
    InterventionSet,
    ModelError,
    OptimalPolicies,
    Policy,
    Scim,
    expected_utility,
    optimal_policies,
)

__version__ = "0.1.0"

__all__ = [
    "Cid",
    "EnumerationLimitError",
    "FunctionTable",
    "GraphError",
    "IncentiveKind",
    "IncentiveReport",
    "InterventionSet",
    "ModelError",
    "NodeKind",
    "OptimalPolicies",
    "Policy",
    "Scim",
    "UnknownNodeError",
    "analyze",
    "d_separated",
    "descendants",
    "dump_model",
    "expected_utility",
    "load_fixture",
    "load_model",
    "minimal_reduction",
    "optimal_policies",
]

"""Actual causation analysis for discrete causal networks.

Given a two-slice network (inputs at t-1, outputs at t) with conditional
probability tables, the engine finds, for every occurrence in a transition,
its actual cause or actual effect and the strength of that link in bits.
"""

from .engine import (
    CausalAccount,
    CausalLink,
    Evaluator,
    LinkAnalysis,
    actual_cause,
    actual_effect,
    alpha_c,
    alpha_e,
    alpha_max_cause,
    alpha_max_effect,
    causal_account,
    rho_c,
    rho_e,
)
from .errors import CausalisError, InvariantError, NetworkError, RealizationError
from .network import (
    INPUT,
    OUTPUT,
    CausalNetwork,
    Occurrence,
    Transition,
    Variable,
    build_network,
    dump_network,
    load_network,
    network_from_mechanisms,
    pin_background,
    transition_prob,
    validate_transition,
)
from .partition import Partition, enumerate_partitions, partition_count
from .repertoire import CAUSE, EFFECT, Purview, Repertoire, cause_repertoire, effect_repertoire

__version__ = "0.1.0"

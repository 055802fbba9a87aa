"""Deterministic simulator of multi-agent secure multiparty computation.

Parties split private inputs into additive shares, decision makers fold
shares into party-anonymous partial sums and pick agents by reputation,
redundant agents combine the partials, and a threshold vote accepts the
result. :mod:`masmc.threat_lab` estimates the adversary success
probabilities by seeded Monte Carlo.
"""

from .actors import (
    CRASHED,
    HONEST,
    ONE_THIRD,
    STRICT_MAJORITY,
    AgentResult,
    AgentState,
    Behavior,
    FunctionKind,
    IntermediateConclusion,
    ReputationLedger,
    TaskSpec,
    ThresholdRule,
)
from .figures import emit_series, eq1_p_fragment, eq2_p_dm, eq3_p_wrong_agent
from .ring_crypto import (
    DEFAULT_MODULUS,
    OutputPad,
    apply_pad,
    channel_open,
    channel_seal,
    recombine_shares,
    remove_pad,
    split_into_shares,
)
from .scenario import load_scenario, parse_scenario
from .threat_lab import AdversaryConfig, Experiment, McEstimate, mc_estimate
from .voting import Outcome, Scenario, Transcript, run_task, run_tasks, tally_results, update_reputation

__version__ = "0.1.0"

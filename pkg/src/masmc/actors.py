"""Parties, decision makers and agents: the three tiers of the architecture.

Parties fragment their input into additive shares and send each fragment
over its own sealed channel to a decision maker chosen round-robin
(fragment ``f`` goes to DM ``f mod m``). Decision makers open fragments,
fold them into a party-anonymous weighted partial sum (the *intermediate
conclusion*), optionally add an output pad, and pick agents by reputation.
Agents only ever see intermediate conclusions and add them up.
"""

from __future__ import annotations

import random
import warnings
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    AuthFailure,
    ConfigError,
    DuplicateFragment,
    InsufficientAgents,
    MissingFragments,
    TopologyWarning,
)
from .ring_crypto import (
    DEFAULT_MODULUS,
    ChannelId,
    ChannelKey,
    Channel,
    OutputPad,
    SealedMessage,
    apply_pad,
    channel_open,
    check_modulus,
    decode_ints,
    encode_ints,
    split_into_shares,
)


class FunctionKind(str, Enum):
    SUM = "sum"
    WEIGHTED_SUM = "wsum"


@dataclass(frozen=True)
class ThresholdRule:
    """How many matching agent reports are needed to accept a value."""

    kind: str  # "third" | "majority" | "fixed"
    t: int | None = None

    @classmethod
    def fixed(cls, t: int) -> ThresholdRule:
        if t < 1:
            raise ConfigError(f"fixed threshold must be >= 1, got {t}")
        return cls("fixed", t)

    def required(self, k: int) -> int:
        if self.kind == "third":
            return -(-k // 3)
        if self.kind == "majority":
            return k // 2 + 1
        if self.kind == "fixed" and self.t is not None:
            return self.t
        raise ConfigError(f"unknown threshold rule {self!r}")

    def __str__(self) -> str:
        return f"fixed:{self.t}" if self.kind == "fixed" else self.kind


ONE_THIRD = ThresholdRule("third")
STRICT_MAJORITY = ThresholdRule("majority")


@dataclass(frozen=True)
class TaskSpec:
    task_id: str
    weights: tuple[int, ...]
    fragments_r: int
    dm_count_m: int
    agent_count_p: int
    agents_selected_k: int
    function_kind: FunctionKind = FunctionKind.SUM
    threshold_rule: ThresholdRule = ONE_THIRD
    blind_result: bool = False
    modulus: int = DEFAULT_MODULUS
    seed: int = 0

    @classmethod
    def sum_of(cls, parties: int, **kw) -> TaskSpec:
        return cls(weights=(1,) * parties, function_kind=FunctionKind.SUM, **kw)

    @property
    def party_count(self) -> int:
        return len(self.weights)

    def validate(self) -> TaskSpec:
        check_modulus(self.modulus)
        if self.party_count < 1:
            raise ConfigError("at least one party is required")
        for name in ("fragments_r", "dm_count_m", "agent_count_p"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 1 <= self.agents_selected_k <= self.agent_count_p:
            raise ConfigError(
                f"agents_selected_k must be in [1, {self.agent_count_p}], "
                f"got {self.agents_selected_k}"
            )
        if any(not 0 <= w < self.modulus for w in self.weights):
            raise ConfigError("weights must be ring elements")
        if self.function_kind is FunctionKind.SUM and any(w != 1 for w in self.weights):
            raise ConfigError("SUM tasks take all-ones weights")
        self.threshold_rule.required(self.agents_selected_k)
        if self.fragments_r > self.dm_count_m:
            warnings.warn(
                f"r={self.fragments_r} > m={self.dm_count_m}: some decision maker "
                "holds several fragments of one party",
                TopologyWarning,
                stacklevel=2,
            )
        if self.dm_count_m >= self.agent_count_p:
            warnings.warn(
                f"m={self.dm_count_m} >= p={self.agent_count_p}: expected fewer "
                "decision makers than agents",
                TopologyWarning,
                stacklevel=2,
            )
        return self


def party_channel(party_index: int, dm_index: int) -> ChannelId:
    return (("party", party_index), ("dm", dm_index))


# -- parties ------------------------------------------------------------------


@dataclass(frozen=True)
class FragmentMessage:
    """A sealed fragment in flight.

    ``channel_id`` is the transport envelope (which pipe the message came
    down); the party index itself only appears inside the sealed payload.
    """

    task_id: str
    dm_index: int
    fragment_index: int
    channel_id: ChannelId
    sealed: SealedMessage


def party_submit(
    party_index: int,
    value: int,
    task: TaskSpec,
    rng: random.Random,
    channels: Mapping[int, Channel],
) -> list[FragmentMessage]:
    """Fragment ``value`` and seal fragment ``f`` to DM ``f mod m``.

    ``channels`` maps DM index to this party's sender channel for that DM.
    """
    if not 0 <= party_index < task.party_count:
        raise ConfigError(f"party index {party_index} out of range")
    shares = split_into_shares(value, task.fragments_r, rng, task.modulus)
    out = []
    for f, share in enumerate(shares):
        dm = f % task.dm_count_m
        ch = channels[dm]
        payload = encode_ints(party_index, f, share)
        out.append(FragmentMessage(task.task_id, dm, f, ch.key.channel_id, ch.seal(payload)))
    return out


# -- decision makers ----------------------------------------------------------


@dataclass(frozen=True)
class IntermediateConclusion:
    task_id: str
    dm_index: int
    partial: int
    contributing_fragment_count: int

    def fields(self) -> dict:
        return {
            "task": self.task_id,
            "dm": self.dm_index,
            "partial": self.partial,
            "fragments": self.contributing_fragment_count,
        }


@dataclass
class DecisionMakerState:
    dm_index: int
    keys: dict[ChannelId, ChannelKey]
    # (task_id, party, fragment_index) -> share
    shares: dict[tuple[str, int, int], int] = field(default_factory=dict)

    @property
    def fragment_count(self) -> int:
        return len(self.shares)


def expected_fragments(dm_index: int, task: TaskSpec) -> list[tuple[int, int]]:
    """(party, fragment_index) pairs routed to ``dm_index``."""
    frags = [f for f in range(task.fragments_r) if f % task.dm_count_m == dm_index]
    return [(i, f) for i in range(task.party_count) for f in frags]


def dm_ingest_fragment(dm: DecisionMakerState, msg: FragmentMessage) -> DecisionMakerState:
    """Open and record one fragment. On any error ``dm`` is left untouched."""
    if msg.dm_index != dm.dm_index or msg.channel_id[1] != ("dm", dm.dm_index):
        raise AuthFailure(f"message for DM {msg.dm_index} delivered to DM {dm.dm_index}")
    key = dm.keys.get(msg.channel_id)
    if key is None:
        raise AuthFailure(f"no key for channel {msg.channel_id}")
    party, frag, share = decode_ints(channel_open(msg.sealed, key))
    if ("party", party) != msg.channel_id[0] or frag != msg.fragment_index:
        raise AuthFailure("payload does not match its envelope")
    slot = (msg.task_id, party, frag)
    if slot in dm.shares:
        raise DuplicateFragment(f"duplicate fragment {slot}")
    dm.shares[slot] = share
    return dm


def dm_build_intermediate(
    dm: DecisionMakerState, task: TaskSpec, pad: OutputPad | None = None
) -> IntermediateConclusion:
    missing = [
        (i, f) for i, f in expected_fragments(dm.dm_index, task)
        if (task.task_id, i, f) not in dm.shares
    ]
    if missing:
        raise MissingFragments(missing)
    M = task.modulus
    partial = 0
    count = 0
    for (tid, party, _), share in dm.shares.items():
        if tid != task.task_id:
            continue
        partial = (partial + task.weights[party] * share) % M
        count += 1
    if task.blind_result:
        if pad is None:
            raise ConfigError("blind-result task needs a pad for every decision maker")
        partial = apply_pad(partial, pad, M)
    return IntermediateConclusion(task.task_id, dm.dm_index, partial, count)


@dataclass
class ReputationLedger:
    scores: dict[int, int]

    @classmethod
    def fresh(cls, p: int) -> ReputationLedger:
        return cls({a: 0 for a in range(p)})

    def copy(self) -> ReputationLedger:
        return ReputationLedger(dict(self.scores))


def dm_select_agents(
    ledger: ReputationLedger,
    k: int,
    available: Sequence[int] | set[int],
    rng: random.Random,
) -> list[int]:
    """Top-``k`` available agents by score, ties broken by a seeded draw."""
    pool = sorted(a for a in available if a in ledger.scores)
    if len(pool) < k:
        raise InsufficientAgents(f"need {k} agents, only {len(pool)} available")
    tiebreak = {a: rng.random() for a in pool}
    ranked = sorted(pool, key=lambda a: (-ledger.scores[a], tiebreak[a]))
    return ranked[:k]


# -- agents -------------------------------------------------------------------


@dataclass(frozen=True)
class Behavior:
    kind: str  # "honest" | "constant" | "perturb" | "crash"
    value: int = 0

    @classmethod
    def constant(cls, w: int) -> Behavior:
        return cls("constant", w)

    @classmethod
    def perturb(cls, d: int) -> Behavior:
        return cls("perturb", d)

    def __str__(self) -> str:
        return self.kind if self.kind in ("honest", "crash") else f"{self.kind}:{self.value}"


HONEST = Behavior("honest")
CRASHED = Behavior("crash")


@dataclass(frozen=True)
class AgentState:
    agent_id: int
    behavior: Behavior = HONEST
    available: bool = True


@dataclass(frozen=True)
class AgentResult:
    task_id: str
    agent_id: int
    reported: int | None  # None = ABSENT

    def fields(self) -> dict:
        return {
            "task": self.task_id,
            "agent": self.agent_id,
            "reported": "ABSENT" if self.reported is None else self.reported,
        }


def agent_compute(
    agent: AgentState, intermediates: Sequence[IntermediateConclusion], task: TaskSpec
) -> AgentResult:
    M = task.modulus
    b = agent.behavior
    if b.kind == "crash":
        return AgentResult(task.task_id, agent.agent_id, None)
    honest = sum(ic.partial for ic in intermediates) % M
    if b.kind == "honest":
        value = honest
    elif b.kind == "constant":
        value = b.value % M
    elif b.kind == "perturb":
        value = (honest + b.value) % M
    else:
        raise ConfigError(f"unknown agent behavior {b.kind!r}")
    return AgentResult(task.task_id, agent.agent_id, value)

"""Task orchestration, threshold tallying and reputation updates.

:func:`run_task` drives one task through the whole pipeline in a fixed
order and records every step in a :class:`Transcript`. Acceptance needs a
*unique* most-supported value whose support also meets the threshold rule
(``ceil(k/3)`` by default); a tie at the top is rejected as ambiguous even
when both values clear the quorum.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .actors import (
    HONEST,
    AgentResult,
    AgentState,
    Behavior,
    DecisionMakerState,
    ReputationLedger,
    TaskSpec,
    ThresholdRule,
    agent_compute,
    dm_build_intermediate,
    dm_ingest_fragment,
    dm_select_agents,
    party_channel,
    party_submit,
)
from .errors import ConfigError, EmptyTally, MasmcError
from .ring_crypto import Channel, ChannelKey, issue_pads, remove_pad, to_ring
from .rng import substream

ACCEPTED = "ACCEPTED"
REJECTED_AMBIGUOUS = "REJECTED_AMBIGUOUS"
REJECTED_NO_QUORUM = "REJECTED_NO_QUORUM"

SCORE_MATCH = 1
SCORE_DEVIATE = -2
SCORE_ABSENT = -1


@dataclass(frozen=True)
class ResultTally:
    support: dict[int, tuple[int, ...]]  # reported value -> agent ids
    absent: tuple[int, ...]

    @classmethod
    def of(cls, results: Iterable[AgentResult]) -> ResultTally:
        support: dict[int, list[int]] = {}
        absent = []
        for res in results:
            if res.reported is None:
                absent.append(res.agent_id)
            else:
                support.setdefault(res.reported, []).append(res.agent_id)
        return cls({v: tuple(ids) for v, ids in support.items()}, tuple(absent))


@dataclass(frozen=True)
class Outcome:
    status: str
    value: int | None = None
    support: int = 0
    k: int = 0
    opened_value: int | None = None

    @property
    def accepted(self) -> bool:
        return self.status == ACCEPTED

    def line(self) -> str:
        if self.accepted:
            v = self.value if self.opened_value is None else self.opened_value
            return f"ACCEPTED value={v} support={self.support}/{self.k}"
        return f"REJECTED {self.status.removeprefix('REJECTED_')}"


def tally_results(
    results: Sequence[AgentResult], rule: ThresholdRule, k_selected: int
) -> Outcome:
    if not results:
        raise EmptyTally("no agent results to tally")
    tally = ResultTally.of(results)
    t = rule.required(k_selected)
    if not tally.support:
        return Outcome(REJECTED_NO_QUORUM, k=k_selected)
    best = max(len(ids) for ids in tally.support.values())
    leaders = [v for v, ids in tally.support.items() if len(ids) == best]
    if best < t:
        return Outcome(REJECTED_NO_QUORUM, support=best, k=k_selected)
    if len(leaders) > 1:
        return Outcome(REJECTED_AMBIGUOUS, support=best, k=k_selected)
    return Outcome(ACCEPTED, leaders[0], best, k_selected)


def update_reputation(
    ledger: ReputationLedger, results: Sequence[AgentResult], outcome: Outcome
) -> tuple[ReputationLedger, list[int]]:
    """Score agents against an accepted value; rejected outcomes change nothing."""
    new = ledger.copy()
    flagged: list[int] = []
    if not outcome.accepted:
        return new, flagged
    for res in results:
        if res.reported is None:
            delta = SCORE_ABSENT
        elif res.reported == outcome.value:
            delta = SCORE_MATCH
        else:
            delta = SCORE_DEVIATE
            flagged.append(res.agent_id)
        new.scores[res.agent_id] = new.scores.get(res.agent_id, 0) + delta
    return new, flagged


# -- transcript ---------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v) or "-"
    if isinstance(v, dict):
        return ",".join(f"{_fmt(a)}:{_fmt(b)}" for a, b in v.items()) or "-"
    return str(v)


@dataclass(frozen=True)
class Event:
    step: int
    kind: str
    fields: dict

    def line(self) -> str:
        parts = [f"{self.step:05d}", self.kind]
        parts += [f"{k}={_fmt(v)}" for k, v in self.fields.items()]
        return " ".join(parts)


@dataclass
class Transcript:
    events: list[Event] = field(default_factory=list)

    def log(self, kind: str, **fields) -> None:
        self.events.append(Event(len(self.events), kind, fields))

    def of_kind(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def to_text(self) -> str:
        return "".join(e.line() + "\n" for e in self.events)


# -- orchestration ------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    task: TaskSpec
    inputs: tuple[int, ...]
    behaviors: Mapping[int, Behavior] = field(default_factory=dict)
    unavailable: frozenset[int] = frozenset()

    def agents(self) -> list[AgentState]:
        return [
            AgentState(a, self.behaviors.get(a, HONEST), a not in self.unavailable)
            for a in range(self.task.agent_count_p)
        ]

    def true_result(self) -> int:
        M = self.task.modulus
        return sum(w * x for w, x in zip(self.task.weights, self.inputs)) % M


@dataclass
class TaskRun:
    outcome: Outcome
    transcript: Transcript
    ledger: ReputationLedger
    flagged: list[int]
    selected: list[int]
    results: list[AgentResult]
    master_pad: int | None = None


class TaskAborted(MasmcError):
    """An actor error stopped the task; the partial transcript is attached."""

    def __init__(self, cause: Exception, transcript: Transcript):
        self.cause = cause
        self.transcript = transcript
        super().__init__(f"{type(cause).__name__}: {cause}")


def validate_scenario(sc: Scenario) -> None:
    task = sc.task.validate()
    if len(sc.inputs) != task.party_count:
        raise ConfigError(f"{len(sc.inputs)} inputs for {task.party_count} parties")
    for x in sc.inputs:
        to_ring(x, task.modulus)
    for a in list(sc.behaviors) + list(sc.unavailable):
        if not 0 <= a < task.agent_count_p:
            raise ConfigError(f"agent id {a} out of range [0, {task.agent_count_p})")


def run_task(scenario: Scenario, ledger: ReputationLedger | None = None) -> TaskRun:
    validate_scenario(scenario)
    tr = Transcript()
    try:
        return _run(scenario, ledger, tr)
    except MasmcError as exc:
        tr.log("error", error=type(exc).__name__, detail=str(exc).replace(" ", "_"))
        raise TaskAborted(exc, tr) from exc


def _run(sc: Scenario, ledger: ReputationLedger | None, tr: Transcript) -> TaskRun:
    task = sc.task
    seed, tid, M = task.seed, task.task_id, task.modulus
    m, k = task.dm_count_m, task.agents_selected_k
    if ledger is None:
        ledger = ReputationLedger.fresh(task.agent_count_p)
    tr.log(
        "task", task=tid, function=task.function_kind.value, parties=task.party_count,
        r=task.fragments_r, m=m, p=task.agent_count_p, k=k,
        threshold=str(task.threshold_rule), blind=str(task.blind_result).lower(),
    )

    keys = {
        party_channel(i, d): ChannelKey.derive(seed, party_channel(i, d))
        for i in range(task.party_count)
        for d in range(m)
    }
    dms = [
        DecisionMakerState(d, {cid: key for cid, key in keys.items() if cid[1] == ("dm", d)})
        for d in range(m)
    ]

    messages = []
    for i, x in enumerate(sc.inputs):
        channels = {d: Channel(keys[party_channel(i, d)]) for d in range(m)}
        rng = substream(seed, "shares", tid, i)
        for msg in party_submit(i, x, task, rng, channels):
            tr.log(
                "fragment_sent", task=tid, party=i, dm=msg.dm_index,
                fragment=msg.fragment_index, sealed=msg.sealed.hex(),
            )
            messages.append(msg)

    for msg in messages:
        dm = dms[msg.dm_index]
        dm_ingest_fragment(dm, msg)
        tr.log(
            "fragment_ingested", task=tid, dm=dm.dm_index,
            fragment=msg.fragment_index, held=dm.fragment_count,
        )

    pads = [None] * m
    master = None
    if task.blind_result:
        pads, master = issue_pads(m, substream(seed, "pads", tid), M)
        tr.log("pads_issued", task=tid, count=m, opener=master.opener_id)

    intermediates = [dm_build_intermediate(dms[d], task, pads[d]) for d in range(m)]
    for ic in intermediates:
        tr.log("intermediate", **ic.fields())

    agents = sc.agents()
    available = [a.agent_id for a in agents if a.available]
    selected = dm_select_agents(ledger, k, available, substream(seed, "select", tid))
    tr.log("agents_selected", task=tid, agents=selected)

    results = [agent_compute(agents[a], intermediates, task) for a in selected]
    for res in results:
        tr.log("agent_result", **res.fields())

    tally = ResultTally.of(results)
    tr.log(
        "tally", task=tid,
        support={v: len(ids) for v, ids in sorted(tally.support.items())},
        absent=list(tally.absent), required=task.threshold_rule.required(k),
    )
    outcome = tally_results(results, task.threshold_rule, k)
    tr.log("outcome", task=tid, status=outcome.status, value=outcome.value, support=outcome.support)

    new_ledger, flagged = update_reputation(ledger, results, outcome)
    delta = {a: new_ledger.scores[a] - ledger.scores.get(a, 0) for a in sorted(new_ledger.scores)}
    tr.log("ledger_delta", task=tid, delta={a: d for a, d in delta.items() if d}, flagged=flagged)

    if master is not None and outcome.accepted:
        opened = remove_pad(outcome.value, master, M)
        outcome = Outcome(outcome.status, outcome.value, outcome.support, outcome.k, opened)
        tr.log("opened", task=tid, opener=master.opener_id, value=opened)

    return TaskRun(
        outcome, tr, new_ledger, flagged, selected, results,
        master.pad if master is not None else None,
    )


def run_tasks(scenarios: Sequence[Scenario], ledger: ReputationLedger | None = None) -> list[TaskRun]:
    """Run several tasks in order, threading the reputation ledger through."""
    runs = []
    for sc in scenarios:
        run = run_task(sc, ledger)
        ledger = run.ledger
        runs.append(run)
    return runs

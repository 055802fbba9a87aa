
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masmc import CRASHED, ONE_THIRD, STRICT_MAJORITY, Behavior, ThresholdRule
from masmc.actors import AgentResult, ReputationLedger
from masmc.errors import ConfigError, EmptyTally, InsufficientAgents
from masmc.ring_crypto import DEFAULT_MODULUS as M
from masmc.voting import (
    ACCEPTED,
    REJECTED_AMBIGUOUS,
    REJECTED_NO_QUORUM,
    Outcome,
    Scenario,
    TaskAborted,
    run_task,
    run_tasks,
    tally_results,
    update_reputation,
)

from conftest import make_scenario


def results(values):
    return [AgentResult("t", a, v) for a, v in enumerate(values)]


@pytest.mark.parametrize("k,third,majority", [
    (1, 1, 1), (2, 1, 2), (3, 1, 2), (4, 2, 3), (5, 2, 3), (6, 2, 4), (9, 3, 5), (10, 4, 6),
])
def test_threshold_values(k, third, majority):
    assert ONE_THIRD.required(k) == third
    assert STRICT_MAJORITY.required(k) == majority
    assert ThresholdRule.fixed(4).required(k) == 4


def test_unanimous():
    assert tally_results(results([7] * 5), ONE_THIRD, 5) == Outcome(ACCEPTED, 7, 5, 5)


def test_unique_plurality_wins():
    o = tally_results(results([7, 7, 9, 9, 9]), ONE_THIRD, 5)
    assert (o.status, o.value, o.support) == (ACCEPTED, 9, 3)


def test_tie_is_ambiguous():
    assert tally_results(results([7, 7, 9, 9]), ONE_THIRD, 4).status == REJECTED_AMBIGUOUS


def test_no_quorum():
    # t = 3 for k = 5 under strict majority; best support is 2
    o = tally_results(results([1, 1, 2, 3, None]), STRICT_MAJORITY, 5)
    assert o.status == REJECTED_NO_QUORUM
    assert tally_results(results([None, None]), ONE_THIRD, 2).status == REJECTED_NO_QUORUM
    assert tally_results(results([4, 4, 5]), ThresholdRule.fixed(3), 3).status == REJECTED_NO_QUORUM


def test_absent_agents_do_not_support():
    o = tally_results(results([None, None, 8, None]), ONE_THIRD, 4)
    assert o.status == REJECTED_NO_QUORUM  # t = 2
    o = tally_results(results([None, 8, 8, None]), ONE_THIRD, 4)
    assert (o.status, o.value, o.support) == (ACCEPTED, 8, 2)


def test_empty_tally():
    with pytest.raises(EmptyTally):
        tally_results([], ONE_THIRD, 3)


def test_unknown_rule():
    with pytest.raises(ConfigError):
        ThresholdRule("plurality").required(3)
    with pytest.raises(ConfigError):
        ThresholdRule.fixed(0)


# -- reputation ---------------------------------------------------------------


def test_all_honest_reputation():
    res = results([5] * 4)
    ledger, flagged = update_reputation(ReputationLedger.fresh(4), res, Outcome(ACCEPTED, 5, 4, 4))
    assert ledger.scores == {0: 1, 1: 1, 2: 1, 3: 1}
    assert flagged == []


def test_perturbing_agent_caught_in_one_task():
    sc = make_scenario(p=6, k=6, behaviors={4: Behavior.perturb(1)})
    run = run_task(sc)
    assert run.outcome.value == 60
    assert run.flagged == [4]
    assert run.ledger.scores == {0: 1, 1: 1, 2: 1, 3: 1, 4: -2, 5: 1}


def test_absent_penalty():
    res = results([5, None, 5])
    ledger, flagged = update_reputation(ReputationLedger.fresh(3), res, Outcome(ACCEPTED, 5, 2, 3))
    assert ledger.scores == {0: 1, 1: -1, 2: 1}
    assert flagged == []


@pytest.mark.parametrize("status", [REJECTED_AMBIGUOUS, REJECTED_NO_QUORUM])
def test_rejection_leaves_ledger_unchanged(status):
    before = ReputationLedger({0: 3, 1: -1})
    after, flagged = update_reputation(before, results([1, 2]), Outcome(status))
    assert after.scores == before.scores and flagged == []


# -- end to end ---------------------------------------------------------------


def test_all_honest_three_party_sum(honest_scenario):
    run = run_task(honest_scenario)
    assert run.outcome == Outcome(ACCEPTED, 60, 5, 5)
    assert run.outcome.line() == "ACCEPTED value=60 support=5/5"


def test_two_perturbers_still_accept_60():
    sc = make_scenario(behaviors={1: Behavior.perturb(1), 3: Behavior.perturb(2)})
    run = run_task(sc)
    assert (run.outcome.status, run.outcome.value, run.outcome.support) == (ACCEPTED, 60, 3)
    assert sorted(run.flagged) == [1, 3]


def test_blind_mode_hides_result_from_agents():
    sc = make_scenario(blind=True)
    run = run_task(sc)
    assert run.master_pad != 0
    assert all(r.reported != 60 for r in run.results)
    assert run.outcome.opened_value == 60
    assert run.outcome.value == (60 + run.master_pad) % M
    assert run.outcome.line() == "ACCEPTED value=60 support=5/5"


def test_weighted_sum():
    sc = make_scenario(inputs=(12, 7, 30, 5), weights=(3, 1, 2, 10), r=2, m=2, p=7, k=5,
                       rule=STRICT_MAJORITY, blind=True)
    run = run_task(sc)
    assert run.outcome.opened_value == 3 * 12 + 7 + 2 * 30 + 10 * 5


def test_colluding_majority_hazard():
    colluders = {a: Behavior.constant(999) for a in (0, 2, 4, 6, 8)}
    for rule in (ONE_THIRD, STRICT_MAJORITY):
        run = run_task(make_scenario(p=9, rule=rule, behaviors=colluders))
        assert (run.outcome.status, run.outcome.value, run.outcome.support) == (ACCEPTED, 999, 5)
        # the honest agents are the ones flagged here
        assert sorted(run.flagged) == [1, 3, 5, 7]


def test_ambiguous_run_rejected_and_ledger_untouched():
    sc = make_scenario(p=4, behaviors={0: Behavior.constant(1), 1: Behavior.constant(1)})
    run = run_task(sc)
    assert run.outcome.status == REJECTED_AMBIGUOUS
    assert run.outcome.line() == "REJECTED AMBIGUOUS"
    assert run.ledger.scores == ReputationLedger.fresh(4).scores


def test_crashed_agent_reports_absent():
    run = run_task(make_scenario(behaviors={2: CRASHED}))
    assert run.outcome.support == 4
    assert run.ledger.scores[2] == -1
    assert run.flagged == []


def test_insufficient_agents_recorded_in_transcript():
    sc = Scenario(make_scenario(p=5).task, (10, 20, 30), unavailable=frozenset({0, 1}))
    with pytest.raises(TaskAborted) as err:
        run_task(sc)
    assert isinstance(err.value.cause, InsufficientAgents)
    assert err.value.transcript.events[-1].kind == "error"


def test_config_errors_raise_before_running():
    with pytest.raises(ConfigError):
        run_task(make_scenario(inputs=(1, M)))
    with pytest.raises(ConfigError):
        run_task(make_scenario(behaviors={9: CRASHED}))


def test_transcript_is_deterministic_and_seed_sensitive():
    a = run_task(make_scenario(blind=True)).transcript.to_text()
    b = run_task(make_scenario(blind=True)).transcript.to_text()
    c = run_task(make_scenario(blind=True, seed=8)).transcript.to_text()
    assert a == b
    assert a != c
    steps = [int(line.split()[0]) for line in a.splitlines()]
    assert steps == list(range(len(steps)))


def test_transcript_event_order(honest_scenario):
    kinds = [e.kind for e in run_task(honest_scenario).transcript.events]
    order = ["task", "fragment_sent", "fragment_ingested", "intermediate",
             "agents_selected", "agent_result", "tally", "outcome", "ledger_delta"]
    firsts = [kinds.index(k) for k in order]
    assert firsts == sorted(firsts)


def test_persistent_deviator_sinks():
    scenarios = [make_scenario(p=6, k=6, seed=s, behaviors={2: Behavior.perturb(5)}) for s in range(6)]
    runs = run_tasks(scenarios)
    scores = [run.ledger.scores[2] for run in runs]
    assert scores == sorted(scores, reverse=True)
    assert scores[-1] == -12
    assert all(run.flagged == [2] for run in runs)


def test_ledger_drives_later_selection():
    first = make_scenario(p=6, k=6, seed=1, behaviors={2: Behavior.perturb(5)})
    later = make_scenario(p=6, k=5, seed=2, behaviors={2: Behavior.perturb(5)})
    runs = run_tasks([first, later])
    assert 2 not in runs[1].selected
    assert runs[1].flagged == []


@st.composite
def vote_scenarios(draw):
    k = draw(st.integers(1, 12))
    honest = draw(st.integers(0, k))
    bad = k - honest
    rule = draw(st.sampled_from([ONE_THIRD, STRICT_MAJORITY]))
    wrong_values = draw(st.lists(st.integers(61, 70), min_size=bad, max_size=bad))
    behaviors = {}
    order = draw(st.permutations(range(k)))
    for agent, w in zip(order[honest:], wrong_values):
        behaviors[agent] = Behavior.constant(w)
    return k, honest, rule, behaviors, wrong_values


@settings(max_examples=150, deadline=None)
@given(vote_scenarios(), st.integers(0, 1000))
def test_correctness_property(case, seed):
    k, honest, rule, behaviors, wrong = case
    sc = make_scenario(p=k, rule=rule, behaviors=behaviors, seed=seed)
    run = run_task(sc)
    top_wrong = max((wrong.count(v) for v in set(wrong)), default=0)
    if honest >= rule.required(k) and top_wrong < honest:
        assert run.outcome.status == ACCEPTED
        assert run.outcome.value == 60
    if run.outcome.accepted:
        deviators = {r.agent_id for r in run.results if r.reported != run.outcome.value}
        assert set(run.flagged) == deviators

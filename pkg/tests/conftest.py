import random

import pytest

from masmc import ONE_THIRD, Scenario, TaskSpec

ACCEPTANCE_LINES: list[str] = []


def make_scenario(inputs=(10, 20, 30), r=3, m=3, p=5, k=None, rule=ONE_THIRD,
                  blind=False, behaviors=None, seed=7, weights=None, **kw):
    if weights is None:
        task = TaskSpec.sum_of(len(inputs), task_id="t", fragments_r=r, dm_count_m=m,
                               agent_count_p=p, agents_selected_k=k or p,
                               threshold_rule=rule, blind_result=blind, seed=seed, **kw)
    else:
        from masmc import FunctionKind
        task = TaskSpec(task_id="t", weights=tuple(weights), fragments_r=r, dm_count_m=m,
                        agent_count_p=p, agents_selected_k=k or p,
                        function_kind=FunctionKind.WEIGHTED_SUM, threshold_rule=rule,
                        blind_result=blind, seed=seed, **kw)
    return Scenario(task, tuple(inputs), behaviors or {})


@pytest.fixture
def honest_scenario():
    return make_scenario()


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

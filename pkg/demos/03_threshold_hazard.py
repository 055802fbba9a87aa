"""How the one-third acceptance rule behaves against colluding agents.

A value is accepted when it is the unique most-reported value and at least
ceil(k/3) of the k selected agents report it. Independent liars are
harmless; a colluding majority is not, whatever the rule.
"""
from masmc import ONE_THIRD, STRICT_MAJORITY, Behavior, Scenario, TaskSpec, run_task


def scenario(colluders, rule, k=9):
    task = TaskSpec.sum_of(3, task_id="vote", fragments_r=3, dm_count_m=3,
                           agent_count_p=k, agents_selected_k=k, threshold_rule=rule, seed=3)
    return Scenario(task, (10, 20, 30), {a: Behavior.constant(999) for a in range(colluders)})


# %% Sweep the number of colluders under both rules
print("colluders  third                majority")
for c in range(0, 10):
    row = [run_task(scenario(c, rule)).outcome.line() for rule in (ONE_THIRD, STRICT_MAJORITY)]
    print(f"{c:9d}  {row[0]:<20} {row[1]}")

# %% Independent perturbations split the wrong votes, so honest agents still win
task = TaskSpec.sum_of(3, task_id="perturb", fragments_r=3, dm_count_m=3,
                       agent_count_p=9, agents_selected_k=9, seed=3)
liars = {a: Behavior.perturb(a + 1) for a in range(6)}
print("6 independent liars of 9:", run_task(Scenario(task, (10, 20, 30), liars)).outcome.line())

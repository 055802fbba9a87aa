"""One task from parties to accepted result, and a look at the transcript."""
from masmc import Behavior, FunctionKind, Scenario, TaskSpec, run_task

# %% Four departments compute a weighted total without revealing their figures
task = TaskSpec(
    task_id="budget-q3",
    weights=(3, 1, 2, 10),
    fragments_r=3,
    dm_count_m=3,
    agent_count_p=7,
    agents_selected_k=5,
    function_kind=FunctionKind.WEIGHTED_SUM,
    blind_result=True,
    seed=11,
)
scenario = Scenario(task, inputs=(12, 7, 30, 5), behaviors={4: Behavior.perturb(3)})
run = run_task(scenario)

print(run.outcome.line())
print("true weighted sum:", scenario.true_result())
print("selected agents:", run.selected)
print("reports (masked):", [r.reported for r in run.results])
print("flagged:", run.flagged)
print("ledger:", run.ledger.scores)

# %% The transcript is a stable, diffable event log
for line in run.transcript.to_text().splitlines():
    if not line.split()[1].startswith("fragment"):
        print(line)

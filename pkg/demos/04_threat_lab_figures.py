"""Adversary probabilities: closed forms against seeded Monte Carlo.

Produces the two figure series (fragment-capture vs r, corrupt decision
maker vs m) and plots them if matplotlib is around.
"""
from masmc.figures import emit_series, eq3_table

fig2, fig2_csv = emit_series("FIG2", range(1, 21), trials=100_000, seed=7)
fig3, fig3_csv = emit_series("FIG3", range(1, 21), trials=100_000, seed=7)
print(fig2_csv)

# %% Wrong-agent probability falls with more decision makers and more agents
for row in eq3_table([2, 3, 5, 10], [5, 10, 20], trials=100_000, seed=7):
    print(f"m={row.m:2d} p={row.p:2d} closed={row.p_closed:.4f} mc={row.p_mc:.4f} +/- {row.stderr:.4f}")

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    for ax, pts, xlabel in ((axes[0], fig2, "fragments r"), (axes[1], fig3, "decision makers m")):
        ax.plot([p.x for p in pts], [p.p_closed for p in pts], "k-", label="closed form")
        ax.errorbar([p.x for p in pts], [p.p_mc for p in pts], yerr=[3 * p.stderr for p in pts],
                    fmt="o", ms=3, label="Monte Carlo")
        ax.set_xlabel(xlabel)
        ax.legend()
    fig.tight_layout()
    fig.savefig("threat_lab_figures.png", dpi=120)
    print("wrote threat_lab_figures.png")

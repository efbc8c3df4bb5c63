"""
Archiving methods side by side
==============================

Generate the three synthetic workloads at a reduced scale and report the
size of every archiving method, relative to plain per-node id lists.
"""

# %%
from cpoi.datagen import Dat1Params, Dat2Params, Dat3Params, gen_dat1, gen_dat2, gen_dat3
from cpoi.report import Workload, compare, rows_to_csv

logs = {
    "dat1": gen_dat1(Dat1Params(versions=200, avg_size=2000, seed=1)),
    "dat2": gen_dat2(Dat2Params(versions=200, avg_size=2000, seed=1)),
    "dat3": gen_dat3(Dat3Params(versions=200, t_count=40000, seed=1)),
}

# %%
rows = []
for name, log in logs.items():
    w = Workload.from_log(log, dataset=name)
    g = w.graph
    print(f"{name}: {len(log)} versions, |T|={g.t_count}, {len(g)} nodes, "
          f"{g.edge_count()} edges, mean depth {g.depths().mean():.2f}")
    rows += compare(w, policy="bfs", triple_bytes=100, bounds=True)

# %%
for r in rows:
    print(f"{r.dataset} {r.method:7s} nodes {r.compression_ratio_vs_poi:7.2f}%  total {r.total_bits / 8e6:8.2f} MB")

# %%
# The same rows as CSV, ready for a spreadsheet or a plotting script.
print(rows_to_csv(rows)[:400])

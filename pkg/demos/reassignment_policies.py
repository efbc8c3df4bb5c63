"""
Renumbering triples
===================

Stored sets compress better when their ids sit close together.  Each
reassignment policy picks a new numbering; here we try them all on a small
graph and then on a generated log.
"""

# %%
from cpoi import codec
from cpoi.assignment import Policy, apply_permutation, assign, frequency_table
from cpoi.datagen import Dat1Params, gen_dat1
from cpoi.graph import StorageGraph
from cpoi.vlog import build_from_log

g = StorageGraph()
for label, ids in [("v1", [1, 2, 3, 4, 5, 9]), ("v2", [1, 5, 9]), ("v3", [1, 3, 9]),
                   ("v4", [1, 2, 6, 9]), ("v5", [1, 2, 3, 4, 6, 7, 8, 9])]:
    g.insert_version(label, ids)
print([s.tolist() for s in g.stored_family()])

# %%
# Frequency groups ids by how many stored sets contain them.
ft = frequency_table(g)
print({f: [lst.tolist() for lst in ft.lists[f]] for f in sorted(ft.lists)})

# %%
for pol in Policy:
    p = assign(g, pol, seed=0)
    h = apply_permutation(g, p)
    bits = codec.tail_bits(h.stored_family(), codec.GAMMA)
    print(f"{pol.value:10s} tail bits {bits:3d}  stored {[s.tolist() for s in h.stored_family()]}")

# %%
# The same comparison on a generated log of 200 versions.
log = gen_dat1(Dat1Params(versions=200, avg_size=2000, seed=7))
big = build_from_log(log, cache_unions=True)
plain = codec.family_bits(big.stored_family(), codec.FIXED32)
for pol in Policy:
    h = apply_permutation(big, assign(big, pol, seed=0))
    bits = codec.family_bits(h.stored_family(), codec.GAMMA)
    print(f"{pol.value:10s} {100 * bits / plain:6.2f}% of plain ids")

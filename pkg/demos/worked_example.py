"""
Six versions, two tracks
========================

Build the storage graph for a handful of small versions, look at what each
node stores, and compare the plain and gapped sizes.
"""

# %%
import numpy as np

from cpoi import codec
from cpoi.graph import StorageGraph
from cpoi.space import FamilyStats, space_cpoi, space_cpoi_u, space_poi, total_gaps

versions = {
    "a0": [1, 2, 3, 4, 5],
    "a1": [1, 2, 3, 4, 5, 6],
    "a2": [1, 2, 3, 4, 7, 8],
    "b0": [1, 2, 3],
    "b1": [1, 2, 3, 4, 5, 6],
    "b2": [1, 2, 7],
}

g = StorageGraph()
for label, ids in versions.items():
    g.insert_version(label, ids)

# %%
# a1 and b1 hold the same triples, so they share a node.
for n in g.node_ids:
    print(n, g.stored(n).tolist(), "parents:", sorted(g.parents(n)))
print(g.version_map)

# %%
# A version is the union of its node and every ancestor.
print("a1 =", g.reconstruct("a1").tolist())

# %%
family = g.stored_family()
stats = FamilyStats.from_family(family, g.t_count)
G = total_gaps(family)
print("Gaps(N) =", G)
print("plain 32-bit ids :", space_poi(stats), "bits")
print("unary gaps       :", space_cpoi(stats, G), "bits")
print("uniform width    :", space_cpoi_u(stats), "bits")
print("gamma gaps       :", codec.family_bits(family, codec.GAMMA), "bits")

# %%
# The gamma code for one list, bit by bit.
e = codec.encode_gapped_list([32011, 32013, 32014, 32017])
print(e.first_id_bits, e.tail_bits, [codec.encode_elias_gamma(int(k)) for k in np.diff([32011, 32013, 32014, 32017])])

"""Id reassignment policies.

Every policy returns an :class:`IdPermutation` over ``1..|T|``.  The graph
based policies walk nodes in some order and hand out consecutive new ids to
each node's not-yet-assigned triples (in old-id order); anything never reached
is appended at the end in old-id order.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

import numpy as np

from .dictionary import InvalidPermutationError, _is_bijection
from .graph import StorageGraph


class Policy(enum.Enum):
    DEFAULT = "default"
    RANDOM = "random"
    SIZE = "size"
    SIZE_REV = "size-rev"
    FREQUENCY = "frequency"
    BFS = "bfs"
    BFS_REV = "bfs-rev"


class IdPermutation:
    """Bijection old id -> new id; ``mapping[k]`` is the new id of ``k`` (slot 0 unused)."""

    def __init__(self, mapping):
        mapping = np.asarray(mapping, dtype=np.int64)
        if mapping.ndim != 1 or not _is_bijection(mapping):
            raise InvalidPermutationError("mapping is not a bijection on 1..|T|")
        self.mapping = mapping

    @classmethod
    def identity(cls, t_count: int) -> "IdPermutation":
        return cls(np.arange(t_count + 1))

    @classmethod
    def from_order(cls, order, t_count: int) -> "IdPermutation":
        """Build from the sequence of old ids in new-id order."""
        order = np.asarray(order, dtype=np.int64)
        mapping = np.zeros(t_count + 1, dtype=np.int64)
        mapping[order] = np.arange(1, len(order) + 1)
        return cls(mapping)

    def __len__(self):
        return len(self.mapping) - 1

    def __call__(self, ids):
        return self.mapping[np.asarray(ids, dtype=np.int64)]

    def __eq__(self, other):
        return isinstance(other, IdPermutation) and np.array_equal(self.mapping, other.mapping)

    def __repr__(self):
        return f"IdPermutation({self.mapping[1:].tolist() if len(self) <= 20 else f'<{len(self)} ids>'})"

    def inverse(self) -> "IdPermutation":
        inv = np.zeros_like(self.mapping)
        inv[self.mapping] = np.arange(len(self.mapping))
        return IdPermutation(inv)

    def then(self, other: "IdPermutation") -> "IdPermutation":
        """Apply ``self`` first, then ``other``."""
        return IdPermutation(other.mapping[self.mapping])

    def order(self) -> np.ndarray:
        """Old ids listed by increasing new id."""
        return self.inverse().mapping[1:]

    def as_dict(self) -> dict[int, int]:
        return {k: int(v) for k, v in enumerate(self.mapping) if k}


def _sequential(order_chunks, t_count: int) -> IdPermutation:
    assigned = np.zeros(t_count + 1, dtype=bool)
    seq = []
    for chunk in order_chunks:
        chunk = np.asarray(chunk, dtype=np.int64)
        fresh = chunk[~assigned[chunk]]
        if fresh.size:
            # a chunk may repeat ids; keep first occurrence
            _, first = np.unique(fresh, return_index=True)
            fresh = fresh[np.sort(first)]
            assigned[fresh] = True
            seq.append(fresh)
    rest = np.flatnonzero(~assigned[1:]) + 1
    seq.append(rest)
    return IdPermutation.from_order(np.concatenate(seq) if seq else np.empty(0, np.int64), t_count)


def assign_default(g: StorageGraph) -> IdPermutation:
    """Ids were handed out at first appearance while interning, so nothing moves."""
    return IdPermutation.identity(g.t_count)


def assign_random(g: StorageGraph, seed: int) -> IdPermutation:
    rng = np.random.default_rng(seed)
    t = g.t_count
    return IdPermutation.from_order(rng.permutation(np.arange(1, t + 1)), t)


def assign_by_size(g: StorageGraph, ascending: bool = False) -> IdPermutation:
    sizes = g.stored_sizes()
    nodes = list(g.node_ids)
    if ascending:
        # singletons gain nothing from gaps; they go last
        order = sorted(nodes, key=lambda n: (sizes[n - 1] <= 1, sizes[n - 1], n))
    else:
        order = sorted(nodes, key=lambda n: (-sizes[n - 1], n))
    return _sequential((g.stored(n) for n in order), g.t_count)


@dataclass
class FrequencyTable:
    freq: np.ndarray  # indexed by triple id
    lists: dict[int, np.ndarray]

    def __len__(self):
        return sum(len(v) for v in self.lists.values())


def frequency_table(g: StorageGraph) -> FrequencyTable:
    """Count, per triple, the nodes storing it, and group triples by count.

    Inside each list, triples keep the order in which nodes are met (node
    creation order, old ids within a node), so one node's triples stay adjacent.
    """
    family = g.stored_family()
    t = g.t_count
    allids = np.concatenate(family) if family else np.empty(0, np.int64)
    freq = np.bincount(allids, minlength=t + 1).astype(np.int64)
    uniq, first = np.unique(allids, return_index=True)
    met = uniq[np.argsort(first, kind="stable")]
    f_of = freq[met]
    lists = {}
    for f in np.unique(f_of):
        lists[int(f)] = met[f_of == f]
    return FrequencyTable(freq=freq, lists=lists)


def assign_by_frequency(g: StorageGraph) -> IdPermutation:
    table = frequency_table(g)
    once = table.lists.get(1, np.empty(0, np.int64))
    half = (len(once) + 1) // 2
    chunks = [once[:half]]
    for f in sorted(table.lists, reverse=True):
        if f > 1:
            chunks.append(table.lists[f])
    chunks.append(once[half:])
    return _sequential(chunks, g.t_count)


def bfs_order(g: StorageGraph) -> list[int]:
    """Breadth-first node order from all parentless nodes; siblings in creation order."""
    roots = g.roots()
    seen = set(roots)
    queue = deque(roots)
    order = []
    while queue:
        n = queue.popleft()
        order.append(n)
        for c in sorted(g.children(n)):
            if c not in seen:
                seen.add(c)
                queue.append(c)
    return order


def assign_by_bfs(g: StorageGraph, reverse: bool = False) -> IdPermutation:
    order = bfs_order(g)
    if reverse:
        order = order[::-1]
    return _sequential((g.stored(n) for n in order), g.t_count)


def assign(g: StorageGraph, policy, seed: int = 0) -> IdPermutation:
    policy = Policy(policy)
    if policy is Policy.DEFAULT:
        return assign_default(g)
    if policy is Policy.RANDOM:
        return assign_random(g, seed)
    if policy is Policy.SIZE:
        return assign_by_size(g, ascending=False)
    if policy is Policy.SIZE_REV:
        return assign_by_size(g, ascending=True)
    if policy is Policy.FREQUENCY:
        return assign_by_frequency(g)
    if policy is Policy.BFS:
        return assign_by_bfs(g, reverse=False)
    return assign_by_bfs(g, reverse=True)


def apply_permutation(g: StorageGraph, p: IdPermutation) -> StorageGraph:
    """New graph with every stored set (and the dictionary) relabeled through ``p``."""
    if len(p) != g.t_count:
        raise InvalidPermutationError(f"permutation covers {len(p)} ids, graph has {g.t_count}")
    d = g.dictionary.permuted(p) if g.dictionary is not None else None
    return g.relabeled(p.mapping, dictionary=d)

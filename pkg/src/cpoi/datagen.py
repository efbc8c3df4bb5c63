"""Seeded synthetic workloads.

All randomness comes from numpy's PCG64 bit generator (``default_rng(seed)``),
so a (params, seed) pair always yields the same log.

* Dat1: every version copies a random earlier version and then either adds or
  deletes a fixed batch of triples, so it is a strict superset or subset of
  its parent.
* Dat2: like Dat1 with probability ``a``; otherwise one step both adds and
  deletes, which usually breaks inclusion with the parent.
* Dat3: triple frequencies follow a decaying power curve with a floor, and
  each triple is dealt round-robin into consecutive versions.  No version ends
  up contained in another.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .vlog import VersionLog


def round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


@dataclass(frozen=True)
class Dat1Params:
    versions: int = 1000
    avg_size: int = 10000
    delta_frac: float = 0.10
    d: float = 0.7
    reuse_frac: float = 0.25
    triple_bytes: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.versions < 1 or self.avg_size < 1:
            raise ValueError("versions and avg_size must be positive")
        if not 0.0 < self.delta_frac < 1.0:
            raise ValueError("delta_frac must lie in (0, 1)")
        if not 0.0 <= self.d <= 1.0:
            raise ValueError("d is a probability")
        if not 0.0 <= self.reuse_frac <= 1.0:
            raise ValueError("reuse_frac must lie in [0, 1]")

    @property
    def delta_count(self) -> int:
        """Triples changed per step (10% of 10000 gives the 1000 of the defaults)."""
        return max(1, round_half_up(self.delta_frac * self.avg_size))


@dataclass(frozen=True)
class Dat2Params(Dat1Params):
    a: float = 0.3
    x: float | None = None  # added share in mixed steps; None means x = d

    def __post_init__(self):
        super().__post_init__()
        if not 0.0 <= self.a <= 1.0:
            raise ValueError("a is a probability")
        if self.x is not None and not 0.0 <= self.x <= 1.0:
            raise ValueError("x must lie in [0, 1]")

    @property
    def mixed_add_share(self) -> float:
        return self.d if self.x is None else self.x

    @property
    def y(self) -> float:
        return self.delta_frac


@dataclass(frozen=True)
class Dat3Params:
    versions: int = 1000
    t_count: int = 400000
    freq_scale: float = 100230.0
    freq_exp: float = 0.6
    freq_floor: float = 25.0
    triple_bytes: int = 100
    seed: int = 0  # unused; Dat3 is deterministic, kept for a uniform interface

    @classmethod
    def alternate_reading(cls, **kw) -> "Dat3Params":
        """Read the scale constant with a decimal point instead of a thousands separator."""
        return cls(freq_scale=100.23, **kw)


class _Pool:
    """Running id universe for the Dat1/Dat2 generators."""

    def __init__(self):
        self.t = 0

    def fresh(self, k: int) -> np.ndarray:
        out = np.arange(self.t + 1, self.t + k + 1, dtype=np.int64)
        self.t += k
        return out


def _additions(rng, pool: _Pool, parent: np.ndarray, k: int, reuse_frac: float) -> np.ndarray:
    want = round_half_up(reuse_frac * k)
    reused = np.empty(0, dtype=np.int64)
    if want:
        absent = np.setdiff1d(np.arange(1, pool.t + 1, dtype=np.int64), parent, assume_unique=True)
        take = min(want, absent.size)
        if take:
            reused = rng.choice(absent, size=take, replace=False)
    return np.concatenate([reused, pool.fresh(k - reused.size)])


def _deletions(rng, parent: np.ndarray, k: int) -> np.ndarray:
    k = min(k, parent.size - 1)  # never empty a version
    if k <= 0:
        return np.empty(0, dtype=np.int64)
    return rng.choice(parent, size=k, replace=False)


def _generate(p: Dat1Params, a: float, x: float) -> VersionLog:
    rng = np.random.default_rng(p.seed)
    pool = _Pool()
    contents = [pool.fresh(p.avg_size)]
    parents = [None]
    k = p.delta_count
    for i in range(1, p.versions):
        j = int(rng.integers(0, i))
        parent = contents[j]
        pure = rng.random() < a
        if pure:
            if rng.random() < p.d:
                child = np.union1d(parent, _additions(rng, pool, parent, k, p.reuse_frac))
            else:
                child = np.setdiff1d(parent, _deletions(rng, parent, k), assume_unique=True)
        else:
            n_add = round_half_up(x * k)
            gone = _deletions(rng, parent, k - n_add)
            added = _additions(rng, pool, parent, n_add, p.reuse_frac)
            child = np.union1d(np.setdiff1d(parent, gone, assume_unique=True), added)
        contents.append(child)
        parents.append(j)
    log = VersionLog(t_count=pool.t)
    for i, (c, j) in enumerate(zip(contents, parents)):
        log.add(f"v{i + 1}", c, parent=None if j is None else f"v{j + 1}")
    return log


def gen_dat1(p: Dat1Params) -> VersionLog:
    return _generate(p, a=1.0, x=1.0)


def gen_dat2(p: Dat2Params) -> VersionLog:
    return _generate(p, a=p.a, x=p.mixed_add_share)


def dat3_frequencies(p: Dat3Params) -> np.ndarray:
    """Number of versions each triple goes into, indexed by id - 1."""
    t = np.arange(1, p.t_count + 1, dtype=np.float64)
    f = np.floor((p.freq_scale / t) ** p.freq_exp + p.freq_floor + 0.5).astype(np.int64)
    return np.minimum(f, p.versions)


def gen_dat3(p: Dat3Params) -> VersionLog:
    f = dat3_frequencies(p)
    ids = np.repeat(np.arange(1, p.t_count + 1, dtype=np.int64), f)
    # a triple fills consecutive versions and the next one picks up right
    # after, so occurrence k of the flattened stream lands in version k mod V
    ver = np.arange(ids.size, dtype=np.int64) % p.versions
    order = np.argsort(ver, kind="stable")
    bounds = np.searchsorted(ver[order], np.arange(p.versions + 1))
    ids = ids[order]
    log = VersionLog(t_count=p.t_count)
    for v in range(p.versions):
        log.add(f"v{v + 1}", ids[bounds[v]:bounds[v + 1]])
    return log


def triple_frequencies(log: VersionLog) -> np.ndarray:
    """How many versions hold each triple, indexed by id (slot 0 unused)."""
    allids = np.concatenate([r.content for r in log]) if len(log) else np.empty(0, np.int64)
    return np.bincount(allids, minlength=log.t_count + 1)


def power_law_fit(freq: np.ndarray, skip: int = 0) -> tuple[float, float]:
    """Fit log(frequency) against log(rank) and return (slope, R squared).

    ``freq`` is indexed by id; ids ``<= skip`` are left out (the first
    version's triples sit at the head of every generated log).
    """
    f = np.sort(np.asarray(freq[skip + 1:], dtype=np.float64))[::-1]
    f = f[f > 0]
    if f.size < 3:
        return float("nan"), float("nan")
    x = np.log(np.arange(1, f.size + 1))
    y = np.log(f)
    slope, icept = np.polyfit(x, y, 1)
    resid = y - (slope * x + icept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot else 1.0
    return float(slope), r2


def expected_t_dat1(p: Dat1Params) -> float:
    """Expected universe size after all versions, ignoring deletion clamps."""
    return p.avg_size + (p.versions - 1) * p.d * p.delta_count * (1 - p.reuse_frac)

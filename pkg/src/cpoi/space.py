"""Closed-form space accounting for a family of stored id sets.

Sizes are in bits.  ``B`` is the width of a plain (uncompressed) id.  Empty
nodes carry no ids and are left out of every count, |N| included.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codec import uniform_width


class GapsRequiredError(ValueError):
    pass


class UnsortedSetError(ValueError):
    pass


def gaps(n) -> int:
    """Sum of differences between consecutive ids, i.e. last - first."""
    n = np.asarray(n, dtype=np.int64)
    if n.size < 2:
        return 0
    if np.any(np.diff(n) <= 0):
        raise UnsortedSetError("id list must be strictly ascending")
    return int(n[-1] - n[0])


def gaps_by_sum(n) -> int:
    """The same quantity computed the long way, one difference at a time."""
    n = [int(x) for x in n]
    return sum(b - a for a, b in zip(n, n[1:]))


def total_gaps(family) -> int:
    return sum(gaps(n) for n in family)


@dataclass(frozen=True)
class FamilyStats:
    n_count: int
    t_count: int
    sizes: tuple = field(repr=False)
    B: int = 32

    def __post_init__(self):
        if self.B not in (8, 16, 32):
            raise ValueError(f"B must be 8, 16 or 32, got {self.B}")

    @classmethod
    def from_family(cls, family, t_count: int, B: int = 32) -> "FamilyStats":
        sizes = tuple(int(len(n)) for n in family if len(n))
        return cls(n_count=len(sizes), t_count=int(t_count), sizes=sizes, B=B)

    @classmethod
    def from_graph(cls, g, B: int = 32) -> "FamilyStats":
        return cls.from_family(g.stored_family(), g.t_count, B=B)

    @property
    def sum_sizes(self) -> int:
        return sum(self.sizes)

    @property
    def avg_size(self) -> float:
        return self.sum_sizes / self.n_count if self.n_count else 0.0

    @property
    def width(self) -> int:
        """Bits per id under the uniform code."""
        return uniform_width(self.t_count)


def space_poi(stats: FamilyStats) -> int:
    return stats.B * stats.sum_sizes


def space_cpoi(stats: FamilyStats, G: int) -> int:
    if G < 0:
        raise ValueError("Gaps(N) is non-negative")
    return stats.B * stats.n_count + G


def space_cpoi_u(stats: FamilyStats) -> int:
    return stats.sum_sizes * stats.width


def space_unary_best(stats: FamilyStats) -> int:
    """CPOI under unary when every node holds consecutive ids."""
    return stats.B * stats.n_count + stats.sum_sizes - stats.n_count


def bounds_disjoint(stats: FamilyStats) -> tuple[int, int]:
    """Gaps(N) range for pairwise disjoint nodes.

    The lower end is only reached when the nodes cover all of ``1..|T|``.
    """
    n, t = stats.n_count, stats.t_count
    if n > t:
        raise ValueError(f"{n} disjoint non-empty nodes cannot fit in {t} ids")
    return t - n, n * (t - n)


def bounds_overlap(stats: FamilyStats) -> tuple[int, int]:
    n = stats.n_count
    return stats.sum_sizes - n, n * stats.t_count - n


@dataclass
class ConditionReport:
    prop3: bool | None
    prop4: bool
    prop5: bool | None
    eq6: bool
    eq7: bool
    needs_gaps: bool
    G: int | None = None

    @property
    def eq8(self) -> bool:
        # the worst-case-unary-beats-uniform condition under its other label
        return self.eq6

    def implications_hold(self) -> bool:
        ok = True
        if self.prop4 and self.prop3 is not None:
            ok &= self.prop3
        if self.eq6 and self.prop5 is not None:
            ok &= self.prop5
        return bool(ok)

    def rows(self):
        out = []
        for name in ("prop3", "prop4", "prop5", "eq6", "eq7"):
            v = getattr(self, name)
            out.append((name, "n/a" if v is None else str(v).lower()))
        return out

    def as_text(self) -> str:
        w = max(len(k) for k, _ in self.rows())
        lines = [f"{k.ljust(w)}  {v}" for k, v in self.rows()]
        lines.append(f"{'G'.ljust(w)}  {'n/a' if self.G is None else self.G}")
        return "\n".join(lines)

    def as_csv(self) -> str:
        rows = self.rows() + [("G", "" if self.G is None else str(self.G))]
        return "condition,value\n" + "".join(f"{k},{v}\n" for k, v in rows)


def evaluate_conditions(stats: FamilyStats, G: int | None = None, require=()) -> ConditionReport:
    """Check the sufficient conditions for CPOI to beat POI or the uniform code.

    ``require`` names conditions the caller insists on ("prop3", "prop5");
    both need the measured Gaps(N).
    """
    missing = [r for r in require if r in ("prop3", "prop5")]
    if G is None and missing:
        raise GapsRequiredError(f"gaps required to evaluate {', '.join(missing)}")
    B, t, w = stats.B, stats.t_count, stats.width
    sum_minus_one = sum(max(s - 1, 0) for s in stats.sizes)
    prop3 = prop5 = None
    if G is not None:
        prop3 = G < B * sum_minus_one
        prop5 = G <= stats.sum_sizes * w - B * stats.n_count
    # compare in integers: multiply the averaged forms through by |N|
    n = stats.n_count
    s = stats.sum_sizes
    prop4 = n > 0 and B * s > n * (t + B - 1)
    eq6 = n > 0 and s * w >= n * (t + B - 1)
    eq7 = n == 0 or s * (w - 1) <= n * (B - 1)
    return ConditionReport(prop3=prop3, prop4=bool(prop4), prop5=prop5, eq6=bool(eq6),
                           eq7=bool(eq7), needs_gaps=G is None, G=G)

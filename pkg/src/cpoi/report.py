"""Measurement runs and their CSV rows."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import asdict, dataclass, fields

from . import codec
from .assignment import Policy, apply_permutation, assign
from .baselines import (Method, MethodSize, cb_build, cbd_build, graph_size, ic_build,
                        triple_byte_sizes)
from .graph import StorageGraph
from .space import FamilyStats, bounds_overlap, evaluate_conditions, total_gaps
from .vlog import VersionLog, build_from_log


@dataclass
class ReportRow:
    dataset: str
    d: str
    a: str
    method: str
    policy: str
    codec: str
    node_bits: int
    total_bits: int
    dictionary_bits: int
    header_bits: int
    compression_ratio_vs_poi: float
    gaps: int | str
    t_count: int
    n_count: int
    avg_depth: float
    build_seconds: float
    assign_seconds: float
    prop3: str = ""
    prop4: str = ""
    prop5: str = ""
    eq6: str = ""
    eq7: str = ""


COLUMNS = [f.name for f in fields(ReportRow)]
TIMING_COLUMNS = ("build_seconds", "assign_seconds")


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        out = asdict(r)
        out["compression_ratio_vs_poi"] = f"{r.compression_ratio_vs_poi:.4f}"
        out["avg_depth"] = f"{r.avg_depth:.4f}"
        for c in TIMING_COLUMNS:
            out[c] = f"{getattr(r, c):.3f}"
        w.writerow(out)
    return buf.getvalue()


def _method_for_codec(kind: codec.CodecKind) -> Method:
    if kind.name == "fixed32":
        return Method.POI
    if kind.name == "uniform":
        return Method.CPOI_U
    return Method.CPOI


@dataclass
class Workload:
    """A built graph plus the bookkeeping every measurement needs."""

    log: VersionLog
    graph: StorageGraph
    build_seconds: float
    dataset: str = ""
    d: str = ""
    a: str = ""

    @classmethod
    def from_log(cls, log: VersionLog, dataset="", d="", a="", cache_unions=True) -> "Workload":
        t = time.perf_counter()
        g = build_from_log(log, cache_unions=cache_unions)
        return cls(log, g, time.perf_counter() - t, dataset, str(d), str(a))


def _bound_cols(stats, G):
    rep = evaluate_conditions(stats, G)
    return {k: v for k, v in rep.rows()}


def measure(w: Workload, policies=("default",), codecs=("gamma",), B=32, triple_bytes=None,
            bounds=False, seed=0) -> list[ReportRow]:
    """One row per (policy, codec), with node sizes relative to plain POI."""
    sizes = triple_byte_sizes(w.log, triple_bytes)
    g0 = w.graph
    depth = float(g0.depths().mean()) if len(g0) else 0.0
    poi = graph_size(g0, Method.POI, sizes, B=B)
    rows = []
    for pol in policies:
        pol = Policy(pol)
        t = time.perf_counter()
        g = apply_permutation(g0, assign(g0, pol, seed=seed))
        elapsed = time.perf_counter() - t
        family = g.stored_family()
        stats = FamilyStats.from_family(family, g.t_count, B=B)
        G = total_gaps(family)
        lo, hi = bounds_overlap(stats)
        if not lo <= G <= hi:
            raise AssertionError(f"Gaps(N) = {G} outside [{lo}, {hi}]")
        extra = _bound_cols(stats, G) if bounds else {}
        for name in codecs:
            kind = codec.codec_for(name, g.t_count)
            m = _method_for_codec(kind)
            ms = graph_size(g, m, sizes, B=B, kind=kind)
            rows.append(_row(w, ms, pol.value, str(kind), poi, G, stats, depth, elapsed, extra))
    return rows


def _row(w, ms: MethodSize, policy, codec_name, poi: MethodSize, G, stats, depth, assign_s, extra):
    return ReportRow(
        dataset=w.dataset, d=w.d, a=w.a, method=ms.method.value, policy=policy, codec=codec_name,
        node_bits=ms.node_bits, total_bits=ms.total_bits, dictionary_bits=ms.dictionary_bits,
        header_bits=ms.header_bits, compression_ratio_vs_poi=ms.ratio_to(poi), gaps=G,
        t_count=stats.t_count if stats else w.log.t_count, n_count=stats.n_count if stats else len(w.graph),
        avg_depth=depth, build_seconds=w.build_seconds, assign_seconds=assign_s, **extra)


def compare(w: Workload, methods=("ic", "cb", "cbd", "poi", "cpoi", "cpoi-u"), policy="default",
            codec_name="gamma", B=32, triple_bytes=None, bounds=False, seed=0) -> list[ReportRow]:
    """One row per archiving method on the same log."""
    sizes = triple_byte_sizes(w.log, triple_bytes)
    g0 = w.graph
    depth = float(g0.depths().mean()) if len(g0) else 0.0
    poi = graph_size(g0, Method.POI, sizes, B=B)
    t = time.perf_counter()
    g = apply_permutation(g0, assign(g0, policy, seed=seed))
    elapsed = time.perf_counter() - t
    family = g.stored_family()
    stats = FamilyStats.from_family(family, g.t_count, B=B)
    G = total_gaps(family)
    extra = _bound_cols(stats, G) if bounds else {}
    rows = []
    for m in methods:
        m = Method(m)
        if m is Method.IC:
            ms, name, pol = ic_build(w.log).size(sizes), "strings", "-"
        elif m is Method.CB:
            ms, name, pol = cb_build(w.log).size(sizes), "strings", "-"
        elif m is Method.CBD:
            ms, name, pol = cbd_build(w.log).size(sizes, B=B), f"fixed{B}", "-"
        elif m is Method.POI:
            ms, name, pol = graph_size(g, m, sizes, B=B), f"fixed{B}", Policy(policy).value
        elif m is Method.CPOI_U:
            ms = graph_size(g, m, sizes, B=B)
            name, pol = str(codec.uniform(g.t_count)), Policy(policy).value
        else:
            kind = codec.codec_for(codec_name, g.t_count)
            ms, name, pol = graph_size(g, m, sizes, B=B, kind=kind), str(kind), Policy(policy).value
        rows.append(_row(w, ms, pol, name, poi, G, stats, depth, elapsed, extra))
    return rows

"""Acceptance criteria, one test per criterion.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary then lists a
PASS/FAIL line for every criterion.  The full-scale corpora (criteria 6-8, 10)
take several minutes and carry the ``slow`` marker.
"""

import functools
import time

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from cpoi import codec
from cpoi.archive import EncodedArchive
from cpoi.assignment import Policy, apply_permutation, assign, assign_by_bfs, assign_by_frequency
from cpoi.baselines import (Method, adversarial_log, cb_build, cb_size, cbd_build, graph_size,
                            ic_build, ic_size, reconstruct_any, triple_byte_sizes)
from cpoi.graph import StorageGraph
from cpoi.datagen import Dat1Params, Dat2Params, Dat3Params, gen_dat1, gen_dat2, gen_dat3
from cpoi.report import Workload, compare
from cpoi.space import (FamilyStats, bounds_disjoint, bounds_overlap, evaluate_conditions, space_cpoi,
                        space_cpoi_u, space_poi, space_unary_best, total_gaps)
from cpoi.vlog import build_from_log
from conftest import EXAMPLE_VERSIONS, as_sets

KINDS = ("unary", "gamma", "uniform", "fixed32")


def _gamma_oracle(k):
    b = bin(k)[2:]
    return "0" * (len(b) - 1) + b


# -- 1 ---------------------------------------------------------------------------

@pytest.mark.criterion(1)
def test_c01_worked_example(record_property):
    t = time.perf_counter()
    g = StorageGraph()
    for v, ids in EXAMPLE_VERSIONS.items():
        g.insert_version(v, ids)
    fam = as_sets(g.stored_family())
    a1 = g.reconstruct("a1").tolist()
    elapsed = time.perf_counter() - t
    record_property("detail", f"{len(g)} nodes, a1={a1}, {elapsed:.3f}s")
    assert len(g) == 5
    assert fam == as_sets([[1, 2, 3], [4, 5], [6], [1, 2, 7], [4, 8]])
    assert a1 == [1, 2, 3, 4, 5, 6]
    assert elapsed < 1


# -- 2 ---------------------------------------------------------------------------

@pytest.mark.criterion(2)
def test_c02_codec_exactness(record_property):
    t = time.perf_counter()
    ids = [32011, 32013, 32014, 32017]
    e = codec.encode_gapped_list(ids, codec.GAMMA)
    words = [codec.encode_elias_gamma(k) for k in np.diff(ids)]
    total = e.bit_length(codec.GAMMA)
    # the stated total of 41 does not match its own parts: 32 + 3 + 1 + 3 = 39
    record_property("detail", f"codewords {words}, {total} bits (32-bit head + 7); stated total 41")
    assert e.first_id_bits == format(32011, "032b")
    assert words == ["010", "1", "011"]
    assert e.tail_bits == "0101011"
    assert total == 32 + sum(map(len, words)) == 39
    assert codec.decode_gapped_list(e, codec.GAMMA).tolist() == ids

    rng = np.random.default_rng(2)
    vals = rng.integers(1, 2**20 + 1, 10**5)
    bits = codec.encode_stream(vals, codec.GAMMA)
    assert bits == "".join(_gamma_oracle(int(k)) for k in vals)
    assert codec.decode_stream(bits, codec.GAMMA) == vals.tolist()
    sorted_ids = np.unique(vals)
    assert codec.decode_gapped_list(codec.encode_gapped_list(sorted_ids), codec.GAMMA).tolist() == sorted_ids.tolist()
    assert time.perf_counter() - t < 10


# -- 3 ---------------------------------------------------------------------------

EXPECTED_FREQUENCY = {5: 1, 3: 2, 6: 3, 1: 4, 9: 5, 2: 6, 4: 7, 7: 8, 8: 9}
EXPECTED_BFS = {1: 1, 5: 2, 9: 3, 3: 4, 2: 5, 6: 6, 4: 7, 7: 8, 8: 9}


@pytest.mark.criterion(3)
def test_c03_reassignment_example(reassign_graph, record_property):
    g = reassign_graph
    pf, pb = assign_by_frequency(g), assign_by_bfs(g)
    fbits = codec.tail_bits(apply_permutation(g, pf).stored_family(), codec.GAMMA)
    bbits = codec.tail_bits(apply_permutation(g, pb).stored_family(), codec.GAMMA)
    before = codec.tail_bits(g.stored_family(), codec.GAMMA)
    record_property("detail", f"tail bits: default {before}, frequency {fbits}, bfs {bbits} (target 14 each)")
    assert pf.as_dict() == EXPECTED_FREQUENCY
    assert pb.as_dict() == EXPECTED_BFS
    assert fbits == 14
    # the table's BFS mapping gives gaps summing to 14 (unary bits); their gamma codewords total 18
    assert bbits == 14


# -- 4 ---------------------------------------------------------------------------

families = st.integers(1, 500).flatmap(
    lambda t: st.tuples(st.just(t), st.lists(st.sets(st.integers(1, t), min_size=1, max_size=40).map(sorted),
                                             min_size=1, max_size=50)))


@pytest.mark.criterion(4)
def test_c04_bound_soundness(record_property):
    t0 = time.perf_counter()
    seen = {"general": 0, "disjoint": 0}

    @settings(max_examples=1000, deadline=None, derandomize=True, database=None,
              suppress_health_check=list(HealthCheck))
    @given(families, st.sampled_from([8, 16, 32]))
    def general(tf, B):
        t, fam = tf
        seen["general"] += 1
        s = FamilyStats.from_family(fam, t, B=B)
        G = total_gaps(fam)
        lo, hi = bounds_overlap(s)
        assert lo <= G <= hi
        rep = evaluate_conditions(s, G)
        poi, cpoi, cpoi_u = space_poi(s), space_cpoi(s, G), space_cpoi_u(s)
        if rep.prop3:
            assert cpoi < poi
        if rep.prop5 or rep.eq6:
            assert cpoi <= cpoi_u
        if rep.eq7:
            assert cpoi_u <= space_unary_best(s)

    @settings(max_examples=1000, deadline=None, derandomize=True, database=None,
              suppress_health_check=list(HealthCheck))
    @given(st.integers(1, 500), st.integers(1, 50), st.integers(0, 2**32 - 1))
    def disjoint(t, n, seed):
        seen["disjoint"] += 1
        n = min(n, t)
        rng = np.random.default_rng(seed)
        labels = rng.integers(0, n, t)  # a partition of 1..t into n non-empty nodes
        labels[rng.permutation(t)[:n]] = np.arange(n)
        fam = [np.flatnonzero(labels == k) + 1 for k in range(n)]
        s = FamilyStats.from_family(fam, t)
        lo, hi = bounds_disjoint(s)
        assert lo <= total_gaps(fam) <= hi

    general()
    disjoint()
    elapsed = time.perf_counter() - t0
    record_property("detail", f"{seen['general']} general + {seen['disjoint']} disjoint families, {elapsed:.1f}s")
    assert min(seen.values()) >= 1000
    assert elapsed < 60


# -- 5 ---------------------------------------------------------------------------

def _small_logs():
    logs = []
    for i in range(20):
        rng = np.random.default_rng(500 + i)
        versions = int(rng.integers(100, 201))
        kind = i % 3
        if kind == 0:
            log = gen_dat1(Dat1Params(versions=versions, avg_size=300, d=float(rng.uniform(0.5, 0.9)), seed=i))
        elif kind == 1:
            log = gen_dat2(Dat2Params(versions=versions, avg_size=300, d=float(rng.uniform(0.5, 0.9)), seed=i))
        else:
            log = gen_dat3(Dat3Params(versions=versions, t_count=40 * versions, seed=i))
        logs.append(log)
    return logs


@functools.lru_cache(maxsize=1)
def small_logs():
    return tuple(_small_logs())


def _canonical(g):
    """Node contents with their parents' contents, plus the version map, free of node numbering."""
    contents = {n: frozenset(g.content(n).tolist()) for n in g.node_ids}
    edges = frozenset((contents[n], frozenset(contents[p] for p in g.parents(n))) for n in g.node_ids)
    versions = frozenset((v, contents[n]) for v, n in g.version_map.items())
    return edges, versions


@pytest.mark.criterion(5)
def test_c05_oracle_equivalence(record_property):
    t0 = time.perf_counter()
    checked = 0
    for log in small_logs():
        g = build_from_log(log)
        archives = [ic_build(log), cb_build(log), cbd_build(log), g, EncodedArchive.from_graph(g, codec.GAMMA)]
        for rec in log:
            want = rec.content.tolist()
            for a in archives:
                assert reconstruct_any(a, rec.label).tolist() == want
            checked += 1
    log = small_logs()[0]
    ref = _canonical(build_from_log(log))
    rng = np.random.default_rng(5)
    for _ in range(5):
        order = [log.labels[i] for i in rng.permutation(len(log))]
        assert _canonical(build_from_log(log.reordered(order))) == ref
    elapsed = time.perf_counter() - t0
    record_property("detail", f"{checked} versions x 5 methods, 5 shuffled insertions, {elapsed:.1f}s")
    assert elapsed < 120


# -- full-scale corpora ---------------------------------------------------------

FULL = {
    "dat1-0.5": lambda: gen_dat1(Dat1Params(d=0.5, seed=1)),
    "dat1-0.7": lambda: gen_dat1(Dat1Params(d=0.7, seed=1)),
    "dat1-0.9": lambda: gen_dat1(Dat1Params(d=0.9, seed=1)),
    "dat2-0.7": lambda: gen_dat2(Dat2Params(d=0.7, seed=1)),
    "dat3": lambda: gen_dat3(Dat3Params(seed=1)),
}


def _archive_roundtrip(g, log, kinds=("gamma",)):
    """Bit-exact node lists and lossless versions through serialized archives."""
    for name in kinds:
        a = EncodedArchive.from_graph(g, codec.codec_for(name, g.t_count))
        b = EncodedArchive.from_bytes(a.to_bytes())
        if [r.data for r in b.nodes] != [r.data for r in a.nodes]:
            return False
        for s, ref in zip(b.stored_family(), g.stored_family()):
            if not np.array_equal(s, ref):
                return False
        for rec in log:
            if not np.array_equal(b.reconstruct(rec.label), rec.content):
                return False
    return True


@functools.lru_cache(maxsize=None)
def full_summary(name):
    """Everything the criteria need from one corpus; the corpus itself is dropped afterwards."""
    t0 = time.perf_counter()
    log = FULL[name]()
    w = Workload.from_log(log, dataset=name)
    g0 = w.graph
    sizes = triple_byte_sizes(log, 100)
    poi = graph_size(g0, Method.POI, sizes)
    gb = apply_permutation(g0, assign(g0, Policy.BFS))
    gamma = graph_size(gb, Method.CPOI, sizes, kind=codec.GAMMA)
    cpoi_u = graph_size(gb, Method.CPOI_U, sizes)
    rows = {r.method: r for r in compare(w, methods=("ic", "cb", "cpoi"), policy="bfs", triple_bytes=100)}
    out = dict(
        t_count=g0.t_count, nodes=len(g0), edges=g0.edge_count(), avg_depth=float(g0.depths().mean()),
        poi_bits=poi.node_bits, gamma_bits=gamma.node_bits, uniform_bits=cpoi_u.node_bits,
        width=codec.uniform_width(g0.t_count),
        ic_total=rows["ic"].total_bits, cb_total=rows["cb"].total_bits, cpoi_total=rows["cpoi"].total_bits,
        roundtrip=_archive_roundtrip(g0, log),
    )
    out["seconds"] = time.perf_counter() - t0
    return out


def _pct(a, b):
    return 100.0 * a / b


# -- 6 ---------------------------------------------------------------------------

@pytest.mark.slow
@pytest.mark.criterion(6)
@pytest.mark.parametrize("name", ["dat1-0.7", "dat2-0.7"])
def test_c06_dat1_dat2_band(name, record_property):
    s = full_summary(name)
    ratio = _pct(s["gamma_bits"], s["poi_bits"])
    u = _pct(s["uniform_bits"], s["poi_bits"])
    record_property("detail", f"{name}: bfs+gamma {ratio:.2f}%, uniform {u:.2f}% = {s['width']}/32, "
                              f"|T|={s['t_count']}, {s['seconds']:.0f}s")
    assert 5.0 <= ratio <= 15.0
    assert s["uniform_bits"] * 32 == s["poi_bits"] * s["width"]
    assert s["seconds"] <= 600


# -- 7 ---------------------------------------------------------------------------

@pytest.mark.slow
@pytest.mark.criterion(7)
def test_c07_dat3_flat(record_property):
    s = full_summary("dat3")
    ratio = _pct(s["gamma_bits"], s["poi_bits"])
    record_property("detail", f"dat3: bfs+gamma {ratio:.2f}%, {s['edges']} edges, {s['seconds']:.0f}s")
    assert s["edges"] == 0
    assert 2.0 <= ratio <= 6.0
    assert s["seconds"] <= 600


# -- 8 ---------------------------------------------------------------------------

@pytest.mark.slow
@pytest.mark.criterion(8)
@pytest.mark.parametrize("d", ["0.5", "0.7", "0.9"])
def test_c08_total_space(d, record_property):
    s = full_summary(f"dat1-{d}")
    vs_ic = _pct(s["cpoi_total"], s["ic_total"])
    vs_cb = _pct(s["cpoi_total"], s["cb_total"])
    record_property("detail", f"d={d}: cpoi total {vs_ic:.2f}% of IC, {vs_cb:.1f}% of CB")
    assert s["cpoi_total"] <= 0.10 * s["ic_total"]
    assert s["cpoi_total"] < s["cb_total"]


# -- 9 ---------------------------------------------------------------------------

@pytest.mark.criterion(9)
def test_c09_adversarial_cb(record_property):
    log = adversarial_log(rounds=50, size=200)
    ic, cb = ic_size(log), cb_size(log)
    record_property("detail", f"CB/IC stored ids = {cb.id_count}/{ic.id_count} = {cb.id_count / ic.id_count:.2f}")
    assert cb.id_count > ic.id_count


# -- 10 --------------------------------------------------------------------------

@pytest.mark.criterion(10)
def test_c10_archive_small_corpora(record_property):
    ok = 0
    for log in small_logs():
        assert _archive_roundtrip(build_from_log(log), log, KINDS)
        ok += 1
    record_property("detail", f"{ok} small corpora x 4 codecs")


@pytest.mark.slow
@pytest.mark.criterion(10)
@pytest.mark.parametrize("name", ["dat1-0.7", "dat2-0.7", "dat3"])
def test_c10_archive_full_corpora(name, record_property):
    record_property("detail", f"{name} gamma")
    assert full_summary(name)["roundtrip"]

"""Command-line entry point: ``cpoi gen|build|checkout|ingest|measure|compare|bounds``.

Exit codes: 0 success, 1 usage, 2 not found, 3 corrupt or malformed data.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import codec, datagen, vlog
from .archive import ArchiveCorruptError, EncodedArchive, MAGIC
from .assignment import IdPermutation, Policy, apply_permutation, assign
from .dictionary import TripleDictionary
from .graph import UnknownVersionError
from .ingest import IngestError, ingest
from .report import Workload, compare, measure, rows_to_csv
from .space import FamilyStats, evaluate_conditions, total_gaps

EXIT_OK, EXIT_USAGE, EXIT_NOT_FOUND, EXIT_CORRUPT = 0, 1, 2, 3
POLICIES = [p.value for p in Policy]
CODECS = ["gamma", "unary", "uniform", "fixed32"]
METHODS = ["ic", "cb", "cbd", "poi", "cpoi", "cpoi-u"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(choices):
    def parse(s):
        items = [x.strip() for x in s.split(",") if x.strip()]
        bad = [x for x in items if x not in choices]
        if bad or not items:
            raise argparse.ArgumentTypeError(f"choose from {','.join(choices)}")
        return items
    return parse


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_log(path) -> vlog.VersionLog:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(path)
    with open(p, "rb") as f:
        head = f.read(4)
    if head == MAGIC:
        return _log_from_archive(EncodedArchive.read(p))
    return vlog.read(p)


def _log_from_archive(a: EncodedArchive) -> vlog.VersionLog:
    log = vlog.VersionLog(dictionary=a.dictionary, t_count=a.t_count)
    for label, _ in a.versions:
        log.add(label, a.reconstruct(label))
    return log


# -- subcommands --------------------------------------------------------------

def cmd_gen(args):
    if args.dataset in ("dat1", "dat2"):
        if not 0.5 <= args.d <= 0.9 and not args.allow_any_d:
            raise UsageError("--d must lie in [0.5, 0.9]")
        common = dict(versions=args.versions, avg_size=args.avg_size, d=args.d, seed=args.seed)
        try:
            if args.dataset == "dat1":
                log = datagen.gen_dat1(datagen.Dat1Params(**common))
            else:
                log = datagen.gen_dat2(datagen.Dat2Params(a=args.a, x=args.x, **common))
        except ValueError as e:
            raise UsageError(str(e)) from None
    else:
        kw = dict(versions=args.versions, t_count=args.t_count)
        p = datagen.Dat3Params.alternate_reading(**kw) if args.alt_freq_scale else datagen.Dat3Params(**kw)
        log = datagen.gen_dat3(p)
    vlog.write(log, args.out)
    print(f"versions={len(log)} triples={log.t_count}")
    return EXIT_OK


def cmd_build(args):
    log = _load_log(args.input)
    w = Workload.from_log(log, cache_unions=True)
    perm = assign(w.graph, args.policy, seed=args.seed)
    g0 = w.graph
    if g0.dictionary is None and perm != IdPermutation.identity(g0.t_count):
        # id-mode input: keep the original ids recoverable through a dictionary of their decimal strings
        g0.dictionary = TripleDictionary(str(k) for k in range(1, g0.t_count + 1))
    g = apply_permutation(g0, perm)
    kind = codec.codec_for(args.codec, max(g.t_count, 1))
    a = EncodedArchive.from_graph(g, kind)
    a.write(args.out)
    bits = codec.family_bits(g.stored_family(), kind)
    print(f"versions={len(log)} nodes={len(g)} triples={g.t_count} codec={kind} node_bits={bits}")
    return EXIT_OK


def cmd_checkout(args):
    a = EncodedArchive.read(args.archive)
    if args.version not in a.version_map:
        print(f"unknown version {args.version!r}; available: {' '.join(a.labels)}", file=sys.stderr)
        return EXIT_NOT_FOUND
    ids = a.reconstruct(args.version)
    if a.dictionary is not None:
        lines = a.dictionary.strings(ids)
    else:
        lines = [str(k) for k in ids.tolist()]
    _emit("".join(s + "\n" for s in lines), args.out)
    return EXIT_OK


def cmd_ingest(args):
    labels = args.labels.split(",") if args.labels else None
    parents = args.parents.split(",") if args.parents else None
    try:
        log = ingest(args.files, labels=labels, parents=parents)
    except IngestError as e:
        msg = str(e)
        print(msg, file=sys.stderr)
        return EXIT_NOT_FOUND if "cannot read" in msg else EXIT_CORRUPT
    vlog.write(log, args.out)
    print(f"versions={len(log)} triples={log.t_count}")
    return EXIT_OK


def _workload(args):
    log = _load_log(args.input)
    name = args.dataset or Path(args.input).stem
    return Workload.from_log(log, dataset=name, d=args.d_label or "", a=args.a_label or "")


def cmd_measure(args):
    w = _workload(args)
    rows = measure(w, policies=args.policy, codecs=args.codec, triple_bytes=args.triple_bytes,
                   bounds=args.bounds, seed=args.seed, B=args.B)
    _emit(rows_to_csv(rows), args.out)
    return EXIT_OK


def cmd_compare(args):
    w = _workload(args)
    rows = compare(w, methods=args.methods, policy=args.policy, codec_name=args.codec,
                   triple_bytes=args.triple_bytes, bounds=args.bounds, seed=args.seed, B=args.B)
    _emit(rows_to_csv(rows), args.out)
    return EXIT_OK


def cmd_bounds(args):
    log = _load_log(args.input)
    w = Workload.from_log(log)
    g = apply_permutation(w.graph, assign(w.graph, args.policy, seed=args.seed))
    family = g.stored_family()
    stats = FamilyStats.from_family(family, g.t_count, B=args.B)
    rep = evaluate_conditions(stats, total_gaps(family))
    print(rep.as_text())
    print()
    print(rep.as_csv(), end="")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cpoi", description="Versioned triple archives with compressed partial-order indexes.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("gen", help="generate a synthetic version log")
    s.add_argument("--dataset", choices=["dat1", "dat2", "dat3"], required=True)
    s.add_argument("--d", type=float, default=0.7, help="probability of an addition step")
    s.add_argument("--a", type=float, default=0.3, help="dat2: probability of a pure add/delete step")
    s.add_argument("--x", type=float, default=None, help="dat2: added share in mixed steps (default: d)")
    s.add_argument("--versions", type=int, default=1000)
    s.add_argument("--avg-size", type=int, default=10000)
    s.add_argument("--t-count", type=int, default=400000, help="dat3: number of distinct triples")
    s.add_argument("--alt-freq-scale", action="store_true", help="dat3: read the frequency scale as 100.23")
    s.add_argument("--allow-any-d", action="store_true", help=argparse.SUPPRESS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("build", help="build an archive from a version log")
    s.add_argument("--input", required=True)
    s.add_argument("--policy", choices=POLICIES, default="default")
    s.add_argument("--codec", choices=CODECS, default="gamma")
    s.add_argument("--seed", type=int, default=0, help="seed for the random policy")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("checkout", help="write one version's triples, one per line")
    s.add_argument("--archive", required=True)
    s.add_argument("--version", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_checkout)

    s = sub.add_parser("ingest", help="turn N-Triples snapshots into a version log")
    s.add_argument("files", nargs="+")
    s.add_argument("--labels", help="comma-separated version labels (default: file stems)")
    s.add_argument("--parents", help="comma-separated parent labels, '-' for none")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_ingest)

    for name, func, helptext in (("measure", cmd_measure, "node sizes per policy and codec"),
                                 ("compare", cmd_compare, "sizes of every archiving method")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--input", required=True, help="version log or archive")
        s.add_argument("--dataset", help="name for the dataset column (default: file stem)")
        s.add_argument("--d-label", help="value for the d column")
        s.add_argument("--a-label", help="value for the a column")
        s.add_argument("--triple-bytes", type=int, default=None,
                       help="flat bytes per triple (default: dictionary lengths, else 100)")
        s.add_argument("--B", type=int, choices=[8, 16, 32], default=32)
        s.add_argument("--bounds", action="store_true", help="add the analytical condition columns")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--out")
        if name == "measure":
            s.add_argument("--policy", type=_csv_list(POLICIES), default=["default"])
            s.add_argument("--codec", type=_csv_list(CODECS), default=["gamma"])
        else:
            s.add_argument("--methods", type=_csv_list(METHODS), default=METHODS)
            s.add_argument("--policy", choices=POLICIES, default="default")
            s.add_argument("--codec", choices=CODECS, default="gamma")
        s.set_defaults(func=func)

    s = sub.add_parser("bounds", help="evaluate the space conditions for a log or archive")
    s.add_argument("--input", required=True)
    s.add_argument("--policy", choices=POLICIES, default="default")
    s.add_argument("--B", type=int, choices=[8, 16, 32], default=32)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_bounds)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"cpoi: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as e:
        print(f"cpoi: no such file: {e.filename or e}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except UnknownVersionError as e:
        print(f"cpoi: {e}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (ArchiveCorruptError, vlog.VlogParseError, vlog.BrokenChainError) as e:
        print(f"cpoi: {e}", file=sys.stderr)
        return EXIT_CORRUPT


if __name__ == "__main__":
    sys.exit(main())

"""proofminer command line.

    proofminer features LIB [--format text|json]
    proofminer cluster  LIB [--granularity G] [--seed S] [--format text|json] [--timing]
    proofminer suggest  LIB --target NAME --checker-cmd CMD [--budget N] [--timeout SEC]
    proofminer inspect  LIB NAME

Exit codes: 0 ok, 2 bad input or unknown name, 3 internal error,
4 no proof found within the budget, 5 checker infrastructure error.
Set PROOFMINER_LOG (DEBUG, INFO, WARNING, ...) for progress messages on stderr.
"""
import argparse
import csv
import json
import logging
import os
import sys
import time

from . import __version__
from .errors import CheckerFailure, ParseError, ProofMinerError, TargetNotClustered, TypeResolutionError, UnknownLemma
from .features import column_labels, density
from .premiss import CheckerConfig, substitution_pairs, suggest
from .recurrent import recurrent_cluster
from .terms import load_library, resolve_types
from .tree import build_term_tree

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL, EXIT_NO_PROOF, EXIT_CHECKER = 0, 2, 3, 4, 5

log = logging.getLogger("proofminer")


class InputError(Exception):
    """Bad command-line input detected after argument parsing (exit 2)."""


def _setup_logging():
    level = os.environ.get("PROOFMINER_LOG", "WARNING").strip().upper()
    if level.isdigit():
        level = int(level)
    elif level not in logging._nameToLevel:
        level = "WARNING"
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _granularity(text):
    g = int(text)
    if not 1 <= g <= 5:
        raise argparse.ArgumentTypeError(f"granularity must be in 1..5, got {g}")
    return g


def _budget(text):
    b = int(text)
    if b < 1:
        raise argparse.ArgumentTypeError(f"budget must be >= 1, got {b}")
    return b


def _dump(obj, out):
    json.dump(obj, out, indent=2, sort_keys=False)
    out.write("\n")


def _cluster(lib, args):
    typed = resolve_types(lib)
    return recurrent_cluster(typed, g=args.granularity, seed=args.seed)


def cmd_features(args, out):
    lib = load_library(args.library)
    result = _cluster(lib, args)
    dims = result.dims
    vectors = result.vectors
    labels = column_labels(dims) if result.names else []
    dens = density(result.matrices, dims) if result.names else 0.0
    if args.format == "json":
        _dump({
            "granularity": args.granularity,
            "seed": args.seed,
            "dims": list(dims),
            "columns": labels,
            "density": dens,
            "vectors": [{"name": n, "values": [float(x) for x in v]} for n, v in zip(result.names, vectors)],
        }, out)
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["name"] + labels)
        for n, v in zip(result.names, vectors):
            w.writerow([n] + [repr(float(x)) for x in v])
        print(f"density {dens:.6f} ({len(result.names)} objects, dims {dims[0]}x{dims[1]})", file=sys.stderr)
    return EXIT_OK


def cmd_cluster(args, out):
    lib = load_library(args.library)
    t0 = time.perf_counter()
    result = _cluster(lib, args)
    wall = time.perf_counter() - t0
    print(f"clustered {len(result.names)} objects into {result.model.k} clusters in {wall:.3f}s",
          file=sys.stderr)
    report = result.to_json()
    if args.timing:
        report["wall_time_s"] = round(wall, 6)
    if args.format == "json":
        _dump(report, out)
    else:
        out.write(f"objects {report['objects']}  k {report['k']}  g {report['granularity']}  "
                  f"seed {report['seed']}  dims {report['dims'][0]}x{report['dims'][1]}\n")
        for c in report["clusters"]:
            members = ", ".join(f"{m['name']} ({m['proximity']:.3f})" for m in c["members"])
            out.write(f"cluster {c['id']}: {members}\n")
        if args.timing:
            out.write(f"wall time {wall:.3f}s\n")
    return EXIT_OK


def cmd_suggest(args, out):
    if not args.target:
        raise InputError("suggest needs --target")
    if not args.checker_cmd:
        raise InputError("suggest needs --checker-cmd")
    lib = load_library(args.library)
    if args.target not in lib.names:
        raise InputError(f"unknown target {args.target!r}")
    result = _cluster(lib, args)
    checker = CheckerConfig(args.checker_cmd, timeout=args.timeout, budget=args.budget, workers=args.workers)
    report = suggest(args.target, lib, result.model, checker, os.path.abspath(args.library))
    if args.format == "json":
        _dump(report.to_json(), out)
    else:
        out.write(f"target {report.target}: {report.tried} checker call(s), budget {report.budget}\n")
        if report.accepted is None:
            out.write("no proof found\n")
        else:
            acc = report.accepted
            out.write(f"accepted (rank {acc.rank}, from {acc.source}): {acc.script.render()}\n")
            for a, b in substitution_pairs(acc):
                out.write(f"  {a} -> {b}\n")
    return EXIT_OK if report.accepted is not None else EXIT_NO_PROOF


def cmd_inspect(args, out):
    name = args.name or args.target
    if not name:
        raise InputError("inspect needs an object name")
    typed = resolve_types(load_library(args.library))
    match = [o for o in typed.objects if o.name == name]
    if not match:
        raise InputError(f"unknown object {name!r}")
    tree = build_term_tree(match[0].term)
    if args.format == "json":
        _dump({"name": name, "nodes": [
            {"id": n.id, "depth": n.depth, "level_index": n.level_index,
             "parent": None if n.parent is None else tree.nodes[n.parent].level_index,
             "label": n.label, "gallina": n.is_gallina}
            for level in tree.levels() for n in level]}, out)
    else:
        out.write(tree.dump() + "\n")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("library", help="library JSON file")
    common.add_argument("--granularity", "-g", type=_granularity, default=3, help="1 (coarse) .. 5 (fine), default 3")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--target", help="target lemma or object name")

    p = argparse.ArgumentParser(prog="proofminer", description="Mine proof libraries by structural clustering.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("features", parents=[common], help="feature vectors as CSV (text) or JSON")
    f.set_defaults(func=cmd_features)

    c = sub.add_parser("cluster", parents=[common], help="recurrent clustering report")
    c.add_argument("--timing", action="store_true", help="include wall time in the report")
    c.set_defaults(func=cmd_cluster)

    s = sub.add_parser("suggest", parents=[common], help="search for a proof of --target")
    s.add_argument("--checker-cmd", help="checker command, e.g. 'proofminer-stub-checker rules.json'")
    s.add_argument("--budget", type=_budget, default=1000)
    s.add_argument("--timeout", type=float, default=30.0, help="seconds per checker call")
    s.add_argument("--workers", type=int, default=1, help="parallel checker calls (default 1)")
    s.set_defaults(func=cmd_suggest)

    i = sub.add_parser("inspect", parents=[common], help="term tree dump of one object")
    i.add_argument("name", nargs="?", help="object name (or use --target)")
    i.set_defaults(func=cmd_inspect)
    return p


def main(argv=None, out=None):
    _setup_logging()
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ParseError, TypeResolutionError, InputError, OSError, UnknownLemma, TargetNotClustered) as exc:
        print(f"proofminer: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CheckerFailure as exc:
        print(f"proofminer: checker error: {exc}", file=sys.stderr)
        return EXIT_CHECKER
    except ProofMinerError as exc:
        print(f"proofminer: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - every other failure maps to exit 3
        log.debug("unexpected failure", exc_info=True)
        print(f"proofminer: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

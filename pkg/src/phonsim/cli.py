"""Command-line front end.

The pipeline is staged through files so queries never recompute scores:

    phonsim ingest corpus.tsv --limit 10000 --out data/fr
    phonsim compute data/fr.words --workers 8 --out data/fr
    phonsim hist data/fr --normalized
    phonsim ego data/fr --word emporter --depth 3 --min 40 --max 49 --out ego
    phonsim path data/fr --from trottoir --to falaise --min 40 --max 100
    phonsim info --nodes 600000
    phonsim serve --store data/fr

Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .aligner import ScoringScheme, load_scheme_file
from .corpus import (
    DEFAULT_DIGRAPHS,
    PhonemeInventory,
    build_inventory,
    encode_word,
    load_corpus,
    load_words,
    save_words,
)
from .engine import DEFAULT_CHUNK_SIZE, ComputePlan, compute_all_pairs, preflight_range_check
from .errors import DataError
from .graph import ego_network, export_csv, export_gexf, filter_view, shortest_path
from .store import MANIFEST_SUFFIX, PAYLOAD_SUFFIX, EdgeStore, EdgeStoreWriter, histogram
from .triangle import nodes_for_edge_budget, num_edges

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default; route through our own codes
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="phonsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="tokenize and encode a corpus TSV")
    p.add_argument("corpus", help="TSV file: word<TAB>ipa<TAB>frequency")
    p.add_argument("--limit", type=int, default=None, help="keep the N most frequent words")
    p.add_argument("--out", required=True, help="output prefix for .words and .inventory")
    p.add_argument(
        "--digraphs",
        default=",".join(sorted(DEFAULT_DIGRAPHS)),
        help="comma-separated multi-symbol phonemes (default: %(default)s)",
    )
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("compute", help="score all word pairs into an edge store")
    p.add_argument("words_file", help=".words file from ingest")
    p.add_argument("--match", type=int, default=1)
    p.add_argument("--mismatch", type=int, default=-1)
    p.add_argument("--gap", type=int, default=-1)
    p.add_argument("--scheme", default=None, help="scheme file (overrides match/mismatch/gap)")
    p.add_argument("--inventory", default=None, help="inventory file for scheme overrides")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--chunk-size", type=int, default=DEFAULT_CHUNK_SIZE)
    p.add_argument("--out", required=True, help="output prefix for the edge store")
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("hist", help="edge-weight histogram")
    p.add_argument("store", help="edge store prefix or payload path")
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--words", default=None, help=".words file (default: next to the store)")
    p.add_argument("--force", action="store_true", help="read an incomplete store")
    p.set_defaults(func=_cmd_hist)

    p = sub.add_parser("ego", help="export the ego-network of a word")
    p.add_argument("store")
    p.add_argument("--word", required=True)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--min", type=float, required=True, dest="lo")
    p.add_argument("--max", type=float, required=True, dest="hi")
    p.add_argument("--words", default=None)
    p.add_argument("--out", required=True, help="prefix for .nodes.csv / .edges.csv")
    p.add_argument("--gexf", action="store_true", help="also write a .gexf file")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=_cmd_ego)

    p = sub.add_parser("path", help="shortest hop chain between two words")
    p.add_argument("store")
    p.add_argument("--from", required=True, dest="from_word")
    p.add_argument("--to", required=True, dest="to_word")
    p.add_argument("--min", type=float, required=True, dest="lo")
    p.add_argument("--max", type=float, required=True, dest="hi")
    p.add_argument("--words", default=None)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=_cmd_path)

    p = sub.add_parser("info", help="graph geometry or store manifest")
    p.add_argument("store", nargs="?", default=None, help="edge store to describe")
    p.add_argument("--nodes", type=int, default=None, help="edge count for n nodes")
    p.add_argument("--budget", type=int, default=None, help="max nodes for a byte budget")
    p.set_defaults(func=_cmd_info)

    p = sub.add_parser("serve", help="run the HTTP query service")
    p.add_argument("--store", default=None, help="edge store prefix to serve")
    p.add_argument("--words", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def _digraph_set(value: str) -> frozenset[str]:
    return frozenset(d for d in value.split(",") if d)


def _store_prefix(store_arg: str) -> str:
    if store_arg.endswith(PAYLOAD_SUFFIX):
        return store_arg[: -len(PAYLOAD_SUFFIX)]
    if store_arg.endswith(MANIFEST_SUFFIX):
        return store_arg[: -len(MANIFEST_SUFFIX)]
    return store_arg


def _words_for_store(args) -> list:
    if args.words:
        return load_words(args.words)
    path = _store_prefix(args.store) + ".words"
    if not os.path.exists(path):
        raise DataError(f"cannot find word list {path!r}; pass --words")
    return load_words(path)


def _cmd_ingest(args) -> int:
    if args.limit is not None and args.limit <= 0:
        raise _UsageError("limit must be positive")
    digraphs = _digraph_set(args.digraphs)
    rows = load_corpus(args.corpus, args.limit)
    inventory = build_inventory(rows, digraphs)
    words = [encode_word(row, inventory, digraphs) for row in rows]
    save_words(f"{args.out}.words", words)
    inventory.save(f"{args.out}.inventory")
    print(f"ingested {len(words)} words, {len(inventory)} phonemes")
    print(f"wrote {args.out}.words and {args.out}.inventory")
    return EXIT_OK


def _cmd_compute(args) -> int:
    if args.workers < 1:
        raise _UsageError("workers must be positive")
    if args.chunk_size < 1:
        raise _UsageError("chunk-size must be positive")
    words = load_words(args.words_file)
    if args.scheme:
        inventory_path = args.inventory
        if inventory_path is None and args.words_file.endswith(".words"):
            guess = args.words_file[: -len(".words")] + ".inventory"
            if os.path.exists(guess):
                inventory_path = guess
        inventory = PhonemeInventory.load(inventory_path) if inventory_path else None
        scheme = load_scheme_file(args.scheme, inventory)
    else:
        scheme = ScoringScheme(args.match, args.mismatch, args.gap)
    preflight_range_check(words, scheme)  # fail before creating any output file
    plan = ComputePlan(
        n=len(words), chunk_size=args.chunk_size, worker_count=args.workers, scheme=scheme
    )
    writer = EdgeStoreWriter(args.out, words, scheme)
    stats = compute_all_pairs(words, scheme, writer, plan)
    manifest = writer.finalize()
    print(f"computed {stats.edges_written} edges in {stats.wall_time:.2f} s")
    print(
        f"scores: min {stats.min_score}, max {stats.max_score}, "
        f"mean {stats.mean_score:.4f}"
    )
    print(f"payload digest {manifest.payload_digest}")
    print(f"wrote {writer.payload_path}")
    return EXIT_OK


def _cmd_hist(args) -> int:
    with EdgeStore(args.store, force=args.force) as store:
        words = _words_for_store(args)
        h = histogram(store, words, normalized=args.normalized)
    kind = "normalized" if h.normalized else "raw"
    print(f"{kind} edge-weight histogram (width-1 bins)")
    print("bin\tcount")
    for left, count in zip(h.bin_edges, h.counts):
        print(f"{left}\t{count}")
    print(f"total\t{h.total}")
    print(f"mean\t{h.mean:.4f}")
    print(f"min\t{h.min}")
    print(f"max\t{h.max}")
    return EXIT_OK


def _cmd_ego(args) -> int:
    if args.depth < 1:
        raise _UsageError("depth must be >= 1")
    if args.lo > args.hi:
        raise _UsageError("--min must not exceed --max")
    with EdgeStore(args.store, force=args.force) as store:
        words = _words_for_store(args)
        view = filter_view(store, words, args.lo, args.hi)
    sub = ego_network(view, args.word, args.depth)
    nodes_path = f"{args.out}.nodes.csv"
    edges_path = f"{args.out}.edges.csv"
    export_csv(sub, nodes_path, edges_path)
    print(f"ego network of {args.word!r}: {sub.node_count} nodes, {sub.edge_count} edges")
    print(f"wrote {nodes_path} and {edges_path}")
    if args.gexf:
        gexf_path = f"{args.out}.gexf"
        export_gexf(sub, gexf_path)
        print(f"wrote {gexf_path}")
    return EXIT_OK


def _cmd_path(args) -> int:
    if args.lo > args.hi:
        raise _UsageError("--min must not exceed --max")
    with EdgeStore(args.store, force=args.force) as store:
        words = _words_for_store(args)
        view = filter_view(store, words, args.lo, args.hi)
    path = shortest_path(view, args.from_word, args.to_word)
    if path is None:
        print(
            f"no path between {args.from_word!r} and {args.to_word!r} "
            f"in range [{args.lo:g}, {args.hi:g}]"
        )
        return EXIT_OK
    chain = " -> ".join(view.labels[i] for i in path.nodes)
    print(f"{chain}  ({path.hops} hops)")
    return EXIT_OK


def _cmd_info(args) -> int:
    given = [x for x in (args.store, args.nodes, args.budget) if x is not None]
    if len(given) != 1:
        raise _UsageError("pass exactly one of: a store path, --nodes, or --budget")
    if args.nodes is not None:
        if args.nodes < 1:
            raise _UsageError("--nodes must be >= 1")
        edges = num_edges(args.nodes)
        print(f"nodes\t{args.nodes}")
        print(f"edges\t{edges}")
        print(f"payload_bytes\t{edges}")
        print(f"payload_gib\t{edges / 2**30:.2f}")
        return EXIT_OK
    if args.budget is not None:
        if args.budget < 1:
            raise _UsageError("--budget must be >= 1")
        n = nodes_for_edge_budget(args.budget)
        edges = num_edges(n)
        print(f"budget_bytes\t{args.budget}")
        print(f"max_nodes\t{n}")
        print(f"edges_at_max\t{edges}")
        return EXIT_OK
    with EdgeStore(args.store, force=True) as store:
        m = store.manifest
    for key in (
        "format_version",
        "n",
        "num_edges",
        "match",
        "mismatch",
        "gap",
        "scheme_hash",
        "words_digest",
        "payload_digest",
        "complete",
    ):
        value = getattr(m, key)
        if isinstance(value, bool):
            value = "true" if value else "false"
        print(f"{key}\t{value}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(store_prefix=args.store, words_path=args.words)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

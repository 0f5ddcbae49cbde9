"""
Command-line interface

Subcommands:
    crpq eval GRAPH QUERY [--engine optimal|baseline|oracle] [--out PATH] [--parallel]
    crpq analyze QUERY [--machine]
    crpq bench [--family star|random] [--n 2^10..2^13] [--engines optimal,baseline] [--reps 3] [--out PATH]
    crpq gen --family star|random --n N [--seed S] --out PATH

Exit codes: 0 success, 1 parse or parameter error, 2 cyclic query, 3 resource guard.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, TextIO

from .bench import FAMILIES, parse_sizes, run_bench, slopes, write_csv
from .config import ConfigurationError, get_config
from .errors import CrpqError, CyclicQueryError, ResourceGuardError
from .graph import gen_random, gen_star_instance, load_graph, write_graph
from .planner import Engine, evaluate
from .query import STAR_QUERY, check_acyclic, parse_query
from .width import fn_fhtw, predicted_cost

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_CYCLIC = 2
EXIT_GUARD = 3


def _read_query(path: str, compact: bool):
    return parse_query(Path(path).read_text(encoding='utf-8'), compact=compact)


def _open_out(path: Optional[str]) -> TextIO:
    if path is None or path == '-':
        return sys.stdout
    return open(path, 'w', encoding='utf-8', newline='')


def cmd_eval(args) -> int:
    with open(args.graph, encoding='utf-8') as stream:
        graph = load_graph(stream)
    query = _read_query(args.query, args.compact)
    report = evaluate(query, graph, engine=args.engine, parallel=args.parallel or None)
    out = _open_out(args.out)
    try:
        for row in report.named_rows(graph.names):
            out.write("\t".join(row) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"{report.out} rows  {report.summary()}", file=sys.stderr)
    return EXIT_OK


def cmd_analyze(args) -> int:
    query = _read_query(args.query, args.compact)
    verdict = check_acyclic(query)
    if not verdict.accepted:
        if args.machine:
            print(f"acyclic=0 reason={verdict.reason}")
        else:
            print(f"acyclic:     no ({verdict.message})")
        return EXIT_CYCLIC
    report = fn_fhtw(query)
    cost = None
    if args.graph_size is not None and args.output_size is not None:
        cost = predicted_cost(args.graph_size, args.output_size, report.fn_fhtw)
    if args.machine:
        line = f"acyclic=1 {report.to_machine()}"
        print(line if cost is None else f"{line} predicted_cost={cost:.0f}")
    else:
        print("acyclic:     yes")
        print(report.to_text())
        if cost is not None:
            print(f"cost:        {cost:.0f}  (N={args.graph_size}, OUT={args.output_size})")
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = parse_sizes(args.n)
    engines = [Engine(e.strip()).value for e in args.engines.split(',') if e.strip()]
    records = run_bench(args.family, sizes, engines, args.reps, seed=args.seed)
    out = _open_out(args.out)
    try:
        write_csv(records, out)
    finally:
        if out is not sys.stdout:
            out.close()
    for engine, slope in sorted(slopes(records).items()):
        print(f"slope {engine}={slope:.3f}", file=sys.stderr)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.family == 'star':
        graph = gen_star_instance(args.n)
    else:
        edges = args.edges if args.edges is not None else 4 * args.n
        graph = gen_random(args.n, edges, args.labels, args.seed)
    out = Path(args.out)
    with open(out, 'w', encoding='utf-8', newline='') as stream:
        write_graph(graph, stream)
    if args.family == 'star':
        out.with_suffix('.crpq').write_text(STAR_QUERY, encoding='utf-8')
    print(f"wrote {out}: {graph.num_vertices} vertices, {graph.num_edges} edges", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='crpq', description="Evaluate acyclic conjunctive regular path queries")
    parser.add_argument('-v', '--verbose', action='store_true', help='debug logging on standard error')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('eval', help='evaluate a query on a graph')
    p.add_argument('graph', help='graph TSV file')
    p.add_argument('query', help='query file')
    p.add_argument('--engine', choices=[e.value for e in Engine], default=Engine.OPTIMAL.value)
    p.add_argument('--out', help='result TSV (default: standard output)')
    p.add_argument('--parallel', action='store_true', help='evaluate components on a thread pool')
    p.add_argument('--compact', action='store_true', help='single-character labels in regexes')
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser('analyze', help='report acyclicity and fn-fhtw of a query')
    p.add_argument('query', help='query file')
    p.add_argument('--machine', action='store_true', help='single key=value line')
    p.add_argument('--graph-size', type=int, help='N for the predicted cost')
    p.add_argument('--output-size', type=int, help='OUT for the predicted cost')
    p.add_argument('--compact', action='store_true', help='single-character labels in regexes')
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser('bench', help='scaling benchmark, CSV output')
    p.add_argument('--family', default='star', help=f"instance family ({', '.join(FAMILIES)})")
    p.add_argument('--n', default='2^8..2^11', help='sizes: 16,32 or 2^a..2^b (the baseline tops out near 2^11)')
    p.add_argument('--engines', default='optimal,baseline', help='comma-separated engines')
    p.add_argument('--reps', type=int, default=3)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--out', help='CSV file (default: standard output)')
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser('gen', help='generate an instance')
    p.add_argument('--family', choices=FAMILIES, default='star')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--edges', type=int, help='random family: edge samples (default 4n)')
    p.add_argument('--labels', type=int, default=3, help='random family: alphabet size')
    p.add_argument('--out', required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def _configure_logging(verbose: bool):
    config = get_config()
    level = 'DEBUG' if verbose else config.log_level
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        get_config().validate()
    except ConfigurationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_PARSE
    _configure_logging(args.verbose)
    try:
        return args.func(args)
    except CyclicQueryError as e:
        print(f"cyclic query: {e.verdict.message}", file=sys.stderr)
        return EXIT_CYCLIC
    except ResourceGuardError as e:
        print(f"resource guard: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (CrpqError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == '__main__':
    sys.exit(main())

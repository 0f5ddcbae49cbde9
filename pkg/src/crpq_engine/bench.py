"""
Scaling benchmark

Runs every engine on a family of generated instances and records one
BenchRecord per (n, engine, repetition). Timing starts after the instance is
built. The log-log slope of median wall time against n summarizes how each
engine scales; it is only reported for engines with at least three repetitions
per size.

Families:
    star    gen_star_instance(n) with the star query (one answer, Θ(n²) a-paths)
    random  gen_random(n, 4n, 3, seed) with a fixed two-free-variable query
"""
import csv
import logging
import re
import time
from collections import defaultdict
from typing import Dict, Iterable, List, Sequence, TextIO, Tuple

import numpy as np

from .graph import LabeledGraph, gen_random, gen_star_instance
from .models import BenchRecord
from .planner import Engine, evaluate
from .query import STAR_QUERY, Crpq, parse_query

logger = logging.getLogger(__name__)

FAMILIES = ('star', 'random')
MIN_SLOPE_REPS = 3

RANDOM_QUERY = (
    "free: X Y\n"
    "atom: X 'a b*' Z\n"
    "atom: Z c Y\n"
)

_RANGE = re.compile(r'^2\^(\d+)\.\.2\^(\d+)$')
_POWER = re.compile(r'^2\^(\d+)$')


def parse_sizes(text: str) -> List[int]:
    """
    Parse instance sizes: comma-separated integers, `2^k`, or `2^a..2^b` ranges.

    Raises:
        ValueError: On anything else
    """
    sizes: List[int] = []
    for part in text.split(','):
        part = part.strip()
        if not part:
            continue
        span = _RANGE.match(part)
        power = _POWER.match(part)
        if span:
            low, high = int(span.group(1)), int(span.group(2))
            if low > high:
                raise ValueError(f"empty size range {part}")
            sizes.extend(2 ** k for k in range(low, high + 1))
        elif power:
            sizes.append(2 ** int(power.group(1)))
        else:
            sizes.append(int(part))
    if not sizes:
        raise ValueError(f"no sizes in {text!r}")
    return sizes


def instance_for(family: str, n: int, seed: int = 0) -> Tuple[LabeledGraph, Crpq]:
    if family == 'star':
        return gen_star_instance(n), parse_query(STAR_QUERY)
    if family == 'random':
        return gen_random(n, 4 * n, 3, seed), parse_query(RANDOM_QUERY)
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


def run_bench(family: str, sizes: Sequence[int], engines: Sequence[str], reps: int,
              seed: int = 0) -> List[BenchRecord]:
    """Run every (size, engine, repetition) sequentially"""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    records = []
    for n in sizes:
        graph, query = instance_for(family, n, seed)
        logger.info(f"{family} n={n}: N={graph.size}")
        for name in engines:
            engine = Engine(name)
            for rep in range(reps):
                start = time.perf_counter_ns()
                report = evaluate(query, graph, engine=engine, parallel=False)
                wall = time.perf_counter_ns() - start
                records.append(BenchRecord(
                    n=n,
                    engine=engine.value,
                    rep=rep,
                    wall_ns=wall,
                    N=graph.size,
                    OUT=report.out,
                    OUT_a=report.out_a,
                    rounds=len(report.rounds) if engine is Engine.OPTIMAL else None,
                ))
                logger.debug(f"{engine.value} n={n} rep={rep}: {wall / 1e6:.1f} ms")
    return records


def write_csv(records: Iterable[BenchRecord], stream: TextIO):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(BenchRecord.FIELDS)
    for record in records:
        writer.writerow(record.to_row())


def slopes(records: Iterable[BenchRecord]) -> Dict[str, float]:
    """Least-squares slope of log(median wall time) against log(n), per engine"""
    times: Dict[str, Dict[int, List[int]]] = defaultdict(lambda: defaultdict(list))
    for r in records:
        times[r.engine][r.n].append(r.wall_ns)
    result = {}
    for engine, by_n in times.items():
        if any(len(walls) < MIN_SLOPE_REPS for walls in by_n.values()):
            logger.warning(f"Skipping slope for {engine}: fewer than {MIN_SLOPE_REPS} repetitions per size")
            continue
        if len(by_n) < 2:
            logger.warning(f"Skipping slope for {engine}: needs at least two sizes")
            continue
        ns = sorted(by_n)
        medians = [np.median(by_n[n]) for n in ns]
        slope, _ = np.polyfit(np.log(ns), np.log(medians), 1)
        result[engine] = float(slope)
    return result

"""
Degree-capped restrictions of RPQ relations

A restriction of R(X, Z) at cap Δ keeps, for every key value x, either all
Z-tuples of x (when x has at most Δ of them) or exactly Δ of them. Tables are
built by propagating tuples backwards through the product of the graph and the
atom's NFA, with every product vertex holding at most Δ distinct tuples.

Worklists are FIFO and lists keep insertion order, so identical inputs always
give identical tables.
"""
import logging
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Deque, Dict, List, Optional, Sequence, Set, Tuple

from .config import get_config
from .errors import CapMismatchError, TailOverlapError
from .graph import GraphView, VertexSet, product
from .regex import RegexAst, compile_nfa, invert_regex, render

logger = logging.getLogger(__name__)

Row = Tuple[int, ...]
Node = Tuple[int, int]


@dataclass(frozen=True)
class CapPair:
    delta: int
    delta_prime: int

    def __post_init__(self):
        if self.delta < 1 or self.delta_prime != self.delta + 1:
            raise ValueError(f"invalid cap pair ({self.delta}, {self.delta_prime})")

    @classmethod
    def of(cls, delta: int) -> 'CapPair':
        return cls(delta, delta + 1)


@dataclass
class RestrictionTable:
    """Key variable, ordered tail variables, cap, and key -> list of tail tuples"""
    key: str
    tail: Tuple[str, ...]
    cap: int
    entries: Dict[int, List[Row]] = field(default_factory=dict)

    def degree(self, x: int) -> int:
        return len(self.entries.get(x, ()))

    def keys(self) -> List[int]:
        return sorted(self.entries)

    def num_tuples(self) -> int:
        return sum(len(rows) for rows in self.entries.values())

    def to_tsv(self, names: Sequence[str]) -> str:
        lines = [f"# {self.key}\t{','.join(self.tail)}\tcap={self.cap}"]
        for x in self.keys():
            for row in self.entries[x]:
                lines.append(f"{names[x]}\t{','.join(names[z] for z in row)}")
        return "\n".join(lines)


def degree(t: RestrictionTable, x: int) -> int:
    return t.degree(x)


def _dump(table: RestrictionTable, g: GraphView):
    if get_config().dump_tables:
        logger.debug(f"Restriction table\n{table.to_tsv(g.names)}")


def propagate(regex: RegexAst, g: GraphView, s: RestrictionTable, cap: int, key: str,
              inverted: bool = False, counters: Optional[Counter] = None) -> RestrictionTable:
    """
    Restrict regex(key, Y) ∧ S(Y, tail) at cap, given a restriction S of the same cap.

    Args:
        regex: Atom regex, read from key to Y
        g: Graph the atom ranges over
        s: Restriction keyed by Y
        cap: Δ; must equal s.cap
        key: Name of the new key variable
        inverted: The atom was declared Y -> key; evaluate its inverse on the transpose
        counters: Optional work counters ('pushes', 'tables')

    Raises:
        CapMismatchError: If s was built under a different cap
    """
    if s.cap != cap:
        raise CapMismatchError(f"table keyed {s.key} has cap {s.cap}, expected {cap}")
    if inverted:
        regex = invert_regex(regex)
        g = g.transpose()
    nfa = compile_nfa(regex)
    pg = product(g, nfa)

    lists: Dict[Node, List[Row]] = {}
    members: Dict[Node, Set[Row]] = {}
    queue: Deque[Tuple[Node, Row]] = deque()
    for y in s.keys():
        for qf in sorted(nfa.accepting):
            node = (y, qf)
            rows = s.entries[y][:cap]
            lists[node] = list(rows)
            members[node] = set(rows)
            queue.extend((node, row) for row in rows)

    pushes = len(queue)
    while queue:
        node, row = queue.popleft()
        for pred in pg.predecessors(node):
            seen = members.get(pred)
            if seen is None:
                seen = members[pred] = set()
                lists[pred] = []
            if row in seen or len(seen) >= cap:
                continue
            seen.add(row)
            lists[pred].append(row)
            queue.append((pred, row))
            pushes += 1

    entries = {}
    for x in range(g.num_vertices):
        rows = lists.get((x, nfa.initial))
        if rows:
            entries[x] = rows
    table = RestrictionTable(key, s.tail, cap, entries)
    if counters is not None:
        counters['pushes'] += pushes
        counters['tables'] += 1
    logger.debug(f"Propagated {s.key}->{key} through {render(regex)}: {len(entries)} keys, {pushes} pushes")
    _dump(table, g)
    return table


def restrict_single_rpq(regex: RegexAst, g: GraphView, cap: int, key: str, tail: str,
                        inverted: bool = False, counters: Optional[Counter] = None) -> RestrictionTable:
    """Restriction at cap of the RPQ relation regex(key, tail)"""
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    identity = RestrictionTable(tail, (tail,), cap, {v: [(v,)] for v in range(g.num_vertices)})
    return propagate(regex, g, identity, cap, key, inverted=inverted, counters=counters)


def compose(a: RestrictionTable, b: RestrictionTable, cap: int) -> RestrictionTable:
    """
    Restriction of A(X, tail_a) ∧ B(X, tail_b): per shared key, the row-major
    cross product of both lists truncated to cap.

    Raises:
        CapMismatchError: If either table has a different cap
        TailOverlapError: If the tails share a variable
    """
    if a.cap != cap or b.cap != cap:
        raise CapMismatchError(f"cannot compose caps {a.cap} and {b.cap} at {cap}")
    if a.key != b.key:
        raise ValueError(f"tables keyed {a.key} and {b.key} do not share a key")
    overlap = set(a.tail) & set(b.tail)
    if overlap:
        raise TailOverlapError(f"tails share {', '.join(sorted(overlap))}")
    entries: Dict[int, List[Row]] = {}
    for x in a.keys():
        right = b.entries.get(x)
        if not right:
            continue
        rows: List[Row] = []
        for left in a.entries[x]:
            for other in right:
                rows.append(left + other)
                if len(rows) == cap:
                    break
            if len(rows) == cap:
                break
        entries[x] = rows
    return RestrictionTable(a.key, a.tail + b.tail, cap, entries)


def rpq_sources(regex: RegexAst, g: GraphView, inverted: bool = False) -> VertexSet:
    """
    Vertices x with a path x -> y labeled in the language, for some y.

    A backward search of the product graph from every accepting-state vertex,
    linear in the product size.
    """
    if inverted:
        regex = invert_regex(regex)
        g = g.transpose()
    nfa = compile_nfa(regex)
    pg = product(g, nfa)
    seen: Set[Node] = {(v, qf) for v in range(g.num_vertices) for qf in nfa.accepting}
    queue: Deque[Node] = deque(seen)
    while queue:
        for pred in pg.predecessors(queue.popleft()):
            if pred not in seen:
                seen.add(pred)
                queue.append(pred)
    sources = VertexSet.of(v for v, q in seen if q == nfa.initial)
    logger.debug(f"{render(regex)} has {len(sources)} sources")
    return sources

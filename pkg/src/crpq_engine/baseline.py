"""
Materialization baseline and brute-force oracle

The baseline turns every RPQ atom into a full binary relation (a forward
breadth-first search of the product graph from every source vertex) and joins
the relations with Yannakakis. Its cost is governed by the largest
materialized atom (OUT_a), not by the output size.

The oracle materializes the same relations and joins them in a plain
left-deep order, projecting away variables as soon as no remaining atom needs
them. It accepts cyclic queries and stops at CRPQ_ORACLE_ROW_LIMIT rows.
"""
import logging
from collections import Counter, deque
from dataclasses import dataclass
from typing import List, Optional, Set, Tuple

from .config import get_config
from .errors import ResourceGuardError
from .graph import GraphView, product
from .join import BindingRelation, yannakakis_join
from .models import EvalReport
from .query import Atom, Crpq, require_acyclic
from .regex import RegexAst, compile_nfa, render

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MaterializedRpq:
    relation: BindingRelation

    @property
    def size(self) -> int:
        return len(self.relation)


def materialize_rpq(regex: RegexAst, g: GraphView, src: str = 'X', dst: str = 'Y',
                    row_limit: Optional[int] = None) -> MaterializedRpq:
    """
    Every (x, y) joined by a path labeled in the language.

    Raises:
        ResourceGuardError: As soon as more than row_limit pairs are found
    """
    nfa = compile_nfa(regex)
    pg = product(g, nfa)
    rows: Set[Tuple[int, int]] = set()
    for x in range(g.num_vertices):
        start = (x, nfa.initial)
        seen = {start}
        queue = deque(seen)
        while queue:
            node = queue.popleft()
            if node[1] in nfa.accepting:
                rows.add((x, node[0]))
            for nxt in pg.successors(node):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        if row_limit is not None and len(rows) > row_limit:
            raise ResourceGuardError(f"{render(regex)} has more than {row_limit} pairs")
    logger.debug(f"Materialized {render(regex)}: {len(rows)} pairs")
    return MaterializedRpq(BindingRelation((src, dst), frozenset(rows)))


def _atom_relation(atom: Atom, g: GraphView, row_limit: Optional[int] = None) -> BindingRelation:
    if atom.is_self_loop:
        pairs = materialize_rpq(atom.regex, g, 'src', 'dst', row_limit).relation.rows
        return BindingRelation((atom.src,), frozenset((x,) for x, y in pairs if x == y))
    return materialize_rpq(atom.regex, g, atom.src, atom.dst, row_limit).relation


def oracle_eval(q: Crpq, g: GraphView, row_limit: Optional[int] = None) -> BindingRelation:
    """
    Answer any query by full materialization and join.

    Raises:
        ResourceGuardError: If a relation or intermediate result exceeds row_limit
    """
    limit = row_limit if row_limit is not None else get_config().oracle_row_limit
    relations: List[BindingRelation] = []
    for atom in q.atoms:
        relations.append(_atom_relation(atom, g, limit))

    remaining = list(range(len(relations)))
    result = BindingRelation.unit()
    while remaining:
        connected = [i for i in remaining if set(relations[i].schema) & set(result.schema)]
        pick = connected[0] if connected else remaining[0]
        remaining.remove(pick)
        result = result.join(relations[pick])
        if len(result) > limit:
            raise ResourceGuardError(f"intermediate join result of {len(result)} rows over the limit {limit}")
        needed = set(q.free) | {x for i in remaining for x in relations[i].schema}
        result = result.project([x for x in result.schema if x in needed])
        if not result.rows:
            break
    if not result.rows:
        return BindingRelation(q.free)
    return result.project(q.free)


def baseline_eval(q: Crpq, g: GraphView) -> EvalReport:
    """
    Materialize every atom, then run Yannakakis with projection.

    Raises:
        CyclicQueryError: If q is cyclic
    """
    require_acyclic(q)
    relations = [_atom_relation(atom, g) for atom in q.atoms]
    out_a = max((len(r) for r in relations), default=0)
    logger.info(f"Baseline materialized {len(relations)} atoms, OUT_a={out_a}")
    relation = yannakakis_join(relations, output=q.free)
    return EvalReport(
        engine='baseline',
        relation=relation,
        out_a=out_a,
        counters=Counter(materialized=sum(len(r) for r in relations)),
        graph_size=g.size,
    )

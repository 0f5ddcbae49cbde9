"""
Query planning and execution

The optimal engine answers an acyclic CRPQ in four steps:

1. Boolean guards: connected components without free variables must be
   satisfiable, otherwise the answer is empty.
2. Variable filters: for every free variable X, the values of X that extend to
   a full match, computed in linear time by repeated leaf elimination.
3. Components: the query is split at its free variables; each component gets
   the filters of its free variables and is rewritten into a free-leaf query
   (or answered directly when it keeps at most one free variable).
4. The component answers are joined with Yannakakis and projected onto the
   declared free variables.

Usage:
    from crpq_engine import evaluate, Engine

    report = evaluate(query, graph, engine=Engine.OPTIMAL)
    for row in report.named_rows(graph.names):
        print("\\t".join(row))
"""
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

import networkx as nx

from .baseline import baseline_eval, oracle_eval
from .config import get_config
from .filters import QueryInstance
from .freeleaf import eval_freeleaf
from .graph import GraphView, VertexSet
from .join import BindingRelation, gyo_join_forest, yannakakis_join
from .models import ComponentStats, EvalReport, RoundStats
from .query import Crpq, bound_connected_components, connected_components, require_acyclic
from .regex import FreshLabels

logger = logging.getLogger(__name__)


class Engine(str, Enum):
    OPTIMAL = 'optimal'
    BASELINE = 'baseline'
    ORACLE = 'oracle'


@dataclass
class ExecutionPlan:
    query: Crpq
    guards_ok: bool
    filters: Dict[str, VertexSet]
    components: List[Crpq]
    join_forest: nx.DiGraph = field(default_factory=nx.DiGraph)

    @property
    def satisfiable(self) -> bool:
        return self.guards_ok and all(len(s) > 0 for s in self.filters.values())


def eval_single_free(q: Crpq, g: GraphView, fresh: Optional[FreshLabels] = None) -> BindingRelation:
    """
    Answer a connected query with at most one free variable in linear time.

    Non-free leaves are eliminated one by one, each turning into a filter on its
    neighbour, until the free variable (or, for a Boolean query, the last
    variable) is left with its candidate values.

    Raises:
        ValueError: If q has more than one free variable
    """
    return _eval_single_free(QueryInstance(q, g, fresh or FreshLabels()))


def _eval_single_free(instance: QueryInstance) -> BindingRelation:
    q = instance.query
    if len(q.free) > 1:
        raise ValueError(f"expected at most one free variable, got {', '.join(q.free)}")
    target = q.free[:1]
    values = VertexSet()
    while instance.query.atoms:
        leaf = instance.leaves(exclude=target)[0]
        instance, _, isolated = instance.eliminate_leaf(leaf)
        if isolated is not None:
            values = isolated
            if instance.query.atoms:
                raise ValueError("eval_single_free needs a connected query")
    if not target:
        return BindingRelation.unit() if len(values) else BindingRelation(())
    return BindingRelation.unary(target[0], values)


def guards_hold(q: Crpq, g: GraphView) -> bool:
    """Every connected component without free variables is satisfiable"""
    for component in connected_components(q):
        if not component.free and not eval_single_free(component, g):
            logger.info(f"Boolean guard {component} fails")
            return False
    return True


def compute_variable_filters(q: Crpq, g: GraphView, check_guards: bool = True) -> Dict[str, VertexSet]:
    """
    For every free variable X, the X-values of the full answer.

    If any guard or any filter comes out empty, every filter is empty.
    """
    if check_guards and not guards_hold(q, g):
        return {x: VertexSet() for x in q.free}
    fresh = FreshLabels("x.")
    by_var = {x: c for c in connected_components(q) for x in c.free}
    filters: Dict[str, VertexSet] = {}
    for x in q.free:
        relation = eval_single_free(by_var[x].with_free((x,)), g, fresh)
        filters[x] = VertexSet.of(row[0] for row in relation.rows)
        logger.debug(f"Filter {x}: {len(filters[x])} values")
    if any(not s for s in filters.values()):
        return {x: VertexSet() for x in q.free}
    return filters


@dataclass
class FreeLeafInstance:
    """to_free_leaf result: a free-leaf instance, or the answer itself for degenerate components"""
    instance: Optional[QueryInstance] = None
    relation: Optional[BindingRelation] = None


def to_free_leaf(component: Crpq, filters: Dict[str, VertexSet], g: GraphView,
                 fresh: Optional[FreshLabels] = None) -> FreeLeafInstance:
    """
    Rewrite a bound-connected component into a free-leaf query over a filtered graph.

    Each free variable's filter is merged into its atom, then non-free leaves are
    eliminated. Components with at most one free variable are answered directly.
    """
    instance = QueryInstance(component, g, fresh or FreshLabels())
    for x in component.free:
        instance = instance.filter_var(x, filters[x])
    if len(component.free) <= 1:
        return FreeLeafInstance(relation=_eval_single_free(instance))
    while True:
        leaves = instance.leaves(exclude=component.free)
        if not leaves:
            break
        instance, _, isolated = instance.eliminate_leaf(leaves[0])
        if isolated is not None:
            raise ValueError(f"{component} lost a free variable during leaf elimination")
    return FreeLeafInstance(instance=instance)


def _eval_component(index: int, component: Crpq, filters: Dict[str, VertexSet],
                    g: GraphView) -> Tuple[BindingRelation, ComponentStats, List[RoundStats], Counter]:
    namespace = f"c{index}."
    counters: Counter = Counter()
    rewritten = to_free_leaf(component, filters, g, FreshLabels(namespace))
    if rewritten.relation is not None:
        relation, rounds, mode = rewritten.relation, [], 'single'
    else:
        report = eval_freeleaf(rewritten.instance.query, rewritten.instance.graph,
                               namespace=namespace, counters=counters)
        relation, rounds, mode = report.relation, report.rounds, 'freeleaf'
    stats = ComponentStats(index=index, free=component.free, atoms=len(component.atoms),
                           mode=mode, rows=len(relation), rounds=len(rounds))
    logger.info(f"Component {index} ({', '.join(component.free)}): {mode}, {len(relation)} rows")
    return relation, stats, rounds, counters


def build_execution_plan(q: Crpq, g: GraphView) -> ExecutionPlan:
    """
    Raises:
        CyclicQueryError: If q is cyclic
    """
    require_acyclic(q)
    guards_ok = guards_hold(q, g)
    if guards_ok:
        filters = compute_variable_filters(q, g, check_guards=False)
    else:
        filters = {x: VertexSet() for x in q.free}
    components = [c for c in bound_connected_components(q) if c.free]
    forest = gyo_join_forest([c.free for c in components])
    return ExecutionPlan(q, guards_ok, filters, components, forest)


def evaluate(q: Crpq, g: GraphView, engine: Union[Engine, str] = Engine.OPTIMAL,
             parallel: Optional[bool] = None) -> EvalReport:
    """
    Answer q on g.

    Args:
        q: The query
        g: The graph
        engine: optimal, baseline or oracle; all three return the same answer
        parallel: Evaluate components on a thread pool (default: CRPQ_PARALLEL)

    Raises:
        CyclicQueryError: Cyclic query under optimal or baseline
        ResourceGuardError: Oracle over its row limit
    """
    engine = Engine(engine)
    if engine is Engine.ORACLE:
        return EvalReport(engine=engine.value, relation=oracle_eval(q, g), graph_size=g.size)
    if engine is Engine.BASELINE:
        return baseline_eval(q, g)

    plan = build_execution_plan(q, g)
    if not q.free:
        relation = BindingRelation.unit() if plan.guards_ok else BindingRelation(())
        return EvalReport(engine=engine.value, relation=relation, graph_size=g.size)
    if not plan.satisfiable:
        logger.info("A variable filter is empty; the answer is empty")
        return EvalReport(engine=engine.value, relation=BindingRelation(q.free), graph_size=g.size)

    if parallel is None:
        parallel = get_config().parallel
    jobs = list(enumerate(plan.components))
    if parallel and len(jobs) > 1:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda job: _eval_component(job[0], job[1], plan.filters, g), jobs))
    else:
        results = [_eval_component(i, c, plan.filters, g) for i, c in jobs]

    counters: Counter = Counter()
    rounds: List[RoundStats] = []
    for _, _, component_rounds, component_counters in results:
        rounds.extend(component_rounds)
        counters.update(component_counters)
    relation = yannakakis_join([r[0] for r in results], output=q.free, forest=plan.join_forest)
    logger.info(f"Joined {len(results)} components into {len(relation)} rows")
    return EvalReport(
        engine=engine.value,
        relation=relation,
        rounds=rounds,
        components=[r[1] for r in results],
        counters=counters,
        graph_size=g.size,
    )

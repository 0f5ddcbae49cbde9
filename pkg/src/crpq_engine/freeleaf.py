"""
Output-sensitive evaluation of free-leaf queries

A free-leaf query is a tree whose leaves are exactly its free variables. With a
guess for the output size and Δ the least integer with Δ^ℓ ≥ guess^(ℓ-1), each
free variable W in turn becomes the root of a bottom-up pass that builds a
restriction of the whole query keyed by W at cap Δ+1. Keys with at most Δ
tuples are light and their tuples are complete, so they are emitted; the
remaining heavy keys become a filter on W for the following passes. When the
last pass still finds heavy keys the guess doubles and the round restarts from
the original graph.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from math import prod
from typing import Dict, List, Optional, Set, Tuple

from .config import get_config
from .errors import InvariantViolation, NotFreeLeafError
from .filters import QueryInstance
from .graph import GraphView, VertexSet
from .join import BindingRelation, Row
from .models import EvalReport, PassStats, RoundStats
from .query import Crpq, OrientedTree, is_free_leaf, reroot
from .regex import FreshLabels
from .restriction import CapPair, RestrictionTable, compose, propagate, restrict_single_rpq

logger = logging.getLogger(__name__)


@dataclass
class RootedPass:
    """The query tree rooted at one free variable, with each subtree's free variables in tail order"""
    root: str
    tree: OrientedTree
    subtree_free: Dict[str, Tuple[str, ...]]


@dataclass
class FreeLeafPlan:
    query: Crpq
    order: Tuple[str, ...]
    passes: Dict[str, RootedPass]

    @property
    def ell(self) -> int:
        return len(self.order)


def build_plan(q: Crpq) -> FreeLeafPlan:
    """
    Raises:
        NotFreeLeafError: If q is not free-leaf or has fewer than two free variables
    """
    if not is_free_leaf(q):
        raise NotFreeLeafError(f"free variables ({', '.join(q.free)}) are not exactly the leaves of {q}")
    if len(q.free) < 2:
        raise NotFreeLeafError("free-leaf evaluation needs at least two free variables")
    passes = {}
    for root in q.free:
        tree = reroot(q, root)
        subtree_free: Dict[str, Tuple[str, ...]] = {}
        for var in tree.postorder():
            children = tree.children[var]
            if var != root and not children:
                subtree_free[var] = (var,)
            else:
                subtree_free[var] = tuple(x for c in children for x in subtree_free[c])
        passes[root] = RootedPass(root, tree, subtree_free)
    return FreeLeafPlan(q, tuple(q.free), passes)


def delta_for(guess: int, ell: int) -> int:
    """Least d >= 1 with d^ell >= guess^(ell - 1)"""
    bound = guess ** (ell - 1)
    d = max(1, int(round(guess ** ((ell - 1) / ell))))
    while d ** ell < bound:
        d += 1
    while d > 1 and (d - 1) ** ell >= bound:
        d -= 1
    return d


def run_pass(plan: FreeLeafPlan, root: str, cap: int, instance: QueryInstance,
             counters: Optional[Counter] = None) -> Tuple[Set[Row], VertexSet, PassStats]:
    """
    Restrict the query rooted at root at cap and split its keys.

    Returns:
        Light output tuples (in declared free order), the heavy root values, and pass statistics
    """
    rooted = plan.passes[root]
    tree = rooted.tree
    query, graph = instance.query, instance.graph
    stats = PassStats(root=root, delta_prime=cap, heavy=0, emitted=0)

    tables: Dict[str, RestrictionTable] = {}
    for var in tree.postorder():
        if var == root:
            continue
        parent = tree.parent[var]
        index, inverted = tree.edge[var]
        regex = query.atoms[index].regex
        children = tree.children[var]
        if not children:
            table = restrict_single_rpq(regex, graph, cap, key=parent, tail=var,
                                        inverted=inverted, counters=counters)
            stats.base += 1
        else:
            table = tables.pop(children[0])
            for child in children[1:]:
                table = compose(table, tables.pop(child), cap)
                stats.composed += 1
            table = propagate(regex, graph, table, cap, key=parent, inverted=inverted, counters=counters)
            stats.propagated += 1
        tables[var] = table

    top = tables[tree.children[root][0]]
    positions = {x: i for i, x in enumerate(top.tail)}
    order = [positions.get(x) for x in plan.query.free]
    light: Set[Row] = set()
    heavy = []
    for x in top.keys():
        rows = top.entries[x]
        if len(rows) < cap:
            for row in rows:
                light.add(tuple(x if i is None else row[i] for i in order))
        else:
            heavy.append(x)
    stats.heavy = len(heavy)
    logger.debug(f"Pass {root} at cap {cap}: {len(top.entries)} keys, {len(heavy)} heavy, {len(light)} light tuples")
    return light, VertexSet.of(heavy), stats


def eval_freeleaf(q: Crpq, g: GraphView, namespace: str = "",
                  counters: Optional[Counter] = None) -> EvalReport:
    """
    Evaluate a free-leaf query with at least two free variables.

    Args:
        q: Free-leaf query
        g: Graph (may already carry filter self-loops)
        namespace: Prefix for fresh filter labels, distinct from any already in g

    Raises:
        NotFreeLeafError: For unsuitable queries (route those through the planner)
    """
    plan = build_plan(q)
    counters = counters if counters is not None else Counter()
    debug_assert = get_config().debug_assert
    rounds: List[RoundStats] = []
    guess = 1
    while True:
        caps = CapPair.of(delta_for(guess, plan.ell))
        round_stats = RoundStats(guess=guess, delta=caps.delta)
        rounds.append(round_stats)
        instance = QueryInstance(q, g, FreshLabels(f"{namespace}r{len(rounds)}."))
        emitted: Set[Row] = set()
        heavy_sizes: List[int] = []
        logger.info(f"Round {len(rounds)}: guess={guess} delta={caps.delta}")

        for i, w in enumerate(plan.order):
            light, heavy, stats = run_pass(plan, w, caps.delta_prime, instance, counters)
            stats.emitted = len(light - emitted)
            emitted |= light
            round_stats.passes.append(stats)
            if not heavy:
                round_stats.success = True
                break
            if debug_assert and i == plan.ell - 1 and prod(heavy_sizes) <= caps.delta:
                raise InvariantViolation(
                    f"last pass {w} found {len(heavy)} heavy keys although earlier filters allow "
                    f"only {prod(heavy_sizes)} <= {caps.delta} combinations")
            heavy_sizes.append(len(heavy))
            if i == plan.ell - 1:
                break
            (index,) = instance.query.incident(w)
            instance = instance.merge_filter(index, w, heavy)

        if round_stats.success:
            break
        guess *= 2

    counters['rounds'] += len(rounds)
    logger.info(f"Free-leaf evaluation finished after {len(rounds)} rounds with {len(emitted)} tuples")
    return EvalReport(
        engine='optimal',
        relation=BindingRelation(q.free, frozenset(emitted)),
        rounds=rounds,
        counters=counters,
        graph_size=g.size,
    )

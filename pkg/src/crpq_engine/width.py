"""
Free-connex width of acyclic queries

For an acyclic CRPQ the free-connex fractional hypertree width has a closed
form over bound-connected components: a component whose single atom joins two
free variables needs one edge to cover them, any other component needs one edge
per free variable. The exhaustive edge-cover search is an independent check of
that formula on small query graphs.
"""
import itertools
import logging
from typing import Iterable

import networkx as nx

from .config import get_config
from .errors import InstanceTooLargeError, UncoverableTargetError
from .join import is_alpha_acyclic
from .models import ComponentWidth, WidthReport
from .query import Crpq, bound_connected_components, is_trivial, require_acyclic

logger = logging.getLogger(__name__)


def is_single_edge(component: Crpq) -> bool:
    if len(component.atoms) != 1:
        return False
    atom = component.atoms[0]
    return atom.src != atom.dst and {atom.src, atom.dst} <= set(component.free)


def rho_star_free(component: Crpq) -> int:
    """
    Edge cover number of a bound-connected component's free variables.

    Raises:
        ValueError: If the component splits further at its free variables
    """
    if len(bound_connected_components(component)) != 1:
        raise ValueError(f"{component} is not bound-connected")
    if is_single_edge(component):
        return 1
    return len(component.free)


def is_free_connex(q: Crpq) -> bool:
    """Atoms plus one hyperedge over the free variables form an acyclic hypergraph"""
    schemas = [(a.src, a.dst) for a in q.atoms] + [tuple(q.free)]
    return is_alpha_acyclic(schemas)


def fn_fhtw(q: Crpq) -> WidthReport:
    """
    Raises:
        CyclicQueryError: The closed form only holds for acyclic queries
    """
    require_acyclic(q)
    components = []
    for i, component in enumerate(bound_connected_components(q)):
        components.append(ComponentWidth(
            index=i,
            free=component.free,
            atoms=len(component.atoms),
            rho_star=rho_star_free(component),
            single_edge=is_single_edge(component),
        ))
    width = max([1] + [c.rho_star for c in components])
    report = WidthReport(fn_fhtw=width, components=components, trivial=is_trivial(q), free_connex=is_free_connex(q))
    logger.info(f"fn-fhtw={width} over {len(components)} bound-connected components")
    return report


def brute_force_edge_cover(g: nx.MultiGraph, target: Iterable[str]) -> int:
    """
    Minimum number of query-graph edges covering every target variable.

    Raises:
        InstanceTooLargeError: Above CRPQ_EDGE_COVER_MAX_EDGES edges
        UncoverableTargetError: If a target variable has no incident edge
    """
    target = set(target)
    edges = [(u, v) for u, v, _ in g.edges(keys=True)]
    limit = get_config().edge_cover_max_edges
    if len(edges) > limit:
        raise InstanceTooLargeError(f"{len(edges)} edges exceed the edge-cover search limit {limit}")
    touched = {x for e in edges for x in e}
    missing = target - touched
    if missing:
        raise UncoverableTargetError(f"no edge covers {', '.join(sorted(missing))}")
    for size in range(len(edges) + 1):
        for chosen in itertools.combinations(edges, size):
            if target <= {x for e in chosen for x in e}:
                return size
    raise UncoverableTargetError("no cover found")


def predicted_cost(n: int, out: int, width: int) -> float:
    """N + N·OUT^(1 - 1/max(width, 2)) + OUT"""
    return n + n * out ** (1 - 1 / max(width, 2)) + out

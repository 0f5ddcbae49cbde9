"""
Relations over query variables and acyclic joins

BindingRelation is a deduplicated set of vertex-id rows over an ordered schema.
Join forests come from GYO elimination over the relation schemas; the Yannakakis
algorithm then runs a full semijoin reduction followed by a bottom-up join that
projects away variables no longer needed.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .errors import JoinTreeError

logger = logging.getLogger(__name__)

Row = Tuple[int, ...]


@dataclass(frozen=True)
class BindingRelation:
    schema: Tuple[str, ...]
    rows: FrozenSet[Row] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, 'schema', tuple(self.schema))
        object.__setattr__(self, 'rows', frozenset(self.rows))
        if len(set(self.schema)) != len(self.schema):
            raise ValueError(f"duplicate variable in schema {self.schema}")

    @classmethod
    def unit(cls) -> 'BindingRelation':
        """0-ary relation holding the empty row (true)"""
        return cls((), frozenset(((),)))

    @classmethod
    def unary(cls, var: str, values: Iterable[int]) -> 'BindingRelation':
        return cls((var,), frozenset((v,) for v in values))

    def __len__(self) -> int:
        return len(self.rows)

    def _positions(self, variables: Sequence[str]) -> List[int]:
        return [self.schema.index(x) for x in variables]

    def project(self, variables: Sequence[str]) -> 'BindingRelation':
        positions = self._positions(variables)
        return BindingRelation(tuple(variables), frozenset(tuple(row[i] for i in positions) for row in self.rows))

    def semijoin(self, other: 'BindingRelation') -> 'BindingRelation':
        shared = [x for x in self.schema if x in other.schema]
        if not shared:
            return self if other.rows else BindingRelation(self.schema)
        keys = {tuple(row[i] for i in other._positions(shared)) for row in other.rows}
        mine = self._positions(shared)
        return BindingRelation(self.schema, frozenset(
            row for row in self.rows if tuple(row[i] for i in mine) in keys))

    def join(self, other: 'BindingRelation') -> 'BindingRelation':
        """Natural join; the schema is self's followed by other's new variables"""
        shared = [x for x in self.schema if x in other.schema]
        extra = [x for x in other.schema if x not in self.schema]
        theirs = other._positions(shared)
        extra_pos = other._positions(extra)
        index: Dict[Row, List[Row]] = defaultdict(list)
        for row in other.rows:
            index[tuple(row[i] for i in theirs)].append(tuple(row[i] for i in extra_pos))
        mine = self._positions(shared)
        rows = set()
        for row in self.rows:
            for tail in index.get(tuple(row[i] for i in mine), ()):
                rows.add(row + tail)
        return BindingRelation(self.schema + tuple(extra), frozenset(rows))

    def sorted_rows(self) -> List[Row]:
        return sorted(self.rows)


def gyo_join_forest(schemas: Sequence[Sequence[str]]) -> nx.DiGraph:
    """
    Build a join forest by GYO elimination.

    Returns a directed forest over schema indexes with edges parent -> child.
    A schema sharing no variable with the remaining ones becomes a root.

    Raises:
        JoinTreeError: If the schema hypergraph is not alpha-acyclic
    """
    sets = [frozenset(s) for s in schemas]
    forest = nx.DiGraph()
    forest.add_nodes_from(range(len(sets)))
    remaining: Set[int] = set(range(len(sets)))
    while len(remaining) > 1:
        for i in sorted(remaining):
            others = sorted(remaining - {i})
            shared = {x for x in sets[i] if any(x in sets[j] for j in others)}
            if not shared:
                remaining.discard(i)
                break
            witness = next((j for j in others if shared <= sets[j]), None)
            if witness is not None:
                forest.add_edge(witness, i)
                remaining.discard(i)
                break
        else:
            raise JoinTreeError(f"schemas {[tuple(schemas[i]) for i in sorted(remaining)]} admit no join tree")
    return forest


def is_alpha_acyclic(schemas: Sequence[Sequence[str]]) -> bool:
    try:
        gyo_join_forest(schemas)
    except JoinTreeError:
        return False
    return True


def _roots(forest: nx.DiGraph) -> List[int]:
    return sorted(n for n in forest.nodes if forest.in_degree(n) == 0)


def yannakakis_join(relations: Sequence[BindingRelation],
                    output: Optional[Sequence[str]] = None,
                    forest: Optional[nx.DiGraph] = None) -> BindingRelation:
    """
    Join acyclic relations and project onto output.

    Args:
        relations: Relations whose schemas form an alpha-acyclic hypergraph
        output: Output variables in order; defaults to every variable in order
            of first appearance
        forest: A join forest over the relation indexes, as built by
            gyo_join_forest; built here when omitted

    Raises:
        JoinTreeError: If the schemas admit no join tree
        ValueError: If the given forest does not match the relations
    """
    if output is None:
        seen: Dict[str, None] = {}
        for r in relations:
            for x in r.schema:
                seen.setdefault(x)
        output = tuple(seen)
    output = tuple(output)
    if not relations:
        return BindingRelation.unit().project(()) if not output else BindingRelation(output)

    if forest is None:
        forest = gyo_join_forest([r.schema for r in relations])
    elif set(forest.nodes) != set(range(len(relations))):
        raise ValueError(f"join forest over {forest.number_of_nodes()} nodes for {len(relations)} relations")
    rels = list(relations)
    roots = _roots(forest)

    # full reducer: leaves to root, then root to leaves
    for root in roots:
        for node in nx.dfs_postorder_nodes(forest, root):
            for child in sorted(forest.successors(node)):
                rels[node] = rels[node].semijoin(rels[child])
        for node in nx.dfs_preorder_nodes(forest, root):
            for child in sorted(forest.successors(node)):
                rels[child] = rels[child].semijoin(rels[node])
    if any(not r.rows for r in rels):
        logger.debug("Semijoin reduction emptied a relation")
        return BindingRelation(output)

    wanted = set(output)
    result = BindingRelation.unit()
    for root in roots:
        joined: Dict[int, BindingRelation] = {}
        for node in nx.dfs_postorder_nodes(forest, root):
            current = rels[node]
            for child in sorted(forest.successors(node)):
                current = current.join(joined.pop(child))
            parents = list(forest.predecessors(node))
            keep = wanted | (set(rels[parents[0]].schema) if parents else set())
            joined[node] = current.project([x for x in current.schema if x in keep])
        result = result.join(joined[root])
    logger.debug(f"Joined {len(relations)} relations into {len(result)} rows")
    return result.project(output)

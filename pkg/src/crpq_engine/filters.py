"""
Unary filters merged into RPQ atoms

A set S of allowed values for a variable X is folded into an atom touching X by
putting a fresh self-loop label on every vertex of S and appending that label
to the atom's regex on X's side. Eliminating a non-free leaf variable turns its
atom into such a filter on the neighbouring variable.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from .graph import GraphView, VertexSet, add_filter_selfloops
from .query import Atom, Crpq
from .regex import FreshLabels, Side, concat_symbol
from .restriction import rpq_sources

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QueryInstance:
    """A query together with the graph view its atoms are evaluated on"""
    query: Crpq
    graph: GraphView
    fresh: FreshLabels

    def merge_filter(self, atom_index: int, var: str, vertices: VertexSet) -> 'QueryInstance':
        atom = self.query.atoms[atom_index]
        label = self.fresh.next()
        side = Side.SUFFIX if var == atom.dst else Side.PREFIX
        regex = concat_symbol(atom.regex, side, label)
        graph = add_filter_selfloops(self.graph, vertices, label)
        logger.debug(f"Filter on {var} ({len(vertices)} values) merged into atom {atom_index} as {side.value} {label}")
        return QueryInstance(self.query.replace_atom(atom_index, Atom(atom.src, regex, atom.dst)), graph, self.fresh)

    def filter_var(self, var: str, vertices: VertexSet) -> 'QueryInstance':
        """Merge a filter into the first atom incident to var"""
        return self.merge_filter(self.query.incident(var)[0], var, vertices)

    def leaves(self, exclude: Tuple[str, ...] = ()) -> Tuple[str, ...]:
        """Degree-one variables in first-appearance order"""
        return tuple(x for x in self.query.vars
                     if x not in exclude and len(self.query.incident(x)) == 1)

    def eliminate_leaf(self, leaf: str) -> Tuple['QueryInstance', str, Optional[VertexSet]]:
        """
        Remove a leaf variable and its atom.

        The values of the neighbour P that reach some vertex through the atom
        become a filter on P. Returns the new instance, P, and the filter itself
        when P was left without atoms.
        """
        (index,) = self.query.incident(leaf)
        atom = self.query.atoms[index]
        neighbour = atom.other(leaf)
        sources = rpq_sources(atom.regex, self.graph, inverted=(atom.src == leaf))
        rest = QueryInstance(self.query.without_atom(index), self.graph, self.fresh)
        logger.debug(f"Eliminated leaf {leaf}: {len(sources)} candidate values for {neighbour}")
        if not rest.query.incident(neighbour):
            return rest, neighbour, sources
        return rest.filter_var(neighbour, sources), neighbour, None

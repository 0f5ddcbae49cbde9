"""
Conjunctive regular path queries

A query is a conjunction of binary atoms `regex(src, dst)` plus an ordered list
of free (output) variables. This module parses the query file format, builds the
undirected query multigraph, and derives the structural views the evaluators
work with: acyclicity verdicts, connected and bound-connected components,
k-expansions and rooted (re-oriented) trees.

Query file:
    # comment
    free: X1 X2 X3
    atom: X1 'a* a a' X
    atom: X2 b X
    atom: X3 c X
"""
import logging
import shlex
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import CyclicQueryError, QuerySyntaxError, RegexSyntaxError
from .join import is_alpha_acyclic
from .regex import Label, RegexAst, Symbol, parse_regex, render

logger = logging.getLogger(__name__)

STAR_QUERY = (
    "# star query: a single answer (u_0, z_1, z_2) on every star instance\n"
    "free: X1 X2 X3\n"
    "atom: X1 'a* a a' X\n"
    "atom: X2 b X\n"
    "atom: X3 c X\n"
)


@dataclass(frozen=True)
class Atom:
    src: str
    regex: RegexAst
    dst: str

    @property
    def is_self_loop(self) -> bool:
        return self.src == self.dst

    def other(self, var: str) -> str:
        return self.dst if var == self.src else self.src

    def __str__(self) -> str:
        return f"({render(self.regex)})({self.src}, {self.dst})"


@dataclass(frozen=True)
class Crpq:
    """Acyclic or not; output tuples follow the order of `free`"""
    atoms: Tuple[Atom, ...]
    free: Tuple[str, ...] = ()
    vars: Tuple[str, ...] = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'atoms', tuple(self.atoms))
        object.__setattr__(self, 'free', tuple(self.free))
        order: Dict[str, None] = {}
        for atom in self.atoms:
            order.setdefault(atom.src)
            order.setdefault(atom.dst)
        object.__setattr__(self, 'vars', tuple(order))
        if len(set(self.free)) != len(self.free):
            raise QuerySyntaxError(f"duplicate free variable in {' '.join(self.free)}")
        unknown = [x for x in self.free if x not in order]
        if unknown:
            raise QuerySyntaxError(f"free variable {unknown[0]} appears in no atom")

    @property
    def bound(self) -> Tuple[str, ...]:
        return tuple(x for x in self.vars if x not in self.free)

    def replace_atom(self, index: int, atom: Atom) -> 'Crpq':
        atoms = list(self.atoms)
        atoms[index] = atom
        return Crpq(tuple(atoms), self.free)

    def without_atom(self, index: int) -> 'Crpq':
        atoms = self.atoms[:index] + self.atoms[index + 1:]
        return Crpq(atoms, tuple(x for x in self.free if any(x in (a.src, a.dst) for a in atoms)))

    def with_free(self, free: Sequence[str]) -> 'Crpq':
        return Crpq(self.atoms, tuple(free))

    def incident(self, var: str) -> List[int]:
        return [i for i, atom in enumerate(self.atoms) if var in (atom.src, atom.dst)]

    def __str__(self) -> str:
        return f"Q({', '.join(self.free)}) = " + " ∧ ".join(str(a) for a in self.atoms)


@dataclass(frozen=True)
class AcyclicityVerdict:
    accepted: bool
    reason: Optional[str] = None
    witness: Tuple[int, ...] = ()
    message: str = "query graph is acyclic"


@dataclass
class OrientedTree:
    """
    A connected acyclic query rooted at one variable.

    edge[child] is (atom index, inverted): inverted is True when the atom was
    declared child -> parent and must be read through its inverse regex on the
    transposed graph.
    """
    root: str
    parent: Dict[str, Optional[str]]
    children: Dict[str, List[str]]
    edge: Dict[str, Tuple[int, bool]]

    def postorder(self) -> List[str]:
        order: List[str] = []
        stack = [(self.root, False)]
        while stack:
            var, expanded = stack.pop()
            if expanded:
                order.append(var)
                continue
            stack.append((var, True))
            for child in reversed(self.children[var]):
                stack.append((child, False))
        return order

    def edges(self) -> List[Tuple[str, str, int]]:
        """(parent, child, atom index) for every tree edge"""
        return [(self.parent[c], c, self.edge[c][0]) for c in self.edge]


def query_graph(q: Crpq) -> nx.MultiGraph:
    """Undirected query multigraph; edge keys are atom indexes"""
    graph = nx.MultiGraph()
    graph.add_nodes_from(q.vars)
    for i, atom in enumerate(q.atoms):
        graph.add_edge(atom.src, atom.dst, key=i)
    return graph


def check_acyclic(q: Crpq) -> AcyclicityVerdict:
    """Self-loops and parallel atoms count as cycles of the multigraph"""
    for i, atom in enumerate(q.atoms):
        if atom.is_self_loop:
            return AcyclicityVerdict(
                False, 'self-loop', (i,),
                f"atom {i} {atom} is a self-loop on {atom.src}; an acyclic CRPQ cannot have a self-loop")

    by_pair: Dict[FrozenSet[str], int] = {}
    for i, atom in enumerate(q.atoms):
        pair = frozenset((atom.src, atom.dst))
        if pair in by_pair:
            j = by_pair[pair]
            return AcyclicityVerdict(
                False, 'parallel', (j, i),
                f"atoms {j} and {i} both connect {atom.src} and {atom.dst}; parallel edges form a cycle")
        by_pair[pair] = i

    simple = nx.Graph()
    simple.add_nodes_from(q.vars)
    simple.add_edges_from((a.src, a.dst) for a in q.atoms)
    try:
        cycle = nx.find_cycle(simple)
    except nx.NetworkXNoCycle:
        return AcyclicityVerdict(True)
    witness = tuple(by_pair[frozenset(e[:2])] for e in cycle)
    variables = " - ".join(e[0] for e in cycle)
    return AcyclicityVerdict(False, 'cycle', witness,
                             f"atoms {', '.join(map(str, witness))} form the cycle {variables} - {cycle[0][0]}")


def require_acyclic(q: Crpq):
    verdict = check_acyclic(q)
    if not verdict.accepted:
        raise CyclicQueryError(verdict)


def _subquery(q: Crpq, indexes: Sequence[int]) -> Crpq:
    atoms = tuple(q.atoms[i] for i in sorted(indexes))
    names = {x for a in atoms for x in (a.src, a.dst)}
    return Crpq(atoms, tuple(x for x in q.free if x in names))


def connected_components(q: Crpq) -> List[Crpq]:
    """Components of the query multigraph, ordered by their first atom"""
    graph = query_graph(q)
    groups = []
    for variables in nx.connected_components(graph):
        indexes = sorted(k for _, _, k in graph.edges(variables, keys=True))
        groups.append(sorted(set(indexes)))
    groups.sort(key=lambda g: g[0])
    return [_subquery(q, g) for g in groups]


def bound_connected_components(q: Crpq) -> List[Crpq]:
    """
    Split the query at its free variables.

    Atoms sharing a bound variable end up together; an atom whose endpoints are
    both free stands alone. Pieces whose only free variable is the same X are
    merged into one component, so every free variable with single-variable
    pieces contributes one unary component.
    """
    parent = list(range(len(q.atoms)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    free = set(q.free)
    first_with: Dict[str, int] = {}
    for i, atom in enumerate(q.atoms):
        for var in (atom.src, atom.dst):
            if var in free:
                continue
            if var in first_with:
                parent[find(i)] = find(first_with[var])
            else:
                first_with[var] = i

    pieces: Dict[int, List[int]] = defaultdict(list)
    for i in range(len(q.atoms)):
        pieces[find(i)].append(i)

    merged: Dict[object, List[int]] = {}
    for root, indexes in pieces.items():
        piece_free = {x for i in indexes for x in (q.atoms[i].src, q.atoms[i].dst) if x in free}
        key = ('free', next(iter(piece_free))) if len(piece_free) == 1 else ('piece', root)
        merged.setdefault(key, []).extend(indexes)

    groups = sorted((sorted(indexes) for indexes in merged.values()), key=lambda g: g[0])
    components = [_subquery(q, g) for g in groups]
    logger.debug(f"Bound-connected components: {[c.free for c in components]}")
    return components


def is_trivial(q: Crpq) -> bool:
    """Every connected component has at most one free variable"""
    return all(len(c.free) <= 1 for c in connected_components(q))


def k_expansion(q: Crpq, k: int) -> Crpq:
    """Replace every atom by a k-path of single-symbol atoms through fresh bound variables"""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    atoms = []
    for i, atom in enumerate(q.atoms):
        path = [atom.src] + [f"$e{i}_{j}" for j in range(1, k)] + [atom.dst]
        for j in range(k):
            atoms.append(Atom(path[j], Symbol(Label(f"s{i}_{j}", fresh=True)), path[j + 1]))
    return Crpq(tuple(atoms), q.free)


def is_alpha_acyclic_cq(q: Crpq) -> bool:
    """GYO acyclicity of the atoms read as plain relation schemas"""
    return is_alpha_acyclic([(a.src, a.dst) for a in q.atoms])


def is_free_leaf(q: Crpq) -> bool:
    """Connected, acyclic, and the free variables are exactly the leaves of the tree"""
    if not q.atoms or not check_acyclic(q).accepted:
        return False
    graph = query_graph(q)
    if not nx.is_connected(graph):
        return False
    leaves = {x for x in q.vars if graph.degree(x) == 1}
    return leaves == set(q.free)


def reroot(q: Crpq, root: str) -> OrientedTree:
    """
    Orient a connected acyclic query away from root.

    Raises:
        ValueError: If root is not a variable of q or q is disconnected
        CyclicQueryError: If q is cyclic
    """
    if root not in q.vars:
        raise ValueError(f"{root} is not a variable of the query")
    require_acyclic(q)
    parent: Dict[str, Optional[str]] = {root: None}
    children: Dict[str, List[str]] = {x: [] for x in q.vars}
    edge: Dict[str, Tuple[int, bool]] = {}
    frontier = [root]
    while frontier:
        var = frontier.pop(0)
        for i in q.incident(var):
            atom = q.atoms[i]
            child = atom.other(var)
            if child in parent:
                continue
            parent[child] = var
            children[var].append(child)
            edge[child] = (i, atom.src == child)
            frontier.append(child)
    if len(parent) != len(q.vars):
        raise ValueError("cannot root a disconnected query")
    return OrientedTree(root, parent, children, edge)


def parse_query(text: str, compact: bool = False) -> Crpq:
    """
    Parse the query file format.

    Args:
        text: Query text (`free:` line, then `atom:` lines)
        compact: Parse regexes with single-character labels

    Raises:
        QuerySyntaxError: With the 1-based line number where possible
    """
    free: Optional[Tuple[str, ...]] = None
    atoms: List[Atom] = []
    for number, line in enumerate(text.splitlines(), start=1):
        try:
            fields = shlex.split(line, comments=True)
        except ValueError as e:
            raise QuerySyntaxError(str(e), number) from e
        if not fields:
            continue
        head, rest = fields[0], fields[1:]
        if head == 'free:':
            if free is not None:
                raise QuerySyntaxError("duplicate 'free:' line", number)
            free = tuple(rest)
        elif head == 'atom:':
            if len(rest) != 3:
                raise QuerySyntaxError("expected 'atom: <src> <regex> <dst>' (quote regexes with spaces)", number)
            src, regex_text, dst = rest
            try:
                regex = parse_regex(regex_text, compact=compact)
            except RegexSyntaxError as e:
                raise QuerySyntaxError(f"bad regex {regex_text!r}: {e}", number) from e
            atoms.append(Atom(src, regex, dst))
        else:
            raise QuerySyntaxError(f"expected 'free:' or 'atom:', got {head!r}", number)
    if free is None:
        raise QuerySyntaxError("missing 'free:' line")
    if not atoms:
        raise QuerySyntaxError("query has no atoms")
    return Crpq(tuple(atoms), free)


def format_query(q: Crpq) -> str:
    lines = ["free: " + " ".join(q.free) if q.free else "free:"]
    for atom in q.atoms:
        lines.append(f"atom: {atom.src} {shlex.quote(render(atom.regex))} {atom.dst}")
    return "\n".join(lines) + "\n"

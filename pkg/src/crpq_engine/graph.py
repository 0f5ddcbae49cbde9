"""
Edge-labeled graphs

Vertices are dense integer ids 0..|V|-1 with a side table of external names.
Adjacency is indexed per label in both directions, so transposing a graph is a
constant-time swap and product-graph traversals never scan unrelated labels.

Filter self-loops (fresh labels on a vertex subset) are layered over a shared
base graph with OverlayGraph instead of copying it.

Usage:
    from crpq_engine.graph import load_graph, product

    with open("star.tsv", encoding="utf-8") as stream:
        graph = load_graph(stream)
    pg = product(graph, nfa)
"""
import logging
import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, TextIO, Tuple

from .errors import FreshSymbolError, GraphFormatError
from .regex import Label, Nfa

logger = logging.getLogger(__name__)

_NO_VERTICES: Tuple[int, ...] = ()

Adjacency = Dict[Label, Dict[int, List[int]]]


@dataclass(frozen=True)
class VertexSet:
    """Immutable set of vertex ids; iterates in ascending id order"""
    members: FrozenSet[int] = frozenset()

    @classmethod
    def of(cls, vertices: Iterable[int]) -> 'VertexSet':
        return cls(frozenset(vertices))

    def __contains__(self, vertex: int) -> bool:
        return vertex in self.members

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __and__(self, other: 'VertexSet') -> 'VertexSet':
        return VertexSet(self.members & other.members)


class GraphView:
    """Read interface shared by LabeledGraph and OverlayGraph"""

    names: Tuple[str, ...]

    @property
    def alphabet(self) -> FrozenSet[Label]:
        raise NotImplementedError

    def successors(self, vertex: int, label: Label) -> Sequence[int]:
        raise NotImplementedError

    def predecessors(self, vertex: int, label: Label) -> Sequence[int]:
        raise NotImplementedError

    def edges_with(self, label: Label) -> Iterator[Tuple[int, int]]:
        raise NotImplementedError

    def transpose(self) -> 'GraphView':
        raise NotImplementedError

    @property
    def num_vertices(self) -> int:
        return len(self.names)

    def edges(self) -> Iterator[Tuple[int, Label, int]]:
        """All edges, ordered by label then source then target"""
        for label in sorted(self.alphabet, key=Label.sort_key):
            for u, v in self.edges_with(label):
                yield u, label, v

    @property
    def num_edges(self) -> int:
        return sum(1 for _ in self.edges())

    @property
    def size(self) -> int:
        """N = |V| + |E|"""
        return self.num_vertices + self.num_edges

    def vertex_name(self, vertex: int) -> str:
        return self.names[vertex]


class LabeledGraph(GraphView):
    """Immutable edge-labeled graph; safe to share between evaluations"""

    def __init__(self, names: Sequence[str], edges: Iterable[Tuple[int, Label, int]]):
        self.names = tuple(names)
        self._index = {name: i for i, name in enumerate(self.names)}
        self._out: Adjacency = defaultdict(lambda: defaultdict(list))
        self._in: Adjacency = defaultdict(lambda: defaultdict(list))
        seen: Set[Tuple[int, Label, int]] = set()
        for u, label, v in edges:
            if not (0 <= u < len(self.names) and 0 <= v < len(self.names)):
                raise ValueError(f"edge ({u}, {label}, {v}) has an endpoint outside 0..{len(self.names) - 1}")
            if (u, label, v) in seen:
                continue
            seen.add((u, label, v))
            self._out[label][u].append(v)
            self._in[label][v].append(u)
        self._num_edges = len(seen)
        self._alphabet = frozenset(self._out)
        self._transposed: Optional['LabeledGraph'] = None

    @classmethod
    def _from_adjacency(cls, names: Tuple[str, ...], out: Adjacency, inc: Adjacency,
                        num_edges: int) -> 'LabeledGraph':
        graph = cls.__new__(cls)
        graph.names = names
        graph._index = {name: i for i, name in enumerate(names)}
        graph._out = out
        graph._in = inc
        graph._num_edges = num_edges
        graph._alphabet = frozenset(out)
        graph._transposed = None
        return graph

    @property
    def alphabet(self) -> FrozenSet[Label]:
        return self._alphabet

    @property
    def num_edges(self) -> int:
        return self._num_edges

    def vertex_id(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown vertex {name!r}") from None

    def successors(self, vertex: int, label: Label) -> Sequence[int]:
        by_vertex = self._out.get(label)
        return by_vertex.get(vertex, _NO_VERTICES) if by_vertex else _NO_VERTICES

    def predecessors(self, vertex: int, label: Label) -> Sequence[int]:
        by_vertex = self._in.get(label)
        return by_vertex.get(vertex, _NO_VERTICES) if by_vertex else _NO_VERTICES

    def edges_with(self, label: Label) -> Iterator[Tuple[int, int]]:
        by_vertex = self._out.get(label, {})
        for u in sorted(by_vertex):
            for v in sorted(by_vertex[u]):
                yield u, v

    def transpose(self) -> 'LabeledGraph':
        """Graph with every edge (u, a, v) replaced by (v, a^-, u); cached"""
        if self._transposed is None:
            out = {label.inverted(): by_vertex for label, by_vertex in self._in.items()}
            inc = {label.inverted(): by_vertex for label, by_vertex in self._out.items()}
            transposed = LabeledGraph._from_adjacency(self.names, out, inc, self._num_edges)
            transposed._transposed = self
            self._transposed = transposed
        return self._transposed


class OverlayGraph(GraphView):
    """Base graph plus self-loops under fresh labels.

    Stacking filters flattens onto the same base, so each added filter costs
    O(|filter|) rather than a copy of the graph.
    """

    def __init__(self, base: LabeledGraph, loops: Optional[Mapping[Label, VertexSet]] = None):
        self.base = base
        self.names = base.names
        self.loops: Dict[Label, VertexSet] = dict(loops or {})

    @property
    def alphabet(self) -> FrozenSet[Label]:
        return self.base.alphabet | frozenset(self.loops)

    def vertex_id(self, name: str) -> int:
        return self.base.vertex_id(name)

    def successors(self, vertex: int, label: Label) -> Sequence[int]:
        loop = self.loops.get(label)
        if loop is not None:
            return (vertex,) if vertex in loop else _NO_VERTICES
        return self.base.successors(vertex, label)

    def predecessors(self, vertex: int, label: Label) -> Sequence[int]:
        loop = self.loops.get(label)
        if loop is not None:
            return (vertex,) if vertex in loop else _NO_VERTICES
        return self.base.predecessors(vertex, label)

    def edges_with(self, label: Label) -> Iterator[Tuple[int, int]]:
        loop = self.loops.get(label)
        if loop is None:
            yield from self.base.edges_with(label)
            return
        for v in loop:
            yield v, v

    @property
    def num_edges(self) -> int:
        return self.base.num_edges + sum(len(s) for s in self.loops.values())

    def transpose(self) -> 'OverlayGraph':
        return OverlayGraph(self.base.transpose(),
                            {label.inverted(): s for label, s in self.loops.items()})


def add_filter_selfloops(g: GraphView, s: VertexSet, fresh: Label) -> OverlayGraph:
    """
    Extend a graph with a (v, fresh, v) self-loop for every v in s.

    Raises:
        FreshSymbolError: If fresh already labels an edge of g
    """
    if fresh in g.alphabet:
        raise FreshSymbolError(f"label {fresh} already in use")
    if isinstance(g, OverlayGraph):
        loops = dict(g.loops)
        base = g.base
    else:
        loops = {}
        base = g
    loops[fresh] = s
    logger.debug(f"Filter {fresh} over {len(s)} vertices")
    return OverlayGraph(base, loops)


class ProductGraph:
    """
    Product of a graph and an epsilon-free NFA.

    Vertices are (graph vertex, state) pairs; ((u, p), (v, q)) is an edge iff some
    label a has (u, a, v) in the graph and (p, a, q) in the automaton. Adjacency
    is resolved on demand from the per-label graph index and per-state
    transition lists, in both directions.
    """

    def __init__(self, graph: GraphView, nfa: Nfa):
        self.graph = graph
        self.nfa = nfa
        self._out: Dict[int, List[Tuple[Label, int]]] = defaultdict(list)
        self._in: Dict[int, List[Tuple[Label, int]]] = defaultdict(list)
        for p, label, q in nfa.transitions:
            self._out[p].append((label, q))
            self._in[q].append((label, p))

    @property
    def num_vertices(self) -> int:
        return self.graph.num_vertices * self.nfa.num_states

    def successors(self, node: Tuple[int, int]) -> Iterator[Tuple[int, int]]:
        v, p = node
        for label, q in self._out.get(p, ()):
            for w in self.graph.successors(v, label):
                yield w, q

    def predecessors(self, node: Tuple[int, int]) -> Iterator[Tuple[int, int]]:
        v, q = node
        for label, p in self._in.get(q, ()):
            for u in self.graph.predecessors(v, label):
                yield u, p

    def edges(self) -> Set[Tuple[Tuple[int, int], Tuple[int, int]]]:
        found = set()
        for p, label, q in self.nfa.transitions:
            for u, v in self.graph.edges_with(label):
                found.add(((u, p), (v, q)))
        return found

    def num_edges(self) -> int:
        return len(self.edges())


def product(g: GraphView, m: Nfa) -> ProductGraph:
    return ProductGraph(g, m)


class GraphBuilder:
    """Interns vertex names and labels while collecting distinct edges"""

    def __init__(self):
        self._names: List[str] = []
        self._index: Dict[str, int] = {}
        self._labels: Dict[str, Label] = {}
        self._edges: List[Tuple[int, Label, int]] = []
        self._seen: Set[Tuple[int, Label, int]] = set()

    def add_vertex(self, name: str) -> int:
        vertex = self._index.get(name)
        if vertex is None:
            vertex = len(self._names)
            self._index[name] = vertex
            self._names.append(name)
        return vertex

    def add_edge(self, src: str, label: str, dst: str) -> bool:
        """Add an edge; returns False for a duplicate"""
        edge = (self.add_vertex(src), self._labels.setdefault(label, Label(label)), self.add_vertex(dst))
        if edge in self._seen:
            return False
        self._seen.add(edge)
        self._edges.append(edge)
        return True

    def build(self) -> LabeledGraph:
        return LabeledGraph(self._names, self._edges)


def load_graph(stream: TextIO) -> LabeledGraph:
    """
    Load a graph from the TSV edge format.

    Each line is `src<TAB>label<TAB>dst`; `#vertex<TAB>name` declares a vertex
    (isolated vertices survive this way); any other line starting with `#` is a
    comment. Duplicate edges collapse. Labels that label no edge never enter the
    alphabet.

    Raises:
        GraphFormatError: With the 1-based line number of the malformed line
    """
    builder = GraphBuilder()
    duplicates = 0
    for number, raw in enumerate(stream, start=1):
        line = raw.rstrip('\r\n')
        if not line.strip():
            continue
        if line.startswith('#'):
            fields = line.split('\t')
            if fields[0] == '#vertex':
                if len(fields) != 2 or not fields[1]:
                    raise GraphFormatError("expected '#vertex<TAB>name'", number)
                builder.add_vertex(fields[1])
            continue
        fields = line.split('\t')
        if len(fields) != 3:
            raise GraphFormatError(f"expected 3 tab-separated columns, got {len(fields)}", number)
        if not all(fields):
            raise GraphFormatError("empty column", number)
        if not builder.add_edge(*fields):
            duplicates += 1
    graph = builder.build()
    if duplicates:
        logger.debug(f"Collapsed {duplicates} duplicate edge lines")
    logger.info(f"Loaded graph: {graph.num_vertices} vertices, {graph.num_edges} edges, "
                f"{len(graph.alphabet)} labels")
    return graph


def write_graph(g: GraphView, stream: TextIO):
    """Write a graph in the TSV edge format; isolated vertices get `#vertex` lines"""
    touched = set()
    lines = []
    for u, label, v in sorted(g.edges(), key=lambda e: (e[0], e[1].sort_key(), e[2])):
        touched.update((u, v))
        lines.append(f"{g.vertex_name(u)}\t{label.name}\t{g.vertex_name(v)}\n")
    for vertex in range(g.num_vertices):
        if vertex not in touched:
            stream.write(f"#vertex\t{g.vertex_name(vertex)}\n")
    stream.writelines(lines)


def gen_star_instance(n: int) -> LabeledGraph:
    """
    Star-shaped instance on which materializing the a-path atom costs Θ(n²)
    while the full query has a single answer (u_0, z_1, z_2).

    |V| = 2n + 5 and |E| = 2n + 4.
    """
    if n < 1:
        raise ValueError(f"star instance needs n >= 1, got {n}")
    builder = GraphBuilder()
    for name in ([f"u_{i}" for i in range(n + 1)] + ["v_0", "v"]
                 + [f"w_{i}" for i in range(1, n + 1)] + ["z_1", "z_2"]):
        builder.add_vertex(name)
    for i in range(1, n + 1):
        builder.add_edge(f"w_{i}", "a", "v")
        builder.add_edge("v", "a", f"u_{i}")
    builder.add_edge("u_0", "a", "v_0")
    builder.add_edge("v_0", "a", "w_1")
    builder.add_edge("z_1", "b", "w_1")
    builder.add_edge("z_2", "c", "w_1")
    return builder.build()


def random_label_names(alphabet_size: int) -> List[str]:
    if alphabet_size <= 26:
        return [chr(ord('a') + i) for i in range(alphabet_size)]
    return [f"l{i}" for i in range(alphabet_size)]


def gen_random(nv: int, ne: int, alphabet_size: int, seed: int) -> LabeledGraph:
    """Uniform random graph: ne sampled (src, label, dst) triples, duplicates collapsed"""
    if alphabet_size < 1:
        raise ValueError(f"alphabet_size must be >= 1, got {alphabet_size}")
    if nv < 0 or ne < 0:
        raise ValueError("vertex and edge counts must be non-negative")
    rng = random.Random(seed)
    labels = random_label_names(alphabet_size)
    builder = GraphBuilder()
    names = [f"n{i}" for i in range(nv)]
    for name in names:
        builder.add_vertex(name)
    if nv:
        for _ in range(ne):
            builder.add_edge(rng.choice(names), rng.choice(labels), rng.choice(names))
    return builder.build()

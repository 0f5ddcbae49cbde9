"""
Brute-force oracles and random instance generators shared by the test modules
"""
import random
import sys
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple

ENGINE_SRC = Path(__file__).resolve().parents[1] / "src"
sys.path.insert(0, str(ENGINE_SRC))

from crpq_engine.graph import GraphBuilder, LabeledGraph, gen_random
from crpq_engine.query import Atom, Crpq, parse_query
from crpq_engine.regex import Alt, Concat, Epsilon, Label, Star, Symbol, compile_nfa, parse_regex

REGEX_TEMPLATES = (
    "{0}",
    "{0} {1}",
    "{0} | {1}",
    "{0}*",
    "({0} | {1})*",
    "{0} {1}*",
    "<eps>",
    "{0}* {1}",
    "({0} {1})*",
    "{0} | <eps>",
    "{0} {0}*",
)

RUNNING_EXAMPLE = """
free: D E F G K L
atom: A {0} B
atom: A {1} C
atom: A {2} D
atom: C {3} E
atom: C {4} F
atom: D {5} G
atom: E {6} H
atom: F {7} I
atom: F {8} J
atom: H {9} K
atom: H {10} L
"""


def running_example(regexes: Optional[Sequence[str]] = None) -> Crpq:
    regexes = regexes or ["a"] * 11
    return parse_query(RUNNING_EXAMPLE.format(*(f"'{r}'" for r in regexes)))


def naive_matches(ast, word: Sequence[Label]) -> bool:
    """Regex membership straight from the definitions (no automaton)"""
    word = tuple(word)

    @lru_cache(maxsize=None)
    def match(node, i: int, j: int) -> bool:
        if isinstance(node, Epsilon):
            return i == j
        if isinstance(node, Symbol):
            return j == i + 1 and word[i] == node.label
        if isinstance(node, Alt):
            return match(node.left, i, j) or match(node.right, i, j)
        if isinstance(node, Concat):
            return any(match(node.left, i, k) and match(node.right, k, j) for k in range(i, j + 1))
        if isinstance(node, Star):
            if i == j:
                return True
            return any(match(node.inner, i, k) and match(node, k, j) for k in range(i + 1, j + 1))
        raise TypeError(node)

    return match(ast, 0, len(word))


def naive_rpq_pairs(regex, g) -> Set[Tuple[int, int]]:
    """Layered path search over (vertex, state) with paths up to |V|·|states| edges"""
    nfa = compile_nfa(regex)
    edges = list(g.edges())
    bound = max(1, g.num_vertices * nfa.num_states)
    pairs = set()
    for x in range(g.num_vertices):
        layer = {(x, nfa.initial)}
        seen = set(layer)
        for _ in range(bound + 1):
            for v, q in layer:
                if q in nfa.accepting:
                    pairs.add((x, v))
            nxt = set()
            for v, q in layer:
                for u, label, w in edges:
                    if u != v:
                        continue
                    for p, tlabel, r in nfa.transitions:
                        if p == q and tlabel == label and (w, r) not in seen:
                            nxt.add((w, r))
            seen |= nxt
            layer = nxt
            if not layer:
                break
    return pairs


def brute_force_answer(q: Crpq, g) -> Set[Tuple[int, ...]]:
    """Backtracking over atom relations, projected to the free variables"""
    relations = [naive_rpq_pairs(atom.regex, g) for atom in q.atoms]
    answers = set()

    def extend(i: int, binding: Dict[str, int]):
        if i == len(q.atoms):
            answers.add(tuple(binding[x] for x in q.free))
            return
        atom = q.atoms[i]
        for x, y in relations[i]:
            if binding.get(atom.src, x) != x:
                continue
            if atom.src == atom.dst and x != y:
                continue
            if binding.get(atom.dst, y) != y:
                continue
            added = [v for v in (atom.src, atom.dst) if v not in binding]
            binding[atom.src] = x
            binding[atom.dst] = y
            extend(i + 1, binding)
            for v in added:
                del binding[v]

    extend(0, {})
    return answers


def random_regex_text(rng: random.Random, labels: Sequence[str]) -> str:
    template = rng.choice(REGEX_TEMPLATES)
    return template.format(rng.choice(labels), rng.choice(labels))


def random_regex(rng: random.Random, labels: Sequence[str]):
    return parse_regex(random_regex_text(rng, labels))


def random_regex_ast(rng: random.Random, labels: Sequence[str], depth: int = 5):
    """A random AST of at most the given depth"""
    if depth <= 1 or rng.random() < 0.25:
        if rng.random() < 0.15:
            return Epsilon()
        return Symbol(Label(rng.choice(labels)))
    kind = rng.choice((Alt, Concat, Star))
    if kind is Star:
        return Star(random_regex_ast(rng, labels, depth - 1))
    return kind(random_regex_ast(rng, labels, depth - 1), random_regex_ast(rng, labels, depth - 1))


def random_acyclic_query(rng: random.Random, max_atoms: int = 6, max_free: int = 3,
                         labels: Sequence[str] = ("a", "b", "c", "d")) -> Crpq:
    """A random forest of atoms with random orientations and free variables"""
    count = rng.randint(1, max_atoms)
    variables = ["V0"]
    atoms = []
    for i in range(count):
        if i > 0 and rng.random() < 0.15:
            anchor = f"V{len(variables)}"
            variables.append(anchor)
        else:
            anchor = rng.choice(variables)
        new = f"V{len(variables)}"
        variables.append(new)
        src, dst = (anchor, new) if rng.random() < 0.5 else (new, anchor)
        atoms.append(Atom(src, random_regex(rng, labels), dst))
    used = [v for v in variables if any(v in (a.src, a.dst) for a in atoms)]
    free = rng.sample(used, rng.randint(0, min(max_free, len(used))))
    return Crpq(tuple(atoms), tuple(free))


def random_graph(rng: random.Random, max_vertices: int = 20, max_edges: int = 60,
                 alphabet_size: int = 4) -> LabeledGraph:
    nv = rng.randint(1, max_vertices)
    return gen_random(nv, rng.randint(0, max_edges), alphabet_size, rng.randrange(2 ** 32))


def graph_from_edges(edges: Sequence[Tuple[str, str, str]], vertices: Sequence[str] = ()) -> LabeledGraph:
    builder = GraphBuilder()
    for name in vertices:
        builder.add_vertex(name)
    for src, label, dst in edges:
        builder.add_edge(src, label, dst)
    return builder.build()


def names_of(g, rows) -> Set[Tuple[str, ...]]:
    return {tuple(g.vertex_name(v) for v in row) for row in rows}

"""
Regular expressions over edge labels

Parses the query regex syntax into an AST, compiles ASTs into epsilon-free NFAs
(Thompson construction followed by epsilon elimination) and provides the two
rewrites the evaluators need: inversion for re-oriented atoms and concatenation
of a fresh filter symbol.

Syntax:
    a | b        alternation
    a b, a.b     concatenation (juxtaposition)
    a*           Kleene star
    ( ... )      grouping
    <eps>        the empty string
    knows_1      identifiers [A-Za-z0-9_]+ are labels

Usage:
    from crpq_engine.regex import parse_regex, compile_nfa

    nfa = compile_nfa(parse_regex("a* a a"))
    nfa.accepts([Label("a"), Label("a")])   # True
"""
import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Sequence, Set, Tuple, Union

from .errors import FreshSymbolError, RegexSyntaxError

logger = logging.getLogger(__name__)

NFA_CACHE_SIZE = 4096


@dataclass(frozen=True)
class Label:
    """Edge label; inverse and fresh labels are tagged, never renamed"""
    name: str
    inverse: bool = False
    fresh: bool = False

    def inverted(self) -> 'Label':
        return replace(self, inverse=not self.inverse)

    def sort_key(self) -> Tuple[bool, str, bool]:
        return (self.fresh, self.name, self.inverse)

    def __str__(self) -> str:
        text = f"#{self.name}" if self.fresh else self.name
        return f"{text}^-" if self.inverse else text


class FreshLabels:
    """Allocates filter labels that can never collide with user labels.

    One allocator belongs to one evaluation; it is not shared between threads.
    """

    def __init__(self, namespace: str = ""):
        self.namespace = namespace
        self._counter = itertools.count(1)

    def next(self) -> Label:
        return Label(f"{self.namespace}f{next(self._counter)}", fresh=True)


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Symbol:
    label: Label


@dataclass(frozen=True)
class Alt:
    left: 'RegexAst'
    right: 'RegexAst'


@dataclass(frozen=True)
class Concat:
    left: 'RegexAst'
    right: 'RegexAst'


@dataclass(frozen=True)
class Star:
    inner: 'RegexAst'


RegexAst = Union[Epsilon, Symbol, Alt, Concat, Star]


class Side(Enum):
    """Where a filter symbol is attached to an atom's regex"""
    PREFIX = "prefix"
    SUFFIX = "suffix"


def alphabet(ast: RegexAst) -> FrozenSet[Label]:
    """Labels occurring in an AST"""
    if isinstance(ast, Symbol):
        return frozenset((ast.label,))
    if isinstance(ast, (Alt, Concat)):
        return alphabet(ast.left) | alphabet(ast.right)
    if isinstance(ast, Star):
        return alphabet(ast.inner)
    return frozenset()


_PRECEDENCE = {Alt: 0, Concat: 1, Star: 2, Symbol: 3, Epsilon: 3}


def render(ast: RegexAst, context: int = 0) -> str:
    """Render an AST in the concrete syntax (user labels re-parse to the same AST)"""
    own = _PRECEDENCE[type(ast)]
    if isinstance(ast, Epsilon):
        text = "<eps>"
    elif isinstance(ast, Symbol):
        text = str(ast.label)
    elif isinstance(ast, Alt):
        text = f"{render(ast.left, 0)} | {render(ast.right, 1)}"
    elif isinstance(ast, Concat):
        text = f"{render(ast.left, 1)} {render(ast.right, 2)}"
    else:
        text = f"{render(ast.inner, 3)}*"
    return f"({text})" if own < context else text


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_IDENT_CHARS = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_")
_PUNCTUATION = {'|': 'BAR', '*': 'STAR', '(': 'LPAREN', ')': 'RPAREN', '.': 'DOT'}
_TERM_START = ('IDENT', 'EPS', 'LPAREN')


def _tokenize(text: str, compact: bool) -> List[Tuple[str, str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in _PUNCTUATION:
            tokens.append((_PUNCTUATION[ch], ch, i))
            i += 1
        elif text.startswith('<eps>', i):
            tokens.append(('EPS', '<eps>', i))
            i += len('<eps>')
        elif ch in _IDENT_CHARS:
            if compact:
                tokens.append(('IDENT', ch, i))
                i += 1
                continue
            start = i
            while i < len(text) and text[i] in _IDENT_CHARS:
                i += 1
            tokens.append(('IDENT', text[start:i], start))
        else:
            raise RegexSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(('END', '', len(text)))
    return tokens


class _Parser:
    """Recursive descent: star binds tighter than concatenation, which binds tighter than |"""

    def __init__(self, tokens: List[Tuple[str, str, int]]):
        self.tokens = tokens
        self.index = 0

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.index]

    def advance(self) -> Tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def parse(self) -> RegexAst:
        ast = self.alternation()
        kind, value, pos = self.peek()
        if kind != 'END':
            raise RegexSyntaxError(f"unexpected {value!r}", pos)
        return ast

    def alternation(self) -> RegexAst:
        ast = self.concatenation()
        while self.peek()[0] == 'BAR':
            self.advance()
            ast = Alt(ast, self.concatenation())
        return ast

    def concatenation(self) -> RegexAst:
        ast = self.repetition()
        while True:
            kind = self.peek()[0]
            if kind == 'DOT':
                self.advance()
            elif kind not in _TERM_START:
                return ast
            ast = Concat(ast, self.repetition())

    def repetition(self) -> RegexAst:
        ast = self.primary()
        while self.peek()[0] == 'STAR':
            self.advance()
            ast = Star(ast)
        return ast

    def primary(self) -> RegexAst:
        kind, value, pos = self.advance()
        if kind == 'IDENT':
            return Symbol(Label(value))
        if kind == 'EPS':
            return Epsilon()
        if kind == 'LPAREN':
            ast = self.alternation()
            kind, value, pos = self.advance()
            if kind != 'RPAREN':
                raise RegexSyntaxError("expected ')'", pos)
            return ast
        raise RegexSyntaxError("expected a label, <eps> or '('", pos)


def parse_regex(text: str, compact: bool = False) -> RegexAst:
    """
    Parse a regular expression.

    Args:
        text: Expression in the query regex syntax
        compact: Treat every identifier character as its own label, so "a*aa"
            reads as a* . a . a (the notation used for single-letter alphabets)

    Raises:
        RegexSyntaxError: With the offending position
    """
    parser = _Parser(_tokenize(text, compact))
    try:
        return parser.parse()
    except RecursionError:
        position = parser.tokens[min(parser.index, len(parser.tokens) - 1)][2]
        raise RegexSyntaxError("expression nested too deeply", position) from None


# ---------------------------------------------------------------------------
# Compilation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Nfa:
    """Epsilon-free automaton with a single initial state"""
    num_states: int
    initial: int
    accepting: FrozenSet[int]
    transitions: Tuple[Tuple[int, Label, int], ...]
    alphabet: FrozenSet[Label]
    _moves: Dict[int, Dict[Label, Tuple[int, ...]]] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        moves: Dict[int, Dict[Label, List[int]]] = defaultdict(lambda: defaultdict(list))
        for p, label, q in self.transitions:
            moves[p][label].append(q)
        frozen = {p: {label: tuple(qs) for label, qs in by_label.items()} for p, by_label in moves.items()}
        object.__setattr__(self, '_moves', frozen)

    @property
    def accepts_empty(self) -> bool:
        return self.initial in self.accepting

    def step(self, states: Iterable[int], label: Label) -> Set[int]:
        successors: Set[int] = set()
        for p in states:
            successors.update(self._moves.get(p, {}).get(label, ()))
        return successors

    def accepts(self, word: Sequence[Label]) -> bool:
        current = {self.initial}
        for label in word:
            current = self.step(current, label)
            if not current:
                return False
        return bool(current & self.accepting)


class _Thompson:
    def __init__(self):
        self.count = 0
        self.epsilon: Dict[int, List[int]] = defaultdict(list)
        self.moves: Dict[int, List[Tuple[Label, int]]] = defaultdict(list)

    def state(self) -> int:
        self.count += 1
        return self.count - 1

    def build(self, ast: RegexAst) -> Tuple[int, int]:
        if isinstance(ast, Concat):
            s1, e1 = self.build(ast.left)
            s2, e2 = self.build(ast.right)
            self.epsilon[e1].append(s2)
            return s1, e2
        start, end = self.state(), self.state()
        if isinstance(ast, Epsilon):
            self.epsilon[start].append(end)
        elif isinstance(ast, Symbol):
            self.moves[start].append((ast.label, end))
        elif isinstance(ast, Alt):
            for branch in (ast.left, ast.right):
                s, e = self.build(branch)
                self.epsilon[start].append(s)
                self.epsilon[e].append(end)
        elif isinstance(ast, Star):
            s, e = self.build(ast.inner)
            self.epsilon[start].extend((s, end))
            self.epsilon[e].extend((s, end))
        else:
            raise TypeError(f"not a regex node: {ast!r}")
        return start, end

    def closure(self, state: int) -> Set[int]:
        seen = {state}
        stack = [state]
        while stack:
            for nxt in self.epsilon.get(stack.pop(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen


@lru_cache(maxsize=NFA_CACHE_SIZE)
def compile_nfa(ast: RegexAst) -> Nfa:
    """
    Compile an AST into an epsilon-free NFA.

    States are renumbered in breadth-first order from the initial state (which
    becomes 0); states that cannot reach an accepting state are dropped.
    """
    builder = _Thompson()
    start, end = builder.build(ast)

    moves: Dict[int, Set[Tuple[Label, int]]] = defaultdict(set)
    accepting: Set[int] = set()
    for p in range(builder.count):
        closure = builder.closure(p)
        if end in closure:
            accepting.add(p)
        for r in closure:
            moves[p].update(builder.moves.get(r, ()))

    # reachable from start
    order = [start]
    reached = {start}
    for p in order:
        for _, q in sorted(moves[p], key=lambda m: (m[0].sort_key(), m[1])):
            if q not in reached:
                reached.add(q)
                order.append(q)

    # co-reachable to an accepting state
    alive = set(accepting & reached)
    changed = True
    while changed:
        changed = False
        for p in order:
            if p not in alive and any(q in alive for _, q in moves[p]):
                alive.add(p)
                changed = True

    kept = [p for p in order if p in alive or p == start]
    number = {p: i for i, p in enumerate(kept)}
    transitions = sorted(
        ((number[p], label, number[q]) for p in kept for label, q in moves[p] if q in number),
        key=lambda t: (t[0], t[1].sort_key(), t[2]),
    )
    nfa = Nfa(
        num_states=len(kept),
        initial=0,
        accepting=frozenset(number[p] for p in accepting if p in number),
        transitions=tuple(transitions),
        alphabet=alphabet(ast),
    )
    logger.debug(f"Compiled {render(ast)} into {nfa.num_states} states, {len(nfa.transitions)} transitions")
    return nfa


# ---------------------------------------------------------------------------
# Rewrites
# ---------------------------------------------------------------------------

def invert_regex(ast: RegexAst) -> RegexAst:
    """Regex for the reverse language over inverted labels"""
    if isinstance(ast, Symbol):
        return Symbol(ast.label.inverted())
    if isinstance(ast, Concat):
        return Concat(invert_regex(ast.right), invert_regex(ast.left))
    if isinstance(ast, Alt):
        return Alt(invert_regex(ast.left), invert_regex(ast.right))
    if isinstance(ast, Star):
        return Star(invert_regex(ast.inner))
    return ast


def concat_symbol(ast: RegexAst, side: Side, label: Label) -> RegexAst:
    """
    Attach a filter label to one end of a regex.

    Raises:
        FreshSymbolError: If the label already occurs in the regex
    """
    if label in alphabet(ast):
        raise FreshSymbolError(f"label {label} already occurs in {render(ast)}")
    if side is Side.SUFFIX:
        return Concat(ast, Symbol(label))
    return Concat(Symbol(label), ast)

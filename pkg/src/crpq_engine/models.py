"""
Data models for evaluation and analysis reports
"""
from collections import Counter
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .join import BindingRelation, Row


@dataclass
class PassStats:
    """One rooted pass of the free-leaf evaluator"""
    root: str
    delta_prime: int
    heavy: int  # |H_W|
    emitted: int  # new tuples emitted by this pass
    base: int = 0  # single-RPQ restrictions
    composed: int = 0
    propagated: int = 0


@dataclass
class RoundStats:
    guess: int
    delta: int
    passes: List[PassStats] = field(default_factory=list)
    success: bool = False


@dataclass
class ComponentStats:
    index: int
    free: Tuple[str, ...]
    atoms: int
    mode: str  # freeleaf or single
    rows: int
    rounds: int = 0


@dataclass
class EvalReport:
    """Answer of one evaluation plus its instrumentation"""
    engine: str
    relation: BindingRelation
    rounds: List[RoundStats] = field(default_factory=list)
    components: List[ComponentStats] = field(default_factory=list)
    out_a: Optional[int] = None  # largest materialized atom relation (baseline only)
    counters: Counter = field(default_factory=Counter)
    graph_size: int = 0  # N

    @property
    def schema(self) -> Tuple[str, ...]:
        return self.relation.schema

    @property
    def output(self) -> frozenset:
        return self.relation.rows

    @property
    def out(self) -> int:
        return len(self.relation)

    def sorted_rows(self) -> List[Row]:
        return self.relation.sorted_rows()

    def named_rows(self, names: Sequence[str]) -> List[Tuple[str, ...]]:
        """Rows as vertex names, sorted lexicographically"""
        return sorted(tuple(names[v] for v in row) for row in self.relation.rows)

    def summary(self) -> str:
        parts = [f"engine={self.engine}", f"rows={self.out}", f"N={self.graph_size}"]
        if self.rounds:
            parts.append(f"rounds={len(self.rounds)}")
        if self.components:
            parts.append(f"components={len(self.components)}")
        if self.out_a is not None:
            parts.append(f"OUT_a={self.out_a}")
        for name in sorted(self.counters):
            parts.append(f"{name}={self.counters[name]}")
        return " ".join(parts)


@dataclass
class ComponentWidth:
    index: int
    free: Tuple[str, ...]
    atoms: int
    rho_star: int
    single_edge: bool


@dataclass
class WidthReport:
    fn_fhtw: int
    components: List[ComponentWidth]
    trivial: bool
    free_connex: bool

    @property
    def predicted_exponent(self) -> float:
        """Exponent of OUT in the N·OUT^e term of the runtime bound"""
        return 1 - 1 / max(self.fn_fhtw, 2)

    def to_text(self) -> str:
        lines = [
            f"fn-fhtw:     {self.fn_fhtw}",
            f"trivial:     {'yes' if self.trivial else 'no'}",
            f"free-connex: {'yes' if self.free_connex else 'no'}",
            f"exponent:    {self.predicted_exponent:.4f}  (O(N + N·OUT^e + OUT))",
            f"components:  {len(self.components)}",
        ]
        for c in self.components:
            shape = "single-edge" if c.single_edge else f"{c.atoms} atoms"
            lines.append(f"  [{c.index}] free=({', '.join(c.free)})  rho*={c.rho_star}  {shape}")
        return "\n".join(lines)

    def to_machine(self) -> str:
        frees = ";".join(",".join(c.free) for c in self.components)
        return (f"fn_fhtw={self.fn_fhtw} trivial={int(self.trivial)} free_connex={int(self.free_connex)} "
                f"exponent={self.predicted_exponent:.6f} components={len(self.components)} free_sets={frees}")


@dataclass
class BenchRecord:
    n: int
    engine: str
    rep: int
    wall_ns: int
    N: int
    OUT: int
    OUT_a: Optional[int] = None  # baseline only
    rounds: Optional[int] = None  # optimal only

    FIELDS = ('n', 'engine', 'rep', 'wall_ns', 'N', 'OUT', 'OUT_a', 'rounds')

    def to_row(self) -> List[str]:
        return ['' if value is None else str(value) for value in (
            self.n, self.engine, self.rep, self.wall_ns, self.N, self.OUT, self.OUT_a, self.rounds)]

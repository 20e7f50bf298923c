"""Independent Set to weighted-SAT reduction and seeded instance generators.

Independent Set is the shortest honest path from a W[1]-complete problem to
the verifier: one variable per vertex, one all-negated binary clause per
edge, and the parameter maps to itself.

Graph text format: header ``g <n>``, then one ``e <u> <v>`` line per edge.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .formula import (
    AwsatInstance,
    ClassTag,
    GuardError,
    WeightedFormula,
    brute_force_wsat,
)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a graph needs at least one vertex")
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge ({u},{v}) out of range")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(normalized))


def parse_graph(text: str) -> Graph:
    n = None
    edges = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        if tokens[0] == "g":
            if n is not None:
                raise ValueError(f"line {line_no}: duplicate graph header")
            if len(tokens) != 2:
                raise ValueError(f"line {line_no}: header must read: g <n>")
            n = int(tokens[1])
        elif tokens[0] == "e":
            if n is None:
                raise ValueError(f"line {line_no}: edge before header")
            if len(tokens) != 3:
                raise ValueError(f"line {line_no}: edge must read: e <u> <v>")
            edges.append((int(tokens[1]), int(tokens[2])))
        else:
            raise ValueError(f"line {line_no}: unknown record {tokens[0]!r}")
    if n is None:
        raise ValueError("missing graph header")
    return Graph(n, frozenset(edges))


def has_independent_set(g: Graph, k: int) -> bool:
    """Brute-force ground truth used to validate the reduction."""
    if k > g.n:
        return False
    for combo in itertools.combinations(range(1, g.n + 1), k):
        chosen = set(combo)
        if all(not (u in chosen and v in chosen) for u, v in g.edges):
            return True
    return False


def independent_set_to_wsat(g: Graph, k: int) -> WeightedFormula:
    """One clause (-u, -v) per edge; the graph has a size-k independent set iff
    the output has a satisfying assignment of weight exactly k."""
    if k > g.n:
        raise ValueError(f"k={k} exceeds the vertex count {g.n}")
    clauses = tuple((-u, -v) for u, v in sorted(g.edges))
    return WeightedFormula(num_vars=g.n, clauses=clauses, class_tag=ClassTag.G12N, k=k)


def _legal_pairs(n: int, planted: set[int]) -> list[tuple[int, int]]:
    return [
        (u, v)
        for u, v in itertools.combinations(range(1, n + 1), 2)
        if not (u in planted and v in planted)
    ]


def gen_planted_yes_with_witness(n: int, k: int, num_clauses: int, seed: int):
    """Planted yes-instance plus its hidden witness.

    A weight-k set S is fixed first; only clauses with at most one endpoint in
    S are emitted, so S satisfies every clause by construction."""
    from .formula import Assignment

    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    rng = random.Random(seed)
    planted = set(rng.sample(range(1, n + 1), k))
    legal = _legal_pairs(n, planted)
    if num_clauses > len(legal):
        raise ValueError(
            f"only {len(legal)} clauses avoid the planted set, {num_clauses} requested"
        )
    chosen = sorted(rng.sample(legal, num_clauses))
    clauses = tuple((-u, -v) for u, v in chosen)
    formula = WeightedFormula(num_vars=n, clauses=clauses, class_tag=ClassTag.G12N, k=k)
    return formula, Assignment(frozenset(planted))


def gen_planted_yes(n: int, k: int, num_clauses: int, seed: int) -> WeightedFormula:
    formula, _ = gen_planted_yes_with_witness(n, k, num_clauses, seed)
    return formula


def gen_random(
    n: int,
    num_clauses: int,
    k: int,
    seed: int,
    class_tag: ClassTag = ClassTag.G12N,
    max_len: int = 3,
) -> WeightedFormula:
    """Uniform random clauses of the class; label with brute_force_wsat."""
    if n < 1 or n > 24:
        raise GuardError("generator covers 1..24 variables")
    rng = random.Random(seed)
    clauses = []
    if class_tag is ClassTag.G12N:
        if n < 2:
            raise ValueError("binary clauses need at least two variables")
        pairs = list(itertools.combinations(range(1, n + 1), 2))
        for _ in range(num_clauses):
            u, v = rng.choice(pairs)
            clauses.append((-u, -v))
    else:
        top = min(max_len, n)
        for _ in range(num_clauses):
            length = rng.randint(1, top)
            clauses.append(tuple(sorted(rng.sample(range(1, n + 1), length))))
    return WeightedFormula(num_vars=n, clauses=tuple(clauses), class_tag=class_tag, k=k)


def classify(formula: WeightedFormula) -> bool:
    """Oracle label for a generated instance."""
    decision, _ = brute_force_wsat(formula)
    return decision


def gen_random_awsat(
    n: int,
    block_sizes: tuple[int, ...],
    block_weights: tuple[int, ...],
    num_clauses: int,
    seed: int,
) -> AwsatInstance:
    """Random alternating instance: a shuffled partition into the given block
    sizes and uniform all-negated binary clauses."""
    if sum(block_sizes) != n:
        raise ValueError("block sizes must sum to the variable count")
    if len(block_sizes) != len(block_weights):
        raise ValueError("one weight per block is required")
    rng = random.Random(seed)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    blocks = []
    at = 0
    for size in block_sizes:
        blocks.append(tuple(sorted(order[at : at + size])))
        at += size
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    clauses = tuple(
        (-u, -v) for u, v in (rng.choice(pairs) for _ in range(num_clauses))
    )
    formula = WeightedFormula(
        num_vars=n, clauses=clauses, class_tag=ClassTag.G12N, k=sum(block_weights)
    )
    return AwsatInstance(formula=formula, blocks=tuple(blocks), block_weights=tuple(block_weights))

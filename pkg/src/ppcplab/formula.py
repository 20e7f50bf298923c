"""Weighted-CNF data model, the pwsat text format, and brute-force oracles.

Two syntactic classes are supported:

  * g12n: 2-CNF with every literal negated (the W[1]-complete fragment),
  * g21p: CNF of unbounded clause length with every literal positive
    (the W[2]-complete fragment).

pwsat format (line oriented):

  * lines starting with ``c`` are comments,
  * header ``p pwsat <class> <num_vars> <num_clauses> <k>``,
  * one clause per line, signed decimal literals terminated by ``0``.

Alternating instances add block lines after the header:

  * ``b <i> <k_i> <v1> <v2> ... 0`` declares block i with weight k_i;
    blocks must cover every variable exactly once.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional


class GuardError(ValueError):
    """A desk-scale size guard was exceeded."""


class ClassMismatchError(ValueError):
    """An operation received a formula of the wrong syntactic class."""


class PwsatParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ClassTag(str, Enum):
    G12N = "g12n"  # 2-CNF, all literals negated
    G21P = "g21p"  # unbounded CNF, all literals positive


class _UnsatMarker:
    """Sentinel returned by simplify when a substitution falsifies a clause."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNSAT"


UNSAT = _UnsatMarker()


def derived_m(num_vars: int, num_clauses: int) -> int:
    """Smallest m with 2^m >= max(num_vars, num_clauses), floored at 1."""
    return (max(num_vars, num_clauses, 2) - 1).bit_length()


@dataclass(frozen=True)
class WeightedFormula:
    """A CNF formula in one of the two classes, with weight target k.

    ``m`` defaults to the derived cube width but may be pinned to any larger
    value; a stable m is what keeps proof tables comparable when a formula is
    simplified inside the branch protocol.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    class_tag: ClassTag
    k: int
    m: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(cl) for cl in self.clauses))
        if self.num_vars < 1:
            raise ValueError("num_vars must be at least 1")
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        for cl in self.clauses:
            if not cl:
                raise ValueError("empty clause")
            for lit in cl:
                if lit == 0 or not 1 <= abs(lit) <= self.num_vars:
                    raise ValueError(f"literal {lit} out of range")
            if self.class_tag is ClassTag.G12N:
                if len(cl) > 2:
                    raise ValueError(f"clause {cl} longer than 2 in class g12n")
                if any(lit > 0 for lit in cl):
                    raise ValueError(f"positive literal in g12n clause {cl}")
            else:
                if any(lit < 0 for lit in cl):
                    raise ValueError(f"negative literal in g21p clause {cl}")
        low = derived_m(self.num_vars, len(self.clauses))
        if self.m is None:
            object.__setattr__(self, "m", low)
        elif self.m < low:
            raise ValueError(f"explicit m={self.m} below derived minimum {low}")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def max_clause_len(self) -> int:
        return max((len(cl) for cl in self.clauses), default=1)


@dataclass(frozen=True)
class Assignment:
    """Truth assignment given by the set of variables made true."""

    true_set: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "true_set", frozenset(self.true_set))

    @property
    def weight(self) -> int:
        return len(self.true_set)


def weight(assignment: Assignment) -> int:
    return assignment.weight


def eval_clause(formula: WeightedFormula, clause_index: int, assignment: Assignment) -> bool:
    """True iff some literal of the clause holds under the assignment."""
    if not 0 <= clause_index < formula.num_clauses:
        raise IndexError(f"clause index {clause_index} out of range")
    for lit in formula.clauses[clause_index]:
        if lit > 0 and lit in assignment.true_set:
            return True
        if lit < 0 and -lit not in assignment.true_set:
            return True
    return False


def satisfies(formula: WeightedFormula, assignment: Assignment) -> bool:
    return all(eval_clause(formula, i, assignment) for i in range(formula.num_clauses))


def brute_force_wsat(formula: WeightedFormula) -> tuple[bool, Optional[Assignment]]:
    """Exhaustive ground truth over all weight-k assignments (num_vars <= 24)."""
    if formula.num_vars > 24:
        raise GuardError(f"brute force limited to 24 variables, got {formula.num_vars}")
    if formula.k > formula.num_vars:
        return False, None
    for combo in itertools.combinations(range(1, formula.num_vars + 1), formula.k):
        candidate = Assignment(frozenset(combo))
        if satisfies(formula, candidate):
            return True, candidate
    return False, None


def simplify(formula: WeightedFormula, partial: Mapping[int, bool]):
    """Substitute a partial assignment and reduce the formula.

    Satisfied clauses are dropped; a g12n clause surviving with one literal is
    re-encoded as a repeated-literal pair so every clause stays binary.  A
    clause falsified outright yields the UNSAT marker.  The weight target
    drops by the number of variables the partial assignment makes true, and m
    is pinned to the parent's value.
    """
    kept: list[tuple[int, ...]] = []
    for cl in formula.clauses:
        lits = []
        satisfied = False
        for lit in cl:
            var = abs(lit)
            if var in partial:
                lit_true = partial[var] if lit > 0 else not partial[var]
                if lit_true:
                    satisfied = True
                    break
                continue  # falsified literal drops out
            lits.append(lit)
        if satisfied:
            continue
        if not lits:
            return UNSAT
        if formula.class_tag is ClassTag.G12N and len(lits) == 1 and len(cl) == 2:
            lits = [lits[0], lits[0]]
        kept.append(tuple(lits))
    assigned_true = sum(1 for v in partial.values() if v)
    return WeightedFormula(
        num_vars=formula.num_vars,
        clauses=tuple(kept),
        class_tag=formula.class_tag,
        k=max(formula.k - assigned_true, 0),
        m=formula.m,
    )


@dataclass(frozen=True)
class AwsatInstance:
    """A g12n formula with its variables partitioned into quantifier blocks.

    Blocks alternate exists/forall starting existential.  Construction admits
    any l >= 1 (an even l is what pad_to_odd consumes); protocol entry points
    demand odd l.
    """

    formula: WeightedFormula
    blocks: tuple[tuple[int, ...], ...]
    block_weights: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(tuple(sorted(b)) for b in self.blocks))
        object.__setattr__(self, "block_weights", tuple(self.block_weights))
        if self.formula.class_tag is not ClassTag.G12N:
            raise ClassMismatchError("alternating instances use the g12n class")
        if len(self.blocks) < 1:
            raise ValueError("at least one block is required")
        if len(self.blocks) != len(self.block_weights):
            raise ValueError("one weight per block is required")
        if any(kw < 0 for kw in self.block_weights):
            raise ValueError("block weights must be nonnegative")
        flat = [v for b in self.blocks for v in b]
        if sorted(flat) != list(range(1, self.formula.num_vars + 1)):
            raise ValueError("blocks must partition the variables exactly")
        if sum(self.block_weights) != self.formula.k:
            raise ValueError("block weights must sum to k")

    @property
    def l(self) -> int:
        return len(self.blocks)


def brute_force_awsat(instance: AwsatInstance) -> bool:
    """Exhaustive evaluation of the alternating weight-constrained quantifiers."""
    total = 1
    for block, kw in zip(instance.blocks, instance.block_weights):
        total *= math.comb(len(block), kw)
        if total > 10**7:
            raise GuardError("alternation tree exceeds 10^7 branches")

    blocks = instance.blocks
    weights = instance.block_weights
    l = instance.l

    def value(i: int, trues: frozenset[int]) -> bool:
        if i == l:
            return satisfies(instance.formula, Assignment(trues))
        subsets = itertools.combinations(blocks[i], weights[i])
        if (i + 1) % 2 == 1:  # 1-based odd block: existential
            return any(value(i + 1, trues | frozenset(s)) for s in subsets)
        return all(value(i + 1, trues | frozenset(s)) for s in subsets)

    return value(0, frozenset())


# ---------------------------------------------------------------------------
# pwsat text format
# ---------------------------------------------------------------------------


def _parse_clause_line(line_no: int, tokens: list[str], num_vars: int, tag: ClassTag) -> tuple[int, ...]:
    try:
        values = [int(t) for t in tokens]
    except ValueError:
        raise PwsatParseError(line_no, f"non-integer token in clause: {' '.join(tokens)}")
    if not values or values[-1] != 0:
        raise PwsatParseError(line_no, "clause line must end with 0")
    lits = values[:-1]
    if not lits:
        raise PwsatParseError(line_no, "empty clause")
    if any(v == 0 for v in lits):
        raise PwsatParseError(line_no, "literal 0 is only valid as the terminator")
    for lit in lits:
        if abs(lit) > num_vars:
            raise PwsatParseError(line_no, f"literal {lit} out of range (num_vars={num_vars})")
    if tag is ClassTag.G12N:
        if len(lits) > 2:
            raise PwsatParseError(line_no, "g12n clauses carry at most 2 literals")
        if any(lit > 0 for lit in lits):
            raise PwsatParseError(line_no, f"positive literal in g12n clause: {lits}")
    else:
        if any(lit < 0 for lit in lits):
            raise PwsatParseError(line_no, f"negative literal in g21p clause: {lits}")
    return tuple(lits)


def _parse_lines(text: str, allow_blocks: bool):
    header = None
    clauses: list[tuple[int, ...]] = []
    block_lines: dict[int, tuple[int, tuple[int, ...]]] = {}
    last_line = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        last_line = line_no
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        if tokens[0] == "p":
            if header is not None:
                raise PwsatParseError(line_no, "duplicate header")
            if len(tokens) != 6 or tokens[1] != "pwsat":
                raise PwsatParseError(line_no, "header must read: p pwsat <class> <num_vars> <num_clauses> <k>")
            try:
                tag = ClassTag(tokens[2])
            except ValueError:
                raise PwsatParseError(line_no, f"unknown class {tokens[2]!r} (expected g12n or g21p)")
            try:
                num_vars, num_clauses, k = int(tokens[3]), int(tokens[4]), int(tokens[5])
            except ValueError:
                raise PwsatParseError(line_no, "header counts must be integers")
            if num_vars < 1 or num_clauses < 0 or k < 0:
                raise PwsatParseError(line_no, "header counts out of range")
            header = (tag, num_vars, num_clauses, k)
            continue
        if header is None:
            raise PwsatParseError(line_no, "clause before header")
        tag, num_vars, num_clauses, k = header
        if tokens[0] == "b":
            if not allow_blocks:
                raise PwsatParseError(line_no, "block lines are only valid in awsat instances")
            try:
                values = [int(t) for t in tokens[1:]]
            except ValueError:
                raise PwsatParseError(line_no, "non-integer token in block line")
            if len(values) < 2 or values[-1] != 0:
                raise PwsatParseError(line_no, "block line must read: b <i> <k_i> <vars...> 0")
            idx, kw, members = values[0], values[1], tuple(values[2:-1])
            if idx < 1:
                raise PwsatParseError(line_no, "block index must be positive")
            if idx in block_lines:
                raise PwsatParseError(line_no, f"duplicate block {idx}")
            if any(not 1 <= v <= num_vars for v in members):
                raise PwsatParseError(line_no, "block member out of range")
            block_lines[idx] = (kw, members)
            continue
        clauses.append(_parse_clause_line(line_no, tokens, num_vars, tag))
    if header is None:
        raise PwsatParseError(last_line or 1, "missing header")
    tag, num_vars, num_clauses, k = header
    if len(clauses) != num_clauses:
        raise PwsatParseError(last_line, f"expected {num_clauses} clauses, found {len(clauses)}")
    return header, tuple(clauses), block_lines, last_line


def parse_pwsat(text: str) -> WeightedFormula:
    """Parse a plain pwsat instance (block lines are rejected)."""
    (tag, num_vars, _, k), clauses, _, _ = _parse_lines(text, allow_blocks=False)
    return WeightedFormula(num_vars=num_vars, clauses=clauses, class_tag=tag, k=k)


def parse_awsat(text: str) -> AwsatInstance:
    """Parse an awsat instance: pwsat header/clauses plus block lines."""
    (tag, num_vars, _, k), clauses, block_lines, last = _parse_lines(text, allow_blocks=True)
    if tag is not ClassTag.G12N:
        raise PwsatParseError(last, "awsat instances use the g12n class")
    if not block_lines:
        raise PwsatParseError(last, "awsat instance declares no blocks")
    l = max(block_lines)
    if sorted(block_lines) != list(range(1, l + 1)):
        raise PwsatParseError(last, "block indices must be contiguous from 1")
    blocks = tuple(block_lines[i][1] for i in range(1, l + 1))
    block_weights = tuple(block_lines[i][0] for i in range(1, l + 1))
    covered = sorted(v for b in blocks for v in b)
    if covered != list(range(1, num_vars + 1)):
        raise PwsatParseError(last, "blocks must cover every variable exactly once")
    if sum(block_weights) != k:
        raise PwsatParseError(last, f"block weights sum to {sum(block_weights)}, header k={k}")
    formula = WeightedFormula(num_vars=num_vars, clauses=clauses, class_tag=tag, k=k)
    return AwsatInstance(formula=formula, blocks=blocks, block_weights=block_weights)


def render_pwsat(formula: WeightedFormula) -> str:
    lines = [
        f"p pwsat {formula.class_tag.value} {formula.num_vars} {formula.num_clauses} {formula.k}"
    ]
    for cl in formula.clauses:
        lines.append(" ".join(str(lit) for lit in cl) + " 0")
    return "\n".join(lines) + "\n"


def render_awsat(instance: AwsatInstance) -> str:
    f = instance.formula
    lines = [f"p pwsat {f.class_tag.value} {f.num_vars} {f.num_clauses} {f.k}"]
    for i, (block, kw) in enumerate(zip(instance.blocks, instance.block_weights), start=1):
        lines.append(f"b {i} {kw} " + " ".join(str(v) for v in block) + " 0")
    for cl in f.clauses:
        lines.append(" ".join(str(lit) for lit in cl) + " 0")
    return "\n".join(lines) + "\n"

"""Arithmetization of weighted CNF over a prime field.

Clauses and variables are coded as m-bit strings (variable i gets code i-1,
clause j gets code j, most significant bit first; codes beyond the real
counts are dummy slots).  The module builds the field-valued functions whose
boolean-cube totals witness satisfiability and assignment weight:

  * ``mle_eval``              the unique multilinear extension of a boolean table,
  * ``clause_indicator_eval`` the extension of "x codes the variable at a given
                              position of clause z",
  * ``build_w1_summand``      the randomly weighted per-clause unsatisfaction
                              product for negated 2-CNF: summed over the cube it
                              vanishes exactly when the assignment satisfies
                              every clause (with high probability over the
                              clause weights),
  * ``build_w2_summand``      the same for positive CNF of padded clause length L,
                              with factors C_i(z, x_i) * (1 - A(x_i)),
  * ``build_weight_summand``  A(z) * B(z), whose cube total counts the true
                              variables inside an optional block.

Each summand also carries a ``ProductPlan``: the exact product-of-multilinear-
factors structure an honest prover folds round by round.  The plan works block
by block (clause codes first, then each variable-code block); while the clause
block is active, every variable block is represented by its summed-out proxy
table, which agrees with the true inner sum everywhere by multilinearity.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

from .field import FieldElement, PrimeField
from .formula import ClassMismatchError, ClassTag, WeightedFormula

Point = tuple[FieldElement, ...]


def code_bits(code: int, width: int) -> tuple[int, ...]:
    """MSB-first bits of a variable or clause code."""
    return tuple((code >> (width - 1 - j)) & 1 for j in range(width))


@dataclass(frozen=True)
class BooleanTable:
    """Dense truth table over the m-cube; entry ``values[code]`` is f at the
    MSB-first bit pattern of ``code``."""

    arity: int
    values: tuple[int, ...]
    _ones: tuple[int, ...] = dc_field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.arity < 1:
            raise ValueError("arity must be at least 1")
        if len(self.values) != 1 << self.arity:
            raise ValueError(f"expected {1 << self.arity} entries, got {len(self.values)}")
        if any(v not in (0, 1) for v in self.values):
            raise ValueError("table entries must be 0 or 1")
        object.__setattr__(
            self, "_ones", tuple(c for c, v in enumerate(self.values) if v)
        )

    @classmethod
    def from_true_codes(cls, codes: Sequence[int], arity: int) -> "BooleanTable":
        values = [0] * (1 << arity)
        for c in codes:
            values[c] = 1
        return cls(arity, tuple(values))

    @classmethod
    def from_assignment(cls, true_set, arity: int) -> "BooleanTable":
        """Variable i maps to code i-1; everything else (dummies included) is 0."""
        return cls.from_true_codes([v - 1 for v in true_set], arity)

    def ones(self) -> tuple[int, ...]:
        return self._ones


def mle_eval(table: BooleanTable, point: Sequence[FieldElement]) -> FieldElement:
    """Evaluate the multilinear extension of ``table`` at a field point.

    Sparse tables are evaluated as a sum of cube indicators over their 1-cells,
    dense ones by per-coordinate folding; both are exact.
    """
    if len(point) != table.arity:
        raise ValueError(f"point has {len(point)} coordinates, table arity is {table.arity}")
    fld = point[0].field
    p = fld.modulus
    ones = table.ones()
    size = 1 << table.arity
    if len(ones) * table.arity * 2 < size:
        pos = [x.value % p for x in point]
        neg = [(1 - x.value) % p for x in point]
        width = table.arity
        total = 0
        for code in ones:
            acc = 1
            for j in range(width):
                acc = acc * (pos[j] if (code >> (width - 1 - j)) & 1 else neg[j]) % p
            total += acc
        return FieldElement(total, fld)
    vals = list(table.values)
    for x in point:
        half = len(vals) >> 1
        xv = x.value
        vals = [(vals[i] + xv * (vals[half + i] - vals[i])) % p for i in range(half)]
    return FieldElement(vals[0], fld)


@dataclass(frozen=True)
class ClauseWeights:
    """The random per-bit clause weights r_1..r_m.  A clause code z gets weight
    prod_j r_j^{z_j}; its multilinear extension is prod_j ((1-z_j) + r_j z_j)."""

    r: tuple[FieldElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(self.r))
        if not self.r:
            raise ValueError("at least one weight is required")

    @property
    def m(self) -> int:
        return len(self.r)

    @property
    def field(self) -> PrimeField:
        return self.r[0].field

    def extension_at(self, z: Sequence[FieldElement]) -> FieldElement:
        if len(z) != self.m:
            raise ValueError("point width does not match the number of weights")
        p = self.field.modulus
        acc = 1
        for zj, rj in zip(z, self.r):
            acc = acc * ((1 - zj.value) + rj.value * zj.value) % p
        return FieldElement(acc, self.field)

    def bool_table(self) -> list[int]:
        """Weight of every clause code, indexed MSB-first."""
        p = self.field.modulus
        table = [1]
        for rj in self.r:
            nxt = []
            for v in table:
                nxt.append(v)
                nxt.append(v * rj.value % p)
            table = nxt
        return table


def _position_var_code(formula: WeightedFormula, clause_idx: int, position: int) -> int:
    """Code of the variable at a 1-based clause position; short clauses repeat
    their last variable."""
    lits = formula.clauses[clause_idx]
    return abs(lits[min(position, len(lits)) - 1]) - 1


def _cube_chi(code: int, pos: list[int], neg: list[int], width: int) -> int:
    acc = 1
    for j in range(width):
        acc *= pos[j] if (code >> (width - 1 - j)) & 1 else neg[j]
    return acc


def clause_indicator_eval(
    formula: WeightedFormula,
    position: int,
    z_point: Sequence[FieldElement],
    x_point: Sequence[FieldElement],
) -> FieldElement:
    """Multilinear extension, jointly in z and x, of the boolean indicator
    "x is the variable at ``position`` of clause z".  Dummy clause codes
    contribute nothing."""
    if position < 1:
        raise ValueError("positions are 1-based")
    if formula.class_tag is ClassTag.G12N and position > 2:
        raise ValueError("g12n clauses have positions 1 and 2 only")
    m = formula.m
    if len(z_point) != m or len(x_point) != m:
        raise ValueError("points must have m coordinates")
    fld = z_point[0].field
    p = fld.modulus
    zpos = [v.value % p for v in z_point]
    zneg = [(1 - v.value) % p for v in z_point]
    xpos = [v.value % p for v in x_point]
    xneg = [(1 - v.value) % p for v in x_point]
    total = 0
    for c in range(formula.num_clauses):
        zfac = _cube_chi(c, zpos, zneg, m) % p
        if zfac == 0:
            continue
        vc = _position_var_code(formula, c, position)
        total = (total + zfac * (_cube_chi(vc, xpos, xneg, m) % p)) % p
    return FieldElement(total, fld)


TailBuilder = Callable[[Point], list[list[int]]]


@dataclass(frozen=True)
class ProductPlan:
    """Product-of-multilinear-factors structure for an honest prover.

    Variables come in blocks of ``block_vars``: one head block followed by
    ``len(tail_builders)`` tail blocks.  ``head_tables`` holds, over the head
    block, first ``num_standalone`` genuine factors and then one summed-out
    proxy per tail (in tail order).  Once the head block is bound at a point,
    each tail builder produces that tail's factor tables over its own block.
    """

    field: PrimeField
    block_vars: int
    head_tables: tuple[tuple[int, ...], ...]
    num_standalone: int
    tail_builders: tuple[TailBuilder, ...]

    def __post_init__(self):
        if len(self.head_tables) != self.num_standalone + len(self.tail_builders):
            raise ValueError("head must carry one proxy table per tail")
        size = 1 << self.block_vars
        if any(len(t) != size for t in self.head_tables):
            raise ValueError("head tables must cover the whole block cube")

    @property
    def num_vars(self) -> int:
        return self.block_vars * (1 + len(self.tail_builders))


@dataclass(frozen=True)
class SummandSpec:
    """A multivariate summand: variable count, per-variable degree bounds, a
    pointwise evaluator, and (when the factor structure is known) a plan
    builder that turns a committed assignment table into a ProductPlan."""

    num_vars: int
    degree_bounds: tuple[int, ...]
    evaluator: Callable[[Point], FieldElement]
    field: PrimeField
    plan_builder: Optional[Callable[[BooleanTable], ProductPlan]] = None

    def __post_init__(self):
        if len(self.degree_bounds) != self.num_vars:
            raise ValueError("one degree bound per variable is required")


def build_w1_summand(
    formula: WeightedFormula,
    assignment_oracle: Callable[[Point], FieldElement],
    weights: ClauseWeights,
) -> SummandSpec:
    """Summand over (z, x1, x2) whose cube total is the randomly weighted count
    of unsatisfied clauses: w(z) * C_1(z,x1) A(x1) * C_2(z,x2) A(x2)."""
    if formula.class_tag is not ClassTag.G12N:
        raise ClassMismatchError("the 2-round-per-variable summand needs class g12n")
    m = formula.m
    if weights.m != m:
        raise ValueError("need one clause weight per code bit")
    fld = weights.field

    def evaluator(point: Point) -> FieldElement:
        if len(point) != 3 * m:
            raise ValueError("point must have 3m coordinates")
        z, x1, x2 = point[:m], point[m : 2 * m], point[2 * m :]
        val = weights.extension_at(z)
        val = val * clause_indicator_eval(formula, 1, z, x1) * assignment_oracle(tuple(x1))
        val = val * clause_indicator_eval(formula, 2, z, x2) * assignment_oracle(tuple(x2))
        return val

    def plan_builder(table: BooleanTable) -> ProductPlan:
        if table.arity != m:
            raise ValueError("assignment table arity must equal m")
        p = fld.modulus
        a_vals = list(table.values)
        head: list[tuple[int, ...]] = [tuple(weights.bool_table())]
        for i in (1, 2):
            proxy = [0] * (1 << m)
            for c in range(formula.num_clauses):
                proxy[c] = a_vals[_position_var_code(formula, c, i)]
            head.append(tuple(proxy))

        def make_tail(i: int) -> TailBuilder:
            def build(z_star: Point) -> list[list[int]]:
                zpos = [v.value % p for v in z_star]
                zneg = [(1 - v.value) % p for v in z_star]
                ctab = [0] * (1 << m)
                for c in range(formula.num_clauses):
                    vc = _position_var_code(formula, c, i)
                    ctab[vc] = (ctab[vc] + _cube_chi(c, zpos, zneg, m)) % p
                return [ctab, list(a_vals)]

            return build

        return ProductPlan(
            field=fld,
            block_vars=m,
            head_tables=tuple(head),
            num_standalone=1,
            tail_builders=(make_tail(1), make_tail(2)),
        )

    bounds = (3,) * m + (2,) * (2 * m)
    return SummandSpec(3 * m, bounds, evaluator, fld, plan_builder)


def build_w2_summand(
    formula: WeightedFormula,
    assignment_oracle: Callable[[Point], FieldElement],
    weights: ClauseWeights,
    padded_len: int,
) -> SummandSpec:
    """Positive-CNF summand over (z, x1..xL): w(z) * prod_i C_i(z,xi)(1 - A(xi)).

    Clauses shorter than L repeat their last variable; on boolean points the
    repeated factor is 1 exactly when the clause is unsatisfied, so padding
    never changes the cube total."""
    if formula.class_tag is not ClassTag.G21P:
        raise ClassMismatchError("the positive-clause summand needs class g21p")
    L = padded_len
    if L < formula.max_clause_len:
        raise ValueError(f"padded length {L} below longest clause {formula.max_clause_len}")
    m = formula.m
    if weights.m != m:
        raise ValueError("need one clause weight per code bit")
    fld = weights.field

    def evaluator(point: Point) -> FieldElement:
        if len(point) != (L + 1) * m:
            raise ValueError("point must have (L+1)*m coordinates")
        z = point[:m]
        val = weights.extension_at(z)
        one = fld.one
        for i in range(1, L + 1):
            xi = point[i * m : (i + 1) * m]
            val = val * clause_indicator_eval(formula, i, z, xi)
            val = val * (one - assignment_oracle(tuple(xi)))
        return val

    def plan_builder(table: BooleanTable) -> ProductPlan:
        if table.arity != m:
            raise ValueError("assignment table arity must equal m")
        p = fld.modulus
        a_vals = list(table.values)
        one_minus = [(1 - v) % p for v in a_vals]
        head: list[tuple[int, ...]] = [tuple(weights.bool_table())]
        for i in range(1, L + 1):
            proxy = [0] * (1 << m)
            for c in range(formula.num_clauses):
                proxy[c] = one_minus[_position_var_code(formula, c, i)]
            head.append(tuple(proxy))

        def make_tail(i: int) -> TailBuilder:
            def build(z_star: Point) -> list[list[int]]:
                zpos = [v.value % p for v in z_star]
                zneg = [(1 - v.value) % p for v in z_star]
                ctab = [0] * (1 << m)
                for c in range(formula.num_clauses):
                    vc = _position_var_code(formula, c, i)
                    ctab[vc] = (ctab[vc] + _cube_chi(c, zpos, zneg, m)) % p
                return [ctab, list(one_minus)]

            return build

        return ProductPlan(
            field=fld,
            block_vars=m,
            head_tables=tuple(head),
            num_standalone=1,
            tail_builders=tuple(make_tail(i) for i in range(1, L + 1)),
        )

    bounds = (1 + L,) * m + (2,) * (L * m)
    return SummandSpec((L + 1) * m, bounds, evaluator, fld, plan_builder)


def build_weight_summand(
    assignment_oracle: Callable[[Point], FieldElement],
    m: int,
    fld: PrimeField,
    block_table: Optional[BooleanTable] = None,
) -> SummandSpec:
    """Summand A(z) * B(z); its cube total counts the true variables inside the
    block (B is identically 1 when no block is given)."""
    if block_table is not None and block_table.arity != m:
        raise ValueError("block table arity must equal m")

    def evaluator(point: Point) -> FieldElement:
        if len(point) != m:
            raise ValueError("point must have m coordinates")
        val = assignment_oracle(tuple(point))
        if block_table is not None:
            val = val * mle_eval(block_table, point)
        return val

    def plan_builder(table: BooleanTable) -> ProductPlan:
        if table.arity != m:
            raise ValueError("assignment table arity must equal m")
        head: list[tuple[int, ...]] = [tuple(table.values)]
        if block_table is not None:
            head.append(tuple(block_table.values))
        return ProductPlan(
            field=fld,
            block_vars=m,
            head_tables=tuple(head),
            num_standalone=len(head),
            tail_builders=(),
        )

    return SummandSpec(m, (2,) * m, evaluator, fld, plan_builder)

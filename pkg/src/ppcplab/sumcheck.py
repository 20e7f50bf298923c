"""The generic sum-check round protocol, proof-side strategies, and exact
random-bit / proof-bit metering.

One round: the prover supplies a univariate polynomial g'_i for the current
variable; the verifier checks g'_i(0) + g'_i(1) against the running claim,
draws a random field element r_i, and continues with the claim g'_i(r_i).
After the last round the caller performs the final direct evaluation, since
only the caller knows which factors it computes itself and which it must read
from the proof.

Field elements are drawn by rejection sampling from ceil(log2 p)-bit blocks;
rejected blocks still count toward the bits drawn (and are tracked separately
so closed-form bit counts can be checked exactly).
"""

from __future__ import annotations

import random
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .arithmetize import BooleanTable, ProductPlan, SummandSpec, mle_eval
from .field import FieldElement, PrimeField, UniPoly, interpolate

Point = tuple[FieldElement, ...]

_SEED_MASK = (1 << 64) - 1


def derive_seed(seed: int, index: int) -> int:
    """Per-stage/per-trial seed: the index is appended below the seed's low
    32 bits, reduced to 64 bits."""
    return ((seed & _SEED_MASK) * (1 << 32) + index) & _SEED_MASK


class RandomTape:
    """Deterministic seeded randomness with exact bit accounting.

    ``bits_drawn`` counts every bit ever pulled from the generator;
    ``overhead_bits`` is the part spent on rejected or discarded draws.
    Identical seeds replay identical tapes.
    """

    def __init__(self, seed: int):
        self.seed = seed & _SEED_MASK
        self._rng = random.Random(self.seed)
        self.bits_drawn = 0
        self.overhead_bits = 0

    def draw_int(self, n: int) -> int:
        """Uniform value in [0, n), costing ceil(log2 n) bits per attempt."""
        if n < 1:
            raise ValueError("n must be positive")
        if n == 1:
            return 0
        width = (n - 1).bit_length()
        while True:
            v = self._rng.getrandbits(width)
            self.bits_drawn += width
            if v < n:
                return v
            self.overhead_bits += width

    def draw_int_excluding(self, n: int, exclude) -> int:
        """Uniform value in [0, n) outside ``exclude``; discarded hits count as
        overhead."""
        if n <= len(exclude):
            raise ValueError("no admissible values remain")
        width = (n - 1).bit_length() if n > 1 else 0
        while True:
            v = self.draw_int(n)
            if v not in exclude:
                return v
            self.overhead_bits += width


class ResourceMeter:
    """Counts random bits drawn, proof bits read, and proof oracle queries."""

    def __init__(self):
        self.random_bits = 0
        self.proof_bits = 0
        self.oracle_queries = 0

    def snapshot(self) -> "MeterSnapshot":
        return MeterSnapshot(self.random_bits, self.proof_bits, self.oracle_queries)


@dataclass(frozen=True)
class MeterSnapshot:
    random_bits: int
    proof_bits: int
    oracle_queries: int


def draw_field_element(tape: RandomTape, fld: PrimeField, meter: ResourceMeter) -> FieldElement:
    before = tape.bits_drawn
    v = tape.draw_int(fld.modulus)
    meter.random_bits += tape.bits_drawn - before
    return fld(v)


@dataclass(frozen=True)
class RoundTranscript:
    index: int
    claimed: UniPoly
    challenge: FieldElement
    running: FieldElement


@dataclass(frozen=True)
class StageReport:
    name: str
    rounds: int
    random_bits: int
    proof_bits: int
    oracle_queries: int
    accepted: bool


@dataclass(frozen=True)
class Verdict:
    """Accept/reject with the failing stage and round (0 means the final
    direct evaluation) plus a resource snapshot."""

    accepted: bool
    meter: MeterSnapshot
    rejection_round: Optional[int] = None
    stage: Optional[str] = None
    stages: tuple[StageReport, ...] = ()

    def __post_init__(self):
        if self.accepted and self.rejection_round is not None:
            raise ValueError("an accepting verdict cannot carry a rejection round")


class ProverStrategy(ABC):
    """Source of round polynomials and assignment values.

    ``begin_sumcheck`` is invoked at the start of each sum-check instance so a
    single strategy can serve the multi-stage verifier.
    """

    def begin_sumcheck(self, spec: SummandSpec, claim: FieldElement) -> None:
        pass

    @abstractmethod
    def round_poly(self, i: int, challenges: Point, current_claim: FieldElement) -> UniPoly:
        ...

    @abstractmethod
    def assignment_query(self, point: Point) -> FieldElement:
        ...


@dataclass(frozen=True)
class SumcheckRun:
    verdict: Verdict
    final_point: Point
    final_expected: Optional[FieldElement]
    transcripts: tuple[RoundTranscript, ...]


def run_sumcheck(
    spec: SummandSpec,
    claim: FieldElement,
    prover: ProverStrategy,
    tape: RandomTape,
    meter: ResourceMeter,
) -> SumcheckRun:
    """Drive the round protocol for ``spec`` against ``prover``.

    Per round the verifier reads (d_i + 1) * ceil(log2 p) proof bits and draws
    one field element.  Malformed prover output (wrong type, too many
    coefficients, wrong field) is a rejection at that round, never a crash.
    The final direct evaluation is left to the caller, which receives the
    fully instantiated point and the last running claim.
    """
    fld = spec.field
    if claim.field.modulus != fld.modulus:
        raise ValueError("claim must live in the summand's field")
    prover.begin_sumcheck(spec, claim)
    a = claim
    challenges: list[FieldElement] = []
    transcripts: list[RoundTranscript] = []
    zero, one = fld.zero, fld.one
    for i in range(1, spec.num_vars + 1):
        d = spec.degree_bounds[i - 1]
        poly = prover.round_poly(i, tuple(challenges), a)
        meter.proof_bits += (d + 1) * fld.bits
        malformed = (
            not isinstance(poly, UniPoly)
            or len(poly.coeffs) > d + 1
            or any(c.field.modulus != fld.modulus for c in poly.coeffs)
        )
        if malformed or poly.evaluate(zero) + poly.evaluate(one) != a:
            return SumcheckRun(
                Verdict(False, meter.snapshot(), rejection_round=i),
                tuple(challenges),
                None,
                tuple(transcripts),
            )
        r = draw_field_element(tape, fld, meter)
        a = poly.evaluate(r)
        challenges.append(r)
        transcripts.append(RoundTranscript(i, poly, r, a))
    return SumcheckRun(
        Verdict(True, meter.snapshot()),
        tuple(challenges),
        a,
        tuple(transcripts),
    )


def honest_round_poly(spec: SummandSpec, prefix: Sequence[FieldElement], i: int) -> UniPoly:
    """Exact round polynomial by direct partial summation.

    Evaluates the partial sum at the d_i + 1 points 0..d_i and interpolates.
    Exponential in the number of free variables; intended for small summands
    and as the reference the fast prover is checked against.
    """
    if len(prefix) != i - 1:
        raise ValueError("prefix must instantiate exactly the first i-1 variables")
    fld = spec.field
    d = spec.degree_bounds[i - 1]
    free = spec.num_vars - i
    pts = []
    for t in range(d + 1):
        tv = fld(t)
        total = fld.zero
        for mask in range(1 << free):
            suffix = tuple(fld((mask >> (free - 1 - j)) & 1) for j in range(free))
            total = total + spec.evaluator(tuple(prefix) + (tv,) + suffix)
        pts.append((tv, total))
    return interpolate(pts)


class PlanFolder:
    """Folds a ProductPlan's factor tables as challenges bind variables.

    Every factor is multilinear in each variable of its block, so binding
    a variable at r is the exact affine map lo + r * (hi - lo) per entry,
    and the per-round sums over the remaining cube are exactly the honest
    round polynomial values.
    """

    def __init__(self, plan: ProductPlan):
        self.plan = plan
        self._p = plan.field.modulus
        self._reset()

    def _reset(self):
        self._bound: list[int] = []
        self._tables: list[list[int]] = [list(t) for t in self.plan.head_tables]
        self._stage = 0  # 0 = head block, j >= 1 = tail j-1
        self._mult = 1
        self._head_scalar = 1
        self._tail_tables: list[list[list[int]]] = []
        self._tail_sums: list[int] = []
        self._tail_values: list[int] = []

    def sync(self, challenges: Point) -> None:
        vals = [c.value for c in challenges]
        if vals[: len(self._bound)] != self._bound:
            self._reset()
        for v in vals[len(self._bound) :]:
            self._bind(v)

    def round_values(self, degree: int) -> list[int]:
        """Values of the current round polynomial at t = 0..degree."""
        p = self._p
        tables = self._tables
        half = len(tables[0]) >> 1
        out = []
        for t in range(degree + 1):
            if t == 0:
                slices = [tbl[:half] for tbl in tables]
            elif t == 1:
                slices = [tbl[half:] for tbl in tables]
            else:
                slices = [
                    [(lo + t * (hi - lo)) % p for lo, hi in zip(tbl[:half], tbl[half:])]
                    for tbl in tables
                ]
            first = slices[0]
            if len(slices) == 1:
                total = sum(first) % p
            else:
                total = 0
                for idx in range(half):
                    v = first[idx]
                    for s in slices[1:]:
                        v = v * s[idx] % p
                    total += v
                total %= p
            out.append(total * self._mult % p)
        return out

    def _bind(self, r: int) -> None:
        p = self._p
        folded = []
        for tbl in self._tables:
            half = len(tbl) >> 1
            folded.append([(tbl[i] + r * (tbl[half + i] - tbl[i])) % p for i in range(half)])
        self._tables = folded
        self._bound.append(r % p)
        if len(self._tables[0]) == 1:
            self._advance()

    def _advance(self) -> None:
        p = self._p
        plan = self.plan
        if self._stage == 0:
            scalars = [tbl[0] for tbl in self._tables]
            standalone = 1
            for s in scalars[: plan.num_standalone]:
                standalone = standalone * s % p
            self._head_scalar = standalone
            if not plan.tail_builders:
                return
            z_star = tuple(plan.field(v) for v in self._bound[: plan.block_vars])
            self._tail_tables = [builder(z_star) for builder in plan.tail_builders]
            self._tail_sums = []
            size = 1 << plan.block_vars
            for tabs in self._tail_tables:
                total = 0
                for idx in range(size):
                    v = tabs[0][idx]
                    for tb in tabs[1:]:
                        v = v * tb[idx] % p
                    total += v
                self._tail_sums.append(total % p)
            self._stage = 1
            self._tables = [list(t) for t in self._tail_tables[0]]
            self._recompute_mult()
        else:
            v = 1
            for tbl in self._tables:
                v = v * tbl[0] % p
            self._tail_values.append(v)
            if self._stage == len(plan.tail_builders):
                return
            self._stage += 1
            self._tables = [list(t) for t in self._tail_tables[self._stage - 1]]
            self._recompute_mult()

    def _recompute_mult(self) -> None:
        p = self._p
        mult = self._head_scalar
        for v in self._tail_values:
            mult = mult * v % p
        for t in self._tail_sums[self._stage :]:
            mult = mult * t % p
        self._mult = mult


class GenericHonestProver(ProverStrategy):
    """Honest prover over the pointwise evaluator; exponential, for small specs."""

    def __init__(self, assignment_oracle: Optional[Callable[[Point], FieldElement]] = None):
        self._oracle = assignment_oracle
        self._spec: Optional[SummandSpec] = None

    def begin_sumcheck(self, spec: SummandSpec, claim: FieldElement) -> None:
        self._spec = spec

    def round_poly(self, i: int, challenges: Point, current_claim: FieldElement) -> UniPoly:
        return honest_round_poly(self._spec, challenges, i)

    def assignment_query(self, point: Point) -> FieldElement:
        if self._oracle is None:
            raise RuntimeError("no assignment oracle attached")
        return self._oracle(tuple(point))


class TableCommittedProver(ProverStrategy):
    """Prover committed to one assignment table: round polynomials come from
    the table's exact multilinear extension, queries from direct evaluation."""

    def __init__(self, table: BooleanTable):
        self.table = table
        self._spec: Optional[SummandSpec] = None
        self._folder: Optional[PlanFolder] = None

    def begin_sumcheck(self, spec: SummandSpec, claim: FieldElement) -> None:
        self._spec = spec
        self._folder = PlanFolder(spec.plan_builder(self.table)) if spec.plan_builder else None

    def round_poly(self, i: int, challenges: Point, current_claim: FieldElement) -> UniPoly:
        spec = self._spec
        d = spec.degree_bounds[i - 1]
        if self._folder is None:
            return honest_round_poly(spec, challenges, i).padded(d)
        self._folder.sync(challenges)
        fld = spec.field
        vals = self._folder.round_values(d)
        poly = interpolate([(fld(t), fld(v)) for t, v in enumerate(vals)])
        return poly.padded(d)

    def assignment_query(self, point: Point) -> FieldElement:
        return mle_eval(self.table, point)


def table_committed_prover(table: BooleanTable) -> TableCommittedProver:
    return TableCommittedProver(table)


class AdaptiveCheater(ProverStrategy):
    """The canonical soundness adversary: it always satisfies the round
    consistency equation by absorbing the current discrepancy into the linear
    coefficient, pushing the error into later rounds.  Assignment queries are
    answered honestly from the wrapped strategy."""

    def __init__(self, base: ProverStrategy):
        self.base = base

    def begin_sumcheck(self, spec: SummandSpec, claim: FieldElement) -> None:
        self.base.begin_sumcheck(spec, claim)

    def round_poly(self, i: int, challenges: Point, current_claim: FieldElement) -> UniPoly:
        honest = self.base.round_poly(i, challenges, current_claim)
        fld = current_claim.field
        delta = current_claim - (honest.evaluate(fld.zero) + honest.evaluate(fld.one))
        if delta.value == 0:
            return honest
        coeffs = list(honest.coeffs)
        while len(coeffs) < 2:
            coeffs.append(fld.zero)
        coeffs[1] = coeffs[1] + delta
        return UniPoly(tuple(coeffs), honest.bound)

    def assignment_query(self, point: Point) -> FieldElement:
        return self.base.assignment_query(point)


def adaptive_cheater(base: ProverStrategy) -> AdaptiveCheater:
    return AdaptiveCheater(base)


class RandomGarbageProver(ProverStrategy):
    """Emits uniformly random coefficients and query answers; its own seeded
    generator, independent of the verifier's tape."""

    def __init__(self, seed: int):
        self._rng = random.Random(seed & _SEED_MASK)
        self._spec: Optional[SummandSpec] = None

    def begin_sumcheck(self, spec: SummandSpec, claim: FieldElement) -> None:
        self._spec = spec

    def round_poly(self, i: int, challenges: Point, current_claim: FieldElement) -> UniPoly:
        fld = self._spec.field
        d = self._spec.degree_bounds[i - 1]
        coeffs = tuple(fld(self._rng.randrange(fld.modulus)) for _ in range(d + 1))
        return UniPoly(coeffs, d)

    def assignment_query(self, point: Point) -> FieldElement:
        fld = point[0].field
        return fld(self._rng.randrange(fld.modulus))

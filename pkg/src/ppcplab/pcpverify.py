"""End-to-end verifiers for weighted SAT, the multilinearity spot-test, and
resource accounting.

A verification run is staged, in this fixed order so transcripts replay:

  1. multilinearity test of the proof's assignment oracle,
  2. draw the m random clause weights,
  3. main sum-check with claim 0 (the instance is satisfied),
  4. one weight sum-check per configured block with the claimed weight.

The verifier computes the clause indicators and the clause-weight extension
itself and never reads them from the proof; only round-polynomial
coefficients and assignment values count as proof bits.  The weight check is
restricted to the real-variable block, so weight parked on dummy codes never
counts.

The prime is selected from the total round budget of the whole run (sum-check
rounds plus one term per multilinearity repetition), so a single union bound
covers the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .arithmetize import (
    BooleanTable,
    ClauseWeights,
    build_w1_summand,
    build_w2_summand,
    build_weight_summand,
    clause_indicator_eval,
    mle_eval,
)
from .field import FieldElement, PrimeField, select_prime
from .formula import (
    ClassMismatchError,
    ClassTag,
    GuardError,
    WeightedFormula,
    brute_force_wsat,
)
from .sumcheck import (
    ProverStrategy,
    RandomTape,
    ResourceMeter,
    StageReport,
    Verdict,
    adaptive_cheater,
    derive_seed,
    draw_field_element,
    run_sumcheck,
    table_committed_prover,
    RandomGarbageProver,
)

Point = tuple[FieldElement, ...]


@dataclass(frozen=True)
class VerifierConfig:
    """Knobs shared by every verifier: target soundness, multilinearity-test
    repetitions (default 5m), and an optional explicit prime override used by
    experiments that want to separate "bound holds" from "bound is tight"."""

    epsilon: float = 0.5
    ml_test_reps: Optional[int] = None
    explicit_prime: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.epsilon <= 0.5:
            raise ValueError("epsilon must lie in (0, 1/2]")
        if self.ml_test_reps is not None and self.ml_test_reps < 1:
            raise ValueError("at least one multilinearity repetition is required")

    def reps_for(self, m: int) -> int:
        return self.ml_test_reps if self.ml_test_reps is not None else 5 * m


def multilinearity_test(
    oracle: Callable[[Point], FieldElement],
    m: int,
    reps: int,
    tape: RandomTape,
    meter: ResourceMeter,
    fld: PrimeField,
) -> tuple[bool, Optional[int]]:
    """Axis-parallel three-point collinearity test.

    Each repetition draws an axis, a point, and three distinct coordinates,
    then checks the oracle's restriction is affine there.  Per repetition:
    ceil(log2 m) + (m + 3) * ceil(log2 p) ideal random bits and
    3 * ceil(log2 p) proof bits.  Rejects on the first failing repetition.
    """
    p = fld.modulus
    for rep in range(1, reps + 1):
        before = tape.bits_drawn
        axis = tape.draw_int(m)
        point = [fld(tape.draw_int(p)) for _ in range(m)]
        t0 = tape.draw_int(p)
        t1 = tape.draw_int_excluding(p, {t0})
        t2 = tape.draw_int_excluding(p, {t0, t1})
        meter.random_bits += tape.bits_drawn - before
        values = []
        for t in (t0, t1, t2):
            q = list(point)
            q[axis] = fld(t)
            values.append(oracle(tuple(q)))
            meter.proof_bits += fld.bits
            meter.oracle_queries += 1
        f0, f1, f2 = values
        if (f2 - f0) * (fld(t1) - fld(t0)) != (f1 - f0) * (fld(t2) - fld(t0)):
            return False, rep
    return True, None


def _read_assignment(
    prover: ProverStrategy, point: Point, meter: ResourceMeter, fld: PrimeField
) -> Optional[FieldElement]:
    value = prover.assignment_query(tuple(point))
    meter.proof_bits += fld.bits
    meter.oracle_queries += 1
    if not isinstance(value, FieldElement) or value.field.modulus != fld.modulus:
        return None  # malformed proof value: reject, never crash
    return value


class _StageLog:
    def __init__(self, meter: ResourceMeter):
        self._meter = meter
        self._mark = meter.snapshot()
        self.reports: list[StageReport] = []

    def close(self, name: str, rounds: int, accepted: bool) -> None:
        now = self._meter.snapshot()
        self.reports.append(
            StageReport(
                name=name,
                rounds=rounds,
                random_bits=now.random_bits - self._mark.random_bits,
                proof_bits=now.proof_bits - self._mark.proof_bits,
                oracle_queries=now.oracle_queries - self._mark.oracle_queries,
                accepted=accepted,
            )
        )
        self._mark = now


WeightCheck = tuple[str, int, Optional[BooleanTable]]


def run_g12n_protocol(
    formula: WeightedFormula,
    prover: ProverStrategy,
    tape: RandomTape,
    meter: ResourceMeter,
    log: _StageLog,
    fld: PrimeField,
    reps: int,
    weight_checks: Sequence[WeightCheck],
    prefix: str = "",
) -> tuple[bool, Optional[str], Optional[int]]:
    """One full negated-2-CNF verification pass over an existing meter/log.

    Shared between the plain W[1] verifier (one weight check over the real
    variables) and the branch protocol (one weight check per odd block).
    """
    m = formula.m
    ok, rep = multilinearity_test(prover.assignment_query, m, reps, tape, meter, fld)
    log.close(prefix + "mltest", rep if not ok else reps, ok)
    if not ok:
        return False, prefix + "mltest", rep

    weights = ClauseWeights(tuple(draw_field_element(tape, fld, meter) for _ in range(m)))
    spec = build_w1_summand(formula, prover.assignment_query, weights)
    run = run_sumcheck(spec, fld.zero, prover, tape, meter)
    if not run.verdict.accepted:
        log.close(prefix + "main", len(run.transcripts), False)
        return False, prefix + "main", run.verdict.rejection_round
    z = run.final_point[:m]
    x1 = run.final_point[m : 2 * m]
    x2 = run.final_point[2 * m :]
    a1 = _read_assignment(prover, x1, meter, fld)
    a2 = _read_assignment(prover, x2, meter, fld)
    if a1 is None or a2 is None:
        log.close(prefix + "main", 3 * m, False)
        return False, prefix + "main", 0
    expected = (
        weights.extension_at(z)
        * clause_indicator_eval(formula, 1, z, x1)
        * a1
        * clause_indicator_eval(formula, 2, z, x2)
        * a2
    )
    ok = expected == run.final_expected
    log.close(prefix + "main", 3 * m, ok)
    if not ok:
        return False, prefix + "main", 0

    for name, claim_k, block_table in weight_checks:
        wspec = build_weight_summand(prover.assignment_query, m, fld, block_table)
        wrun = run_sumcheck(wspec, fld(claim_k), prover, tape, meter)
        if not wrun.verdict.accepted:
            log.close(prefix + name, len(wrun.transcripts), False)
            return False, prefix + name, wrun.verdict.rejection_round
        aval = _read_assignment(prover, wrun.final_point, meter, fld)
        bval = mle_eval(block_table, wrun.final_point) if block_table is not None else fld.one
        ok = aval is not None and aval * bval == wrun.final_expected
        log.close(prefix + name, m, ok)
        if not ok:
            return False, prefix + name, 0
    return True, None, None


@dataclass(frozen=True)
class W1Parameters:
    m: int
    reps: int
    total_rounds: int
    prime: int


def _check_prime_override(prime: int, degree: int) -> int:
    # the honest prover interpolates at the nodes 0..degree, which must stay
    # distinct mod p; the multilinearity test needs three distinct coordinates
    if prime <= max(degree, 2):
        raise ValueError(f"prime override {prime} too small for degree {degree} rounds")
    return prime


def w1_parameters(formula: WeightedFormula, config: Optional[VerifierConfig] = None) -> W1Parameters:
    cfg = config or VerifierConfig()
    m = formula.m
    reps = cfg.reps_for(m)
    total = 3 * m + m + reps
    if cfg.explicit_prime is not None:
        prime = _check_prime_override(cfg.explicit_prime, 3)
    else:
        prime = select_prime(total, 3, cfg.epsilon)
    return W1Parameters(m, reps, total, prime)


def verify_w1(
    formula: WeightedFormula,
    prover: ProverStrategy,
    tape: RandomTape,
    config: Optional[VerifierConfig] = None,
) -> Verdict:
    """Full verifier for weighted negated 2-CNF: multilinearity test, random
    clause weights, main sum-check with claim 0, and a weight sum-check with
    claim k over the real-variable block."""
    if formula.class_tag is not ClassTag.G12N:
        raise ClassMismatchError("verify_w1 requires class g12n")
    params = w1_parameters(formula, config)
    fld = PrimeField(params.prime)
    meter = ResourceMeter()
    log = _StageLog(meter)
    real_block = BooleanTable.from_true_codes(range(formula.num_vars), formula.m)
    ok, stage, rnd = run_g12n_protocol(
        formula, prover, tape, meter, log, fld, params.reps,
        [("weight", formula.k, real_block)],
    )
    return Verdict(
        accepted=ok,
        meter=meter.snapshot(),
        rejection_round=None if ok else rnd,
        stage=stage,
        stages=tuple(log.reports),
    )


@dataclass(frozen=True)
class W2Parameters:
    m: int
    padded_len: int
    reps: int
    total_rounds: int
    degree: int
    prime: int


def w2_parameters(formula: WeightedFormula, config: Optional[VerifierConfig] = None) -> W2Parameters:
    cfg = config or VerifierConfig()
    m = formula.m
    L = max(formula.max_clause_len, 1)
    reps = cfg.reps_for(m)
    total = (L + 1) * m + m + reps
    degree = max(L + 1, 3)
    if cfg.explicit_prime is not None:
        prime = _check_prime_override(cfg.explicit_prime, degree)
    else:
        prime = select_prime(total, degree, cfg.epsilon)
    return W2Parameters(m, L, reps, total, degree, prime)


def verify_w2(
    formula: WeightedFormula,
    prover: ProverStrategy,
    tape: RandomTape,
    config: Optional[VerifierConfig] = None,
) -> Verdict:
    """Verifier for weighted positive CNF with clauses padded to length L; the
    main sum-check runs (L+1)*m rounds and the final check reads L assignment
    values."""
    if formula.class_tag is not ClassTag.G21P:
        raise ClassMismatchError("verify_w2 requires class g21p")
    params = w2_parameters(formula, config)
    m, L = params.m, params.padded_len
    fld = PrimeField(params.prime)
    meter = ResourceMeter()
    log = _StageLog(meter)

    ok, rep = multilinearity_test(prover.assignment_query, m, params.reps, tape, meter, fld)
    log.close("mltest", rep if not ok else params.reps, ok)
    if not ok:
        return Verdict(False, meter.snapshot(), rejection_round=rep, stage="mltest",
                       stages=tuple(log.reports))

    weights = ClauseWeights(tuple(draw_field_element(tape, fld, meter) for _ in range(m)))
    spec = build_w2_summand(formula, prover.assignment_query, weights, L)
    run = run_sumcheck(spec, fld.zero, prover, tape, meter)
    if not run.verdict.accepted:
        log.close("main", len(run.transcripts), False)
        return Verdict(False, meter.snapshot(), rejection_round=run.verdict.rejection_round,
                       stage="main", stages=tuple(log.reports))
    z = run.final_point[:m]
    expected = weights.extension_at(z)
    failed_read = False
    for i in range(1, L + 1):
        xi = run.final_point[i * m : (i + 1) * m]
        ai = _read_assignment(prover, xi, meter, fld)
        if ai is None:
            failed_read = True
            break
        expected = expected * clause_indicator_eval(formula, i, z, xi) * (fld.one - ai)
    ok = not failed_read and expected == run.final_expected
    log.close("main", (L + 1) * m, ok)
    if not ok:
        return Verdict(False, meter.snapshot(), rejection_round=0, stage="main",
                       stages=tuple(log.reports))

    real_block = BooleanTable.from_true_codes(range(formula.num_vars), m)
    wspec = build_weight_summand(prover.assignment_query, m, fld, real_block)
    wrun = run_sumcheck(wspec, fld(formula.k), prover, tape, meter)
    if not wrun.verdict.accepted:
        log.close("weight", len(wrun.transcripts), False)
        return Verdict(False, meter.snapshot(), rejection_round=wrun.verdict.rejection_round,
                       stage="weight", stages=tuple(log.reports))
    aval = _read_assignment(prover, wrun.final_point, meter, fld)
    bval = mle_eval(real_block, wrun.final_point)
    ok = aval is not None and aval * bval == wrun.final_expected
    log.close("weight", m, ok)
    if not ok:
        return Verdict(False, meter.snapshot(), rejection_round=0, stage="weight",
                       stages=tuple(log.reports))
    return Verdict(True, meter.snapshot(), stages=tuple(log.reports))


# ---------------------------------------------------------------------------
# Closed-form bit accounting
# ---------------------------------------------------------------------------


def axis_bits(m: int) -> int:
    return (m - 1).bit_length() if m > 1 else 0


def w1_ideal_random_bits(m: int, reps: int, prime: int) -> int:
    """Random bits excluding rejection-sampling overhead: weights m, main 3m,
    weight check m, plus (m + 3) field draws and one axis draw per repetition."""
    B = (prime - 1).bit_length()
    return (3 * m + m + reps * (m + 3) + m) * B + reps * axis_bits(m)


def w1_proof_bits(m: int, reps: int, prime: int) -> int:
    """Proof bits: 4 coefficients per clause-code round, 3 per variable-code
    round, 2 final assignment reads, the weight check's 3 per round plus one
    read, and 3 reads per multilinearity repetition."""
    B = (prime - 1).bit_length()
    return (4 * m + 3 * 2 * m + 2 + 3 * m + 1 + 3 * reps) * B


def w2_ideal_random_bits(m: int, L: int, reps: int, prime: int) -> int:
    B = (prime - 1).bit_length()
    return ((L + 1) * m + m + reps * (m + 3) + m) * B + reps * axis_bits(m)


def w2_proof_bits(m: int, L: int, reps: int, prime: int) -> int:
    B = (prime - 1).bit_length()
    return ((L + 2) * m + 3 * L * m + L + 3 * m + 1 + 3 * reps) * B


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResourceRow:
    m: int
    prime: int
    random_bits: int
    proof_bits: int
    random_norm: float
    proof_norm: float


def _planted_for_m(m: int, seed: int):
    # local import keeps the module dependency one-directional
    from .reductions import gen_planted_yes_with_witness

    n = 1 << m
    k = 1 if m == 1 else 2
    legal = math.comb(n, 2) - math.comb(k, 2)
    ncl = min(1 << (m - 1), legal)
    return gen_planted_yes_with_witness(n, k, ncl, derive_seed(seed, 7700 + m))


def resource_report(
    target: Iterable[int] | WeightedFormula,
    config: Optional[VerifierConfig] = None,
    seed: int = 0,
) -> list[ResourceRow]:
    """Meter honest verifications and normalize by m * log2 m.

    ``target`` is either a g12n formula (verified as given, so it must be a
    yes-instance small enough for the brute-force witness search) or an
    iterable of cube widths m, each verified on a planted instance sized so
    its derived width is exactly m.
    """
    jobs: list[tuple[WeightedFormula, BooleanTable]] = []
    if isinstance(target, WeightedFormula):
        decision, witness = brute_force_wsat(target)
        if not decision:
            raise ValueError("resource_report needs a yes-instance for the honest run")
        jobs.append((target, BooleanTable.from_assignment(witness.true_set, target.m)))
    else:
        for m in target:
            if not 1 <= m <= 10:
                raise GuardError(f"m={m} outside the desk-scale range 1..10")
            formula, assignment = _planted_for_m(m, seed)
            jobs.append((formula, BooleanTable.from_assignment(assignment.true_set, formula.m)))
    rows = []
    for formula, table in jobs:
        params = w1_parameters(formula, config)
        tape = RandomTape(derive_seed(seed, formula.m))
        verdict = verify_w1(formula, table_committed_prover(table), tape, config)
        norm = max(formula.m * math.log2(formula.m), 1.0)
        rows.append(
            ResourceRow(
                m=formula.m,
                prime=params.prime,
                random_bits=verdict.meter.random_bits,
                proof_bits=verdict.meter.proof_bits,
                random_norm=verdict.meter.random_bits / norm,
                proof_norm=verdict.meter.proof_bits / norm,
            )
        )
    return rows


ADVERSARIES = ("adaptive", "committed", "random")


def soundness_experiment(
    formula: WeightedFormula,
    adversary: str,
    trials: int,
    base_seed: int,
    config: Optional[VerifierConfig] = None,
) -> dict:
    """Monte-Carlo acceptance rate of an adversary on a no-instance.

    Refuses yes-instances (the experiment would measure completeness, not
    soundness).  The analytic bound is (total rounds) * degree / p for the
    adaptive cheater, 2m/p for a committed wrong table (random-weight
    separation), and 2/p for uniform garbage (the chance of passing the
    round-1 consistency equation)."""
    if adversary not in ADVERSARIES:
        raise ValueError(f"unknown adversary {adversary!r}, pick one of {ADVERSARIES}")
    decision, _ = brute_force_wsat(formula)
    if decision:
        raise ValueError("soundness experiments require a no-instance")
    if formula.class_tag is ClassTag.G12N:
        params = w1_parameters(formula, config)
        total_rounds, degree, prime = params.total_rounds, 3, params.prime
        verifier = verify_w1
    else:
        params = w2_parameters(formula, config)
        total_rounds, degree, prime = params.total_rounds, params.degree, params.prime
        verifier = verify_w2
    m = formula.m
    committed = BooleanTable.from_true_codes(range(min(formula.k, 1 << m)), m)
    accepted = 0
    for t in range(trials):
        tape = RandomTape(derive_seed(base_seed, t))
        if adversary == "adaptive":
            prover = adaptive_cheater(table_committed_prover(committed))
        elif adversary == "committed":
            prover = table_committed_prover(committed)
        else:
            prover = RandomGarbageProver(derive_seed(derive_seed(base_seed, t), 1))
        if verifier(formula, prover, tape, config).accepted:
            accepted += 1
    if adversary == "adaptive":
        bound = min(total_rounds * degree / prime, 1.0)
    elif adversary == "committed":
        bound = min(2 * m / prime, 1.0)
    else:
        bound = 2 / prime
    return {
        "adversary": adversary,
        "trials": trials,
        "accepted": accepted,
        "acceptance_rate": accepted / trials if trials else 0.0,
        "analytic_bound": bound,
        "prime": prime,
        "total_rounds": total_rounds,
    }

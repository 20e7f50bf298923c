"""Desk-scale laboratory for probabilistically checkable verification of
weighted satisfiability: prime-field sum-check protocols with honest and
adversarial provers, brute-force oracles, and exact resource metering."""

from .field import (
    FieldElement,
    FieldMismatchError,
    PrimeField,
    UniPoly,
    interpolate,
    is_prime,
    select_prime,
)
from .formula import (
    Assignment,
    AwsatInstance,
    ClassMismatchError,
    ClassTag,
    GuardError,
    PwsatParseError,
    UNSAT,
    WeightedFormula,
    brute_force_awsat,
    brute_force_wsat,
    eval_clause,
    parse_awsat,
    parse_pwsat,
    render_awsat,
    render_pwsat,
    satisfies,
    simplify,
    weight,
)
from .arithmetize import (
    BooleanTable,
    ClauseWeights,
    ProductPlan,
    SummandSpec,
    build_w1_summand,
    build_w2_summand,
    build_weight_summand,
    clause_indicator_eval,
    code_bits,
    mle_eval,
)
from .sumcheck import (
    AdaptiveCheater,
    GenericHonestProver,
    MeterSnapshot,
    PlanFolder,
    ProverStrategy,
    RandomGarbageProver,
    RandomTape,
    ResourceMeter,
    RoundTranscript,
    StageReport,
    SumcheckRun,
    TableCommittedProver,
    Verdict,
    adaptive_cheater,
    derive_seed,
    draw_field_element,
    honest_round_poly,
    run_sumcheck,
    table_committed_prover,
)
from .pcpverify import (
    ResourceRow,
    VerifierConfig,
    multilinearity_test,
    resource_report,
    soundness_experiment,
    verify_w1,
    verify_w2,
    w1_ideal_random_bits,
    w1_parameters,
    w1_proof_bits,
    w2_ideal_random_bits,
    w2_parameters,
    w2_proof_bits,
)
from .awsat import (
    AwsatParameters,
    BranchProofTables,
    MissingTableError,
    UniversalBranch,
    awsat_parameters,
    enumerate_universal,
    honest_branch_tables,
    pad_to_odd,
    verify_awsat,
)
from .reductions import (
    Graph,
    classify,
    gen_planted_yes,
    gen_planted_yes_with_witness,
    gen_random,
    gen_random_awsat,
    has_independent_set,
    independent_set_to_wsat,
    parse_graph,
)

__version__ = "0.1.0"

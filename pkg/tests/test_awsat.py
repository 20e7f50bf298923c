import pytest

from ppcplab.arithmetize import BooleanTable
from ppcplab.awsat import (
    BranchProofTables,
    MissingTableError,
    enumerate_universal,
    honest_branch_tables,
    pad_to_odd,
    verify_awsat,
)
from ppcplab.formula import (
    AwsatInstance,
    ClassTag,
    GuardError,
    WeightedFormula,
    brute_force_awsat,
    brute_force_wsat,
    parse_awsat,
)
from ppcplab.pcpverify import verify_w1
from ppcplab.reductions import gen_random_awsat
from ppcplab.sumcheck import RandomTape, adaptive_cheater, derive_seed, table_committed_prover


def make_instance(num_vars, clauses, blocks, weights, k=None):
    f = WeightedFormula(num_vars, clauses, ClassTag.G12N, sum(weights) if k is None else k)
    return AwsatInstance(f, blocks, weights)


HAND_NO = make_instance(4, ((-2, -4),), ((1,), (2, 3), (4,)), (1, 1, 1))
HAND_YES = make_instance(4, ((-2, -3),), ((1,), (2, 3), (4,)), (1, 1, 1))


class TestEnumerateUniversal:
    def test_l1_single_empty_branch(self):
        inst = make_instance(2, (), ((1, 2),), (1,))
        branches = enumerate_universal(inst)
        assert len(branches) == 1
        assert branches[0].choices == ()

    def test_choose_one_of_three(self):
        inst = make_instance(4, (), ((1,), (2, 3, 4)), (0, 1))
        assert len(enumerate_universal(inst)) == 3

    def test_choose_two_of_three(self):
        inst = make_instance(4, (), ((1,), (2, 3, 4)), (0, 2))
        branches = enumerate_universal(inst)
        assert len(branches) == 3
        assert [sorted(b.choices[0]) for b in branches] == [[2, 3], [2, 4], [3, 4]]

    def test_guard(self):
        f = WeightedFormula(30, (), ClassTag.G12N, 15)
        inst = AwsatInstance(f, ((1,), tuple(range(2, 31))), (0, 15))
        with pytest.raises(GuardError):
            enumerate_universal(inst)


class TestPadToOdd:
    def test_even_to_odd_preserves_value(self):
        inst = make_instance(4, ((-1, -3),), ((1, 2), (3, 4)), (1, 1))
        padded = pad_to_odd(inst)
        assert padded.l == 3
        assert padded.blocks[-1] == ()
        assert padded.block_weights[-1] == 0
        assert brute_force_awsat(inst) == brute_force_awsat(padded)

    def test_padding_odd_instance_rejected(self):
        with pytest.raises(ValueError):
            pad_to_odd(HAND_YES)

    def test_zero_blocks_unconstructible(self):
        f = WeightedFormula(1, (), ClassTag.G12N, 0)
        with pytest.raises(ValueError):
            AwsatInstance(f, (), ())


class TestHonestTables:
    def test_no_instance_has_no_tables(self):
        assert brute_force_awsat(HAND_NO) is False
        assert honest_branch_tables(HAND_NO) is None

    def test_yes_instance_tables_keyed_by_prefix(self):
        assert brute_force_awsat(HAND_YES) is True
        tables = honest_branch_tables(HAND_YES)
        assert tables is not None
        keys = sorted(tables.tables)
        assert keys == [(1, ""), (3, "2:2"), (3, "2:3")]

    def test_l1_yes_matches_wsat_witness(self):
        f = WeightedFormula(3, ((-1, -2),), ClassTag.G12N, 1)
        inst = AwsatInstance(f, ((1, 2, 3),), (1,))
        tables = honest_branch_tables(inst)
        assert tables is not None
        assert brute_force_wsat(f)[0]


class TestVerifyAwsat:
    def test_yes_instance_honest_accepts(self):
        tables = honest_branch_tables(HAND_YES)
        for seed in range(20):
            verdict = verify_awsat(HAND_YES, tables, table_committed_prover, RandomTape(seed))
            assert verdict.accepted, seed

    def test_hand_example_matches_oracle(self):
        # completeness side of the oracle equivalence: tables exist iff yes
        assert (honest_branch_tables(HAND_YES) is not None) == brute_force_awsat(HAND_YES)
        assert (honest_branch_tables(HAND_NO) is not None) == brute_force_awsat(HAND_NO)

    def test_no_instance_cheating_bounded(self):
        # best-effort tables plus per-branch adaptive cheating
        tables = BranchProofTables(
            {
                (1, ""): BooleanTable.from_assignment({1}, HAND_NO.formula.m),
                (3, "2:2"): BooleanTable.from_assignment({4}, HAND_NO.formula.m),
                (3, "2:3"): BooleanTable.from_assignment({4}, HAND_NO.formula.m),
            }
        )
        factory = lambda table: adaptive_cheater(table_committed_prover(table))
        accepted = 0
        trials = 200
        for seed in range(trials):
            verdict = verify_awsat(HAND_NO, tables, factory, RandomTape(derive_seed(11, seed)))
            accepted += verdict.accepted
        assert accepted / trials <= 0.5

    def test_unsat_branch_rejects_immediately(self):
        # clause entirely inside the universal block: the branch picking both
        # endpoints falsifies it at substitution time
        inst = make_instance(4, ((-2, -3),), ((1,), (2, 3), (4,)), (1, 2, 1))
        tables = BranchProofTables(
            {
                (1, ""): BooleanTable.from_assignment({1}, inst.formula.m),
                (3, "2:2,3"): BooleanTable.from_assignment({4}, inst.formula.m),
            }
        )
        verdict = verify_awsat(inst, tables, table_committed_prover, RandomTape(0))
        assert not verdict.accepted
        assert verdict.stage.endswith("simplify")

    def test_missing_table_rejects(self):
        tables = BranchProofTables({(1, ""): BooleanTable.from_assignment({1}, HAND_YES.formula.m)})
        verdict = verify_awsat(HAND_YES, tables, table_committed_prover, RandomTape(0))
        assert not verdict.accepted
        assert verdict.stage.endswith("tables")

    def test_missing_table_rejects_l1_path(self):
        f = WeightedFormula(3, ((-1, -2),), ClassTag.G12N, 1)
        inst = AwsatInstance(f, ((1, 2, 3),), (1,))
        verdict = verify_awsat(inst, BranchProofTables({}), table_committed_prover, RandomTape(0))
        assert not verdict.accepted
        assert verdict.stage == "b0.tables"

    def test_even_l_rejected(self):
        inst = make_instance(2, (), ((1,), (2,)), (1, 0))
        tables = BranchProofTables({})
        with pytest.raises(ValueError):
            verify_awsat(inst, tables, table_committed_prover, RandomTape(0))

    def test_infeasible_blocks_resolved_by_semantics(self):
        # universal block cannot supply 2 of 1: vacuously true
        inst_u = make_instance(3, ((-1, -1),), ((1,), (2,), (3,)), (1, 2, 0))
        assert brute_force_awsat(inst_u) is True
        verdict = verify_awsat(inst_u, BranchProofTables({}), table_committed_prover, RandomTape(0))
        assert verdict.accepted
        # existential block cannot supply 2 of 1: false
        inst_e = make_instance(3, (), ((1,), (2,), (3,)), (2, 1, 0))
        assert brute_force_awsat(inst_e) is False
        verdict = verify_awsat(inst_e, BranchProofTables({}), table_committed_prover, RandomTape(0))
        assert not verdict.accepted

    def test_l1_transcript_identical_to_verify_w1(self):
        text = "p pwsat g12n 3 2 1\nb 1 1 1 2 3 0\n-1 -2 0\n-1 -3 0\n"
        inst = parse_awsat(text)
        tables = honest_branch_tables(inst)
        table = tables.merge(enumerate_universal(inst)[0], inst)
        for seed in (0, 7, 99):
            via_awsat = verify_awsat(inst, tables, table_committed_prover, RandomTape(seed))
            direct = verify_w1(inst.formula, table_committed_prover(table), RandomTape(seed))
            assert via_awsat == direct
            assert repr(via_awsat) == repr(direct)

    def test_branch_bits_identity(self):
        tables = honest_branch_tables(HAND_YES)
        verdict = verify_awsat(HAND_YES, tables, table_committed_prover, RandomTape(4))
        assert verdict.accepted
        branches = enumerate_universal(HAND_YES)
        per_branch = {}
        for s in verdict.stages:
            tag = s.name.split(".")[0]
            per_branch[tag] = per_branch.get(tag, 0) + s.proof_bits
        values = list(per_branch.values())
        assert len(values) == len(branches)
        assert all(v == values[0] for v in values)  # proof bits are deterministic
        assert verdict.meter.proof_bits == len(branches) * values[0]


class TestPrefixConsistency:
    def build_l5(self):
        # blocks: E{1} A{2,3} E{4} A{5,6} E{7}; block-3 tables are shared by
        # the branches that agree on the block-2 choice but differ at block 4
        return make_instance(
            7, (), ((1,), (2, 3), (4,), (5, 6), (7,)), (1, 1, 1, 1, 1)
        )

    def test_shared_prefix_shares_table(self):
        inst = self.build_l5()
        tables = honest_branch_tables(inst)
        assert tables is not None
        branches = enumerate_universal(inst)
        # group branches by their block-3 prefix
        groups = {}
        for b in branches:
            groups.setdefault(b.prefix_key(3), []).append(b)
        assert any(len(g) > 1 for g in groups.values())
        key = next(k for k, g in groups.items() if len(g) > 1)
        group = groups[key]
        # fault injection: flip the shared table and watch every sharing
        # branch change its merged oracle
        m = inst.formula.m
        before = [tables.merge(b, inst).values for b in group]
        flipped = list(tables.tables[(3, key)].values)
        code_of_4 = 3  # variable 4 has code 3
        flipped[code_of_4] ^= 1
        tables.tables[(3, key)] = BooleanTable(m, tuple(flipped))
        after = [tables.merge(b, inst).values for b in group]
        for b_before, b_after in zip(before, after):
            assert b_before != b_after

    def test_oracle_equivalence_generated_corpus(self):
        seen_yes = seen_no = 0
        for seed in range(12):
            inst = gen_random_awsat(6, (2, 2, 2), (1, 1, 1), 3, seed)
            decision = brute_force_awsat(inst)
            tables = honest_branch_tables(inst)
            assert (tables is not None) == decision
            if decision:
                seen_yes += 1
                verdict = verify_awsat(inst, tables, table_committed_prover, RandomTape(seed))
                assert verdict.accepted
            else:
                seen_no += 1
        assert seen_yes > 0

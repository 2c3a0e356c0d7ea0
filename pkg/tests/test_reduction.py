"""The oracle reduction: test construction, use accounting, thresholds."""

from fractions import Fraction

import pytest

from omegalab.dyadic import BitPrefix, DyadicRational, prefix_of
from omegalab.machines import (
    LeftCEApproximation,
    MachineTable,
    as_left_ce,
    random_machine_table,
)
from omegalab.reduction import (
    build_solovay_test,
    eventual_correctness_threshold,
    reduce,
    solovay_weight,
    trace_rows,
    traces_to_csv,
)
from omegalab.series import LogRedundancy

H2 = LogRedundancy(2)


def stages(*values: DyadicRational) -> LeftCEApproximation:
    return LeftCEApproximation.from_stage_list(list(values))


ZERO = DyadicRational.zero()
Q = DyadicRational  # shorthand for fixtures


class TestBuildSolovayTest:
    def test_single_change(self):
        # bit 2 flips at stage 3 (well after n <= s is satisfiable)
        alpha = stages(ZERO, ZERO, ZERO, Q(1, 2))
        omega = LeftCEApproximation.constant(Q(1, 1))  # 1/2
        test = build_solovay_test(alpha, omega, H2, 8)
        assert test.entries == ((2, "1000"),)

    def test_constant_alpha_gives_empty_test(self):
        alpha = LeftCEApproximation.constant(Q(1, 2))
        omega = LeftCEApproximation.constant(Q(1, 1))
        assert len(build_solovay_test(alpha, omega, H2, 16)) == 0

    def test_three_changes_lengths(self):
        # bit 2 flips at stage 3, bit 1 at stage 4, bit 2 again at stage 5;
        # floor(1 + h2(1)) = 1 and floor(2 + h2(2)) = 4, so lengths {1,4,4}
        alpha = stages(ZERO, ZERO, ZERO, Q(1, 2), Q(1, 1), Q(3, 2))
        omega = LeftCEApproximation.constant(Q(1, 1))
        test = build_solovay_test(alpha, omega, H2, 8)
        assert sorted(len(s) for _, s in test.entries) == [1, 4, 4]
        assert solovay_weight(test) == Fraction(5, 8)

    def test_early_changes_below_stage_index_are_dropped(self):
        # a change at stage 1 on bit 2 fails the n <= s filter
        alpha = stages(ZERO, Q(1, 2))
        omega = LeftCEApproximation.constant(Q(1, 1))
        assert len(build_solovay_test(alpha, omega, H2, 8)) == 0

    def test_weight_bound_over_random_corpus(self):
        """Exact weight <= sum over n of 2^-h2(n) for monotone targets."""
        bound = sum(Fraction(1, n * n) for n in range(1, 65))
        for seed in range(20):
            u = random_machine_table(2 * seed)
            v = random_machine_table(2 * seed + 1)
            omega, alpha = as_left_ce(u), as_left_ce(v)
            test = build_solovay_test(
                alpha, omega, H2, alpha.stabilization_stage + 1
            )
            assert solovay_weight(test) <= bound


class TestReduce:
    def test_self_reduction_reads_oracle_bits(self):
        m = as_left_ce(random_machine_table(5))
        oracle = prefix_of(m.limit, H2.floor_eval(32))
        for n in range(1, 33):
            tr = reduce(oracle, m, m, H2, n, m.stabilization_stage + 1)
            assert tr.settled
            assert tr.answer == oracle.bit_at(n)
            assert tr.oracle_bits_used == H2.floor_eval(n)

    def test_two_entry_machine_first_bit(self):
        m = as_left_ce(MachineTable((("0", 3), ("10", 5))))
        oracle = prefix_of(m.limit, H2.floor_eval(8))
        tr = reduce(oracle, m, m, H2, 1, 8)
        assert tr.settled and tr.answer == m.limit.bit(1) == 1

    def test_adversarial_pair_errs_below_threshold(self):
        # oracle real settles at stage 1; the target changes bit 2 at stage
        # 5, after the oracle prefix already matched, so bit 2 is answered
        # from the stale stage and disagrees with the limit
        omega = as_left_ce(MachineTable((("0", 1),)))  # 1/2 at stage 1
        alpha = as_left_ce(MachineTable((("10", 5),)))  # 1/4 at stage 5
        oracle = prefix_of(omega.limit, H2.floor_eval(8))
        tr = reduce(oracle, alpha, omega, H2, 2, 8)
        assert tr.settled and tr.answer == 0
        assert alpha.limit.bit(2) == 1
        assert eventual_correctness_threshold(alpha, omega, H2, 8, 8) == 3

    def test_oracle_too_short(self):
        m = as_left_ce(random_machine_table(5))
        with pytest.raises(ValueError, match="oracle too short"):
            reduce(BitPrefix.zeros(3), m, m, H2, 4, 8)

    def test_unsettled_when_oracle_unreachable(self):
        # an oracle strictly above the limit never matches any stage
        m = as_left_ce(MachineTable((("00", 2),)))  # limit 1/4
        oracle = BitPrefix.from_string("1" * 8)
        tr = reduce(oracle, m, m, H2, 2, 16)
        assert not tr.settled and tr.answer is None
        assert tr.stages_run == 17

    def test_determinism_and_stage_budget_monotonicity(self):
        m = as_left_ce(random_machine_table(23))
        oracle = prefix_of(m.limit, H2.floor_eval(16))
        for n in range(1, 17):
            a = reduce(oracle, m, m, H2, n, 64)
            b = reduce(oracle, m, m, H2, n, 64)
            c = reduce(oracle, m, m, H2, n, 256)
            assert a == b == c


class TestThreshold:
    def test_self_reduction_threshold_is_one(self):
        m = as_left_ce(random_machine_table(9))
        assert eventual_correctness_threshold(m, m, H2, 32, 64) == 1

    def test_constant_target_threshold_is_one(self):
        omega = as_left_ce(random_machine_table(10))
        alpha = as_left_ce(MachineTable(()))
        assert eventual_correctness_threshold(alpha, omega, H2, 32, 64) == 1

    def test_random_pairs_threshold_exists(self):
        for seed in range(10):
            omega = as_left_ce(random_machine_table(100 + seed))
            alpha = as_left_ce(random_machine_table(200 + seed))
            n0 = eventual_correctness_threshold(alpha, omega, H2, 64, 64)
            assert 1 <= n0 <= 64


class TestTraceExport:
    def test_csv_columns_and_rows(self):
        m = as_left_ce(MachineTable((("0", 3), ("10", 5))))
        oracle = prefix_of(m.limit, H2.floor_eval(4))
        traces = [reduce(oracle, m, m, H2, n, 8) for n in range(1, 5)]
        text = traces_to_csv(traces, m.limit)
        lines = text.strip().split("\n")
        assert lines[0] == "n,use,stages,answer,settled,correct"
        assert len(lines) == 5
        assert lines[1].startswith("1,1,")
        assert all(line.endswith(",1,1") for line in lines[1:])

    def test_unsettled_rows_have_blank_answer(self):
        m = as_left_ce(MachineTable((("00", 2),)))
        rows = trace_rows(
            [reduce(BitPrefix.from_string("1" * 8), m, m, H2, 2, 4)], m.limit
        )
        assert rows[0]["answer"] == "" and rows[0]["settled"] == 0

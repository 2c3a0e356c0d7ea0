"""Machine tables, halting-mass approximations and the random generator."""

import random

import pytest

from omegalab.dyadic import DyadicRational
from omegalab.machines import (
    LeftCEApproximation,
    MachineTable,
    as_left_ce,
    check_prefix_free,
    kraft_sum,
    omega_approx,
    random_machine_table,
    sum_left_ce,
)


class TestPrefixFree:
    def test_examples(self):
        assert check_prefix_free({"0", "10", "110"})
        assert not check_prefix_free({"0", "01"})
        assert check_prefix_free(set())

    def test_table_rejects_prefix_violation(self):
        with pytest.raises(ValueError, match="prefix-free"):
            MachineTable((("0", 1), ("01", 2)))

    def test_kraft_inequality_holds_for_valid_tables(self):
        # prefix-freeness forces the Kraft sum to be at most 1, so the
        # constructor's Kraft guard is purely defensive; check the bound
        # over a generated corpus instead
        for seed in range(30):
            m = random_machine_table(seed)
            assert kraft_sum(m) <= DyadicRational.one()


class TestKraftAndApprox:
    def test_kraft_examples(self):
        assert kraft_sum(MachineTable((("0", 1), ("10", 1), ("110", 1)))) == (
            DyadicRational(7, 3)
        )
        assert kraft_sum(MachineTable((("0", 1), ("1", 1)))) == DyadicRational.one()
        assert kraft_sum(MachineTable((("00", 1),))) == DyadicRational(1, 2)

    def test_kraft_invariant_under_halt_permutation(self):
        a = MachineTable((("0", 3), ("10", 5), ("111", 9)))
        b = MachineTable((("0", 9), ("10", 3), ("111", 5)))
        assert kraft_sum(a) == kraft_sum(b)

    def test_omega_approx_examples(self):
        m = MachineTable((("0", 3), ("10", 5)))
        assert omega_approx(m, 4) == DyadicRational(1, 1)
        assert omega_approx(m, 5) == DyadicRational(3, 2)
        assert omega_approx(m, 0) == DyadicRational.zero()

    def test_omega_approx_monotone_and_capped(self):
        m = random_machine_table(41)
        prev = omega_approx(m, 0)
        for s in range(1, 60):
            cur = omega_approx(m, s)
            assert prev <= cur <= kraft_sum(m)
            prev = cur


class TestLeftCE:
    def test_as_left_ce_examples(self):
        ce = as_left_ce(MachineTable((("0", 3), ("10", 5))))
        assert ce.limit == DyadicRational(3, 2)
        assert ce.stabilization_stage == 5
        assert ce.value_at(4) == DyadicRational(1, 1)

        empty = as_left_ce(MachineTable(()))
        assert empty.limit == DyadicRational.zero()
        assert empty.value_at(17) == DyadicRational.zero()

        one = as_left_ce(MachineTable((("1", 1),)))
        assert one.limit == DyadicRational(1, 1)
        assert one.stabilization_stage == 1

    def test_sum_left_ce_examples(self):
        a = as_left_ce(MachineTable((("0", 2),)))  # limit 1/2
        b = as_left_ce(MachineTable((("00", 3),)))  # limit 1/4
        s = sum_left_ce(a, b)
        assert s.limit == DyadicRational(3, 2)
        zero = LeftCEApproximation.constant(DyadicRational.zero())
        assert sum_left_ce(a, zero).limit == a.limit

    def test_sum_left_ce_pointwise(self):
        a = LeftCEApproximation.from_stage_list(
            [DyadicRational.zero(), DyadicRational(1, 2), DyadicRational(1, 2)]
        )
        b = LeftCEApproximation.from_stage_list(
            [DyadicRational.zero(), DyadicRational.zero(), DyadicRational(1, 3)]
        )
        s = sum_left_ce(a, b)
        assert s.value_at(0) == DyadicRational.zero()
        assert s.value_at(1) == DyadicRational(1, 2)
        assert s.value_at(2) == DyadicRational(3, 3)
        assert s.is_monotone_up_to(8)

    def test_sum_left_ce_guards_unit_interval(self):
        a = as_left_ce(MachineTable((("0", 1), ("10", 1))))  # 3/4
        with pytest.raises(ValueError):
            sum_left_ce(a, a)

    def test_stage_list_rejects_decrease(self):
        with pytest.raises(ValueError):
            LeftCEApproximation.from_stage_list(
                [DyadicRational(1, 1), DyadicRational.zero()]
            )


class TestLoader:
    def test_parse_dump_round_trip(self, tmp_path):
        text = "# oracle machine\n0 3\n10 5  # late\n\n110 2\n"
        m = MachineTable.parse(text)
        assert m.programs() == ("0", "10", "110")
        path = tmp_path / "m.tbl"
        path.write_text(m.dump())
        assert MachineTable.load(path) == m

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            MachineTable.parse("01 2 extra\n")
        with pytest.raises(ValueError):
            MachineTable.parse("012 7\n")
        with pytest.raises(ValueError):
            MachineTable.parse("01 0\n")


class TestGenerator:
    def test_seed_deterministic(self):
        assert random_machine_table(7) == random_machine_table(7)
        assert random_machine_table(7) != random_machine_table(8)

    def test_generated_tables_are_valid(self):
        for seed in range(50):
            m = random_machine_table(seed)
            assert check_prefix_free(m.programs())
            assert kraft_sum(m) < DyadicRational.one()
            assert all(1 <= h <= 48 for _, h in m.entries)
            assert all(len(p) <= 12 for p, _ in m.entries)

    def test_halt_range_configurable(self):
        m = random_machine_table(3, halt_min=5, halt_max=6)
        assert all(5 <= h <= 6 for _, h in m.entries)

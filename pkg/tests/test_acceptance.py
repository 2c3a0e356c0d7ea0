"""Acceptance suite: the ten numbered desk-scale criteria.

Each test prints one machine-readable line

    [criterion NN] <name>: PASS|FAIL (<elapsed>s / <budget>s) <detail>

and also asserts its runtime budget.  Run with `pytest -v -s` to see every
line.  Criterion 6 contains a divergence witness that is numerically
unattainable for the loglog partition (the relevant series grows doubly
logarithmically; between indices 10^3 and 10^5 it gains only about 0.25);
the clause is asserted as stated and is expected to fail.  See the README
for the analysis.
"""

import time
from fractions import Fraction

import pytest

from omegalab.dyadic import BitPrefix, prefix_of
from omegalab.diagonal import (
    build_diagonal,
    exhaustive_equivalence,
    prediction_rule_for,
    scan_cutoff,
    true_bit_reducer,
)
from omegalab.machines import as_left_ce, random_machine_table
from omegalab.randomness import (
    PredictionRule,
    brute_force_miss_measure,
    capital_along,
    exact_miss_measure,
    from_prediction_rule,
    random_block_family,
)
from omegalab.reduction import (
    build_solovay_test,
    eventual_correctness_threshold,
    reduce,
    solovay_weight,
)
from omegalab.series import (
    BlockStairRedundancy,
    InverseTable,
    LogRedundancy,
    adversarial_block,
    adversary_analyze,
    adversary_even_partition,
    adversary_random_partition,
    adversary_unit_partition,
    brute_force_min,
    condensation_compare,
    loglog_partition,
    marker_chain_holds,
    min_marker_sum,
    partial_sum,
    verify_partition,
)

H1 = LogRedundancy(1)
H2 = LogRedundancy(2)

CORPUS_SIZE = 100
N_MAX = 64
MAX_STAGE = 64


def _report(num: int, name: str, ok: bool, elapsed: float, budget: float, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    extra = f" {detail}" if detail else ""
    print(f"[criterion {num:02d}] {name}: {status} ({elapsed:.1f}s / {budget:.0f}s){extra}")


@pytest.fixture(scope="module")
def corpus():
    """Seed-generated machine-table pairs (oracle, target)."""
    pairs = []
    for seed in range(CORPUS_SIZE):
        u = as_left_ce(random_machine_table(2 * seed))
        v = as_left_ce(random_machine_table(2 * seed + 1))
        pairs.append((u, v))
    return pairs


@pytest.fixture(scope="module")
def use_bounds():
    return {n: H2.floor_eval(n) for n in range(1, N_MAX + 1)}


def test_c01_use_bound_unconditional(corpus, use_bounds):
    budget = 30.0
    start = time.perf_counter()
    violations = []
    for idx, (oracle_ce, target_ce) in enumerate(corpus):
        oracle = prefix_of(oracle_ce.limit, use_bounds[N_MAX])
        for n in range(1, N_MAX + 1):
            tr = reduce(oracle, target_ce, oracle_ce, H2, n, MAX_STAGE)
            if tr.oracle_bits_used != use_bounds[n]:
                violations.append((idx, n))
    elapsed = time.perf_counter() - start
    ok = not violations and elapsed < budget
    _report(1, "use bound, unconditional", ok, elapsed, budget,
            f"pairs={len(corpus)} n<=64 violations={len(violations)}")
    assert not violations
    assert elapsed < budget


def test_c02_solovay_weight_bound(corpus):
    budget = 30.0
    start = time.perf_counter()
    bound = sum(Fraction(1, n * n) for n in range(1, N_MAX + 1))
    assert bound < Fraction(16450, 10000)
    heaviest = Fraction(0)
    violations = 0
    for oracle_ce, target_ce in corpus:
        test = build_solovay_test(target_ce, oracle_ce, H2, MAX_STAGE)
        w = solovay_weight(test)
        heaviest = max(heaviest, w)
        if w > bound:
            violations += 1
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < budget
    _report(2, "Solovay weight bound", ok, elapsed, budget,
            f"max_weight={float(heaviest):.4f} bound={float(bound):.4f}")
    assert violations == 0
    assert elapsed < budget


def test_c03_eventual_correctness(corpus, use_bounds):
    budget = 60.0
    start = time.perf_counter()
    worst = 0
    failures = []
    for idx, (oracle_ce, target_ce) in enumerate(corpus):
        n0 = eventual_correctness_threshold(target_ce, oracle_ce, H2, N_MAX, MAX_STAGE)
        worst = max(worst, n0)
        if n0 > N_MAX:
            failures.append(idx)
            continue
        oracle = prefix_of(oracle_ce.limit, use_bounds[N_MAX])
        truth = target_ce.limit
        for n in range(n0, N_MAX + 1):
            tr = reduce(oracle, target_ce, oracle_ce, H2, n, MAX_STAGE)
            if not tr.settled or tr.answer != truth.bit(n):
                failures.append((idx, n))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < budget
    _report(3, "eventual correctness", ok, elapsed, budget,
            f"worst_threshold={worst}")
    assert not failures
    assert elapsed < budget


def test_c04_borel_cantelli_exactness():
    budget = 60.0
    start = time.perf_counter()
    mismatches = []
    for seed in range(1000):
        fam = random_block_family(seed, max_position=20)
        if exact_miss_measure(fam) != brute_force_miss_measure(fam):
            mismatches.append(seed)
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < budget
    _report(4, "product-formula exactness", ok, elapsed, budget,
            f"families=1000 mismatches={len(mismatches)}")
    assert not mismatches
    assert elapsed < budget


def test_c05_marker_minimization():
    budget = 120.0
    start = time.perf_counter()
    bad = []
    for m in range(1, 25):
        for k in range(1, m + 1):
            if min_marker_sum(m, k) != brute_force_min(m, k):
                bad.append(("equality", m, k))
            if not marker_chain_holds(m, k):
                bad.append(("chain", m, k))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < budget
    _report(5, "marker minimization", ok, elapsed, budget,
            f"pairs={24 * 25 // 2} violations={len(bad)}")
    assert not bad
    assert elapsed < budget


def test_c06_partition_conditions():
    budget = 60.0
    start = time.perf_counter()
    t = loglog_partition(100001)
    rep_hi = verify_partition(t, H1, 100000)
    rep_lo = verify_partition(t, H1, 1000)
    elapsed = time.perf_counter() - start

    spacing_ok = rep_hi.k0 is not None
    conv_ok = rep_hi.conv_partial <= 2
    gain_lo = rep_hi.div_partial[0] - rep_lo.div_partial[1]
    gain_ok = gain_lo >= 1
    ok = spacing_ok and conv_ok and gain_ok and elapsed < budget
    _report(
        6, "partition conditions", ok, elapsed, budget,
        f"k0={rep_hi.k0} conv={float(rep_hi.conv_partial):.4f} "
        f"divergence_gain={float(gain_lo):.4f}",
    )
    assert spacing_ok, "spacing condition has no onset index"
    assert conv_ok, f"convergent series exceeded 2: {rep_hi.conv_partial}"
    assert elapsed < budget
    assert gain_ok, (
        "divergence witness: partial sum of 2^-g(t_i) gained only "
        f"{float(gain_lo):.4f} between indices 10^3 and 10^5 (needs >= 1); "
        "the series grows doubly logarithmically, so this stated witness "
        "is unattainable at desk scale"
    )


def test_c07_adversarial_function():
    budget = 120.0
    start = time.perf_counter()
    g = BlockStairRedundancy()
    block_sums = []
    acc = Fraction(0)
    marks = {adversarial_block(j).stop - 1: j for j in range(1, 5)}
    for n in range(1, adversarial_block(4).stop):
        acc += g.pow2_neg_exact(n)
        if n in marks:
            block_sums.append(acc)
    unit_blocks_ok = block_sums == [Fraction(j) for j in range(1, 5)]

    counterexamples = []
    dense_rows = 0
    partitions = [adversary_unit_partition(3), adversary_even_partition(3)]
    partitions += [adversary_random_partition(seed, 3) for seed in range(100)]
    for t in partitions:
        report = adversary_analyze(t, 3)
        for row in report.rows:
            if row.in_dense_set:
                dense_rows += 1
                if row.block_sum < Fraction(1, 4):
                    counterexamples.append((t.provenance, row.block))
    elapsed = time.perf_counter() - start
    ok = unit_blocks_ok and not counterexamples and dense_rows >= 6 and elapsed < budget
    _report(7, "adversarial staircase", ok, elapsed, budget,
            f"dense_rows={dense_rows} counterexamples={len(counterexamples)}")
    assert unit_blocks_ok, "per-block sums of 2^-g(n) must be exactly 1"
    assert dense_rows >= 6, "dense-set rows must not be vacuous"
    assert not counterexamples
    assert elapsed < budget


def test_c08_prediction_equivalence():
    budget = 120.0
    start = time.perf_counter()
    report = exhaustive_equivalence(loglog_partition(8), H1, 1, 16)
    elapsed = time.perf_counter() - start
    fraction = Fraction(report.qualifying, report.total)
    ok = report.counterexample is None and fraction >= Fraction(1, 100) and elapsed < budget
    _report(8, "prediction equivalence", ok, elapsed, budget,
            f"qualifying={report.qualifying}/{report.total} "
            f"evaluations={report.evaluations}")
    assert report.counterexample is None
    assert fraction >= Fraction(1, 100), "non-vacuity: at least 1% must qualify"
    assert elapsed < budget


def test_c09_martingale_properties():
    budget = 30.0
    start = time.perf_counter()
    constructed = [
        from_prediction_rule(PredictionRule.never(), 8),
        from_prediction_rule(PredictionRule.always(1), 10),
        from_prediction_rule(PredictionRule.from_map({"": 1, "11": 0}), 6),
    ]

    markers = loglog_partition(8)
    omega = BitPrefix.from_string("1001001110011110")
    cutoff = scan_cutoff(omega, markers, H1)
    inst = build_diagonal(omega, markers, H1, cutoff)
    rule = prediction_rule_for(inst, true_bit_reducer(inst))
    composed = from_prediction_rule(rule, len(omega))
    constructed.append(composed)

    fairness_ok = all(m.fairness_violations() == () for m in constructed)
    conservation_ok = all(m.expected_capital(m.depth) == 1 for m in constructed)

    capital = capital_along(composed, inst.omega)
    valid_increments = []
    for k in range(cutoff + 1, len(markers) + 1):
        if markers.t(k) < 1:
            continue
        d_k = inst.increment_position(k)
        if d_k > len(omega):
            break
        hi = markers.t(k) + inst.floor_g_at(k)
        if all(omega.bit_at(p) == 1 for p in range(markers.t(k), hi + 1)):
            valid_increments.append(d_k)
    doubling_ok = all(
        capital[d - 1] == 2 * capital[d - 2] for d in valid_increments if d >= 2
    )
    elapsed = time.perf_counter() - start
    ok = fairness_ok and conservation_ok and doubling_ok and bool(valid_increments) and elapsed < budget
    _report(9, "martingale properties", ok, elapsed, budget,
            f"martingales={len(constructed)} doubling_at={valid_increments}")
    assert fairness_ok
    assert conservation_ok
    assert valid_increments, "the run must contain at least one valid marker"
    assert doubling_ok
    assert elapsed < budget


def test_c10_series_thresholds():
    budget = 60.0
    start = time.perf_counter()
    harmonic_lo = partial_sum(H1, 10**6)[0]
    harmonic_ok = harmonic_lo >= Fraction(1439, 100)

    quadratic_hi = partial_sum(H2, 10**6)[1]
    # the integral tail bound sum_{n > 10^6} n^-2 < 10^-6 extends the
    # certificate from N = 10^6 to every N
    quadratic_ok = quadratic_hi + Fraction(1, 10**6) < Fraction(1645, 1000)

    rep = condensation_compare(InverseTable(), 1 << 20)
    condensed_ok = list(rep.condensed_partials) == list(range(1, 22))
    elapsed = time.perf_counter() - start
    ok = harmonic_ok and quadratic_ok and condensed_ok and elapsed < budget
    _report(10, "series thresholds", ok, elapsed, budget,
            f"harmonic_lo={float(harmonic_lo):.4f} quadratic_hi={float(quadratic_hi):.6f}")
    assert harmonic_ok
    assert quadratic_ok
    assert condensed_ok
    assert elapsed < budget

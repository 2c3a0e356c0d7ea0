"""Desk-scale laboratory for halting-probability reductions.

Exact dyadic arithmetic, finite prefix-free machine tables, oracle
reductions with certified use accounting, series and partition
diagnostics, block-pattern measures and martingales, and the diagonal
perturbation with its bit-prediction equivalence.
"""

from .dyadic import (
    BitPrefix,
    CarryOverflowError,
    DyadicRational,
    add_pow2,
    compare,
    prefix_of,
)
from .machines import (
    LeftCEApproximation,
    MachineTable,
    as_left_ce,
    check_prefix_free,
    kraft_sum,
    omega_approx,
    random_machine_table,
    sum_left_ce,
)
from .series import (
    BlockStairRedundancy,
    LogLogRedundancy,
    LogRedundancy,
    PartitionSequence,
    RedundancyFunction,
    TableRedundancy,
    adversarial_block,
    adversarial_g,
    adversary_analyze,
    brute_force_min,
    condensation_compare,
    h_eval,
    loglog_partition,
    make_redundancy,
    marker_chain_holds,
    marker_lower_bounds,
    min_marker_sum,
    partial_sum,
    partial_sum_exact,
    verify_partition,
)
from .randomness import (
    BlockFamily,
    Martingale,
    PredictionRule,
    SolovayTest,
    brute_force_miss_measure,
    capital_along,
    exact_miss_measure,
    from_prediction_rule,
    meets,
    product_sum_report,
    zero_block_scan,
)
from .reduction import (
    ReductionTrace,
    build_solovay_test,
    eventual_correctness_threshold,
    reduce,
    solovay_weight,
)
from .diagonal import (
    DiagonalInstance,
    build_diagonal,
    check_equivalence,
    derived_predictor,
    exhaustive_equivalence,
    interval_all_ones,
    left_ce_terms,
    prediction_rule_for,
    scan_cutoff,
    true_bit_reducer,
    window_has_zero,
)

__version__ = "0.1.0"

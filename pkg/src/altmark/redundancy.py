"""Shtarkov sums, closed-form redundancy bounds and the sandwich table.

All quantities are in bits.
"""
import math

from .combinatorics import (
    DEFAULT_EXACT_GUARD,
    check_guard,
    class_table,
    count_alternating_patterns,
    enumerate_alternating_profiles,
    partition_count,
    partition_count_bounded,
)
from .estimators import measured_redundancy
from .prob import sup_classes

LOG2E = math.log2(math.e)
# exp(pi sqrt(2n/3)) bounds p(n); in bits per sqrt(n)
PARTITION_RATE = math.pi * math.sqrt(2.0 / 3.0)
THM1_CONST = PARTITION_RATE * LOG2E
LB_CONST = 2.0 ** (-1.0 / 3.0) * math.log2(math.exp(23.0 / 12.0) / math.sqrt(2.0 * math.pi))
SEQ_CONST = 4.0 * math.pi * LOG2E / (math.sqrt(3.0) * (2.0 - math.sqrt(2.0)))

CAVEATS = {
    "lower_bound_thmLB": "main term only; holds asymptotically up to a (1+o(1)) factor, not asserted at small n",
    "shtarkov": "lower estimate: suprema searched over alphabets of at most k + sup_extra symbols",
    "measured_block": "lower estimate of the true redundancy for the same reason",
    "measured_doubling": "lower estimate of the true redundancy for the same reason",
    "n_alt_profiles": "exact count; asymptotic partition estimates are not evaluated",
}


def upper_bound_thm1(n):
    """``pi sqrt(2/3) log2(e) sqrt(n) + log2 n``."""
    return THM1_CONST * math.sqrt(n) + math.log2(n)


def profile_upper_bound(n):
    """``log2 p(n) + log2 n``."""
    return math.log2(partition_count(n)) + math.log2(n)


def lower_bound_thmLB(n):
    """Main term ``2^(-1/3) log2(e^(23/12) / sqrt(2 pi)) n^(1/3)`` of the lower bound."""
    return LB_CONST * n ** (1.0 / 3.0)


def seq_bound(n):
    """Worst-case redundancy bound of the doubling-trick sequential estimator."""
    lg = math.log2(n)
    return 2.0 + 2.5 * lg + 0.5 * lg * lg + SEQ_CONST * math.sqrt(n)


def log2_marginal_gap_bound(h):
    """``log2(h exp(pi sqrt(2/3) sqrt(h)))``: bound on ``log2(sup / q^h)`` at horizon ``h``."""
    return math.log2(h) + PARTITION_RATE * math.sqrt(h) * LOG2E


def log2_doubling_gap_bound(h):
    """``log2(h^((log2 h - 1)/2) exp(pi sqrt(2/3) sqrt(h) / (sqrt 2 - 1)))``.

    Bounds ``log2(q^h(psi) / q_doubling(psi))`` for a pattern whose length
    rounds up to ``h``.
    """
    lg = math.log2(h)
    return lg * (lg - 1.0) / 2.0 + PARTITION_RATE * math.sqrt(h) / (math.sqrt(2.0) - 1.0) * LOG2E


def shtarkov_redundancy(n, sup_options=None, limit=None, jobs=1):
    """``log2`` of the sum of per-pattern suprema over alternating patterns of length ``n``.

    Computed per class as ``sum L * sup``.
    """
    check_guard(n, limit, DEFAULT_EXACT_GUARD)
    table = class_table(n)
    sups = sup_classes(table, jobs, **(sup_options or {}))
    return math.log2(math.fsum(L * sups[key].value for key, L in table.items()))


COLUMNS = (
    "n",
    "n_alt_patterns",
    "n_alt_profiles",
    "p_n",
    "p_n_bounded",
    "Z_n",
    "shtarkov",
    "measured_block",
    "measured_doubling",
    "profile_ub",
    "upper_bound_thm1",
    "seq_bound",
    "lower_bound_thmLB",
)


def sandwich_row(n, sup_options=None, limit=None, jobs=1):
    check_guard(n, limit, DEFAULT_EXACT_GUARD)
    return {
        "n": n,
        "n_alt_patterns": count_alternating_patterns(n),
        "n_alt_profiles": len(enumerate_alternating_profiles(n, limit=max(n, 1))),
        "p_n": partition_count(n),
        "p_n_bounded": partition_count_bounded(n, (n + 1) // 2),
        "Z_n": len(class_table(n)),
        "shtarkov": shtarkov_redundancy(n, sup_options, limit, jobs),
        "measured_block": measured_redundancy("block", n, sup_options, limit, jobs),
        "measured_doubling": measured_redundancy("doubling", n, sup_options, limit, jobs),
        "profile_ub": profile_upper_bound(n),
        "upper_bound_thm1": upper_bound_thm1(n),
        "seq_bound": seq_bound(n),
        "lower_bound_thmLB": lower_bound_thmLB(n),
    }


def sandwich_table(n_max, sup_options=None, limit=None, jobs=1, n_min=1):
    """Rows for ``n_min..n_max`` plus metadata describing the inexact columns."""
    check_guard(n_max, limit, DEFAULT_EXACT_GUARD)
    rows = [sandwich_row(n, sup_options, limit, jobs) for n in range(n_min, n_max + 1)]
    meta = {"columns": list(COLUMNS), "caveats": dict(CAVEATS), "sup_options": dict(sup_options or {})}
    return rows, meta

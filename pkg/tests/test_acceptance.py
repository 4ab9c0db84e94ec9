"""Acceptance criteria 1-10.

Each test prints one ``CRITERION <n>: PASS|FAIL`` line (collected into the
pytest terminal summary).  Run directly with ``python tests/test_acceptance.py``
for the same lines without pytest.
"""
import functools
import math
import random
import statistics
import sys
import time
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
from conftest import ACCEPTANCE_LINES, random_rational_dist  # noqa: E402

from altmark import kernels  # noqa: E402
from altmark._accel import NUMBA_AVAILABLE  # noqa: E402
from altmark.channel import (  # noqa: E402
    RepetitionModel,
    apply_channel,
    run_count_tail,
    sample_source,
)
from altmark.combinatorics import (  # noqa: E402
    class_histogram_bruteforce,
    class_size_L,
    class_table,
    enumerate_alternating_patterns,
    partition_count,
    partition_count_bounded,
    pattern_class,
)
from altmark.estimators import (  # noqa: E402
    block_q,
    doubling_horizon,
    horizon_free_conditional,
    horizon_free_prob,
    legal_next_labels,
    marginal_q,
    measured_redundancy,
    seq_conditional,
)
from altmark.prob import (  # noqa: E402
    IidDistribution,
    alt_pattern_prob_injections,
    sup_alt_pattern_prob,
)
from altmark.recovery import (  # noqa: E402
    end_to_end_estimate,
    exact_transitions,
    invert_all,
    tv_distance,
)
from altmark.redundancy import (  # noqa: E402
    log2_doubling_gap_bound,
    log2_marginal_gap_bound,
    profile_upper_bound,
    seq_bound,
    upper_bound_thm1,
)


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            start = time.perf_counter()
            try:
                detail = fn()
            except Exception as exc:
                line = f"CRITERION {number}: FAIL  {title} [{type(exc).__name__}: {exc}]"
                ACCEPTANCE_LINES.append(line)
                print(line)
                raise
            elapsed = time.perf_counter() - start
            line = f"CRITERION {number}: PASS  {title} ({detail}; {elapsed:.1f}s)"
            ACCEPTANCE_LINES.append(line)
            print(line)

        return run

    return wrap


@criterion(1, "block estimate sums to exactly 1, n=1..10")
def test_c01_block_normalization():
    start = time.perf_counter()
    for n in range(1, 11):
        total = sum((block_q(psi).q for psi in enumerate_alternating_patterns(n)), Fraction(0))
        assert total == 1, f"n={n}: sum is {total}"
    elapsed = time.perf_counter() - start
    assert elapsed < 60, f"took {elapsed:.1f}s"
    return "zero tolerance"


@criterion(2, "alternating-profile count equals p(n, floor((n+1)/2)), n=1..14")
def test_c02_profile_count():
    hist = kernels.class_histogram_numba if NUMBA_AVAILABLE else kernels.class_histogram_numpy
    for n in range(1, 15):
        profiles = {parts for parts, _ in hist(n)}
        assert len(profiles) == partition_count_bounded(n, (n + 1) // 2), n
    return "profiles from full pattern enumeration"


def _class_members(n):
    members = defaultdict(list)
    for psi in enumerate_alternating_patterns(n):
        profile, k = pattern_class(psi)
        members[(profile.parts, k)].append(psi)
    return members


@criterion(3, "same-class patterns have identical probability, n<=8, 20 rational distributions")
def test_c03_class_equality():
    rng = random.Random(3)
    pairs = 0
    for n in range(2, 9):
        for (parts, k), pats in sorted(_class_members(n).items()):
            if len(pats) < 2:
                continue
            labels = len(parts)
            for _ in range(20):
                # one unused symbol when the injection sum stays cheap
                m = labels + 1 if labels <= 5 else labels
                dist = random_rational_dist(rng, m)
                ref = alt_pattern_prob_injections(dist, pats[0])
                for psi in pats[1:]:
                    assert alt_pattern_prob_injections(dist, psi) == ref, (psi, pats[0], dist)
                    pairs += 1
    return f"{pairs} pattern comparisons by literal injection sums"


@criterion(4, "sup estimate never exceeds 1/L by more than 1e-9, n<=8")
def test_c04_sup_le_inverse_L():
    worst = -math.inf
    for n in range(1, 9):
        for psi in enumerate_alternating_patterns(n):
            gap = sup_alt_pattern_prob(psi).value - 1 / class_size_L(psi)
            worst = max(worst, gap)
            assert gap <= 1e-9, (psi, gap)
    return f"max(sup - 1/L) = {worst:.3g}"


@criterion(5, "block redundancy <= sqrt-n bound and <= log2 p(n) + log2 n, n=2..10")
def test_c05_block_sandwich():
    details = []
    for n in range(2, 11):
        r = measured_redundancy("block", n)
        assert r <= upper_bound_thm1(n), (n, r)
        assert r <= profile_upper_bound(n), (n, r)
        details.append(f"{r:.2f}")
    return "measured " + ",".join(details)


@criterion(6, "sequential conditionals telescope to the block estimate and sum to 1, n<=8")
def test_c06_telescoping():
    for n in range(1, 9):
        for psi in enumerate_alternating_patterns(n):
            prod = Fraction(1)
            for i, lab in enumerate(psi):
                prod *= seq_conditional(psi[:i], lab, n)
            assert prod == block_q(psi).q, psi
            for i in range(1, n):
                prefix = psi[:i]
                fixed = sum(seq_conditional(prefix, lab, n) for lab in legal_next_labels(prefix))
                free = sum(horizon_free_conditional(prefix, lab) for lab in legal_next_labels(prefix))
                assert fixed == 1 and free == 1, prefix
    return "exact"


@criterion(7, "doubling-trick redundancy <= its bound; per-pattern marginal-gap inequalities, n<=8")
def test_c07_doubling_bound():
    details = []
    for n in range(2, 9):
        r = measured_redundancy("doubling", n)
        assert r <= seq_bound(n), (n, r)
        details.append(f"{r:.2f}")
        h = doubling_horizon(n)
        for psi in enumerate_alternating_patterns(n):
            sup = sup_alt_pattern_prob(psi).value
            q_h = marginal_q(psi, h)
            q_free = horizon_free_prob(psi)
            assert math.log2(sup) - math.log2(q_h) <= log2_marginal_gap_bound(h), psi
            assert math.log2(q_h) - math.log2(q_free) <= log2_doubling_gap_bound(h), psi
    return "measured " + ",".join(details)


@criterion(8, "run-count tail below 1e-4, uniform(4), N=1e4, 1e4 trials")
def test_c08_run_count_tail():
    start = time.perf_counter()
    res = run_count_tail(IidDistribution.uniform(4), 10_000, 10_000, seed=20240601)
    elapsed = time.perf_counter() - start
    assert not res.assumption_violated
    assert res.hits < 2, res
    assert elapsed < 300
    return f"hits={res.hits}, frequency={res.frequency}, mean runs {res.mean_runs:.1f}"


def _random_sub_half(rng, m):
    while True:
        dist = random_rational_dist(rng, m, max_weight=50)
        if max(dist.probs) < Fraction(1, 2):
            return dist


@criterion(9, "exact inversion round trip; end-to-end median TV < 0.05")
def test_c09_recovery():
    rng = random.Random(9)
    for _ in range(50):
        dist = _random_sub_half(rng, rng.randint(3, 6))
        rec = invert_all(exact_transitions(dist), (0, 1))
        assert rec.probs == dist.probs, dist
    truth = IidDistribution.uniform(5, exact=False)
    model = RepetitionModel.geometric(0.5)
    tvs = []
    for seed in range(20):
        x = sample_source(truth, 100_000, seed)
        y = apply_channel(x, model, seed)
        tvs.append(tv_distance(end_to_end_estimate(y).probs, truth.probs))
    med = statistics.median(tvs)
    assert med < 0.05, med
    return f"median TV {med:.4f}"


@criterion(10, "memoized L and marginals match brute force, n<=10")
def test_c10_oracle_equivalence():
    checked = 0
    for n in range(1, 11):
        brute_L = class_histogram_bruteforce(n)
        assert class_table(n) == brute_L, n
        brute_marg = defaultdict(Fraction)
        for psi in enumerate_alternating_patterns(n):
            assert class_size_L(psi) == brute_L[pattern_class(psi)[0].parts, pattern_class(psi)[1]]
            q = block_q(psi).q
            for i in range(1, n + 1):
                brute_marg[psi[:i]] += q
        for prefix, value in brute_marg.items():
            assert marginal_q(prefix, n) == value, (prefix, n)
            checked += 1
    return f"{checked} marginals"


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn()
            except Exception:  # the line is already printed
                failed += 1
    sys.exit(1 if failed else 0)

import math

import mpmath
import pytest

from altmark.combinatorics import partition_count, partition_count_bounded
from altmark.estimators import measured_redundancy
from altmark.redundancy import (
    LB_CONST,
    SEQ_CONST,
    THM1_CONST,
    log2_doubling_gap_bound,
    log2_marginal_gap_bound,
    lower_bound_thmLB,
    profile_upper_bound,
    sandwich_table,
    seq_bound,
    shtarkov_redundancy,
    upper_bound_thm1,
)

mpmath.mp.dps = 40


def close(a, b):
    return abs(a - float(b)) <= 1e-13 * max(1.0, abs(float(b)))


class TestConstants:
    def test_upper_constant(self):
        ref = mpmath.pi * mpmath.sqrt(mpmath.mpf(2) / 3) / mpmath.log(2)
        assert close(THM1_CONST, ref)

    def test_lb_constant(self):
        ref = mpmath.power(2, mpmath.mpf(-1) / 3) * mpmath.log(
            mpmath.exp(mpmath.mpf(23) / 12) / mpmath.sqrt(2 * mpmath.pi), 2
        )
        assert close(LB_CONST, ref)

    def test_seq_constant(self):
        ref = 4 * mpmath.pi / mpmath.log(2) / (mpmath.sqrt(3) * (2 - mpmath.sqrt(2)))
        assert close(SEQ_CONST, ref)

    @pytest.mark.parametrize("n", [1, 2, 4, 7, 100, 1000, 10**6])
    def test_bound_functions(self, n):
        lg = mpmath.log(n, 2)
        assert close(upper_bound_thm1(n), THM1_CONST * mpmath.sqrt(n) + lg)
        assert close(lower_bound_thmLB(n), LB_CONST * mpmath.cbrt(n))
        assert close(seq_bound(n), 2 + mpmath.mpf(5) / 2 * lg + lg**2 / 2 + SEQ_CONST * mpmath.sqrt(n))

    @pytest.mark.parametrize("h", [1, 2, 4, 8, 16, 64])
    def test_gap_bounds(self, h):
        rate = mpmath.pi * mpmath.sqrt(mpmath.mpf(2) / 3)
        ref16 = mpmath.log(h * mpmath.exp(rate * mpmath.sqrt(h)), 2)
        assert close(log2_marginal_gap_bound(h), ref16)
        lg = mpmath.log(h, 2)
        refseq = mpmath.log(
            mpmath.power(h, (lg - 1) / 2) * mpmath.exp(rate * mpmath.sqrt(h) / (mpmath.sqrt(2) - 1)), 2
        )
        assert close(log2_doubling_gap_bound(h), refseq)

    def test_worked_values(self):
        assert upper_bound_thm1(1) == pytest.approx(3.70066, abs=1e-5)
        assert upper_bound_thm1(4) == pytest.approx(9.4013, abs=1e-4)
        assert upper_bound_thm1(100) == pytest.approx(43.65, abs=1e-2)
        assert lower_bound_thmLB(1) == pytest.approx(1.142, abs=1e-3)
        assert lower_bound_thmLB(8) == pytest.approx(2 * lower_bound_thmLB(1))
        assert lower_bound_thmLB(1000) == pytest.approx(11.42, abs=1e-2)
        assert seq_bound(1) == pytest.approx(19.87, abs=1e-2)
        assert seq_bound(4) == pytest.approx(44.74, abs=1e-2)

    def test_seq_bound_monotone(self):
        vals = [seq_bound(n) for n in range(1, 200)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_profile_upper_bound(self):
        assert profile_upper_bound(4) == pytest.approx(math.log2(5) + 2)


class TestShtarkov:
    def test_small(self):
        assert shtarkov_redundancy(2) == pytest.approx(0.0, abs=1e-12)
        # sup(123) approaches 1 only as the alphabet grows
        values = [shtarkov_redundancy(3, {"extra_symbols": e}) for e in (0, 2, 6)]
        assert values[0] < values[1] < values[2] < 1.0
        assert values[2] > 0.9

    @pytest.mark.parametrize("n", range(1, 9))
    def test_sandwich(self, n):
        s = shtarkov_redundancy(n)
        block = measured_redundancy("block", n)
        assert s <= block + 1e-9
        assert block <= upper_bound_thm1(n)
        assert s <= profile_upper_bound(n) + 1e-9

    def test_guard(self, monkeypatch):
        from altmark.combinatorics import GuardError

        with pytest.raises(GuardError):
            shtarkov_redundancy(13)
        monkeypatch.setenv("ALT_MARK_GUARD_N", "3")
        with pytest.raises(GuardError):
            shtarkov_redundancy(4)


class TestTable:
    def test_rows(self):
        rows, meta = sandwich_table(6)
        assert [r["n"] for r in rows] == list(range(1, 7))
        row4 = rows[3]
        assert (row4["n_alt_patterns"], row4["n_alt_profiles"], row4["p_n"], row4["Z_n"]) == (5, 3, 5, 4)
        for r in rows:
            n = r["n"]
            assert r["n_alt_profiles"] == r["p_n_bounded"] == partition_count_bounded(n, (n + 1) // 2)
            assert r["p_n"] == partition_count(n)
            assert r["shtarkov"] <= r["measured_block"] + 1e-9 <= r["upper_bound_thm1"] + 1e-9
            assert r["measured_doubling"] <= r["seq_bound"]
        assert set(meta["columns"]) == set(rows[0])
        assert "lower_bound_thmLB" in meta["caveats"]

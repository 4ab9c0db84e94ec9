"""Block and sequential probability assignments for alternating patterns."""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .combinatorics import (
    DEFAULT_EXACT_GUARD,
    _step_states,
    check_guard,
    class_table,
    enumerate_alternating_patterns,
    is_alternating,
    pattern_class,
    prefix_state,
    validate_pattern,
)
from .prob import sup_classes


def _alternating_pattern(pattern):
    pattern = validate_pattern(pattern)
    if not is_alternating(pattern):
        raise ValueError("pattern is not alternating")
    return pattern


@dataclass(frozen=True)
class BlockEstimate:
    pattern: tuple
    q: Fraction
    L: int
    Z: int


def block_q(pattern, limit=None):
    """Block estimate ``1 / (L(psi) * Z_n)`` where Z_n counts the classes."""
    pattern = _alternating_pattern(pattern)
    n = len(pattern)
    check_guard(n, limit)
    table = class_table(n)
    profile, k = pattern_class(pattern)
    L = table[(profile.parts, k)]
    Z = len(table)
    return BlockEstimate(pattern, Fraction(1, L * Z), L, Z)


@lru_cache(maxsize=None)
def _extension_mass(others, last, steps, n):
    # sum of 1/L over all length-n completions of a prefix in this state
    if steps == 0:
        parts = tuple(sorted(others + (last,), reverse=True))
        return Fraction(1, class_table(n)[(parts, last)])
    total = Fraction(0)
    for nxt_others, nxt_last, mult in _step_states(others, last):
        total += mult * _extension_mass(nxt_others, nxt_last, steps - 1, n)
    return total


def marginal_q(prefix, n, limit=None):
    """Total block probability at horizon ``n`` of the patterns extending ``prefix``."""
    prefix = tuple(prefix)
    if len(prefix) > n:
        raise ValueError(f"prefix of length {len(prefix)} exceeds the horizon {n}")
    check_guard(n, limit)
    if not prefix:
        return Fraction(1)
    prefix = _alternating_pattern(prefix)
    others, last = prefix_state(prefix)
    return _extension_mass(others, last, n - len(prefix), n) / len(class_table(n))


def marginal_q_bruteforce(prefix, n, limit=None):
    """Same quantity by summing ``block_q`` over every extension (test oracle)."""
    prefix = tuple(prefix)
    i = len(prefix)
    return sum(
        (block_q(z, limit).q for z in enumerate_alternating_patterns(n, limit) if z[:i] == prefix),
        Fraction(0),
    )


def legal_next_labels(prefix):
    """Labels that may follow ``prefix`` in an alternating pattern."""
    prefix = tuple(prefix)
    if not prefix:
        return (1,)
    top = max(prefix)
    return tuple(lab for lab in range(1, top + 2) if lab != prefix[-1])


def _check_extension(prefix, nxt):
    if nxt not in legal_next_labels(prefix):
        raise ValueError(f"label {nxt} cannot follow prefix {tuple(prefix)}")


def seq_conditional(prefix, nxt, n, limit=None):
    """Horizon-``n`` conditional probability of ``nxt`` after ``prefix``."""
    prefix = tuple(prefix)
    _check_extension(prefix, nxt)
    if len(prefix) + 1 > n:
        raise ValueError(f"position {len(prefix) + 1} is beyond the horizon {n}")
    if not prefix:
        return Fraction(1)
    return marginal_q(prefix + (nxt,), n, limit) / marginal_q(prefix, n, limit)


def doubling_horizon(i):
    """Smallest power of two that is at least ``i``."""
    if i < 1:
        raise ValueError("positions start at 1")
    return 1 << (i - 1).bit_length()


def horizon_free_conditional(prefix, nxt, limit=None):
    """Conditional at position ``i`` computed under the horizon ``doubling_horizon(i)``."""
    prefix = tuple(prefix)
    return seq_conditional(prefix, nxt, doubling_horizon(len(prefix) + 1), limit)


def sequential_prob(pattern, horizon=None, limit=None):
    """Product of conditionals along ``pattern``.

    ``horizon=None`` uses the doubling trick; an integer fixes the horizon.
    """
    pattern = _alternating_pattern(pattern)
    out = Fraction(1)
    for i, lab in enumerate(pattern):
        if horizon is None:
            out *= horizon_free_conditional(pattern[:i], lab, limit)
        else:
            out *= seq_conditional(pattern[:i], lab, horizon, limit)
    return out


def horizon_free_prob(pattern, limit=None):
    return sequential_prob(pattern, None, limit)


@dataclass
class SequentialState:
    """Running state of a sequential assignment over one pattern.

    ``horizon=None`` selects the doubling trick.
    """

    horizon: int = None
    prefix: tuple = ()
    log2_prob: float = 0.0
    conditionals: list = field(default_factory=list)

    def conditional(self, nxt):
        if self.horizon is None:
            return horizon_free_conditional(self.prefix, nxt)
        return seq_conditional(self.prefix, nxt, self.horizon)

    def predictive(self):
        """``{label: probability}`` over the legal next labels."""
        return {lab: self.conditional(lab) for lab in legal_next_labels(self.prefix)}

    def update(self, nxt):
        c = self.conditional(nxt)
        self.prefix = self.prefix + (nxt,)
        self.conditionals.append(c)
        self.log2_prob += math.log2(c)
        return c


def iter_sequential_probs(n, horizon=None, limit=None):
    """``(pattern, probability)`` for every alternating pattern of length ``n``.

    Same values as :func:`sequential_prob`, but prefixes are shared by a
    depth-first walk so each conditional is computed once.  Conditionals only
    depend on the (multiplicities, last multiplicity) state of the prefix.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    check_guard(n, limit)
    horizons = [horizon or doubling_horizon(i) for i in range(1, n + 1)]
    if horizon is not None and horizon < n:
        raise ValueError(f"horizon {horizon} is shorter than the pattern length {n}")
    seq = [1] + [0] * (n - 1)

    def rec(i, top, others, last, prob):
        if i == n:
            yield tuple(seq), prob
            return
        h = horizons[i]
        denom = _extension_mass(others, last, h - i, h)
        reuse = {}
        for o, l, _ in _step_states(others, last):
            reuse[(o, l)] = _extension_mass(o, l, h - i - 1, h) / denom
        counts = {}
        for lab in seq[:i]:
            counts[lab] = counts.get(lab, 0) + 1
        for lab in range(1, top + 2):
            if lab == seq[i - 1]:
                continue
            c = counts.get(lab, 0)
            if c == 0:
                o, l = tuple(sorted(others + (last,))), 1
            else:
                rest = list(others)
                rest.remove(c)
                o, l = tuple(sorted(rest + [last])), c + 1
            seq[i] = lab
            yield from rec(i + 1, max(top, lab), o, l, prob * reuse[(o, l)])

    yield from rec(1, 1, (), 1, Fraction(1))


ESTIMATORS = {
    "block": lambda psi: block_q(psi).q,
    "doubling": horizon_free_prob,
}


def measured_redundancy(estimator, n, sup_options=None, limit=None, jobs=1):
    """``max_psi log2(sup(psi) / estimator(psi))`` over alternating patterns of length ``n``.

    ``estimator`` is a callable returning a probability, ``"block"``,
    ``"doubling"`` or an int (a fixed-horizon sequential estimator).  The
    supremum is the numeric lower estimate, so the result under-estimates the
    true redundancy.
    """
    check_guard(n, limit, DEFAULT_EXACT_GUARD)
    sup_options = sup_options or {}
    table = class_table(n)
    sups = sup_classes(table, jobs, **sup_options)
    if estimator == "block":
        Z = len(table)
        return max(math.log2(sups[key].value * L * Z) for key, L in table.items())
    if estimator == "doubling" or isinstance(estimator, int):
        pairs = iter_sequential_probs(n, None if estimator == "doubling" else estimator, limit=n)
    elif callable(estimator):
        pairs = ((psi, estimator(psi)) for psi in enumerate_alternating_patterns(n, limit=n))
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    worst = -math.inf
    for psi, q in pairs:
        profile, k = pattern_class(psi)
        worst = max(worst, math.log2(sups[(profile.parts, k)].value) - math.log2(q))
    return worst

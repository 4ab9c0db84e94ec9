"""Runs, alternating sequences, patterns, profiles and partition counts.

Sequences are any iterable of hashable symbols (in practice dense integer
codes).  Patterns are tuples of positive ints in first-appearance order.
Profiles are stored as descending partitions of the pattern length.
"""
import os
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import groupby

DEFAULT_PATTERN_GUARD = 20
DEFAULT_EXACT_GUARD = 12


class GuardError(ValueError):
    """Requested size exceeds a configured enumeration limit."""


def enumeration_guard(default=DEFAULT_PATTERN_GUARD):
    """Enumeration limit, overridable through ``ALT_MARK_GUARD_N``."""
    value = os.environ.get("ALT_MARK_GUARD_N")
    if value is None or value.strip() == "":
        return default
    return int(value)


def check_guard(n, limit=None, default=DEFAULT_PATTERN_GUARD):
    limit = enumeration_guard(default) if limit is None else limit
    if n > limit:
        raise GuardError(f"n={n} exceeds the enumeration limit {limit} (set ALT_MARK_GUARD_N to raise it)")


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------

def runs(seq):
    """``[(symbol, runlength), ...]`` for the maximal runs of ``seq``."""
    return [(sym, sum(1 for _ in grp)) for sym, grp in groupby(seq)]


def alternating_of(seq):
    """Replace every run by a single copy of its symbol."""
    return tuple(sym for sym, _ in groupby(seq))


def pattern_of(seq):
    """Relabel ``seq`` by order of first appearance, starting at 1."""
    seq = list(seq)
    if not seq:
        raise ValueError("pattern of an empty sequence is undefined")
    labels = {}
    out = []
    for sym in seq:
        if sym not in labels:
            labels[sym] = len(labels) + 1
        out.append(labels[sym])
    return tuple(out)


def is_pattern(labels):
    """True if ``labels`` is a canonical (first-appearance) pattern."""
    top = 0
    for lab in labels:
        if not isinstance(lab, int) or lab < 1 or lab > top + 1:
            return False
        top = max(top, lab)
    return True


def validate_pattern(labels):
    labels = tuple(int(x) for x in labels)
    if not labels:
        raise ValueError("empty pattern")
    if not is_pattern(labels):
        raise ValueError(f"not a canonical pattern: {labels}")
    return labels


def is_alternating(seq):
    """No two equal adjacent entries (vacuously true for length <= 1)."""
    seq = list(seq)
    return all(a != b for a, b in zip(seq, seq[1:]))


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Profile:
    """Multiplicities of the symbols of a pattern, as a partition of ``n``."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(sorted((int(p) for p in self.parts), reverse=True))
        if any(p < 1 for p in parts):
            raise ValueError("profile parts must be positive")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self):
        return sum(self.parts)

    @property
    def max_part(self):
        return self.parts[0] if self.parts else 0

    @property
    def phi(self):
        """Dense view ``(phi_1, ..., phi_n)``: phi_i symbols appear i times."""
        dense = [0] * self.n
        for p in self.parts:
            dense[p - 1] += 1
        return tuple(dense)

    @classmethod
    def from_phi(cls, phi):
        parts = []
        for i, count in enumerate(phi, start=1):
            if count < 0:
                raise ValueError("negative profile entry")
            parts.extend([i] * count)
        return cls(tuple(parts))

    def __str__(self):
        return "+".join(map(str, self.parts))


def profile_of(pattern):
    """Profile of a pattern (or of any sequence, through its pattern)."""
    return Profile(tuple(Counter(pattern).values()))


def last_multiplicity(pattern):
    return sum(1 for lab in pattern if lab == pattern[-1])


def pattern_class(pattern):
    """``(profile, k)``: the profile and the multiplicity of the last label."""
    return profile_of(pattern), last_multiplicity(pattern)


def is_alternating_profile(profile):
    """A profile is realised by an alternating pattern iff no part exceeds (n+1)//2."""
    return profile.max_part <= (profile.n + 1) // 2


# ---------------------------------------------------------------------------
# Integer partitions
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _partition_table(n):
    # table[r][j] = partitions of j with parts <= r, for 0 <= r, j <= n
    table = [[1] + [0] * n]
    for r in range(1, n + 1):
        prev = table[-1]
        row = list(prev)
        for j in range(r, n + 1):
            row[j] += row[j - r]
        table.append(row)
    return table


def partition_count_bounded(n, r):
    """Number of partitions of ``n`` with no part larger than ``r``."""
    if n < 0 or r < 0:
        raise ValueError("n and r must be non-negative")
    r = min(r, n)
    if n == 0:
        return 1
    return _partition_table(n)[r][n]


def partition_count(n):
    """p(n), with p(0) = 1."""
    return partition_count_bounded(n, n)


def partitions(n, max_part=None):
    """Partitions of ``n`` as descending tuples, in reverse lexicographic order."""
    max_part = n if max_part is None else min(max_part, n)

    def rec(rest, cap):
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, cap), 0, -1):
            for tail in rec(rest - first, first):
                yield (first,) + tail

    yield from rec(n, max_part)


# ---------------------------------------------------------------------------
# Alternating patterns and their classes
# ---------------------------------------------------------------------------

def enumerate_alternating_patterns(n, limit=None):
    """Every canonical alternating pattern of length ``n``, lexicographically."""
    if n < 1:
        raise ValueError("n must be >= 1")
    check_guard(n, limit)
    seq = [0] * n

    def rec(i, top):
        if i == n:
            yield tuple(seq)
            return
        prev = seq[i - 1]
        for lab in range(1, top + 2):
            if lab != prev:
                seq[i] = lab
                yield from rec(i + 1, max(top, lab))

    seq[0] = 1
    yield from rec(1, 1)


def enumerate_alternating_profiles(n, limit=None):
    """Set of profiles of alternating patterns of length ``n``.

    Computed by walking the reachable (multiplicities, last multiplicity)
    states, which is exact because pattern extensions depend on nothing else.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    check_guard(n, limit)
    return {Profile(parts) for parts, _ in class_table(n)}


def _step_states(others, last):
    """Successor states of a pattern prefix, with the number of labels each uses.

    ``others`` is the sorted tuple of multiplicities of all labels except the
    last one written; ``last`` is that label's multiplicity.
    """
    out = []
    # open a new label
    out.append((tuple(sorted(others + (last,))), 1, 1))
    # reuse an existing label other than the last one
    for c, mult in Counter(others).items():
        rest = list(others)
        rest.remove(c)
        out.append((tuple(sorted(rest + [last])), c + 1, mult))
    return out


def prefix_state(pattern):
    """The ``(others, last)`` state reached by a non-empty pattern prefix."""
    counts = Counter(pattern)
    last = counts.pop(pattern[-1])
    return tuple(sorted(counts.values())), last


@lru_cache(maxsize=None)
def class_table(n):
    """``{(parts, k): L}`` for every realisable class of length-``n`` patterns.

    ``parts`` is the descending partition, ``k`` the multiplicity of the last
    label and ``L`` the number of alternating patterns in the class.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    states = {((), 1): 1}
    for _ in range(n - 1):
        nxt = {}
        for (others, last), ways in states.items():
            for state_o, state_l, mult in _step_states(others, last):
                key = (state_o, state_l)
                nxt[key] = nxt.get(key, 0) + ways * mult
        states = nxt
    table = {}
    for (others, last), ways in states.items():
        parts = tuple(sorted(others + (last,), reverse=True))
        table[(parts, last)] = ways
    return table


def class_size_L(pattern):
    """Number of alternating patterns sharing the profile and last multiplicity."""
    pattern = validate_pattern(pattern)
    if not is_alternating(pattern):
        raise ValueError("class size is defined for alternating patterns only")
    profile, k = pattern_class(pattern)
    return class_table(len(pattern))[(profile.parts, k)]


def class_count_Z(n, limit=None):
    """Sum of 1/L over alternating patterns of length ``n`` (the number of classes)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    check_guard(n, limit)
    return len(class_table(n))


def class_count_Z_bruteforce(n, limit=None):
    """Exact sum of 1/L(psi) by explicit enumeration (test oracle)."""
    total = Fraction(0)
    for psi in enumerate_alternating_patterns(n, limit):
        total += Fraction(1, class_size_L_bruteforce(psi))
    return total


def class_histogram_bruteforce(n, limit=None):
    """``{(parts, k): count}`` by enumerating every alternating pattern."""
    hist = Counter()
    for psi in enumerate_alternating_patterns(n, limit):
        profile, k = pattern_class(psi)
        hist[(profile.parts, k)] += 1
    return dict(hist)


@lru_cache(maxsize=None)
def _bruteforce_hist_cached(n):
    return class_histogram_bruteforce(n)


def class_size_L_bruteforce(pattern):
    pattern = tuple(pattern)
    profile, k = pattern_class(pattern)
    return _bruteforce_hist_cached(len(pattern))[(profile.parts, k)]


def count_alternating_patterns(n):
    """|alternating patterns of length n|, from the class table."""
    return sum(class_table(n).values())

"""Probability laws of i.i.d. sequences, alternating sequences and their patterns.

Arithmetic is exact (``Fraction``) or floating point depending on how the
:class:`IidDistribution` was built; nothing switches modes behind the caller's
back.
"""
import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .combinatorics import (
    is_alternating,
    pattern_class,
    pattern_of,
    profile_of,
    validate_pattern,
)

INJECTION_GUARD = 8
MAX_STEP = 1e4


class DegenerateError(ValueError):
    """A formula hits a zero denominator (a symbol of probability one)."""


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IidDistribution:
    """Strictly positive probabilities over symbols ``0..m-1``.

    ``exact=True`` keeps every entry as a ``Fraction`` and requires the sum to
    be exactly one; otherwise entries are floats summing to one within 1e-12.
    """

    probs: tuple
    exact: bool = True

    def __post_init__(self):
        if self.exact:
            probs = tuple(Fraction(p) for p in self.probs)
            if sum(probs) != 1:
                raise ValueError(f"probabilities sum to {sum(probs)}, not 1")
        else:
            probs = tuple(float(p) for p in self.probs)
            if abs(math.fsum(probs) - 1.0) > 1e-12:
                raise ValueError(f"probabilities sum to {math.fsum(probs)!r}, not 1")
        if not probs:
            raise ValueError("empty distribution")
        if any(not (0 < p <= 1) for p in probs):
            raise ValueError("every probability must lie in (0, 1]")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, m, exact=True):
        if exact:
            return cls(tuple(Fraction(1, m) for _ in range(m)), True)
        return cls(tuple(1.0 / m for _ in range(m)), False)

    @classmethod
    def from_weights(cls, weights, exact=True):
        """Normalise positive weights (ints, Fractions or floats)."""
        if exact:
            weights = [Fraction(w) for w in weights]
            total = sum(weights)
            return cls(tuple(w / total for w in weights), True)
        weights = np.asarray(weights, dtype=np.float64)
        return cls(tuple(weights / weights.sum()), False)

    @property
    def m(self):
        return len(self.probs)

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, i):
        return self.probs[i]

    def as_array(self):
        return np.array([float(p) for p in self.probs])

    def to_json(self):
        if self.exact:
            return {"probs": [str(p) for p in self.probs]}
        return {"probs": [float(p) for p in self.probs]}

    @classmethod
    def from_json(cls, obj, exact=None):
        """Parse ``{"probs": [...]}`` with rational strings or floats.

        ``exact=None`` picks exact mode when every entry is a string or an int.
        """
        if isinstance(obj, str):
            obj = json.loads(obj)
        raw = obj["probs"] if isinstance(obj, dict) else obj
        if exact is None:
            exact = all(isinstance(x, (str, int)) for x in raw)
        if exact:
            return cls(tuple(Fraction(str(x)) for x in raw), True)
        return cls(tuple(float(Fraction(x)) if isinstance(x, str) else float(x) for x in raw), False)


def _one(dist):
    return Fraction(1) if dist.exact else 1.0


def _check_support(dist, seq):
    for s in seq:
        if not isinstance(s, (int, np.integer)) or not 0 <= s < dist.m:
            raise ValueError(f"symbol {s!r} outside the support 0..{dist.m - 1}")


# ---------------------------------------------------------------------------
# Sequence laws
# ---------------------------------------------------------------------------

def seq_prob(dist, x):
    """i.i.d. probability of the sequence ``x``."""
    x = list(x)
    _check_support(dist, x)
    out = _one(dist)
    for s in x:
        out *= dist[s]
    return out


def alt_seq_prob(dist, v):
    """Probability of the alternating sequence ``v`` under the run-collapsed law.

    The first symbol has probability ``p[v1]``; every later symbol ``b`` after
    ``a`` has probability ``p[b] / (1 - p[a])``.
    """
    v = list(v)
    if not v:
        return _one(dist)
    _check_support(dist, v)
    if not is_alternating(v):
        raise ValueError("sequence is not alternating")
    out = dist[v[0]]
    for a, b in zip(v, v[1:]):
        if dist[a] == 1:
            raise DegenerateError(f"symbol {a} has probability one")
        out = out * dist[b] / (1 - dist[a])
    return out


# ---------------------------------------------------------------------------
# Pattern laws
# ---------------------------------------------------------------------------

def _class_parts(pattern):
    profile, k = pattern_class(pattern)
    others = list(profile.parts)
    others.remove(k)
    return Counter(others), k


def _assignment_dp(probs, label_mults, weight, special=None, special_weight=None):
    """Sum over injections of labels into symbols of a product of symbol weights.

    ``label_mults`` maps a multiplicity to the number of labels carrying it.
    Labels with equal multiplicity are interchangeable, so the state is the
    vector of labels still unassigned per multiplicity (and whether the
    distinguished ``special`` label is still unassigned).
    """
    keys = sorted(label_mults)
    start = (tuple(label_mults[u] for u in keys), special is not None)
    zero = probs[0] * 0
    states = {start: zero + 1}
    for x in probs:
        w_cache = {}
        nxt = dict(states)
        for (rem, sigma), val in states.items():
            for j, r in enumerate(rem):
                if r == 0:
                    continue
                u = keys[j]
                if u not in w_cache:
                    w_cache[u] = weight(x, u)
                key = (rem[:j] + (r - 1,) + rem[j + 1:], sigma)
                nxt[key] = nxt.get(key, zero) + val * r * w_cache[u]
            if sigma:
                key = (rem, False)
                nxt[key] = nxt.get(key, zero) + val * special_weight(x, special)
        states = nxt
    return states.get((tuple(0 for _ in keys), False), zero)


def _distinct_labels(pattern):
    return len(set(pattern))


def iid_pattern_prob(dist, pattern):
    """Probability that an i.i.d. sequence has the given pattern."""
    pattern = validate_pattern(pattern)
    k = _distinct_labels(pattern)
    if k > dist.m:
        raise ValueError(f"pattern uses {k} labels but the alphabet has {dist.m}")
    mults = Counter(profile_of(pattern).parts)
    return _assignment_dp(dist.probs, mults, lambda x, u: x ** u)


def _odds_weight(x, u):
    if x == 1:
        raise DegenerateError("a symbol with probability one cannot repeat in an alternating pattern")
    return (x / (1 - x)) ** u


def _last_weight(x, k):
    if k == 1:
        return x
    if x == 1:
        raise DegenerateError("a symbol with probability one cannot repeat in an alternating pattern")
    return x ** k / (1 - x) ** (k - 1)


def alt_pattern_prob(dist, pattern):
    """Probability that the alternating sequence has the given pattern.

    Exact for an exact distribution.  Computed by a DP over symbols that only
    tracks how many labels of each multiplicity remain unassigned.
    """
    pattern = validate_pattern(pattern)
    if not is_alternating(pattern):
        raise ValueError("pattern is not alternating")
    k = _distinct_labels(pattern)
    if k > dist.m:
        raise ValueError(f"pattern uses {k} labels but the alphabet has {dist.m}")
    if k >= 2 and any(p == 1 for p in dist.probs):
        raise DegenerateError("a symbol with probability one forbids patterns with two labels")
    others, last = _class_parts(pattern)
    return _assignment_dp(dist.probs, others, _odds_weight, last, _last_weight)


def _injections(m, k):
    used = [False] * m
    f = [0] * k

    def rec(i):
        if i == k:
            yield tuple(f)
            return
        for s in range(m):
            if not used[s]:
                used[s] = True
                f[i] = s
                yield from rec(i + 1)
                used[s] = False

    yield from rec(0)


def alt_pattern_prob_injections(dist, pattern, limit=INJECTION_GUARD):
    """Literal injection sum of the alternating-sequence law (test oracle).

    Depth-first over positions of the pattern: a new label branches over the
    unused symbols, a repeated label reuses its symbol.  In exact mode the
    running term is kept as an integer numerator/denominator pair over the
    common denominator of the distribution, which avoids Fraction overhead.
    """
    pattern = validate_pattern(pattern)
    if not is_alternating(pattern):
        raise ValueError("pattern is not alternating")
    k = _distinct_labels(pattern)
    if k > limit:
        raise ValueError(f"injection sum guarded at k <= {limit}, got {k}")
    if k > dist.m:
        raise ValueError(f"pattern uses {k} labels but the alphabet has {dist.m}")
    n = len(pattern)
    m = dist.m
    if dist.exact:
        D = math.lcm(*(p.denominator for p in dist.probs))
        a = [int(p * D) for p in dist.probs]
        comp = [D - x for x in a]
    else:
        a = list(dist.probs)
        comp = [1.0 - x for x in a]
    assign = [0] * (k + 1)
    used = [False] * m
    sums = {}
    total = [0.0]

    def rec(i, num, den):
        if i == n:
            if dist.exact:
                sums[den] = sums.get(den, 0) + num
            else:
                total[0] += num / den
            return
        lab = pattern[i]
        prev = None if i == 0 else assign[pattern[i - 1]]
        if lab > max(pattern[:i], default=0):
            choices = [s for s in range(m) if not used[s]]
        else:
            choices = [assign[lab]]
        for s in choices:
            fresh = not used[s]
            if fresh:
                used[s] = True
                assign[lab] = s
            if prev is None:
                rec(i + 1, num * a[s], den * (D if dist.exact else 1.0))
            else:
                rec(i + 1, num * a[s], den * comp[prev])
            if fresh:
                used[s] = False

    rec(0, 1 if dist.exact else 1.0, 1 if dist.exact else 1.0)
    if dist.exact:
        return sum((Fraction(num, den) for den, num in sums.items()), Fraction(0))
    return total[0]


def iid_pattern_prob_injections(dist, pattern):
    """Injection sum of the i.i.d. pattern law (test oracle)."""
    pattern = validate_pattern(pattern)
    k = _distinct_labels(pattern)
    if k > dist.m:
        raise ValueError(f"pattern uses {k} labels but the alphabet has {dist.m}")
    total = _one(dist) * 0
    for f in _injections(dist.m, k):
        total += seq_prob(dist, [f[lab - 1] for lab in pattern])
    return total


# ---------------------------------------------------------------------------
# Numeric supremum over distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SupResult:
    """Best probability found for a pattern and the distribution attaining it.

    ``value`` is a lower estimate of the true supremum: the search is capped at
    ``alphabet_size`` symbols and is local.
    """

    value: float
    probs: tuple
    alphabet_size: int


def project_simplex(P, floor=0.0):
    """Row-wise Euclidean projection onto ``{p >= floor, sum p = 1}``."""
    P = np.atleast_2d(np.asarray(P, dtype=np.float64))
    R, m = P.shape
    mass = 1.0 - m * floor
    Y = P - floor
    U = -np.sort(-Y, axis=1)
    css = np.cumsum(U, axis=1) - mass
    idx = np.arange(1, m + 1)
    cond = U - css / idx > 0
    rho = m - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(R), rho] / (rho + 1)
    X = np.maximum(Y - theta[:, None], 0.0)
    # rescale away the rounding left by large inputs
    X *= mass / X.sum(axis=1, keepdims=True)
    return X + floor


def _class_arrays(parts, k):
    others = list(parts)
    others.remove(k)
    cnt = Counter(others)
    u = np.array(sorted(cnt), dtype=np.int64)
    c = np.array([cnt[x] for x in sorted(cnt)], dtype=np.int64)
    return u, c


def _ascend(P, u, kappa, nxt, fac, tol, max_iter, floor, window=50, stall=1e-9,
            warmup=200, dominated=1e-3):
    """Projected gradient ascent on log f, one step size per row.

    A row stops when its step drops below ``tol``; when a window of
    iterations raises f by less than a relative ``stall``; or, after
    ``warmup`` iterations, when it trails the best row by more than a relative
    ``dominated``.  The last two keep rows that crawl towards an unattained
    boundary supremum from running to ``max_iter``.
    """
    f, g = kernels.alt_class_value_grad(P, u, kappa, nxt, fac)
    step = np.full(P.shape[0], 0.1)
    active = np.ones(P.shape[0], dtype=bool)
    checkpoint = f.copy()
    for it in range(1, max_iter + 1):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        G = g[idx] / f[idx][:, None]
        trial = project_simplex(P[idx] + step[idx][:, None] * G, floor)
        ft, gt = kernels.alt_class_value_grad(trial, u, kappa, nxt, fac)
        better = ft > f[idx]
        acc = idx[better]
        P[acc], f[acc], g[acc] = trial[better], ft[better], gt[better]
        step[acc] = np.minimum(2.0 * step[acc], MAX_STEP)
        step[idx[~better]] *= 0.5
        active[idx[step[idx] < tol]] = False
        if it % window == 0:
            active &= (f - checkpoint) > stall * f
            if it >= warmup:
                active &= f >= (1.0 - dominated) * f.max()
            checkpoint = f.copy()
    return P, f


def _structured_starts(parts, k, M):
    """Uniform, multiplicity-proportional and near-degenerate starting points."""
    n_labels = len(parts)
    extras = [0.05] * (M - n_labels)
    weights = np.array(list(parts) + extras, dtype=np.float64)
    starts = [np.full(M, 1.0 / M), weights / weights.sum()]
    # heavy-symbol starts: the most frequent label near probability one,
    # the rest proportional to multiplicity
    rest = np.array(list(parts[1:]) + extras, dtype=np.float64)
    rest /= rest.sum()
    for delta in (1e-2, 1e-4, 1e-6):
        starts.append(np.concatenate([[1.0 - delta], delta * rest]))
    return starts


def _sup_class_uncached(parts, k, extra_symbols, restarts, seed, tol, max_iter):
    n_labels = len(parts)
    u, c = _class_arrays(parts, k)
    nxt, fac = kernels.class_state_tables(c)
    floor = 1e-12
    best = None
    for M in range(n_labels, n_labels + extra_symbols + 1):
        rng = np.random.default_rng([seed, M, *parts, k])
        starts = _structured_starts(parts, k, M) if M > 1 else [np.ones(1)]
        while len(starts) < restarts:
            starts.append(rng.dirichlet(np.ones(M)))
        P = project_simplex(np.array(starts[:restarts]), floor)
        P, f = _ascend(P, u, k, nxt, fac, tol, max_iter, floor)
        i = int(np.argmax(f))
        if best is None or f[i] > best.value:
            best = SupResult(float(f[i]), tuple(float(x) for x in P[i]), M)
    return best


_SUP_CACHE = {}
SUP_DEFAULTS = {"extra_symbols": 2, "restarts": 64, "seed": 0, "tol": 1e-10, "max_iter": 5000}


def _sup_key(parts, k, options):
    opts = dict(SUP_DEFAULTS)
    unknown = set(options) - set(opts)
    if unknown:
        raise TypeError(f"unknown sup options: {sorted(unknown)}")
    opts.update(options)
    return (tuple(parts), int(k)) + tuple(opts[name] for name in SUP_DEFAULTS)


def sup_class(parts, k, **options):
    """Sup estimate for the class with descending ``parts`` and last multiplicity ``k``.

    Every pattern of a class has the same probability under every
    distribution, so one optimisation serves the whole class; results are
    memoised per (class, options).
    """
    key = _sup_key(parts, k, options)
    if key not in _SUP_CACHE:
        _SUP_CACHE[key] = _sup_class_uncached(*key)
    return _SUP_CACHE[key]


def _sup_worker(key):
    return key, _sup_class_uncached(*key)


def sup_classes(classes, jobs=1, **options):
    """``{(parts, k): SupResult}`` for many classes, optionally in worker processes.

    Each class uses its own seed stream, so results do not depend on ``jobs``.
    """
    keys = [_sup_key(parts, k, options) for parts, k in classes]
    todo = [key for key in dict.fromkeys(keys) if key not in _SUP_CACHE]
    if jobs > 1 and len(todo) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as pool:
            for key, res in pool.map(_sup_worker, todo):
                _SUP_CACHE[key] = res
    else:
        for key in todo:
            _SUP_CACHE[key] = _sup_class_uncached(*key)
    return {key[:2]: _SUP_CACHE[key] for key in keys}


def sup_alt_pattern_prob(pattern, **options):
    """Largest alternating-pattern probability found over distributions.

    Multi-start projected gradient ascent on the log-probability, with step
    halving, over alphabets of ``k .. k + extra_symbols`` symbols where ``k``
    is the number of labels.  Starts include the uniform distribution and the
    distribution proportional to label multiplicities.  The result depends on
    the pattern only through its class, so it is cached per class.
    """
    pattern = validate_pattern(pattern)
    if not is_alternating(pattern):
        raise ValueError("pattern is not alternating")
    profile, k = pattern_class(pattern)
    return sup_class(profile.parts, k, **options)


# ---------------------------------------------------------------------------
# Constructive lower bound for 1-interleaved patterns
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LowerBoundConstruction:
    """Closed-form lower bound and the explicit distribution behind it.

    ``bound`` is the closed form; ``seq_prob`` is the probability of the
    pattern's own sequence under ``distribution``; ``lower_value`` multiplies
    it by the number of equally likely relabelings and is itself attained by
    ``distribution``, so ``bound <= lower_value <= sup``.
    """

    bound: object
    seq_prob: object
    lower_value: object
    distribution: IidDistribution


def interleaved_inner(pattern):
    """Inner pattern of ``1 a 1 b 1 c ...``; raises if ``pattern`` is not of that form."""
    pattern = validate_pattern(pattern)
    n = len(pattern)
    if n < 2:
        raise ValueError("interleaved patterns need length >= 2")
    if any(pattern[i] != 1 for i in range(0, n, 2)):
        raise ValueError("every odd position must carry label 1")
    if any(pattern[i] == 1 for i in range(1, n, 2)):
        raise ValueError("even positions must avoid label 1")
    return pattern_of(pattern[1::2])


def lb_construction_prob(pattern, r_n):
    """Evaluate the interleaved-pattern lower bound and its witness distribution.

    ``r_n`` may be an int or Fraction (exact result) or a float.
    """
    inner = interleaved_inner(pattern)
    pattern = tuple(pattern)
    n = len(pattern)
    half = n // 2
    exact = not isinstance(r_n, float)
    r = Fraction(r_n) if exact else float(r_n)
    if r < 1:
        raise ValueError("r_n must be >= 1")
    one = Fraction(1) if exact else 1.0
    phi = profile_of(inner).phi
    bound = one / 2 * ((2 * r - 1) / (2 * r)) ** half
    for mu, count in enumerate(phi, start=1):
        if count:
            bound *= math.factorial(count) * (one * mu / half) ** (mu * count)

    k = max(pattern)
    occ = Counter(pattern)
    probs = [one - one / (2 * r)] + [one * occ[lab] / (n * r) for lab in range(2, k + 1)]
    rest = one - sum(probs)
    if rest > 0:
        probs.append(rest)
    dist = IidDistribution(tuple(probs), exact)
    v = [lab - 1 for lab in pattern]
    p_v = alt_seq_prob(dist, v)
    relabelings = 1
    for count in phi:
        relabelings *= math.factorial(count)
    return LowerBoundConstruction(bound, p_v, relabelings * p_v, dist)

"""Recover source probabilities from transition probabilities of the alternating chain.

Under an i.i.d. source with probabilities ``p`` the alternating sequence is a
Markov chain with ``P(b | a) = p_b / (1 - p_a)`` for ``b != a``.  Two
transitions between an anchor pair fix ``p`` on the pair; ratios along the
first anchor's row fix the rest.
"""
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .combinatorics import alternating_of, is_alternating
from .prob import DegenerateError, IidDistribution


@dataclass(frozen=True)
class TransitionEstimate:
    """Row-stochastic transition matrix with zero diagonal.

    ``probs`` is a float array, or an object array of ``Fraction`` for exact
    transitions; ``counts`` is None when the matrix did not come from data.
    """

    probs: np.ndarray
    counts: np.ndarray = None
    alpha: float = 0.0

    @property
    def m(self):
        return self.probs.shape[0]


def bigram_transitions(v, alpha=0.5, alphabet_size=None):
    """Smoothed bigram estimate ``(count(ab) + alpha) / sum_{b' != a} (count(ab') + alpha)``."""
    v = np.asarray(v, dtype=np.int64)
    if v.size == 0:
        raise ValueError("empty sequence")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if not is_alternating(v.tolist()):
        raise ValueError("sequence is not alternating")
    m = int(v.max()) + 1 if alphabet_size is None else int(alphabet_size)
    if v.min() < 0 or v.max() >= m:
        raise ValueError(f"symbols must lie in 0..{m - 1}")
    counts = kernels.bigram_counts(v, m)
    smoothed = counts + alpha
    np.fill_diagonal(smoothed, 0.0)
    totals = smoothed.sum(axis=1, keepdims=True)
    probs = np.divide(smoothed, totals, out=np.zeros((m, m)), where=totals > 0)
    return TransitionEstimate(probs, counts, float(alpha))


def exact_transitions(dist):
    """Transitions ``p_b / (1 - p_a)`` of the alternating chain of ``dist``."""
    m = dist.m
    probs = np.empty((m, m), dtype=object if dist.exact else np.float64)
    zero = Fraction(0) if dist.exact else 0.0
    for a in range(m):
        if dist[a] == 1:
            raise DegenerateError(f"symbol {a} has probability one")
        for b in range(m):
            probs[a, b] = zero if a == b else dist[b] / (1 - dist[a])
    return TransitionEstimate(probs)


def invert_pair(p12, p21, eps=1e-9):
    """Source probabilities of an anchor pair from its two transitions.

    ``p1 = p21 (1 - p12) / (1 - p12 p21)`` and symmetrically for ``p2``.
    """
    for t in (p12, p21):
        if not 0 <= t <= 1:
            raise ValueError("transition probabilities must lie in [0, 1]")
    denom = 1 - p12 * p21
    if denom <= eps:
        raise DegenerateError("binary-degenerate: both anchor transitions are close to one")
    return p21 * (1 - p12) / denom, p12 * (1 - p21) / denom


@dataclass(frozen=True)
class Recovery:
    """Recovered probabilities and diagnostics.

    ``probs`` may contain zeros (unseen or clamped symbols), so it is a plain
    tuple; :meth:`distribution` builds an :class:`IidDistribution` on the
    symbols with positive mass.
    """

    probs: tuple
    raw: tuple
    pre_normalization_sum: object
    anchor: tuple
    n_alternating: int = None

    def distribution(self):
        exact = all(isinstance(p, Fraction) for p in self.probs)
        return IidDistribution(tuple(p for p in self.probs if p > 0), exact)

    def to_json(self):
        def num(x):
            return str(x) if isinstance(x, Fraction) else float(x)

        out = {
            "probs": [num(p) for p in self.probs],
            "pre_normalization_sum": num(self.pre_normalization_sum),
            "anchor": list(self.anchor),
        }
        if self.n_alternating is not None:
            out["n_alternating"] = self.n_alternating
        return out


def _normalise(raw, anchor, n_alternating=None):
    raw = [x if isinstance(x, Fraction) else float(x) for x in raw]
    clamped = [max(x, 0 * x) for x in raw]
    total = sum(clamped)
    if total <= 0:
        raise DegenerateError("recovered mass is zero")
    probs = tuple(x / total for x in clamped)
    return Recovery(probs, tuple(raw), sum(raw), tuple(anchor), n_alternating)


def invert_all(T, anchor, eps=1e-9):
    """Full source distribution from a transition matrix and an anchor pair.

    Negative values (possible under estimation noise) are clamped to zero
    before renormalising; ``pre_normalization_sum`` reports the raw total.
    """
    P = T.probs if isinstance(T, TransitionEstimate) else np.asarray(T)
    a1, a2 = (int(a) for a in anchor)
    m = P.shape[0]
    if a1 == a2 or not (0 <= a1 < m and 0 <= a2 < m):
        raise ValueError(f"invalid anchor pair {anchor}")
    if P[a1, a2] == 0:
        raise DegenerateError(f"anchor transition {a1}->{a2} is zero")
    p1, p2 = invert_pair(P[a1, a2], P[a2, a1], eps)
    raw = []
    for j in range(m):
        if j == a1:
            raw.append(p1)
        elif j == a2:
            raw.append(p2)
        else:
            raw.append(p2 * P[a1, j] / P[a1, a2])
    return _normalise(raw, (a1, a2))


def default_anchor(v):
    """The two most frequent symbols of ``v``, ties broken by smaller code."""
    freq = Counter(int(s) for s in v)
    ranked = sorted(freq, key=lambda s: (-freq[s], s))
    return tuple(ranked[:2])


def end_to_end_estimate(y, alpha=0.5, anchor=None, alphabet_size=None, eps=1e-9):
    """Estimate the source distribution from a channel output ``y``.

    With exactly two observed symbols the pair is inverted on its own and
    renormalised, which is informative only when ``alphabet_size`` exceeds
    two (otherwise both transitions equal one).
    """
    y = np.asarray(y, dtype=np.int64)
    if y.size == 0:
        raise ValueError("empty channel output")
    v = np.asarray(alternating_of(y.tolist()), dtype=np.int64)
    distinct = np.unique(v)
    if distinct.size < 2:
        raise ValueError("fewer than 2 distinct symbols")
    T = bigram_transitions(v, alpha, alphabet_size)
    if anchor is None:
        anchor = default_anchor(v)
    a1, a2 = (int(a) for a in anchor)
    if distinct.size == 2:
        p1, p2 = invert_pair(T.probs[a1, a2], T.probs[a2, a1], eps)
        raw = [0.0] * T.m
        raw[a1], raw[a2] = p1, p2
        rec = _normalise(raw, (a1, a2))
    else:
        rec = invert_all(T, (a1, a2), eps)
    return Recovery(rec.probs, rec.raw, rec.pre_normalization_sum, rec.anchor, int(v.size))


def tv_distance(p, q):
    """Half the L1 distance; the shorter vector is padded with zeros."""
    p = list(p.probs if isinstance(p, IidDistribution) else p)
    q = list(q.probs if isinstance(q, IidDistribution) else q)
    size = max(len(p), len(q))
    p += [0] * (size - len(p))
    q += [0] * (size - len(q))
    if all(isinstance(x, (int, Fraction)) for x in p + q):
        return sum(abs(Fraction(a) - Fraction(b)) for a, b in zip(p, q)) / 2
    return 0.5 * math.fsum(abs(float(a) - float(b)) for a, b in zip(p, q))

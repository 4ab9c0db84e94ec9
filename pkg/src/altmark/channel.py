"""i.i.d. sources, repetition channels and the run-count tail experiment."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .combinatorics import runs


def resolve_seed(seed):
    """Return ``seed`` or, when it is None, a fresh 64-bit seed to report."""
    if seed is None:
        return int(np.random.SeedSequence().entropy % (1 << 64))
    return int(seed)


def _rng(seed, *keys):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *keys])))


@dataclass(frozen=True)
class RepetitionModel:
    """Law of the number of copies (>= 1) the channel emits per input symbol.

    ``kind`` is ``"identity"``, ``"geometric"`` (total copies = 1 + extra,
    extra ~ Geometric with continuation probability ``rho``) or ``"pmf"``
    (``pmf[i]`` is the probability of ``i + 1`` copies).
    """

    kind: str = "identity"
    rho: float = 0.0
    pmf: tuple = ()

    def __post_init__(self):
        if self.kind == "geometric":
            if not 0.0 <= self.rho < 1.0:
                raise ValueError("geometric rho must lie in [0, 1)")
        elif self.kind == "pmf":
            pmf = tuple(float(x) for x in self.pmf)
            if not pmf or any(x < 0 for x in pmf) or abs(math.fsum(pmf) - 1.0) > 1e-9:
                raise ValueError("copy-count pmf must be non-negative and sum to 1")
            object.__setattr__(self, "pmf", pmf)
        elif self.kind != "identity":
            raise ValueError(f"unknown repetition model {self.kind!r}")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def geometric(cls, rho):
        return cls("geometric", rho=float(rho))

    @classmethod
    def explicit(cls, pmf):
        return cls("pmf", pmf=tuple(pmf))

    @classmethod
    def parse(cls, text):
        """``identity``, ``geometric:0.5`` or ``pmf:0.5,0.3,0.2``."""
        kind, _, arg = text.partition(":")
        kind = kind.strip().lower()
        if kind == "identity" and not arg:
            return cls.identity()
        if kind == "geometric" and arg:
            return cls.geometric(float(arg))
        if kind == "pmf" and arg:
            return cls.explicit(float(x) for x in arg.split(","))
        raise ValueError(f"cannot parse channel model {text!r}")

    @property
    def mean_copies(self):
        if self.kind == "geometric":
            return 1.0 / (1.0 - self.rho)
        if self.kind == "pmf":
            return sum((i + 1) * p for i, p in enumerate(self.pmf))
        return 1.0

    def copies(self, rng, size):
        if self.kind == "geometric":
            return rng.geometric(1.0 - self.rho, size=size)
        if self.kind == "pmf":
            return 1 + rng.choice(len(self.pmf), size=size, p=np.asarray(self.pmf))
        return np.ones(size, dtype=np.int64)


def _cdf(dist):
    cdf = np.cumsum(dist.as_array())
    cdf[-1] = 1.0
    return cdf


def sample_source(dist, N, seed):
    """``N`` i.i.d. draws from ``dist`` as an int64 array of symbol indices."""
    if N < 0:
        raise ValueError("N must be non-negative")
    u = _rng(seed).random(N)
    return kernels.categorical_from_uniforms(u, _cdf(dist))


def apply_channel(x, model, seed):
    """Replace each symbol of ``x`` by a random number (>= 1) of copies."""
    x = np.asarray(x, dtype=np.int64)
    if model.kind == "identity":
        return x.copy()
    c = model.copies(_rng(seed, 1), x.size)
    return np.repeat(x, c)


def run_count(x):
    return len(runs(x))


def expected_runs(dist, N):
    """Mean number of runs in ``N`` i.i.d. draws: ``1 + (N-1)(1 - sum p^2)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    collision = sum(p * p for p in dist.probs)
    return 1 + (N - 1) * (1 - collision)


def run_threshold(N):
    """``N/2 - sqrt(8 N ln N)``, below which run counts are rare."""
    return N / 2 - math.sqrt(8 * N * math.log(N))


@dataclass(frozen=True)
class TailResult:
    N: int
    trials: int
    seed: int
    threshold: float
    hits: int
    frequency: float
    mean_runs: float
    std_runs: float
    expected_runs: float
    assumption_violated: bool

    def to_json(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _chunk_runs(cdf, N, seed, start, stop):
    U = np.empty((stop - start, N))
    for row, trial in enumerate(range(start, stop)):
        U[row] = _rng(seed, 2, trial).random(N)
    return kernels.runs_from_uniforms(U, cdf)


def run_counts(dist, N, trials, seed, chunk=256, jobs=1):
    """Run counts of ``trials`` independent length-``N`` source draws.

    Trial ``t`` always uses the substream keyed by ``(seed, t)``, so the
    result does not depend on ``chunk`` or ``jobs``.
    """
    if trials < 1 or N < 1:
        raise ValueError("trials and N must be >= 1")
    cdf = _cdf(dist)
    bounds = [(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]
    if jobs <= 1:
        parts = [_chunk_runs(cdf, N, seed, a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(jobs) as pool:
            parts = list(pool.map(lambda ab: _chunk_runs(cdf, N, seed, *ab), bounds))
    return np.concatenate(parts)


def run_count_tail(dist, N, trials, seed=None, chunk=256, jobs=1):
    """Fraction of trials whose run count is at most ``run_threshold(N)``."""
    seed = resolve_seed(seed)
    R = run_counts(dist, N, trials, seed, chunk, jobs)
    threshold = run_threshold(N)
    hits = int(np.count_nonzero(R <= threshold))
    return TailResult(
        N=int(N),
        trials=int(trials),
        seed=seed,
        threshold=threshold,
        hits=hits,
        frequency=hits / trials,
        mean_runs=float(R.mean()),
        std_runs=float(R.std(ddof=1)) if trials > 1 else 0.0,
        expected_runs=float(expected_runs(dist, N)),
        assumption_violated=any(p >= Fraction(1, 2) for p in dist.probs),
    )

"""Hot inner loops, each with a numba version and a numpy/Python fallback.

The public names at the bottom of the module dispatch on ``_accel.USE_NUMBA``.
The ``*_numba`` and ``*_numpy`` variants stay importable so tests can check
that both paths agree and the benchmark can time them side by side.
"""
import numpy as np

from ._accel import NUMBA_AVAILABLE, NumbaDict, USE_NUMBA, nb_types, njit

# ---------------------------------------------------------------------------
# Enumeration of alternating patterns, histogrammed by (profile, last mult)
# ---------------------------------------------------------------------------
# Profiles are packed as sum_c phi_c * (n+1)**(c-1); with the last-symbol
# multiplicity appended that needs (n+1)**(n+1) < 2**63.
MAX_HISTOGRAM_N = 15


def _first_pattern(seq, counts, maxl, n):
    for i in range(n + 2):
        counts[i] = 0
    seq[0] = 1
    counts[1] = 1
    maxl[0] = 1
    for j in range(1, n):
        w = 1 if seq[j - 1] != 1 else 2
        seq[j] = w
        counts[w] += 1
        maxl[j] = maxl[j - 1] if maxl[j - 1] > w else w


def _next_pattern(seq, counts, maxl, n):
    # Lexicographic successor among canonical patterns with no equal neighbours.
    i = n - 1
    while i >= 1:
        counts[seq[i]] -= 1
        v = seq[i] + 1
        if v == seq[i - 1]:
            v += 1
        if v <= maxl[i - 1] + 1:
            seq[i] = v
            counts[v] += 1
            maxl[i] = maxl[i - 1] if maxl[i - 1] > v else v
            for j in range(i + 1, n):
                w = 1 if seq[j - 1] != 1 else 2
                seq[j] = w
                counts[w] += 1
                maxl[j] = maxl[j - 1] if maxl[j - 1] > w else w
            return True
        i -= 1
    return False


def _class_key(seq, counts, maxl, phi, n):
    for c in range(n + 1):
        phi[c] = 0
    for lab in range(1, maxl[n - 1] + 1):
        phi[counts[lab]] += 1
    key = 0
    base = n + 1
    for c in range(n, 0, -1):
        key = key * base + phi[c]
    return key * base + counts[seq[n - 1]]


_first_pattern_nb = njit(_first_pattern)
_next_pattern_nb = njit(_next_pattern)
_class_key_nb = njit(_class_key)


def _class_histogram_py(n):
    seq = np.zeros(n, dtype=np.int64)
    maxl = np.zeros(n, dtype=np.int64)
    counts = np.zeros(n + 2, dtype=np.int64)
    phi = np.zeros(n + 1, dtype=np.int64)
    # plain lists are much faster than numpy scalars in interpreted code
    seq, maxl, counts, phi = seq.tolist(), maxl.tolist(), counts.tolist(), phi.tolist()
    hist = {}
    _first_pattern(seq, counts, maxl, n)
    while True:
        key = _class_key(seq, counts, maxl, phi, n)
        hist[key] = hist.get(key, 0) + 1
        if not _next_pattern(seq, counts, maxl, n):
            break
    return hist


if NUMBA_AVAILABLE:
    @njit
    def _class_histogram_nb(n):
        seq = np.zeros(n, dtype=np.int64)
        maxl = np.zeros(n, dtype=np.int64)
        counts = np.zeros(n + 2, dtype=np.int64)
        phi = np.zeros(n + 1, dtype=np.int64)
        hist = NumbaDict.empty(key_type=nb_types.int64, value_type=nb_types.int64)
        _first_pattern_nb(seq, counts, maxl, n)
        while True:
            key = _class_key_nb(seq, counts, maxl, phi, n)
            if key in hist:
                hist[key] += 1
            else:
                hist[key] = 1
            if not _next_pattern_nb(seq, counts, maxl, n):
                break
        return hist


def _decode_class_key(key, n):
    base = n + 1
    last = key % base
    key //= base
    parts = []
    for c in range(1, n + 1):
        phi_c = key % base
        key //= base
        parts.extend([c] * phi_c)
    return tuple(sorted(parts, reverse=True)), last


def _decode_histogram(raw, n):
    return {_decode_class_key(int(k), n): int(v) for k, v in raw.items()}


def class_histogram_numpy(n):
    """Brute-force count of alternating patterns of length ``n`` per class.

    Returns ``{(parts, last_multiplicity): count}`` where ``parts`` is the
    profile as a descending partition of ``n``.
    """
    _check_histogram_n(n)
    return _decode_histogram(_class_histogram_py(n), n)


def class_histogram_numba(n):
    _check_histogram_n(n)
    if not NUMBA_AVAILABLE:  # pragma: no cover
        raise RuntimeError("numba is not installed")
    return _decode_histogram(_class_histogram_nb(n), n)


def _check_histogram_n(n):
    if not 1 <= n <= MAX_HISTOGRAM_N:
        raise ValueError(f"class histogram supports 1 <= n <= {MAX_HISTOGRAM_N}, got {n}")


# ---------------------------------------------------------------------------
# Inverse-CDF sampling and run counting
# ---------------------------------------------------------------------------

def categorical_from_uniforms_numpy(u, cdf):
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(cdf) - 1).astype(np.int64)


@njit
def categorical_from_uniforms_numba(u, cdf):
    m = cdf.shape[0]
    out = np.empty(u.shape[0], dtype=np.int64)
    for i in range(u.shape[0]):
        lo = 0
        hi = m
        x = u[i]
        while lo < hi:
            mid = (lo + hi) // 2
            if cdf[mid] <= x:
                lo = mid + 1
            else:
                hi = mid
        out[i] = lo if lo < m else m - 1
    return out


def runs_from_uniforms_numpy(U, cdf):
    """Run counts of the rows of ``U`` after inverse-CDF symbol mapping."""
    X = categorical_from_uniforms_numpy(U, cdf)
    if X.shape[1] == 0:
        return np.zeros(X.shape[0], dtype=np.int64)
    return 1 + np.count_nonzero(X[:, 1:] != X[:, :-1], axis=1)


@njit(nogil=True)
def runs_from_uniforms_numba(U, cdf):
    rows, N = U.shape
    m = cdf.shape[0]
    out = np.zeros(rows, dtype=np.int64)
    for r in range(rows):
        prev = -1
        runs = 0
        for i in range(N):
            lo = 0
            hi = m
            x = U[r, i]
            while lo < hi:
                mid = (lo + hi) // 2
                if cdf[mid] <= x:
                    lo = mid + 1
                else:
                    hi = mid
            if lo >= m:
                lo = m - 1
            if lo != prev:
                runs += 1
                prev = lo
        out[r] = runs
    return out


def bigram_counts_numpy(v, m):
    v = np.asarray(v, dtype=np.int64)
    if v.size < 2:
        return np.zeros((m, m), dtype=np.int64)
    flat = np.bincount(v[:-1] * m + v[1:], minlength=m * m)
    return flat.reshape(m, m)


@njit
def bigram_counts_numba(v, m):
    out = np.zeros((m, m), dtype=np.int64)
    for i in range(v.shape[0] - 1):
        out[v[i], v[i + 1]] += 1
    return out


# ---------------------------------------------------------------------------
# Alternating-pattern probability: batched value and gradient
# ---------------------------------------------------------------------------
# A class is described by the distinct multiplicities ``u`` of the labels other
# than the last one, how many labels carry each (``c``), and the multiplicity
# ``kappa`` of the last label.  Symbols are visited one at a time; each is left
# unused, given to a remaining label of some multiplicity, or given to the last
# label.  The state is the vector of remaining label counts plus a flag for the
# last label, packed in mixed radix.

def class_state_tables(c):
    """Transition tables for the label-assignment DP.

    Returns ``(nxt, fac)`` of shape ``(2*S, d+1)``: column ``j < d`` assigns a
    label of multiplicity ``u[j]``, column ``d`` assigns the last label.
    ``nxt`` is -1 where the move is unavailable; ``fac`` is the number of
    interchangeable labels the move can pick.
    """
    c = [int(x) for x in c]
    d = len(c)
    strides = []
    S = 1
    for cj in c:
        strides.append(S)
        S *= cj + 1
    T = 2 * S
    nxt = np.full((T, d + 1), -1, dtype=np.int64)
    fac = np.zeros((T, d + 1), dtype=np.float64)
    for st in range(T):
        rem = st % S
        sigma = st // S
        for j in range(d):
            rj = (rem // strides[j]) % (c[j] + 1)
            if rj > 0:
                nxt[st, j] = st - strides[j]
                fac[st, j] = rj
        if sigma == 1:
            nxt[st, d] = st - S
            fac[st, d] = 1.0
    return nxt, fac


@njit
def _weights_numba(x, cx, u, kappa, w, dw):
    # cx is 1 - x, computed by the caller as the sum of the other entries
    d = u.shape[0]
    if d > 0:
        odds = x / cx
        dodds = 1.0 / (cx * cx)
        for j in range(d):
            w[j] = odds ** u[j]
            dw[j] = u[j] * odds ** (u[j] - 1) * dodds
    if kappa == 1:
        w[d] = x
        dw[d] = 1.0
    else:
        w[d] = x ** kappa / cx ** (kappa - 1)
        dw[d] = kappa * x ** (kappa - 1) / cx ** (kappa - 1) + (kappa - 1) * x ** kappa / cx ** kappa


@njit
def alt_class_value_grad_numba(P, u, kappa, nxt, fac):
    R, m = P.shape
    T, C = nxt.shape
    vals = np.empty(R)
    grads = np.zeros((R, m))
    F = np.zeros((m + 1, T))
    B = np.zeros((m + 1, T))
    W = np.empty((m, C))
    DW = np.empty((m, C))
    left = np.empty(m)
    for r in range(R):
        acc = 0.0
        for s in range(m):
            left[s] = acc
            acc += P[r, s]
        acc = 0.0
        for s in range(m - 1, -1, -1):
            _weights_numba(P[r, s], left[s] + acc, u, kappa, W[s], DW[s])
            acc += P[r, s]
        F[:, :] = 0.0
        B[:, :] = 0.0
        F[0, T - 1] = 1.0
        B[m, 0] = 1.0
        for s in range(m):
            for st in range(T):
                f = F[s, st]
                if f == 0.0:
                    continue
                F[s + 1, st] += f
                for col in range(C):
                    t = nxt[st, col]
                    if t >= 0:
                        F[s + 1, t] += f * fac[st, col] * W[s, col]
        for s in range(m - 1, -1, -1):
            for st in range(T):
                acc = B[s + 1, st]
                for col in range(C):
                    t = nxt[st, col]
                    if t >= 0:
                        acc += fac[st, col] * W[s, col] * B[s + 1, t]
                B[s, st] = acc
        vals[r] = B[0, T - 1]
        for s in range(m):
            g = 0.0
            for st in range(T):
                f = F[s, st]
                if f == 0.0:
                    continue
                for col in range(C):
                    t = nxt[st, col]
                    if t >= 0:
                        g += f * fac[st, col] * DW[s, col] * B[s + 1, t]
            grads[r, s] = g
    return vals, grads


def _complements(P):
    # 1 - p_s as the sum of the other entries, free of cancellation
    zero = np.zeros((P.shape[0], 1))
    left = np.hstack([zero, np.cumsum(P[:, :-1], axis=1)])
    right = np.hstack([np.cumsum(P[:, :0:-1], axis=1)[:, ::-1], zero])
    return left + right


def _weights_numpy(x, cx, u, kappa):
    # x, cx: (R,) -> w, dw: (C, R)
    u = np.asarray(u, dtype=np.float64)[:, None]
    if u.size:
        odds = x / cx
        dodds = 1.0 / cx ** 2
        w = odds[None, :] ** u
        dw = u * odds[None, :] ** (u - 1) * dodds[None, :]
    else:
        w = dw = np.zeros((0, x.shape[0]))
    if kappa == 1:
        ws, dws = x, np.ones_like(x)
    else:
        ws = x ** kappa / cx ** (kappa - 1)
        dws = kappa * x ** (kappa - 1) / cx ** (kappa - 1) + (kappa - 1) * x ** kappa / cx ** kappa
    return np.vstack([w, ws[None, :]]), np.vstack([dw, dws[None, :]])


def alt_class_value_grad_numpy(P, u, kappa, nxt, fac):
    P = np.asarray(P, dtype=np.float64)
    R, m = P.shape
    T, C = nxt.shape
    moves = []
    for col in range(C):
        src = np.nonzero(nxt[:, col] >= 0)[0]
        moves.append((src, nxt[src, col], fac[src, col][:, None]))
    W = []
    DW = []
    CP = _complements(P)
    for s in range(m):
        w, dw = _weights_numpy(P[:, s], CP[:, s], u, kappa)
        W.append(w)
        DW.append(dw)
    F = np.zeros((m + 1, T, R))
    B = np.zeros((m + 1, T, R))
    F[0, T - 1] = 1.0
    B[m, 0] = 1.0
    for s in range(m):
        F[s + 1] = F[s]
        for col, (src, dst, f) in enumerate(moves):
            # dst is injective in src, so fancy-index accumulation is safe
            F[s + 1, dst] += F[s, src] * f * W[s][col][None, :]
    for s in range(m - 1, -1, -1):
        B[s] = B[s + 1]
        for col, (src, dst, f) in enumerate(moves):
            B[s, src] += f * W[s][col][None, :] * B[s + 1, dst]
    vals = B[0, T - 1].copy()
    grads = np.zeros((R, m))
    for s in range(m):
        g = np.zeros(R)
        for col, (src, dst, f) in enumerate(moves):
            g += np.sum(F[s, src] * f * B[s + 1, dst], axis=0) * DW[s][col]
        grads[:, s] = g
    return vals, grads


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

if USE_NUMBA:
    class_histogram = class_histogram_numba
    categorical_from_uniforms = categorical_from_uniforms_numba
    runs_from_uniforms = runs_from_uniforms_numba
    bigram_counts = bigram_counts_numba
    alt_class_value_grad = alt_class_value_grad_numba
else:
    class_histogram = class_histogram_numpy
    categorical_from_uniforms = categorical_from_uniforms_numpy
    runs_from_uniforms = runs_from_uniforms_numpy
    bigram_counts = bigram_counts_numpy
    alt_class_value_grad = alt_class_value_grad_numpy

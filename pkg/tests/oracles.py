"""Independent brute-force oracles shared by the test modules.

Everything here is deliberately written in the most literal way possible
(python loops, exact rational arithmetic) and never calls into the
package code paths it is used to check.
"""

import math
from fractions import Fraction


def rational_kappa(counts):
    """Exact-rational quadratic weighted kappa of an integer count matrix.

    Returns a Fraction on the [-1, 1] scale, Fraction(1) for the
    degenerate all-mass-on-one-diagonal-cell case, None if undefined.
    """
    counts = [[int(v) for v in row] for row in counts]
    m = len(counts)
    total = sum(sum(row) for row in counts)
    if total == 0:
        return None
    rows = [sum(counts[i][j] for j in range(m)) for i in range(m)]
    cols = [sum(counts[i][j] for i in range(m)) for j in range(m)]
    num = Fraction(0)
    den = Fraction(0)
    for i in range(m):
        for j in range(m):
            w = (i - j) ** 2
            num += w * counts[i][j]
            den += Fraction(w * rows[i] * cols[j], total)
    if den == 0:
        return Fraction(1) if num == 0 else None
    return 1 - num / den


def pair_count_auc(scores, labels):
    """All-pairs AUC: 1 per correctly ordered pair, 0.5 per tie; 0-100."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    if not pos or not neg:
        return None
    wins = sum(1.0 if p > q else 0.5 if p == q else 0.0 for p in pos for q in neg)
    return 100.0 * (wins / (len(pos) * len(neg)))


def entropy_loop(row):
    return -sum(q * math.log(q) for q in row if q > 0)


def lexicographic_refer(items, u, level):
    """Indices retained at `level`: sort (u, index), drop the top block."""
    n = len(items)
    k = int(math.floor(level * n + 1e-9))
    order = sorted(range(n), key=lambda i: (u[i], i))
    return sorted(order[: n - k])


def argmax_lowest(row):
    best = 0
    for j in range(1, len(row)):
        if row[j] > row[best]:
            best = j
    return best


def confusion_loop(probs, labels, m):
    counts = [[0] * m for _ in range(m)]
    for row, label in zip(probs, labels):
        counts[argmax_lowest(row)][int(label)] += 1
    return counts


def forward_loop(weights, biases, x):
    """Straight-line MLP recompute for a single input vector."""
    h = list(x)
    for k in range(len(weights) - 1):
        w, b = weights[k], biases[k]
        h = [
            math.tanh(sum(h[i] * w[i][j] for i in range(len(h))) + b[j])
            for j in range(len(b))
        ]
    w, b = weights[-1], biases[-1]
    logits = [sum(h[i] * w[i][j] for i in range(len(h))) + b[j] for j in range(len(b))]
    peak = max(logits)
    exps = [math.exp(v - peak) for v in logits]
    z = sum(exps)
    return [e / z for e in exps]


# -- Philox 4x64-10 transcription ------------------------------------------------

_PHILOX_M0 = 0xD2E7470EE14C6C93
_PHILOX_M1 = 0xCA5A826395121157
_PHILOX_W0 = 0x9E3779B97F4A7C15
_PHILOX_W1 = 0xBB67AE8584CAA73B
_MASK64 = (1 << 64) - 1


def philox4x64_block(counter, key, rounds=10):
    """One output block of the published Philox 4x64 round function."""
    c = list(counter)
    k = list(key)
    for r in range(rounds):
        if r > 0:
            k[0] = (k[0] + _PHILOX_W0) & _MASK64
            k[1] = (k[1] + _PHILOX_W1) & _MASK64
        prod0 = _PHILOX_M0 * c[0]
        prod1 = _PHILOX_M1 * c[2]
        hi0, lo0 = (prod0 >> 64) & _MASK64, prod0 & _MASK64
        hi1, lo1 = (prod1 >> 64) & _MASK64, prod1 & _MASK64
        c = [(hi1 ^ c[1] ^ k[0]) & _MASK64, lo1, (hi0 ^ c[3] ^ k[1]) & _MASK64, lo0]
    return c


def philox_raw_stream(key, n_blocks):
    """numpy's Philox output order: blocks at counter 1, 2, 3, ..."""
    out = []
    for block in range(1, n_blocks + 1):
        out.extend(philox4x64_block([block, 0, 0, 0], key))
    return out


def quad_kl_gaussian(mu, sigma, m, s):
    """1-D KL via numerical quadrature of q * log(q / p)."""
    from scipy.integrate import quad

    def integrand(x):
        logq = -0.5 * ((x - mu) / sigma) ** 2 - math.log(sigma * math.sqrt(2 * math.pi))
        logp = -0.5 * ((x - m) / s) ** 2 - math.log(s * math.sqrt(2 * math.pi))
        return math.exp(logq) * (logq - logp)

    lo = min(mu - 12 * sigma, m - 12 * s)
    hi = max(mu + 12 * sigma, m + 12 * s)
    value, _ = quad(integrand, lo, hi, limit=200)
    return value


def quad_renyi_gaussian(mu_q, sigma_q, mu_p, sigma_p, alpha):
    """1-D Renyi divergence via quadrature of the defining integral."""
    from scipy.integrate import quad

    def integrand(x):
        logq = -0.5 * ((x - mu_q) / sigma_q) ** 2 - math.log(
            sigma_q * math.sqrt(2 * math.pi)
        )
        logp = -0.5 * ((x - mu_p) / sigma_p) ** 2 - math.log(
            sigma_p * math.sqrt(2 * math.pi)
        )
        return math.exp(alpha * logq + (1.0 - alpha) * logp)

    lo = min(mu_q - 14 * sigma_q, mu_p - 14 * sigma_p)
    hi = max(mu_q + 14 * sigma_q, mu_p + 14 * sigma_p)
    integral, _ = quad(integrand, lo, hi, limit=200)
    return math.log(integral) / (alpha * (alpha - 1.0))


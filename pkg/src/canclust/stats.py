"""Similarity distributions and the Mann-Whitney U verdict machinery.

benign_pairs() scores every unordered pair of benign dendrograms;
attack_vs_benign() scores the attack x benign cross product. mann_whitney()
compares the two samples: exact enumeration of the null distribution when
n1*n2 <= 10000 and there are no ties, otherwise a tie-corrected normal
approximation with continuity correction. density_export() produces Gaussian
KDE curves for external plotting; verdicts never depend on it.
"""

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.stats import rankdata

from .clusim import similarity
from .errors import DataError

EXACT_LIMIT = 10_000


@dataclass(frozen=True)
class SimilaritySample:
    """Empirical similarity distribution for one comparison group."""

    group: str  # "benign_benign" or "attack_benign:<kind>"
    values: tuple
    pair_ids: tuple  # of (capture_id, capture_id)

    def __post_init__(self):
        if len(self.values) != len(self.pair_ids):
            raise ValueError("values and pair_ids must align")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("non-finite similarity value")


@dataclass(frozen=True)
class TestResult:
    u_statistic: float
    p_value: float
    n1: int
    n2: int
    method: str  # "exact" or "normal_approx"
    significant: bool


def benign_pairs(dendrograms, params, capture_ids=None, allow_intersection=False):
    """Similarity over all C(k, 2) unordered pairs of benign dendrograms."""
    k = len(dendrograms)
    if k < 2:
        raise DataError(f"need at least 2 benign dendrograms, got {k}")
    if capture_ids is None:
        capture_ids = [f"benign_{i}" for i in range(k)]
    values, pairs = [], []
    for i, j in combinations(range(k), 2):
        s = similarity(dendrograms[i], dendrograms[j], params, allow_intersection=allow_intersection)
        values.append(s.value)
        pairs.append((capture_ids[i], capture_ids[j]))
    return SimilaritySample(group="benign_benign", values=tuple(values), pair_ids=tuple(pairs))


def attack_vs_benign(attack_dends, benign_dends, params, kind="attack",
                     attack_ids=None, benign_ids=None, allow_intersection=False):
    """Similarity over the attack x benign cross product."""
    if not attack_dends or not benign_dends:
        raise DataError("both attack and benign dendrogram lists must be non-empty")
    if attack_ids is None:
        attack_ids = [f"attack_{i}" for i in range(len(attack_dends))]
    if benign_ids is None:
        benign_ids = [f"benign_{i}" for i in range(len(benign_dends))]
    values, pairs = [], []
    for i, da in enumerate(attack_dends):
        for j, db in enumerate(benign_dends):
            s = similarity(da, db, params, allow_intersection=allow_intersection)
            values.append(s.value)
            pairs.append((attack_ids[i], benign_ids[j]))
    return SimilaritySample(group=f"attack_benign:{kind}", values=tuple(values), pair_ids=tuple(pairs))


def u_statistic(x, y):
    """U = number of (xi, yj) pairs with xi > yj, ties counting 1/2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n1, n2 = len(x), len(y)
    ranks = rankdata(np.concatenate([x, y]))
    r1 = ranks[:n1].sum()
    return float(r1 - n1 * (n1 + 1) / 2.0)


def exact_u_counts(n1, n2):
    """Null distribution of U as exact integer counts over u = 0..n1*n2.

    Coefficients of the Gaussian binomial [n1+n2 choose n1]_q, built by
    polynomial multiplication in exact integer arithmetic (counts overflow
    float64 well below the exact-mode size cap).
    """
    top = n1 * n2
    ways = [0] * (top + 1)
    ways[0] = 1
    for i in range(1, n1 + 1):
        for u in range(i, top + 1):  # divide by (1 - q^i)
            ways[u] += ways[u - i]
        for u in range(top, n2 + i - 1, -1):  # multiply by (1 - q^(n2+i))
            ways[u] -= ways[u - (n2 + i)]
    return ways


def mann_whitney(x, y, sided="two_sided", significance=0.05):
    """Mann-Whitney U test between two similarity samples.

    Accepts SimilaritySamples or plain sequences. Exact enumeration is used
    when n1*n2 <= 10000 and the pooled sample is tie-free; otherwise a
    normal approximation with tie-corrected variance and 0.5 continuity
    correction. Two samples with all values identical degenerate to p = 1.
    """
    if sided not in ("two_sided", "less", "greater"):
        raise ValueError(f"unknown sidedness {sided!r}")
    xv = np.asarray(x.values if isinstance(x, SimilaritySample) else x, dtype=float)
    yv = np.asarray(y.values if isinstance(y, SimilaritySample) else y, dtype=float)
    n1, n2 = len(xv), len(yv)
    if n1 == 0 or n2 == 0:
        raise DataError("mann_whitney requires two non-empty samples")

    u = u_statistic(xv, yv)
    pooled = np.concatenate([xv, yv])
    has_ties = len(np.unique(pooled)) < len(pooled)

    if np.all(pooled == pooled[0]):
        # all values identical: no location information at all
        return TestResult(u_statistic=u, p_value=1.0, n1=n1, n2=n2,
                          method="normal_approx", significant=False)

    if not has_ties and n1 * n2 <= EXACT_LIMIT:
        counts = exact_u_counts(n1, n2)
        total = sum(counts)
        mu2 = n1 * n2  # 2 * mean, kept integral
        u_int = int(round(u))
        dev = abs(2 * u_int - mu2)
        if sided == "two_sided":
            mass = sum(c for uu, c in enumerate(counts) if abs(2 * uu - mu2) >= dev)
        elif sided == "greater":
            mass = sum(c for uu, c in enumerate(counts) if uu >= u_int)
        else:
            mass = sum(c for uu, c in enumerate(counts) if uu <= u_int)
        p = mass / total
        method = "exact"
    else:
        n = n1 + n2
        _, tie_counts = np.unique(pooled, return_counts=True)
        tie_term = float(np.sum(tie_counts ** 3 - tie_counts))
        var = (n1 * n2 / 12.0) * ((n + 1) - tie_term / (n * (n - 1)))
        mu = n1 * n2 / 2.0
        if var <= 0:
            return TestResult(u_statistic=u, p_value=1.0, n1=n1, n2=n2,
                              method="normal_approx", significant=False)
        sd = math.sqrt(var)
        if sided == "two_sided":
            z = max(0.0, abs(u - mu) - 0.5) / sd
            p = math.erfc(z / math.sqrt(2.0))
        elif sided == "greater":
            z = (u - mu - 0.5) / sd
            p = 0.5 * math.erfc(z / math.sqrt(2.0))
        else:
            z = (u - mu + 0.5) / sd
            p = 1.0 - 0.5 * math.erfc(z / math.sqrt(2.0))
        method = "normal_approx"
    p = min(1.0, max(0.0, p))
    return TestResult(u_statistic=u, p_value=p, n1=n1, n2=n2,
                      method=method, significant=bool(p < significance))


def scott_bandwidth(values):
    values = np.asarray(values, dtype=float)
    return float(np.std(values, ddof=1) * len(values) ** (-0.2))


def density_export(sample, bandwidth="scott", n_points=256):
    """Gaussian KDE curve for a similarity sample.

    bandwidth is "scott" (sigma_hat * n^(-1/5)) or a fixed positive float.
    Returns an (n_points, 2) array of (x, density) over [min - 3h, max + 3h];
    the trapezoid integral of the curve is 1 within ~1e-3.
    """
    values = np.asarray(sample.values if isinstance(sample, SimilaritySample) else sample, dtype=float)
    if len(values) < 2:
        raise DataError("density_export needs at least 2 values")
    if bandwidth == "scott":
        h = scott_bandwidth(values)
        if h <= 0:
            raise DataError("zero-variance sample; use a fixed bandwidth")
    else:
        h = float(bandwidth)
        if h <= 0:
            raise ValueError("fixed bandwidth must be positive")
    xs = np.linspace(values.min() - 3 * h, values.max() + 3 * h, n_points)
    z = (xs[:, None] - values[None, :]) / h
    dens = np.exp(-0.5 * z ** 2).sum(axis=1) / (len(values) * h * math.sqrt(2 * math.pi))
    return np.column_stack([xs, dens])

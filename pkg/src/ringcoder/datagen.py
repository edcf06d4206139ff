"""Synthetic symbol sequences and entropy bookkeeping.

Sequences are drawn from numpy's Philox counter-based generator so every
output is a pure function of ``(K, k, N, seed)``.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConfigError, MetricError

SYMBOL_DTYPE = np.int32


def _rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def k_of_K(K):
    """Skew parameter used for an alphabet of size ``K``."""
    if K < 1:
        raise ConfigError(f"alphabet size must be >= 1, got {K}")
    return max(0, int(K).bit_length() - 1 - 4)


@dataclass(frozen=True)
class GeometricSpec:
    K: int
    k: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.K < 1:
            raise ConfigError(f"alphabet size must be >= 1, got {self.K}")
        if self.k < 0:
            raise ConfigError(f"skew parameter must be >= 0, got {self.k}")

    @classmethod
    def for_alphabet(cls, K, seed=0):
        return cls(K, k_of_K(K), seed)

    @property
    def p(self):
        return 2.0 ** (-1.0 / 2 ** self.k)


def geometric_pmf(spec):
    """Truncated geometric probabilities ``(1-p) p^i / (1-p^K)``."""
    p = spec.p
    i = np.arange(spec.K, dtype=np.float64)
    return (1.0 - p) * p ** i / (1.0 - p ** spec.K)


@njit(cache=True)
def _inverse_cdf(u, pr_sum, out):
    K = pr_sum.shape[0] - 1
    for n in range(u.shape[0]):
        i = 0
        # rounding can leave pr_sum[K] a hair below 1.0
        while i < K - 1 and u[n] >= pr_sum[i + 1]:
            i += 1
        out[n] = i


def gen_geometric(spec, N):
    """Draw ``N`` symbols by linear inverse-CDF search over uniform variates."""
    pr_sum = np.zeros(spec.K + 1)
    np.cumsum(geometric_pmf(spec), out=pr_sum[1:])
    u = _rng(spec.seed).random(N)
    out = np.empty(N, dtype=SYMBOL_DTYPE)
    _inverse_cdf(u, pr_sum, out)
    return out


def gen_uniform(K, N, seed=0):
    if K < 1:
        raise ConfigError(f"alphabet size must be >= 1, got {K}")
    return _rng(seed).integers(0, K, size=N, dtype=SYMBOL_DTYPE)


def generate(dist, K, N, seed=0):
    """Dispatch on the distribution name used by the CLI and benchmarks."""
    if dist == "uniform":
        return gen_uniform(K, N, seed)
    if dist == "geometric":
        return gen_geometric(GeometricSpec.for_alphabet(K, seed), N)
    raise ConfigError(f"unknown distribution {dist!r}")


def source_entropy(dist, K):
    if dist == "uniform":
        return float(np.log2(K))
    return entropy(geometric_pmf(GeometricSpec.for_alphabet(K)))


def entropy(weights):
    """Shannon entropy in bits of a pmf or of raw counts."""
    w = np.asarray(weights, dtype=np.float64)
    total = w.sum()
    if total <= 0:
        raise MetricError("entropy needs a positive total weight")
    q = w[w > 0] / total
    return float(-(q * np.log2(q)).sum())


def sequence_entropy(symbols, K):
    """Zeroth-order empirical entropy of ``symbols``."""
    if len(symbols) == 0:
        return 0.0
    return entropy(np.bincount(np.asarray(symbols), minlength=K))


def bitrate_error(R, H):
    """Excess of bitrate ``R`` over entropy ``H`` in percent."""
    if H == 0:
        raise MetricError("bitrate error is undefined for zero entropy")
    return 100.0 * (R - H) / H

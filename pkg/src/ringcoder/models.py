"""Symbol statistics: cumulative counts, Fenwick trees and the ring model.

Every model exposes the cumulative counts ``cum[0..K]`` with ``cum[0] == 0``
and ``cum[i+1] - cum[i]`` equal to the count of symbol ``i``. The mutating
primitives are numba kernels over plain ``int64`` arrays so that the
sequence coder in :mod:`ringcoder.coder` runs the very same code as the
object API below. Each kernel returns the number of array cells it wrote,
which feeds the access counters used by the benchmarks.
"""

import math

import numpy as np
from numba import njit

from .errors import ConfigError, InvariantError, ScalingError, SymbolRangeError
from .search import (
    SEARCH_CODES, TABLE_DTYPE, _check_code, _fill_table, _find_linear,
    _find_log, _table_after_increment)

DEFAULT_TOTAL_BITS = 12
MAX_TOTAL_BITS = 16


def is_power_of_two(n):
    return n > 0 and n & (n - 1) == 0


# -- array kernels ----------------------------------------------------------

@njit(cache=True)
def _rescale_cum(cum):
    K = cum.shape[0] - 1
    prev = 0
    acc = 0
    for i in range(K):
        h = (cum[i + 1] - prev) >> 1
        prev = cum[i + 1]
        if h < 1:
            h = 1
        acc += h
        cum[i + 1] = acc
    return K


@njit(cache=True)
def _update_linear(cum, i, max_total):
    K = cum.shape[0] - 1
    writes = 0
    if cum[K] >= max_total:
        writes += _rescale_cum(cum)
    for j in range(i + 1, K + 1):
        cum[j] += 1
    return writes + K - i


@njit(cache=True)
def _update_linear_table(cum, table, i, max_total):
    """Linear update with the decode table patched in the same loop."""
    K = cum.shape[0] - 1
    if cum[K] >= max_total:
        w = _rescale_cum(cum)
        for j in range(i + 1, K + 1):
            cum[j] += 1
        return w + K - i, _fill_table(cum, table)
    for j in range(i + 1, K + 1):
        cum[j] += 1
        table[cum[j] - 1] = j - 1
    return K - i, K - i


@njit(cache=True)
def _ring_update(cum, buf, idx, i, table, with_table):
    old = buf[idx]
    buf[idx] = i
    idx += 1
    if idx == buf.shape[0]:
        idx = 0
    if old < i:
        for j in range(old + 1, i + 1):
            cum[j] -= 1
            if with_table:
                table[cum[j]] = j
        return idx, i - old
    for j in range(i + 1, old + 1):
        if with_table:
            table[cum[j]] = j - 1
        cum[j] += 1
    return idx, old - i


# -- binary indexed tree kernels (1-based, tree[0] unused) ------------------

@njit(cache=True)
def _bit_build(tree, counts):
    K = counts.shape[0]
    tree[0] = 0
    for j in range(1, K + 1):
        tree[j] = counts[j - 1]
    for j in range(1, K + 1):
        parent = j + (j & -j)
        if parent <= K:
            tree[parent] += tree[j]


@njit(cache=True)
def _bit_counts(tree):
    K = tree.shape[0] - 1
    counts = tree[1:].copy()
    for j in range(K, 0, -1):
        parent = j + (j & -j)
        if parent <= K:
            counts[parent - 1] -= counts[j - 1]
    return counts


@njit(cache=True)
def _bit_prefix(tree, i):
    s = 0
    while i > 0:
        s += tree[i]
        i -= i & -i
    return s


@njit(cache=True)
def _bit_point(tree, i):
    # count of symbol i = prefix(i+1) - prefix(i), walking only the
    # nodes where the two paths differ
    j = i + 1
    s = tree[j]
    stop = j - (j & -j)
    j -= 1
    while j > stop:
        s -= tree[j]
        j -= j & -j
    return s


@njit(cache=True)
def _bit_add(tree, i, delta):
    K = tree.shape[0] - 1
    j = i + 1
    touched = 0
    while j <= K:
        tree[j] += delta
        j += j & -j
        touched += 1
    return touched


@njit(cache=True)
def _bit_find(tree, c, mask):
    # descent: largest pos with prefix(pos) <= c
    K = tree.shape[0] - 1
    pos = 0
    steps = 0
    while mask > 0:
        nxt = pos + mask
        if nxt <= K:
            steps += 1
            if tree[nxt] <= c:
                pos = nxt
                c -= tree[nxt]
        mask >>= 1
    return pos, steps


@njit(cache=True)
def _bit_find_linear(tree, c):
    K = tree.shape[0] - 1
    upper = 0
    for i in range(K):
        upper += _bit_point(tree, i)
        if c < upper:
            return i, i + 1
    return K - 1, K


@njit(cache=True)
def _bit_rescale(tree):
    counts = _bit_counts(tree)
    total = 0
    for i in range(counts.shape[0]):
        h = counts[i] >> 1
        if h < 1:
            h = 1
        counts[i] = h
        total += h
    _bit_build(tree, counts)
    return total


@njit(cache=True)
def _bit_increment(tree, i, total, max_total):
    """Adaptive +1 with rescale-before-increment; returns (total, writes, rescaled)."""
    writes = 0
    rescaled = False
    if total >= max_total:
        total = _bit_rescale(tree)
        writes += tree.shape[0] - 1
        rescaled = True
    writes += _bit_add(tree, i, 1)
    return total + 1, writes, rescaled


@njit(cache=True)
def _bit_table_after_increment(tree, table, i):
    K = tree.shape[0] - 1
    upper = _bit_prefix(tree, i)
    for j in range(i, K):
        upper += _bit_point(tree, j)
        table[upper - 1] = j
    return K - i


@njit(cache=True)
def _bit_fill_table(tree, table):
    K = tree.shape[0] - 1
    idx = 0
    for i in range(K):
        for _ in range(_bit_point(tree, i)):
            table[idx] = i
            idx += 1
    return idx


def _top_bit(K):
    return 1 << (K.bit_length() - 1)


# -- object API -------------------------------------------------------------

def _check_symbol(i, K):
    if not 0 <= i < K:
        raise SymbolRangeError(f"symbol {i} outside alphabet [0, {K})")


def _check_strategy(strategy):
    if strategy not in SEARCH_CODES:
        raise ConfigError(f"unknown search strategy {strategy!r}")


class FrequencyModel:
    """Cumulative counts stored as a flat array.

    ``adaptive`` models keep every count >= 1 and are rescaled (halved) when
    the total reaches ``max_total``; static models may hold zero counts and
    are never updated. When ``table`` is set, :meth:`update_linear` keeps it
    consistent with the counts.
    """

    def __init__(self, cum, max_total=1 << DEFAULT_TOTAL_BITS, adaptive=True):
        self.cum = np.asarray(cum, dtype=np.int64)
        self.K = len(self.cum) - 1
        self.max_total = max_total
        self.adaptive = adaptive
        self.table = None

    def __repr__(self):
        return (f"FrequencyModel(K={self.K}, total={self.total}, "
                f"adaptive={self.adaptive})")

    @property
    def total(self):
        return int(self.cum[-1])

    @property
    def counts(self):
        return np.diff(self.cum)

    def interval(self, i):
        _check_symbol(i, self.K)
        lo = int(self.cum[i])
        return lo, int(self.cum[i + 1]) - lo

    def attach_table(self):
        self.table = np.full(max(self.max_total, self.total), -1,
                             dtype=TABLE_DTYPE)
        _fill_table(self.cum, self.table)
        return self.table

    def update_linear(self, i):
        """Increment the count of ``i``; returns the number of cum writes."""
        _check_symbol(i, self.K)
        if not self.adaptive:
            raise InvariantError("static models are never updated")
        if self.table is not None:
            return int(_update_linear_table(self.cum, self.table, i,
                                            self.max_total)[0])
        return int(_update_linear(self.cum, i, self.max_total))

    update = update_linear

    def rescale(self):
        """Halve every count (floor), keeping each at least 1."""
        _rescale_cum(self.cum)
        if self.table is not None:
            _fill_table(self.cum, self.table)

    def find(self, c, strategy="log"):
        _check_strategy(strategy)
        _check_code(c, self.total)
        if strategy == "tab":
            if self.table is None:
                raise ConfigError("tab search needs attach_table() first")
            return int(self.table[c])
        if strategy == "fwd":
            return int(_find_linear(self.cum, c)[0])
        return int(_find_log(self.cum, c)[0])


class FenwickModel:
    """Cumulative counts held in a binary indexed tree.

    Point updates and prefix sums both cost O(log K); reading a single
    boundary is therefore slower than with :class:`FrequencyModel`.
    """

    def __init__(self, counts, max_total=1 << DEFAULT_TOTAL_BITS, adaptive=True):
        counts = np.asarray(counts, dtype=np.int64)
        self.K = len(counts)
        if self.K < 1:
            raise ConfigError("alphabet size must be >= 1")
        self.tree = np.zeros(self.K + 1, dtype=np.int64)
        _bit_build(self.tree, counts)
        self.total = int(counts.sum())
        self.max_total = max_total
        self.adaptive = adaptive
        self.table = None
        self._mask = _top_bit(self.K)

    @classmethod
    def uniform(cls, K, max_total=1 << DEFAULT_TOTAL_BITS):
        _check_alphabet(K, max_total)
        return cls(np.ones(K, dtype=np.int64), max_total)

    def __repr__(self):
        return f"FenwickModel(K={self.K}, total={self.total})"

    @property
    def counts(self):
        return _bit_counts(self.tree)

    @property
    def cum(self):
        """Materialised cumulative counts (O(K), for inspection only)."""
        out = np.zeros(self.K + 1, dtype=np.int64)
        np.cumsum(self.counts, out=out[1:])
        return out

    def prefix_sum(self, i):
        if not 0 <= i <= self.K:
            raise SymbolRangeError(f"prefix index {i} outside [0, {self.K}]")
        return int(_bit_prefix(self.tree, i))

    def count(self, i):
        _check_symbol(i, self.K)
        return int(_bit_point(self.tree, i))

    def interval(self, i):
        _check_symbol(i, self.K)
        lo = int(_bit_prefix(self.tree, i))
        return lo, int(_bit_point(self.tree, i))

    def update(self, i, delta=1):
        """Add ``delta`` to the count of ``i``; returns tree cells touched.

        Unlike :meth:`increment` this never rescales.
        """
        _check_symbol(i, self.K)
        if delta == 0:
            return 0
        if self.adaptive and _bit_point(self.tree, i) + delta < 1:
            raise InvariantError(
                f"count of symbol {i} would drop below 1 in adaptive mode")
        touched = int(_bit_add(self.tree, i, delta))
        self.total += delta
        if self.table is not None:
            _bit_fill_table(self.tree, self.table)
        return touched

    def increment(self, i):
        """Adaptive +1 with the same rescale rule as the linear model."""
        _check_symbol(i, self.K)
        total, writes, rescaled = _bit_increment(self.tree, i, self.total,
                                                 self.max_total)
        self.total = int(total)
        if self.table is not None:
            if rescaled:
                _bit_fill_table(self.tree, self.table)
            else:
                _bit_table_after_increment(self.tree, self.table, i)
        return int(writes)

    def rescale(self):
        self.total = int(_bit_rescale(self.tree))
        if self.table is not None:
            _bit_fill_table(self.tree, self.table)

    def attach_table(self):
        self.table = np.full(max(self.max_total, self.total), -1,
                             dtype=TABLE_DTYPE)
        _bit_fill_table(self.tree, self.table)
        return self.table

    def find_symbol(self, c):
        """Descend the tree to the symbol whose interval contains ``c``."""
        if not 0 <= c < self.total:
            raise SymbolRangeError(f"code value {c} outside [0, {self.total})")
        return int(_bit_find(self.tree, c, self._mask)[0])

    def find(self, c, strategy="log"):
        _check_strategy(strategy)
        _check_code(c, self.total)
        if strategy == "tab":
            if self.table is None:
                raise ConfigError("tab search needs attach_table() first")
            return int(self.table[c])
        if strategy == "fwd":
            return int(_bit_find_linear(self.tree, c)[0])
        return int(_bit_find(self.tree, c, self._mask)[0])


class RingModel:
    """Cumulative counts driven by a window of the last ``M - K`` symbols.

    Each update adds the new symbol and evicts the oldest one, so once the
    window is full the total stays at ``M`` and the coder may divide by
    shifting. Slots holding ``K`` are empty (no symbol seen yet).
    """

    def __init__(self, freq, buffer, target_total, table=None, ring_idx=0):
        self.freq = freq
        self.buffer = buffer
        self.target_total = target_total
        self.table = table
        self.ring_idx = ring_idx

    def __repr__(self):
        return (f"RingModel(K={self.K}, M={self.target_total}, "
                f"total={self.total}, filled={self.filled})")

    @property
    def K(self):
        return self.freq.K

    @property
    def cum(self):
        return self.freq.cum

    @property
    def total(self):
        return self.freq.total

    @property
    def counts(self):
        return self.freq.counts

    @property
    def filled(self):
        return self.freq.total == self.target_total

    def interval(self, i):
        return self.freq.interval(i)

    def update(self, i):
        """Push symbol ``i`` into the window; returns the cum writes."""
        _check_symbol(i, self.K)
        with_table = self.table is not None
        table = self.table if with_table else _NO_TABLE
        self.ring_idx, writes = _ring_update(self.cum, self.buffer,
                                             self.ring_idx, i, table,
                                             with_table)
        return int(writes)

    def find(self, c, strategy="tab"):
        _check_strategy(strategy)
        _check_code(c, self.total)
        if strategy == "tab":
            if self.table is None:
                raise ConfigError("ring model was created without a table")
            return int(self.table[c])
        if strategy == "fwd":
            return int(_find_linear(self.cum, c)[0])
        return int(_find_log(self.cum, c)[0])


_NO_TABLE = np.zeros(0, dtype=TABLE_DTYPE)


def _check_alphabet(K, target_total):
    if K < 1:
        raise ConfigError(f"alphabet size must be >= 1, got {K}")
    if K > target_total:
        raise ConfigError(f"alphabet size {K} exceeds total count {target_total}")


def _check_target(target_total):
    if not is_power_of_two(target_total):
        raise ConfigError(f"total count {target_total} is not a power of two")
    if target_total > 1 << MAX_TOTAL_BITS:
        raise ConfigError(f"total count {target_total} exceeds 2^{MAX_TOTAL_BITS}")


def new_uniform(K, target_total=1 << DEFAULT_TOTAL_BITS):
    """Adaptive model with every count 1; rescales at ``target_total``."""
    _check_alphabet(K, target_total)
    return FrequencyModel(np.arange(K + 1, dtype=np.int64), target_total)


def ring_init(K, target_total=1 << DEFAULT_TOTAL_BITS, with_table=False):
    _check_target(target_total)
    if K < 1 or target_total <= K:
        raise ConfigError(
            f"ring model needs 1 <= K < M, got K={K}, M={target_total}")
    freq = FrequencyModel(np.arange(K + 1, dtype=np.int64), target_total)
    buffer = np.full(target_total - K, K, dtype=np.int32)
    table = None
    if with_table:
        table = np.full(target_total, -1, dtype=TABLE_DTYPE)
        table[:K] = np.arange(K, dtype=TABLE_DTYPE)
    return RingModel(freq, buffer, target_total, table)


def scale_static(counts, target_total=1 << DEFAULT_TOTAL_BITS):
    """Scale raw symbol counts to sum exactly to ``target_total``.

    Nonzero counts stay >= 1 and zero counts stay zero. After proportional
    rounding, counts are nudged one unit at a time, scanning cyclically
    from symbol 0, until the total matches.
    """
    _check_target(target_total)
    h = [int(x) for x in counts]
    if any(x < 0 for x in h):
        raise ScalingError("counts must be non-negative")
    original = sum(h)
    nonzero = sum(1 for x in h if x > 0)
    if nonzero == 0:
        raise ScalingError("cannot scale an all-zero distribution")
    if nonzero > target_total:
        raise ScalingError(
            f"{nonzero} nonzero symbols do not fit a total of {target_total}")
    K = len(h)
    scale = target_total / original
    current = 0
    for i in range(K):
        if h[i] > 0:
            h[i] = max(1, math.floor(scale * h[i] + 0.5))
        current += h[i]
    idx = 0
    while current > target_total:
        if h[idx] > 1:
            h[idx] -= 1
            current -= 1
        idx = idx + 1 if idx + 1 < K else 0
    while current < target_total:
        if h[idx] > 0:
            h[idx] += 1
            current += 1
        idx = idx + 1 if idx + 1 < K else 0
    cum = np.zeros(K + 1, dtype=np.int64)
    np.cumsum(h, out=cum[1:])
    return FrequencyModel(cum, target_total, adaptive=False)


# functional aliases for the operations above

def update_linear(model, i):
    return model.update_linear(i)


def rescale(model):
    model.rescale()


def fenwick_update(model, i, delta):
    return model.update(i, delta)


def fenwick_prefix_sum(model, i):
    return model.prefix_sum(i)


def fenwick_find_symbol(model, c):
    return model.find_symbol(c)


def ring_update(model, i):
    return model.update(i)

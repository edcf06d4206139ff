"""Decoder-side symbol identification and decode-table maintenance.

Three strategies map a code value ``c`` in ``[0, cum[K])`` to the symbol
``i`` with ``cum[i] <= c < cum[i+1]``:

* ``fwd`` -- linear forward scan over the boundaries, O(K);
* ``log`` -- bisection over the boundaries, O(log K);
* ``tab`` -- one read from a table holding the symbol for every code value.

The jitted ``_find_*`` kernels return ``(symbol, steps)`` where ``steps`` is
the number of boundary comparisons or table reads; the coder kernels sum
those into the ``search_steps`` counter.
"""

import numpy as np
from numba import njit

from .errors import CapacityError, CorruptStreamError

STRATEGIES = ("fwd", "log", "tab")
SEARCH_FWD, SEARCH_LOG, SEARCH_TAB = 0, 1, 2
SEARCH_CODES = {"fwd": SEARCH_FWD, "log": SEARCH_LOG, "tab": SEARCH_TAB}

TABLE_DTYPE = np.int32


@njit(cache=True)
def _find_linear(cum, c):
    i = 1
    while c >= cum[i]:
        i += 1
    return i - 1, i


@njit(cache=True)
def _find_log(cum, c):
    bottom = 0
    top = cum.shape[0] - 1
    steps = 0
    while True:
        i = (top + bottom) >> 1
        steps += 1
        if c < cum[i]:
            top = i
        else:
            bottom = i + 1
        if top == bottom:
            break
    return bottom - 1, steps


@njit(cache=True)
def _fill_table(cum, table):
    """Write every symbol index ``cum[i+1]-cum[i]`` times; returns writes."""
    K = cum.shape[0] - 1
    idx = 0
    for i in range(K):
        for _ in range(cum[i + 1] - cum[i]):
            table[idx] = i
            idx += 1
    return idx


@njit(cache=True)
def _table_after_increment(cum, table, i):
    # cum already holds the incremented counts; the old boundary of every
    # symbol j >= i sits one below its new upper boundary.
    K = cum.shape[0] - 1
    for j in range(i, K):
        table[cum[j + 1] - 1] = j
    return K - i


def _check_code(c, total):
    if c < 0 or c >= total:
        raise CorruptStreamError(f"code value {c} outside [0, {total})")


def find_linear(cum, c):
    """Return the symbol whose subinterval contains ``c`` (forward scan)."""
    cum = np.asarray(cum, dtype=np.int64)
    _check_code(c, int(cum[-1]))
    return int(_find_linear(cum, c)[0])


def find_log(cum, c):
    """Return the symbol whose subinterval contains ``c`` (bisection)."""
    cum = np.asarray(cum, dtype=np.int64)
    _check_code(c, int(cum[-1]))
    return int(_find_log(cum, c)[0])


def create_table(counts, capacity=None):
    """Build the decode table for ``counts``.

    Parameters
    ----------
    counts : array_like of int
        Per-symbol counts; zero counts contribute no entries.
    capacity : int, optional
        Allocated length. Defaults to the total count. Entries past the
        total are set to -1.

    Returns
    -------
    numpy.ndarray
        ``int32`` array where entry ``c`` is the symbol coded by ``c``.
    """
    counts = np.asarray(counts, dtype=np.int64)
    cum = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(counts, out=cum[1:])
    total = int(cum[-1])
    if capacity is None:
        capacity = total
    if capacity < total:
        raise CapacityError(f"table capacity {capacity} < total count {total}")
    table = np.full(capacity, -1, dtype=TABLE_DTYPE)
    _fill_table(cum, table)
    return table


def find_table(table, c):
    """Return ``table[c]``: one memory read, no search."""
    if c < 0 or c >= len(table) or table[c] < 0:
        raise CorruptStreamError(f"code value {c} outside the decode table")
    return int(table[c])


def update_table_increment(table, cum, i):
    """Patch ``table`` after the count of symbol ``i`` was incremented.

    ``cum`` must already contain the incremented cumulative counts. Only the
    ``K - i`` interval boundaries at or above symbol ``i`` move, so only
    those entries are rewritten. Returns the number of entries written.
    """
    cum = np.asarray(cum, dtype=np.int64)
    if int(cum[-1]) > len(table):
        raise CapacityError(
            f"table capacity {len(table)} < total count {int(cum[-1])}")
    return int(_table_after_increment(cum, table, i))

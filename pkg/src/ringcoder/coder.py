"""Range-coder core, method configuration and the compressed stream format.

The coder works in base 256 with six digits of precision: ``low`` and
``range`` are 48-bit quantities and renormalisation shifts out one byte
whenever ``range`` drops below 2**40. Carries out of ``low`` are resolved
with a held-back cache byte plus a count of pending 0xFF bytes.

Two layers share the same arithmetic:

* :class:`RangeEncoder` / :class:`RangeDecoder` code one symbol at a time
  against any model object from :mod:`ringcoder.models`;
* :func:`encode_sequence` / :func:`decode_sequence` run whole sequences in
  numba kernels, including model adaptation and access counting.

Stream layout (little endian)::

    "RCRB" | version u8 | mode u8 | model u8 | flags u8 | K u16 |
    total_bits u8 | symbol_count u64 | [K x u16 static counts] | payload
"""

import re
import struct
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import (
    ConfigError, CorruptStreamError, DataError, FormatError, HeaderError,
    SymbolRangeError, TruncatedStreamError, UnencodableSymbolError)
from .models import (
    DEFAULT_TOTAL_BITS, MAX_TOTAL_BITS, _bit_build, _bit_fill_table,
    _bit_find, _bit_find_linear, _bit_increment, _bit_point, _bit_prefix,
    _bit_table_after_increment, _ring_update, _update_linear,
    _update_linear_table, is_power_of_two, scale_static)
from .search import (
    SEARCH_CODES, SEARCH_FWD, SEARCH_LOG, SEARCH_TAB, STRATEGIES, _fill_table,
    _find_linear, _find_log)

BASE_BITS = 8
DIGITS = 6
FULL = 1 << (BASE_BITS * DIGITS)          # b^m
TOP = 1 << (BASE_BITS * (DIGITS - 1))     # b^(m-1)
LOW_MASK = TOP - 1
CARRY_FREE = 0xFF << (BASE_BITS * (DIGITS - 1))

MIN_TOTAL_BITS = 8

MODES = ("static", "adaptive")
MODELS = ("linear", "fenwick", "ring")

# kernel model kinds
KIND_STATIC, KIND_LINEAR, KIND_FENWICK, KIND_RING = 0, 1, 2, 3
_KINDS = {"linear": KIND_LINEAR, "fenwick": KIND_FENWICK, "ring": KIND_RING}

# counters layout
CUM_WRITES, TABLE_WRITES, SEARCH_STEPS, RESCALES = 0, 1, 2, 3
N_COUNTERS = 4

_ST_OK, _ST_TRUNCATED, _ST_CORRUPT, _ST_UNENCODABLE = 0, 1, 2, 3


# -- configuration ----------------------------------------------------------

_LABEL_RE = re.compile(r"^(fwd|log|tab)(Ring)?(Shift)?(BI)?$")


@dataclass(frozen=True)
class CoderConfig:
    """A method combination.

    ``shift=None`` means "shift wherever the combination allows it", i.e.
    in static mode and with the ring model. Static mode ignores ``model``
    beyond rejecting the Fenwick tree.
    """

    mode: str = "adaptive"
    model: str = "ring"
    search: str = "tab"
    total_bits: int = DEFAULT_TOTAL_BITS
    shift: "bool | None" = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}")
        if self.search not in STRATEGIES:
            raise ConfigError(f"unknown search strategy {self.search!r}")
        if not MIN_TOTAL_BITS <= self.total_bits <= MAX_TOTAL_BITS:
            raise ConfigError(
                f"total_bits must be in [{MIN_TOTAL_BITS}, {MAX_TOTAL_BITS}],"
                f" got {self.total_bits}")
        if self.mode == "static":
            if self.model == "fenwick":
                raise ConfigError("binary indexing is not used in static mode")
            object.__setattr__(self, "model", "linear")
            if self.shift is None:
                object.__setattr__(self, "shift", True)
        else:
            if self.shift is None:
                object.__setattr__(self, "shift", self.model == "ring")
            if self.shift and self.model != "ring":
                raise ConfigError(
                    "shift in adaptive mode requires the ring model "
                    "(the total count must stay a power of two)")

    @property
    def max_total(self):
        return 1 << self.total_bits

    @property
    def label(self):
        if self.mode == "static":
            return self.search + ("RingShift" if self.shift else "")
        return (self.search
                + ("Ring" if self.model == "ring" else "")
                + ("Shift" if self.shift else "")
                + ("BI" if self.model == "fenwick" else ""))

    @classmethod
    def from_label(cls, label, mode="adaptive", total_bits=DEFAULT_TOTAL_BITS):
        m = _LABEL_RE.match(label)
        if not m:
            raise ConfigError(f"unrecognised method label {label!r}")
        search, ring, shift, bi = m.groups()
        if mode == "static":
            if bi or bool(ring) != bool(shift):
                raise ConfigError(f"{label!r} is not a static-mode combination")
            return cls("static", "linear", search, total_bits, bool(shift))
        if bi and ring:
            raise ConfigError(
                f"{label!r}: ring buffer and binary indexing are not combined")
        if shift and not ring:
            raise ConfigError(f"{label!r}: shift requires the ring buffer")
        model = "ring" if ring else ("fenwick" if bi else "linear")
        return cls(mode, model, search, total_bits, bool(shift))

    def check_alphabet(self, K):
        if not 1 <= K <= 0xFFFF:
            raise ConfigError(f"alphabet size must be in [1, 65535], got {K}")
        if self.mode == "adaptive":
            if self.model == "ring" and K >= self.max_total:
                raise ConfigError(
                    f"ring model needs K < M, got K={K}, M={self.max_total}")
            if K > self.max_total:
                raise ConfigError(
                    f"K={K} exceeds the maximum total count {self.max_total}")


def all_configs(mode=None, total_bits=DEFAULT_TOTAL_BITS):
    """Every supported method combination, static first."""
    out = []
    modes = MODES if mode is None else (mode,)
    for md in modes:
        if md == "static":
            variants = [("linear", False), ("linear", True)]
        else:
            variants = [("linear", False), ("fenwick", False),
                        ("ring", False), ("ring", True)]
        for model, shift in variants:
            for search in STRATEGIES:
                out.append(CoderConfig(md, model, search, total_bits, shift))
    return out


# -- stream header ----------------------------------------------------------

MAGIC = b"RCRB"
VERSION = 1
_HEAD = struct.Struct("<4sBBBBHBQ")
_MODE_CODES = {"static": 0, "adaptive": 1}
_MODEL_CODES = {"linear": 0, "fenwick": 1, "ring": 2}
FLAG_SHIFT = 0x01
# bits 1-2 carry the encoder's search strategy as an informational hint
_HINT_SHIFT = 1
_HINT_MASK = 0x06


@dataclass
class StreamHeader:
    mode: str
    model: str
    shift: bool
    K: int
    total_bits: int
    symbol_count: int
    static_counts: "np.ndarray | None" = None
    search_hint: str = "tab"

    @property
    def size(self):
        return _HEAD.size + (2 * self.K if self.mode == "static" else 0)

    def config(self, search=None):
        return CoderConfig(self.mode, self.model, search or self.search_hint,
                           self.total_bits, self.shift)

    def pack(self):
        head = _HEAD.pack(MAGIC, VERSION, _MODE_CODES[self.mode],
                          _MODEL_CODES[self.model],
                          (FLAG_SHIFT if self.shift else 0)
                          | SEARCH_CODES[self.search_hint] << _HINT_SHIFT, self.K,
                          self.total_bits, self.symbol_count)
        if self.mode != "static":
            return head
        # the only count that can reach 2^16 is the sole count of K == 1,
        # stored as 0 and restored on unpack
        counts = np.asarray(self.static_counts, dtype=np.int64) & 0xFFFF
        return head + counts.astype("<u2").tobytes()

    @classmethod
    def unpack(cls, data):
        if len(data) < _HEAD.size:
            raise TruncatedStreamError("stream shorter than its header", 0)
        magic, version, mode, model, flags, K, bits, n = _HEAD.unpack_from(data)
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != VERSION:
            raise FormatError(f"unsupported stream version {version}")
        modes = {v: k for k, v in _MODE_CODES.items()}
        models = {v: k for k, v in _MODEL_CODES.items()}
        hint = (flags & _HINT_MASK) >> _HINT_SHIFT
        if mode not in modes or model not in models \
                or flags & ~(FLAG_SHIFT | _HINT_MASK) or hint >= len(STRATEGIES):
            raise FormatError("unknown mode, model or flag bits in header")
        if K < 1 or not MIN_TOTAL_BITS <= bits <= MAX_TOTAL_BITS:
            raise HeaderError(f"invalid header: K={K}, total_bits={bits}")
        hdr = cls(modes[mode], models[model], bool(flags & FLAG_SHIFT), K,
                  bits, n, search_hint=STRATEGIES[hint])
        if hdr.mode == "static":
            end = _HEAD.size + 2 * K
            if len(data) < end:
                raise TruncatedStreamError("static counts are truncated", 0)
            counts = np.frombuffer(data, dtype="<u2", count=K,
                                   offset=_HEAD.size).astype(np.int64)
            M = 1 << bits
            if K == 1 and n > 0 and counts[0] == 0 and M == 1 << 16:
                counts[0] = M
            total = int(counts.sum())
            if total != M and not (n == 0 and total == 0):
                raise HeaderError(
                    f"static counts sum to {total}, expected 2^{bits}")
            hdr.static_counts = counts
        try:
            hdr.config()
        except ConfigError as exc:
            raise HeaderError(f"header describes an invalid method: {exc}")
        return hdr


# -- numba kernels ----------------------------------------------------------

@njit(cache=True)
def _shift_low(low, cache, run, out, pos):
    if low < CARRY_FREE or low >= FULL:
        carry = low >> 48
        if cache >= 0:
            out[pos] = (cache + carry) & 0xFF
            pos += 1
        while run > 0:
            out[pos] = (0xFF + carry) & 0xFF
            pos += 1
            run -= 1
        cache = (low >> 40) & 0xFF
    else:
        run += 1
    return (low & LOW_MASK) << 8, cache, run, pos


@njit(cache=True)
def _init_state(K, kind, p, static_cum):
    M = 1 << p
    cum = np.empty(K + 1, np.int64)
    tree = np.zeros(K + 1, np.int64)
    if kind == KIND_STATIC:
        cum[:] = static_cum
    else:
        for i in range(K + 1):
            cum[i] = i
    if kind == KIND_FENWICK:
        _bit_build(tree, np.ones(K, np.int64))
    nbuf = M - K if kind == KIND_RING else 1
    buf = np.empty(nbuf, np.int32)
    buf[:] = K
    return cum, tree, buf


@njit(cache=True)
def _encode_kernel(symbols, K, kind, shift, p, static_cum, out, counters):
    M = 1 << p
    cum, tree, buf = _init_state(K, kind, p, static_cum)
    no_table = np.empty(0, np.int32)
    ftotal = K
    ring_idx = 0
    low = 0
    rng = FULL
    cache = -1
    run = 0
    pos = 0
    switch_at = -1
    N = symbols.shape[0]
    for n in range(N):
        s = symbols[n]
        if kind == KIND_FENWICK:
            lo = _bit_prefix(tree, s)
            cnt = _bit_point(tree, s)
            total = ftotal
        else:
            lo = cum[s]
            cnt = cum[s + 1] - lo
            total = cum[K]
        if cnt <= 0:
            return _ST_UNENCODABLE, n, pos, switch_at
        if shift and total == M:
            if switch_at < 0:
                switch_at = n
            step = rng >> p
        else:
            step = rng // total
        low += lo * step
        rng = cnt * step
        while rng < TOP:
            low, cache, run, pos = _shift_low(low, cache, run, out, pos)
            rng <<= 8
        if kind == KIND_LINEAR:
            if cum[K] >= M:
                counters[RESCALES] += 1
            counters[CUM_WRITES] += _update_linear(cum, s, M)
        elif kind == KIND_FENWICK:
            ftotal, w, rescaled = _bit_increment(tree, s, ftotal, M)
            counters[CUM_WRITES] += w
            if rescaled:
                counters[RESCALES] += 1
        elif kind == KIND_RING:
            ring_idx, w = _ring_update(cum, buf, ring_idx, s, no_table, False)
            counters[CUM_WRITES] += w
    if N > 0:
        for _ in range(DIGITS + 1):
            low, cache, run, pos = _shift_low(low, cache, run, out, pos)
    return _ST_OK, N, pos, switch_at


@njit(cache=True)
def _encode_static_kernel(symbols, K, shift, p, static_cum, out):
    # static counts never change, so the loop carries no model dispatch
    total = static_cum[K]
    low = 0
    rng = FULL
    cache = -1
    run = 0
    pos = 0
    N = symbols.shape[0]
    for n in range(N):
        s = symbols[n]
        lo = static_cum[s]
        cnt = static_cum[s + 1] - lo
        if cnt <= 0:
            return _ST_UNENCODABLE, n, pos, -1
        if shift:
            step = rng >> p
        else:
            step = rng // total
        low += lo * step
        rng = cnt * step
        while rng < TOP:
            low, cache, run, pos = _shift_low(low, cache, run, out, pos)
            rng <<= 8
    if N > 0:
        for _ in range(DIGITS + 1):
            low, cache, run, pos = _shift_low(low, cache, run, out, pos)
    return _ST_OK, N, pos, 0 if shift and N > 0 else -1


@njit(cache=True)
def _decode_kernel(data, start, N, K, kind, shift, p, static_cum, search,
                   out, counters):
    M = 1 << p
    cum, tree, buf = _init_state(K, kind, p, static_cum)
    use_table = search == SEARCH_TAB
    table = np.empty(M if use_table else 0, np.int32)
    if use_table:
        if kind == KIND_FENWICK:
            counters[TABLE_WRITES] += _bit_fill_table(tree, table)
        else:
            counters[TABLE_WRITES] += _fill_table(cum, table)
    mask = _top_bit_jit(K)
    ftotal = K
    ring_idx = 0
    switch_at = -1
    ipos = start
    size = data.shape[0]
    code = 0
    rng = FULL
    if N > 0:
        if ipos + DIGITS > size:
            return _ST_TRUNCATED, 0, ipos, switch_at
        for _ in range(DIGITS):
            code = (code << 8) | data[ipos]
            ipos += 1
    for n in range(N):
        total = ftotal if kind == KIND_FENWICK else cum[K]
        if shift and total == M:
            if switch_at < 0:
                switch_at = n
            step = rng >> p
        else:
            step = rng // total
        c = code // step
        if c >= total:
            c = total - 1
        if kind == KIND_FENWICK:
            if search == SEARCH_FWD:
                s, st = _bit_find_linear(tree, c)
            elif search == SEARCH_LOG:
                s, st = _bit_find(tree, c, mask)
            else:
                s = table[c]
                st = 1
            lo = _bit_prefix(tree, s)
            cnt = _bit_point(tree, s)
        else:
            if search == SEARCH_FWD:
                s, st = _find_linear(cum, c)
            elif search == SEARCH_LOG:
                s, st = _find_log(cum, c)
            else:
                s = table[c]
                st = 1
            lo = cum[s]
            cnt = cum[s + 1] - lo
        counters[SEARCH_STEPS] += st
        out[n] = s
        code -= lo * step
        rng = cnt * step
        if code >= rng:
            return _ST_CORRUPT, n, ipos, switch_at
        while rng < TOP:
            if ipos >= size:
                return _ST_TRUNCATED, n, ipos, switch_at
            code = (code << 8) | data[ipos]
            ipos += 1
            rng <<= 8
        if kind == KIND_LINEAR:
            if cum[K] >= M:
                counters[RESCALES] += 1
            if use_table:
                cw, tw = _update_linear_table(cum, table, s, M)
                counters[CUM_WRITES] += cw
                counters[TABLE_WRITES] += tw
            else:
                counters[CUM_WRITES] += _update_linear(cum, s, M)
        elif kind == KIND_FENWICK:
            ftotal, w, rescaled = _bit_increment(tree, s, ftotal, M)
            counters[CUM_WRITES] += w
            if rescaled:
                counters[RESCALES] += 1
            if use_table:
                if rescaled:
                    counters[TABLE_WRITES] += _bit_fill_table(tree, table)
                else:
                    counters[TABLE_WRITES] += _bit_table_after_increment(
                        tree, table, s)
        elif kind == KIND_RING:
            ring_idx, w = _ring_update(cum, buf, ring_idx, s, table, use_table)
            counters[CUM_WRITES] += w
            if use_table:
                counters[TABLE_WRITES] += w
    return _ST_OK, N, ipos, switch_at


@njit(cache=True)
def _top_bit_jit(K):
    mask = 1
    while mask * 2 <= K:
        mask *= 2
    return mask


# -- sequence API -----------------------------------------------------------

@dataclass
class CodingStats:
    """Sizes and access counters of one encode or decode run."""

    symbol_count: int
    header_bytes: int
    payload_bytes: int
    cum_writes: int = 0
    table_writes: int = 0
    search_steps: int = 0
    rescales: int = 0
    shift_switch: int = -1

    @property
    def bitrate(self):
        """Payload bits per symbol (header excluded)."""
        if self.symbol_count == 0:
            return 0.0
        return 8.0 * self.payload_bytes / self.symbol_count

    def per_symbol(self, name):
        return getattr(self, name) / max(self.symbol_count, 1)


@dataclass
class EncodeResult:
    data: bytes
    header: StreamHeader
    stats: CodingStats


@dataclass
class DecodeResult:
    symbols: np.ndarray
    header: StreamHeader
    stats: CodingStats = field(repr=False)


def _as_symbols(symbols, K):
    arr = np.asarray(symbols)
    if arr.dtype not in (np.int32, np.int64):
        arr = arr.astype(np.int64)
    arr = np.ascontiguousarray(arr)
    if arr.ndim != 1:
        raise DataError("symbols must be a one-dimensional sequence")
    if arr.size and (arr.min() < 0 or arr.max() >= K):
        pos = int(np.flatnonzero((arr < 0) | (arr >= K))[0])
        raise SymbolRangeError(
            f"symbol {int(arr[pos])} at position {pos} is outside "
            f"[0, {K})", pos)
    return arr


def static_counts_for(symbols, K, total_bits):
    """Scaled static counts as they will be stored in the header."""
    M = 1 << total_bits
    if len(symbols) == 0:
        return np.zeros(K, dtype=np.int64)
    raw = np.bincount(symbols, minlength=K)
    counts = scale_static(raw, M).counts
    if K > 1 and counts.max() > 0xFFFF:
        # a single symbol owning all of 2^16 cannot be stored in u16;
        # lend one unit to a neighbour that never occurs
        top = int(counts.argmax())
        counts[top] -= 1
        counts[1 if top == 0 else 0] += 1
    return counts


def _static_cum(counts):
    cum = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(counts, out=cum[1:])
    return cum


def encode_sequence(config, symbols, K, out=None):
    """Encode ``symbols`` over an alphabet of size ``K``.

    Returns an :class:`EncodeResult`; when ``out`` (a binary file object)
    is given the stream is also written to it.
    """
    config.check_alphabet(K)
    arr = _as_symbols(symbols, K)
    N = arr.size
    p = config.total_bits
    static_counts = None
    if config.mode == "static":
        static_counts = static_counts_for(arr, K, p)
        kind = KIND_STATIC
        static_cum = _static_cum(static_counts)
    else:
        kind = _KINDS[config.model]
        static_cum = np.zeros(K + 1, dtype=np.int64)
    header = StreamHeader(config.mode, config.model, bool(config.shift), K, p,
                          N, static_counts, config.search)
    buf = np.empty(2 * N + 16, dtype=np.uint8)
    counters = np.zeros(N_COUNTERS, dtype=np.int64)
    if kind == KIND_STATIC:
        status, where, size, switch_at = _encode_static_kernel(
            arr, K, bool(config.shift), p, static_cum, buf)
    else:
        status, where, size, switch_at = _encode_kernel(
            arr, K, kind, bool(config.shift), p, static_cum, buf, counters)
    if status == _ST_UNENCODABLE:
        raise UnencodableSymbolError(
            f"symbol {int(arr[where])} at position {where} has zero count",
            int(where))
    head = header.pack()
    data = head + buf[:size].tobytes()
    if out is not None:
        out.write(data)
    stats = CodingStats(N, len(head), int(size), *map(int, counters),
                        shift_switch=int(switch_at))
    return EncodeResult(data, header, stats)


def decode_sequence(data, search=None):
    """Decode a complete stream; the method is read from the header.

    ``search`` selects the decoder's symbol identification strategy (default:
    the encoder's hint stored in the header) and has no influence on the
    result.
    """
    if search is not None and search not in SEARCH_CODES:
        raise ConfigError(f"unknown search strategy {search!r}")
    data = bytes(data)
    header = StreamHeader.unpack(data)
    search = search or header.search_hint
    K, N, p = header.K, header.symbol_count, header.total_bits
    if header.mode == "static":
        kind = KIND_STATIC
        static_cum = _static_cum(header.static_counts)
    else:
        kind = _KINDS[header.model]
        static_cum = np.zeros(K + 1, dtype=np.int64)
    out = np.empty(N, dtype=np.int64)
    counters = np.zeros(N_COUNTERS, dtype=np.int64)
    raw = np.frombuffer(data, dtype=np.uint8)
    status, where, ipos, switch_at = _decode_kernel(
        raw, header.size, N, K, kind, header.shift, p, static_cum,
        SEARCH_CODES[search], out, counters)
    if status == _ST_TRUNCATED:
        raise TruncatedStreamError(
            f"payload ended while decoding symbol {where} of {N}", int(where))
    if status == _ST_CORRUPT:
        raise CorruptStreamError(
            f"payload is inconsistent at symbol {where}", int(where))
    stats = CodingStats(N, header.size, int(ipos) - header.size,
                        *map(int, counters), shift_switch=int(switch_at))
    return DecodeResult(out, header, stats)


# -- per-symbol API ---------------------------------------------------------

def _shift_bits(total, shift):
    if shift and is_power_of_two(total):
        return total.bit_length() - 1
    return None


class RangeEncoder:
    """Symbol-at-a-time encoder.

    Models are not updated here; call the model's update method after
    :meth:`encode_symbol` in the same order the decoder will.
    """

    def __init__(self):
        self.low = 0
        self.range = FULL
        self.cache = -1
        self.run = 0
        self._buf = np.empty(64, dtype=np.uint8)
        self._pos = 0

    def _reserve(self, n):
        if self._pos + n > len(self._buf):
            grown = np.empty(2 * (self._pos + n), dtype=np.uint8)
            grown[:self._pos] = self._buf[:self._pos]
            self._buf = grown

    def update_low(self):
        """Move the top digit of ``low`` towards the output."""
        self._reserve(self.run + 2)
        self.low, self.cache, self.run, self._pos = (
            int(v) for v in _shift_low(self.low, self.cache, self.run,
                                       self._buf, self._pos))

    def encode(self, lo, count, total, shift_bits=None):
        if count <= 0:
            raise UnencodableSymbolError(f"zero-width interval at {lo}")
        if shift_bits is None:
            step = self.range // total
        else:
            step = self.range >> shift_bits
        self.low += lo * step
        self.range = count * step
        while self.range < TOP:
            self.update_low()
            self.range <<= 8

    def encode_symbol(self, model, i, shift=False):
        """Narrow the interval to symbol ``i`` of ``model``.

        With ``shift`` the division by the total is replaced by a right
        shift whenever the total is a power of two.
        """
        lo, count = model.interval(i)
        total = model.total
        self.encode(lo, count, total, _shift_bits(total, shift))

    def flush(self):
        """Emit the remaining digits of ``low``; returns the whole output."""
        for _ in range(DIGITS + 1):
            self.update_low()
        return self.getvalue()

    def getvalue(self):
        return self._buf[:self._pos].tobytes()


class RangeDecoder:
    """Symbol-at-a-time decoder over an in-memory payload."""

    def __init__(self, payload, offset=0):
        self.data = bytes(payload)
        self.pos = offset
        self.range = FULL
        self.code = 0
        for _ in range(DIGITS):
            self.code = (self.code << 8) | self._next_byte()

    def _next_byte(self):
        if self.pos >= len(self.data):
            raise TruncatedStreamError("payload exhausted", self.pos)
        b = self.data[self.pos]
        self.pos += 1
        return b

    def target(self, total, shift_bits=None):
        if shift_bits is None:
            step = self.range // total
        else:
            step = self.range >> shift_bits
        return min(self.code // step, total - 1), step

    def consume(self, lo, count, step):
        self.code -= lo * step
        self.range = count * step
        if self.code >= self.range:
            raise CorruptStreamError("code value left the coding interval")
        while self.range < TOP:
            self.code = (self.code << 8) | self._next_byte()
            self.range <<= 8

    def decode_symbol(self, model, strategy="log", shift=False):
        total = model.total
        c, step = self.target(total, _shift_bits(total, shift))
        i = model.find(c, strategy)
        lo, count = model.interval(i)
        self.consume(lo, count, step)
        return i


# -- raw symbol files -------------------------------------------------------

RSYM_MAGIC = b"RSYM"
_RSYM_HEAD = struct.Struct("<4sHQ")


def pack_rsym(symbols, K):
    arr = np.asarray(symbols)
    if not 1 <= K <= 0xFFFF:
        raise ConfigError(f"alphabet size must be in [1, 65535], got {K}")
    _as_symbols(arr, K)
    return _RSYM_HEAD.pack(RSYM_MAGIC, K, arr.size) + arr.astype("<u2").tobytes()


def unpack_rsym(data):
    """Return ``(symbols, K)`` from RSYM bytes."""
    if len(data) < _RSYM_HEAD.size:
        raise TruncatedStreamError("symbol file shorter than its header", 0)
    magic, K, N = _RSYM_HEAD.unpack_from(data)
    if magic != RSYM_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {RSYM_MAGIC!r}")
    if len(data) < _RSYM_HEAD.size + 2 * N:
        raise TruncatedStreamError(
            f"symbol file holds fewer than {N} symbols", 0)
    syms = np.frombuffer(data, dtype="<u2", count=N,
                         offset=_RSYM_HEAD.size).astype(np.int32)
    return syms, K


def write_rsym(path, symbols, K):
    with open(path, "wb") as fh:
        fh.write(pack_rsym(symbols, K))


def read_rsym(path):
    with open(path, "rb") as fh:
        return unpack_rsym(fh.read())


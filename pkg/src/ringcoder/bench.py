"""Benchmark harness: timed runs, access counters and analytic expectations.

Timing uses ``time.perf_counter_ns`` and keeps the best of ``repeats``
runs. Everything except the two timing columns is deterministic for a
given seed, so CSV files from repeated runs differ only in those columns.
"""

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from .coder import CoderConfig, all_configs, decode_sequence, encode_sequence
from .datagen import (
    GeometricSpec, bitrate_error, gen_geometric, generate, sequence_entropy)
from .errors import ConfigError, InvariantError

CSV_COLUMNS = (
    "label", "K", "dist", "mode", "N", "enc_ns_per_sym", "dec_ns_per_sym",
    "cum_writes_per_sym", "table_writes_per_sym", "search_steps_per_sym",
    "bitrate_bps", "entropy_bps", "error_pct")

DEFAULT_KS = tuple(2 ** n for n in range(1, 11))
DISTRIBUTIONS = ("uniform", "geometric")


@dataclass
class AccessCounters:
    cum_writes: int = 0
    table_writes: int = 0
    search_steps: int = 0

    def add(self, stats):
        self.cum_writes += stats.cum_writes
        self.table_writes += stats.table_writes
        self.search_steps += stats.search_steps

    def reset(self):
        self.cum_writes = self.table_writes = self.search_steps = 0


@dataclass
class BenchRecord:
    label: str
    K: int
    dist: str
    mode: str
    N: int
    enc_ns_per_sym: float
    dec_ns_per_sym: float
    cum_writes_per_sym: float
    table_writes_per_sym: float
    search_steps_per_sym: float
    bitrate_bps: float
    entropy_bps: float
    error_pct: float

    @property
    def total_ns_per_sym(self):
        return self.enc_ns_per_sym + self.dec_ns_per_sym

    def row(self):
        return [getattr(self, f.name) for f in fields(self)]


def expected_accesses_uniform(K, scheme):
    """Mean cumulative-count writes per update for uniform symbols."""
    if scheme == "standard":
        return K - (K - 1) / 2
    if scheme == "ring":
        return (K * K - 1) / (3 * K)
    raise ConfigError(f"unknown scheme {scheme!r}")


def expected_accesses_geometric(p, scheme, K=None):
    """Mean writes per update for (untruncated) geometric symbols.

    ``standard-best`` assumes the frequent symbols sit at the top of the
    alphabet, ``standard-worst`` at the bottom (the usual case, needs K).
    """
    if not 0 < p < 1:
        raise ConfigError(f"p must lie in (0, 1), got {p}")
    mean = p / (1 - p)
    if scheme == "standard-best":
        return mean
    if scheme == "standard-worst":
        if K is None:
            raise ConfigError("standard-worst needs the alphabet size")
        return K - mean
    if scheme == "ring":
        return 2 * p / (1 - p * p)
    raise ConfigError(f"unknown scheme {scheme!r}")


def _best_ns(fn, repeats):
    best = math.inf
    result = None
    for _ in range(max(repeats, 1)):
        t0 = time.perf_counter_ns()
        result = fn()
        best = min(best, time.perf_counter_ns() - t0)
    return best, result


def measure_run(config, symbols, K, dist="", repeats=5, timing=True):
    """Encode then decode ``symbols`` in memory and summarise the run.

    Cumulative-count writes come from the encoder, table writes and search
    steps from the decoder. A roundtrip mismatch raises instead of
    producing a record.
    """
    symbols = np.asarray(symbols)
    N = len(symbols)
    reps = repeats if timing else 1
    enc_ns, enc = _best_ns(lambda: encode_sequence(config, symbols, K), reps)
    dec_ns, dec = _best_ns(lambda: decode_sequence(enc.data, config.search),
                           reps)
    if not np.array_equal(dec.symbols, symbols):
        raise InvariantError(
            f"roundtrip mismatch for {config.mode}/{config.label}, K={K}")
    H = sequence_entropy(symbols, K)
    n = max(N, 1)
    rate = enc.stats.bitrate
    return BenchRecord(
        label=config.label, K=K, dist=dist, mode=config.mode, N=N,
        enc_ns_per_sym=enc_ns / n if timing else math.nan,
        dec_ns_per_sym=dec_ns / n if timing else math.nan,
        cum_writes_per_sym=enc.stats.cum_writes / n,
        table_writes_per_sym=dec.stats.table_writes / n,
        search_steps_per_sym=dec.stats.search_steps / n,
        bitrate_bps=rate, entropy_bps=H,
        error_pct=bitrate_error(rate, H) if H > 0 else math.nan)


def warmup(configs):
    """Run every kernel variant once so compilation stays out of the timings."""
    syms = np.arange(16, dtype=np.int32) % 4
    for cfg in configs:
        enc = encode_sequence(cfg, syms, 4)
        decode_sequence(enc.data, cfg.search)


def _cell(args):
    config, K, dist, N, seed, repeats, timing = args
    if config.mode == "adaptive" and config.model == "ring" \
            and K >= config.max_total:
        return None
    symbols = generate(dist, K, N, seed)
    return measure_run(config, symbols, K, dist, repeats, timing)


def run_matrix(configs=None, Ks=DEFAULT_KS, dists=DISTRIBUTIONS, N=10**6,
               seed=0, out=None, repeats=5, timing=True, jobs=1,
               progress=None):
    """Run every (config, K, dist) cell and return the records.

    Cells whose configuration cannot hold the alphabet (ring model with
    K >= M) are skipped. ``jobs > 1`` is only accepted for counter-only
    runs (``timing=False``) since parallel cells disturb each other's clocks.
    When ``out`` is a text file object, CSV rows are streamed to it.
    """
    if configs is None:
        configs = all_configs()
    if jobs > 1 and timing:
        raise ConfigError("parallel cells are only allowed with timing off")
    cells = [(c, K, d, N, seed, repeats, timing)
             for d in dists for K in Ks for c in configs]
    writer = None
    if out is not None:
        writer = csv.writer(out)
        writer.writerow(CSV_COLUMNS)
    records = []
    if timing:
        warmup(configs)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_cell, cells))
    else:
        results = map(_cell, cells)
    for cell, rec in zip(cells, results):
        if rec is None:
            continue
        records.append(rec)
        if writer is not None:
            writer.writerow(_fmt_row(rec))
        if progress is not None:
            progress(rec)
    return records


def _fmt_row(rec):
    row = []
    for v in rec.row():
        if isinstance(v, float):
            row.append("" if math.isnan(v) else f"{v:.6g}")
        else:
            row.append(v)
    return row


def write_csv(records, fh):
    writer = csv.writer(fh)
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(_fmt_row(rec))


def read_csv(fh):
    out = []
    for row in csv.DictReader(fh):
        kw = {}
        for f in fields(BenchRecord):
            v = row[f.name]
            if f.type is int:
                kw[f.name] = int(v)
            elif f.type is float:
                kw[f.name] = float(v) if v != "" else math.nan
            else:
                kw[f.name] = v
        out.append(BenchRecord(**kw))
    return out


def write_totals_csv(records, fh):
    """Encoder plus decoder time per symbol, one row per cell."""
    writer = csv.writer(fh)
    writer.writerow(("label", "K", "dist", "mode", "total_ns_per_sym"))
    for rec in records:
        writer.writerow((rec.label, rec.K, rec.dist, rec.mode,
                         f"{rec.total_ns_per_sym:.6g}"))


@dataclass
class SweepPoint:
    scheme: str
    total_bits: int
    bitrate_bps: float
    entropy_bps: float
    error_pct: float


SWEEP_COLUMNS = tuple(f.name for f in fields(SweepPoint))


def bitrate_sweep(K=32, bits=range(8, 17), N=10**6, seed=0,
                  dist="geometric"):
    """Bitrate error against the total count ``M = 2^p``.

    Three adaptation schemes share one sequence: static scaled counts, the
    ring window, and increment-and-rescale. The entropy reference is the
    zeroth-order entropy of the sequence itself.
    """
    if dist == "geometric":
        symbols = gen_geometric(GeometricSpec.for_alphabet(K, seed), N)
    else:
        symbols = generate(dist, K, N, seed)
    H = sequence_entropy(symbols, K)
    points = []
    for p in bits:
        for scheme, cfg in (
                ("static", CoderConfig("static", "linear", "tab", p)),
                ("ring", CoderConfig("adaptive", "ring", "tab", p)),
                ("rescale", CoderConfig("adaptive", "linear", "tab", p))):
            try:
                cfg.check_alphabet(K)
            except ConfigError:
                continue
            rate = encode_sequence(cfg, symbols, K).stats.bitrate
            points.append(SweepPoint(scheme, p, rate, H, bitrate_error(rate, H)))
    return points


def write_sweep_csv(points, fh):
    writer = csv.writer(fh)
    writer.writerow(SWEEP_COLUMNS)
    for pt in points:
        writer.writerow([v if not isinstance(v, float) else f"{v:.6g}"
                         for v in asdict(pt).values()])


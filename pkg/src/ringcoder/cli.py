"""Command-line front end.

Exit codes: 0 success, 2 usage/configuration error, 3 stream format
error, 4 data error, 5 internal invariant violation (including a failed
``verify``).
"""

import argparse
import os
import sys

import numpy as np

from . import bench
from .coder import (
    CoderConfig, all_configs, decode_sequence, encode_sequence, read_rsym,
    write_rsym)
from .datagen import (
    GeometricSpec, bitrate_error, generate, k_of_K, sequence_entropy,
    source_entropy)
from .errors import (
    ConfigError, DataError, InvariantError, RangeCoderError, StreamError)
from .models import DEFAULT_TOTAL_BITS

EXIT_OK, EXIT_USAGE, EXIT_FORMAT, EXIT_DATA, EXIT_INTERNAL = 0, 2, 3, 4, 5


def _config(args):
    if args.label:
        return CoderConfig.from_label(args.label, args.mode, args.total_bits)
    return CoderConfig(args.mode, args.model, args.search, args.total_bits,
                       args.shift)


def _load_input(args):
    if args.raw_bytes:
        with open(args.inp, "rb") as fh:
            return np.frombuffer(fh.read(), dtype=np.uint8).astype(np.int32), 256
    return read_rsym(args.inp)


def cmd_gen(args):
    if not 1 <= args.K <= 0xFFFF:
        raise ConfigError(f"--K must be in [1, 65535], got {args.K}")
    symbols = generate(args.dist, args.K, args.N, args.seed)
    write_rsym(args.out, symbols, args.K)
    src = source_entropy(args.dist, args.K)
    line = f"wrote {args.N} symbols K={args.K} dist={args.dist}"
    if args.dist == "geometric":
        spec = GeometricSpec.for_alphabet(args.K)
        line += f" k={k_of_K(args.K)} p={spec.p:.6f}"
    print(line)
    print(f"source entropy {src:.6f} bit/symbol")
    print(f"sequence entropy {sequence_entropy(symbols, args.K):.6f} bit/symbol")
    return EXIT_OK


def _report(stats, H):
    err = bitrate_error(stats.bitrate, H) if H > 0 else float("nan")
    print(f"symbols {stats.symbol_count}  header {stats.header_bytes} B  "
          f"payload {stats.payload_bytes} B")
    print(f"bitrate {stats.bitrate:.6f} bit/symbol  entropy {H:.6f} "
          f"bit/symbol  error {err:.4f} %")


def cmd_encode(args):
    config = _config(args)
    symbols, K = _load_input(args)
    res = encode_sequence(config, symbols, K)
    with open(args.out, "wb") as fh:
        fh.write(res.data)
    print(f"method {config.mode}/{config.label}  K={K}  M=2^{config.total_bits}")
    _report(res.stats, sequence_entropy(symbols, K))
    return EXIT_OK


def cmd_decode(args):
    with open(args.inp, "rb") as fh:
        data = fh.read()
    res = decode_sequence(data, args.search)
    if args.raw_bytes:
        if res.header.K > 256:
            raise DataError("--raw-bytes needs a stream with K <= 256")
        with open(args.out, "wb") as fh:
            fh.write(res.symbols.astype(np.uint8).tobytes())
    else:
        write_rsym(args.out, res.symbols, res.header.K)
    cfg = res.header.config(args.search)
    print(f"decoded {res.header.symbol_count} symbols  method "
          f"{cfg.mode}/{cfg.label}  K={res.header.K}")
    return EXIT_OK


def cmd_verify(args):
    config = _config(args)
    symbols, K = _load_input(args)
    configs = all_configs(total_bits=args.total_bits) if args.all else [config]
    failed = 0
    for cfg in configs:
        try:
            cfg.check_alphabet(K)
        except ConfigError:
            if args.all:
                continue
            raise
        res = encode_sequence(cfg, symbols, K)
        dec = decode_sequence(res.data, cfg.search)
        ok = np.array_equal(dec.symbols, symbols)
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {cfg.mode:8s} {cfg.label:14s} "
              f"{res.stats.bitrate:.4f} bit/symbol")
    return EXIT_OK if failed == 0 else EXIT_INTERNAL


def _progress(rec):
    print(f"{rec.mode:8s} {rec.dist:9s} K={rec.K:<5d} {rec.label:14s} "
          f"enc {rec.enc_ns_per_sym:8.1f} ns  dec {rec.dec_ns_per_sym:8.1f} ns  "
          f"writes {rec.cum_writes_per_sym:8.3f}", file=sys.stderr)


def cmd_bench(args):
    Ks = args.Ks or bench.DEFAULT_KS
    dists = [args.dist] if args.dist else bench.DISTRIBUTIONS
    modes = [args.mode] if args.mode_given else [None]
    configs = []
    for mode in modes:
        configs += all_configs(mode, args.total_bits)
    if args.labels:
        configs = [c for c in configs if c.label in args.labels]
        if not configs:
            raise ConfigError("no configuration matches --labels")
    timing = not args.no_timing
    with open(args.out, "w", newline="") as fh:
        records = bench.run_matrix(configs, Ks, dists, args.N, args.seed, fh,
                                   args.repeats, timing, args.jobs,
                                   progress=None if args.quiet else _progress)
    stem = os.path.splitext(args.out)[0]
    with open(stem + "_total.csv", "w", newline="") as fh:
        bench.write_totals_csv(records, fh)
    sweep = None
    if args.sweep:
        sweep = bench.bitrate_sweep(N=args.N, seed=args.seed)
        with open(stem + "_bitrate.csv", "w", newline="") as fh:
            bench.write_sweep_csv(sweep, fh)
    if args.plot or args.gnuplot:
        from . import plotting
        if args.plot:
            for path in plotting.render_report(records, args.plot, sweep):
                print(f"figure {path}")
        if args.gnuplot:
            for path in plotting.write_gnuplot(records, args.gnuplot):
                print(f"table {path}")
    print(f"{len(records)} records -> {args.out}")
    return EXIT_OK


def _add_method_flags(p):
    p.add_argument("--mode", choices=("static", "adaptive"), default="adaptive")
    p.add_argument("--model", choices=("linear", "fenwick", "ring"),
                   default="ring")
    p.add_argument("--search", choices=("fwd", "log", "tab"), default="tab")
    p.add_argument("--total-bits", type=int, default=DEFAULT_TOTAL_BITS,
                   help="p with total count M = 2^p (8..16)")
    p.add_argument("--label", help="method label such as tabRingShift or logBI "
                   "(overrides --model/--search/--shift)")
    shift = p.add_mutually_exclusive_group()
    shift.add_argument("--shift", dest="shift", action="store_true",
                       default=None)
    shift.add_argument("--no-shift", dest="shift", action="store_false")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ringcoder",
        description="Range coder with ring-buffer adaptation and table decoding")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic RSYM symbol file")
    p.add_argument("--dist", choices=("uniform", "geometric"),
                   default="geometric")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("encode", help="RSYM (or raw bytes) to RCRB stream")
    _add_method_flags(p)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--raw-bytes", action="store_true",
                   help="treat the input as arbitrary bytes (K=256)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="RCRB stream to RSYM (or raw bytes)")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--search", choices=("fwd", "log", "tab"),
                   help="default: the strategy recorded by the encoder")
    p.add_argument("--raw-bytes", action="store_true")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("verify", help="in-memory encode/decode roundtrip")
    _add_method_flags(p)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--raw-bytes", action="store_true")
    p.add_argument("--all", action="store_true",
                   help="check every method combination")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="benchmark matrix to CSV")
    p.add_argument("--mode", choices=("static", "adaptive"), default=None)
    p.add_argument("--total-bits", type=int, default=DEFAULT_TOTAL_BITS)
    p.add_argument("--labels", nargs="+", help="restrict to these labels")
    p.add_argument("--K", dest="Ks", type=int, nargs="+",
                   help="alphabet sizes (default 2..1024 in powers of two)")
    p.add_argument("--dist", choices=("uniform", "geometric"))
    p.add_argument("--N", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--no-timing", action="store_true",
                   help="counters only; enables --jobs")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--sweep", action="store_true",
                   help="also write the bitrate-error sweep over M=2^8..2^16")
    p.add_argument("--plot", metavar="DIR", help="render PNG figures into DIR")
    p.add_argument("--gnuplot", metavar="DIR",
                   help="write gnuplot .dat tables into DIR")
    p.add_argument("--quiet", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench":
        args.mode_given = args.mode is not None
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StreamError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except RangeCoderError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Figures and gnuplot tables from benchmark records.

All functions take lists of :class:`ringcoder.bench.BenchRecord` (or sweep
points) and write files into a directory; nothing is shown interactively.
"""

import math
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import expected_accesses_geometric, expected_accesses_uniform  # noqa: E402
from .datagen import GeometricSpec  # noqa: E402

plt.rcParams.update({
    "figure.figsize": (6.4, 4.0),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 7,
    "savefig.dpi": 120,
})

_MARKERS = "osD^v<>pPX*h"


def _series(records, metric):
    by_label = defaultdict(list)
    for rec in records:
        value = getattr(rec, metric)
        if isinstance(value, float) and math.isnan(value):
            continue
        by_label[rec.label].append((rec.K, value))
    return {lab: sorted(pts) for lab, pts in by_label.items()}


def _plot_series(ax, series):
    for n, (label, pts) in enumerate(sorted(series.items())):
        xs, ys = zip(*pts)
        ax.plot(xs, ys, marker=_MARKERS[n % len(_MARKERS)], ms=3, lw=1,
                label=label)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("alphabet size K")


def _groups(records):
    groups = defaultdict(list)
    for rec in records:
        groups[(rec.mode, rec.dist)].append(rec)
    return groups


def plot_timings(records, outdir):
    """One figure per (mode, distribution): encoder and decoder ns/symbol."""
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for (mode, dist), recs in sorted(_groups(records).items()):
        enc = _series(recs, "enc_ns_per_sym")
        if not enc:
            continue
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6.4, 7))
        _plot_series(ax1, enc)
        _plot_series(ax2, _series(recs, "dec_ns_per_sym"))
        ax1.set_ylabel("encoder ns/symbol")
        ax2.set_ylabel("decoder ns/symbol")
        ax1.set_title(f"{mode} mode, {dist} distribution")
        ax1.legend(ncol=3)
        path = os.path.join(outdir, f"time_{mode}_{dist}.png")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
        paths.append(path)
    return paths


def plot_totals(records, outdir):
    """Encoder + decoder time for adaptive runs."""
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for (mode, dist), recs in sorted(_groups(records).items()):
        if mode != "adaptive":
            continue
        series = _series(recs, "total_ns_per_sym")
        if not series:
            continue
        fig, ax = plt.subplots()
        _plot_series(ax, series)
        ax.set_ylabel("encoder + decoder ns/symbol")
        ax.set_title(f"adaptive mode, {dist} distribution")
        ax.legend(ncol=3)
        path = os.path.join(outdir, f"total_{dist}.png")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
        paths.append(path)
    return paths


def plot_accesses(records, outdir):
    """Measured cumulative-count writes against the analytic means."""
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for (mode, dist), recs in sorted(_groups(records).items()):
        if mode != "adaptive":
            continue
        series = _series(recs, "cum_writes_per_sym")
        Ks = sorted({rec.K for rec in recs})
        fig, ax = plt.subplots()
        _plot_series(ax, series)
        if dist == "uniform":
            ax.plot(Ks, [expected_accesses_uniform(K, "standard") for K in Ks],
                    "k--", lw=0.8, label="(K+1)/2")
            ax.plot(Ks, [expected_accesses_uniform(K, "ring") for K in Ks],
                    "k:", lw=0.8, label="(K²-1)/3K")
        else:
            ps = [GeometricSpec.for_alphabet(K).p for K in Ks]
            ax.plot(Ks, [expected_accesses_geometric(p, "standard-worst", K)
                         for p, K in zip(ps, Ks)], "k--", lw=0.8,
                    label="K - p/(1-p)")
            ax.plot(Ks, [expected_accesses_geometric(p, "ring")
                         for p in ps], "k:", lw=0.8, label="2p/(1-p²)")
        ax.set_yscale("log")
        ax.set_ylabel("cum writes per symbol")
        ax.set_title(f"adaptation cost, {dist} distribution")
        ax.legend(ncol=3)
        path = os.path.join(outdir, f"accesses_{dist}.png")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
        paths.append(path)
    return paths


def plot_bitrate_sweep(points, outdir, K=32):
    os.makedirs(outdir, exist_ok=True)
    by_scheme = defaultdict(list)
    for pt in points:
        by_scheme[pt.scheme].append((pt.total_bits, pt.error_pct))
    fig, ax = plt.subplots()
    for n, (scheme, pts) in enumerate(sorted(by_scheme.items())):
        xs, ys = zip(*sorted(pts))
        ax.plot(xs, ys, marker=_MARKERS[n], ms=4, label=scheme)
    ax.set_yscale("log")
    ax.set_xlabel("p  (total count M = 2^p)")
    ax.set_ylabel("bitrate error e [%]")
    ax.set_title(f"coding accuracy, K={K}")
    ax.legend()
    path = os.path.join(outdir, "bitrate_error.png")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def write_gnuplot(records, outdir,
                  metrics=("enc_ns_per_sym", "dec_ns_per_sym",
                           "total_ns_per_sym", "cum_writes_per_sym")):
    """Whitespace-separated tables: K in column 1, one column per label."""
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for (mode, dist), recs in sorted(_groups(records).items()):
        for metric in metrics:
            series = _series(recs, metric)
            if not series:
                continue
            labels = sorted(series)
            table = defaultdict(dict)
            for lab in labels:
                for K, v in series[lab]:
                    table[K][lab] = v
            path = os.path.join(outdir, f"{metric}_{mode}_{dist}.dat")
            with open(path, "w") as fh:
                fh.write("# K " + " ".join(labels) + "\n")
                for K in sorted(table):
                    vals = [f"{table[K][lab]:.6g}" if lab in table[K] else "NaN"
                            for lab in labels]
                    fh.write(f"{K} " + " ".join(vals) + "\n")
            paths.append(path)
    return paths


def render_report(records, outdir, sweep=None):
    """Write every figure available for ``records`` (and ``sweep``)."""
    paths = plot_timings(records, outdir)
    paths += plot_totals(records, outdir)
    paths += plot_accesses(records, outdir)
    if sweep:
        paths.append(plot_bitrate_sweep(sweep, outdir))
    return paths

import os

import numpy as np
import pytest

from ringcoder.cli import main
from ringcoder.coder import read_rsym, write_rsym


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def geo(tmp_path):
    path = tmp_path / "g.rsym"
    assert run("gen", "--dist", "geometric", "--K", 32, "--N", 100_000,
               "--out", path) == 0
    return path


def test_gen_file_size(geo, capsys):
    assert os.path.getsize(geo) == 14 + 2 * 100_000
    syms, K = read_rsym(geo)
    assert K == 32 and syms.size == 100_000


def test_gen_prints_entropy(tmp_path, capsys):
    run("gen", "--dist", "geometric", "--K", 32, "--N", 10, "--out", tmp_path / "x")
    out = capsys.readouterr().out
    line = next(ln for ln in out.splitlines() if ln.startswith("source entropy"))
    assert float(line.split()[2]) == pytest.approx(2.9783, abs=1e-4)


def test_gen_empty_and_bad_K(tmp_path):
    path = tmp_path / "e.rsym"
    assert run("gen", "--dist", "uniform", "--K", 2, "--N", 0, "--out", path) == 0
    assert os.path.getsize(path) == 14
    assert run("gen", "--K", 70000, "--N", 5, "--out", path) == 2


def test_gen_unwritable(tmp_path):
    assert run("gen", "--K", 4, "--N", 5, "--out", tmp_path / "no" / "x") == 2


def test_encode_decode_all_searches(geo, tmp_path, capsys):
    enc = tmp_path / "g.rcrb"
    assert run("encode", "--mode", "adaptive", "--model", "linear", "--search",
               "fwd", "--in", geo, "--out", enc) == 0
    outs = []
    for search in ("fwd", "log", "tab"):
        dst = tmp_path / f"{search}.rsym"
        assert run("decode", "--in", enc, "--out", dst, "--search", search) == 0
        outs.append(dst.read_bytes())
    assert outs[0] == outs[1] == outs[2] == geo.read_bytes()


def test_decode_needs_no_flags(geo, tmp_path):
    enc = tmp_path / "g.rcrb"
    run("encode", "--label", "logBI", "--in", geo, "--out", enc)
    assert run("decode", "--in", enc, "--out", tmp_path / "d.rsym") == 0
    assert (tmp_path / "d.rsym").read_bytes() == geo.read_bytes()


def test_static_encode_reports_small_error(geo, tmp_path, capsys):
    capsys.readouterr()
    assert run("encode", "--mode", "static", "--total-bits", 13, "--in", geo,
               "--out", tmp_path / "s.rcrb") == 0
    out = capsys.readouterr().out
    err = float(out.split("error")[-1].split("%")[0])
    assert abs(err) <= 0.1


def test_encode_symbol_out_of_range(tmp_path, capsys):
    src = tmp_path / "bad.rsym"
    write_rsym(src, [0, 1, 2, 3], 4)
    data = bytearray(src.read_bytes())
    data[14 + 2 * 2] = 9
    src.write_bytes(bytes(data))
    assert run("encode", "--in", src, "--out", tmp_path / "o") == 4
    assert "position 2" in capsys.readouterr().err


def test_invalid_label(geo, tmp_path):
    for label in ("tabRingShiftBI", "tabShift"):
        assert run("encode", "--label", label, "--in", geo,
                   "--out", tmp_path / "o") == 2
    assert run("encode", "--model", "linear", "--shift", "--in", geo,
               "--out", tmp_path / "o") == 2


def test_decode_format_errors(geo, tmp_path):
    enc = tmp_path / "g.rcrb"
    run("encode", "--in", geo, "--out", enc)
    data = enc.read_bytes()
    (tmp_path / "t").write_bytes(data[:len(data) // 2])
    assert run("decode", "--in", tmp_path / "t", "--out", tmp_path / "o") == 3
    (tmp_path / "m").write_bytes(b"XX" + data[2:])
    assert run("decode", "--in", tmp_path / "m", "--out", tmp_path / "o") == 3


def test_argparse_usage_exit():
    with pytest.raises(SystemExit) as exc:
        main(["encode"])
    assert exc.value.code == 2


def test_raw_bytes_roundtrip(tmp_path):
    src = tmp_path / "blob.bin"
    src.write_bytes(bytes(range(256)) * 20 + b"hello world" * 50)
    enc = tmp_path / "blob.rcrb"
    assert run("encode", "--raw-bytes", "--in", src, "--out", enc) == 0
    dst = tmp_path / "blob.out"
    assert run("decode", "--raw-bytes", "--in", enc, "--out", dst) == 0
    assert dst.read_bytes() == src.read_bytes()
    assert run("verify", "--raw-bytes", "--all", "--in", src) == 0


def test_verify(geo, capsys):
    assert run("verify", "--in", geo) == 0
    assert run("verify", "--all", "--in", geo) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 19 and "FAIL" not in out


def test_verify_fuzz_cases(tmp_path):
    rng = np.random.default_rng(0)
    path = tmp_path / "f.rsym"
    for n in range(25):
        K = int(rng.integers(1, 300))
        write_rsym(path, rng.integers(0, K, int(rng.integers(0, 300))), K)
        assert run("verify", "--all", "--total-bits", 9, "--in", path) == 0


def test_bench_outputs(tmp_path, capsys):
    csv_path = tmp_path / "b.csv"
    assert run("bench", "--K", 4, 8, "--N", 2000, "--repeats", 1,
               "--labels", "tab", "tabRingShift", "--quiet", "--sweep",
               "--plot", tmp_path / "fig", "--gnuplot", tmp_path / "dat",
               "--out", csv_path) == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("label,K,dist,mode,N,")
    # 2 labels x 2 modes x 2 K x 2 distributions
    assert len(lines) == 1 + 16
    assert (tmp_path / "b_total.csv").exists()
    assert (tmp_path / "b_bitrate.csv").exists()
    figs = os.listdir(tmp_path / "fig")
    assert "bitrate_error.png" in figs and "accesses_uniform.png" in figs
    assert all(os.path.getsize(tmp_path / "fig" / f) > 1000 for f in figs)
    dat = (tmp_path / "dat" / "cum_writes_per_sym_adaptive_uniform.dat").read_text()
    assert dat.splitlines()[0].startswith("# K ")


def test_bench_counter_only_parallel(tmp_path):
    assert run("bench", "--mode", "adaptive", "--K", 4, "--N", 500,
               "--no-timing", "--jobs", 2, "--quiet",
               "--out", tmp_path / "c.csv") == 0
    assert run("bench", "--K", 4, "--N", 10, "--jobs", 2,
               "--out", tmp_path / "c.csv") == 2
    assert run("bench", "--K", 4, "--N", 10, "--labels", "nope",
               "--out", tmp_path / "c.csv") == 2

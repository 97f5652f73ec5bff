import json
import subprocess
import sys

import numpy as np
import pytest
from click.testing import CliRunner

from fesprint.cli import main
from fesprint.ingest import TimeSeries, load_timeseries, write_timeseries
from fesprint.spectral import read_spectrum
from fesprint.synth import SpectrumSpec

FS = 1000.0
EDGES = np.geomspace(FS / 256, FS / 4, 6).tolist()
BAND = [str(EDGES[0]), str(EDGES[-1])]
ALTERNATING = SpectrumSpec.from_exponents(EDGES, [-1.3, -0.7, -1.3, -0.7, -0.7])


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, args, env=None):
    return runner.invoke(main, [str(a) for a in args], env=env)


def synth_file(runner, tmp_path, spec, seed, name=None, n=2**19):
    out = tmp_path / (name or f"s{seed}.bin")
    res = invoke(runner, ["synth", "--spec", spec.to_json(), "-n", n, "--rate", FS, "--seed", seed, "-o", out])
    assert res.exit_code == 0, res.output
    return out


def test_synth_deterministic_and_summary(runner, tmp_path):
    a = synth_file(runner, tmp_path, ALTERNATING, 7, "a.bin", n=4096)
    b = synth_file(runner, tmp_path, ALTERNATING, 7, "b.bin", n=4096)
    assert a.read_bytes() == b.read_bytes()
    res = invoke(runner, ["synth", "--spec", ALTERNATING.to_json(), "-n", 4096, "--rate", FS, "--seed", 7, "-o", tmp_path / "c.csv"])
    summary = json.loads(res.stdout)
    ts = load_timeseries(tmp_path / "c.csv", "csv", FS)
    assert summary["mean"] == pytest.approx(ts.samples.mean(), abs=1e-12)
    assert summary["variance"] == pytest.approx(ts.samples.var(), rel=1e-12)


def test_synth_invalid_spec(runner, tmp_path):
    res = invoke(runner, ["synth", "--spec", '{"bands": [[10, 5, -1]]}', "-n", 4096, "--rate", FS, "--seed", 0, "-o", tmp_path / "x.bin"])
    assert res.exit_code == 2
    assert "InvalidSpec" in res.stderr


def test_pds_white_noise(runner, tmp_path):
    rng = np.random.default_rng(0)
    src = write_timeseries(TimeSeries(rng.standard_normal(2**18), FS), tmp_path / "white.csv")
    out = tmp_path / "white_pds.csv"
    res = invoke(runner, ["pds", src, "--rate", FS, "-o", out])
    assert res.exit_code == 0, res.stderr
    sp = read_spectrum(out)
    assert sp.psd.mean() == pytest.approx(2 / FS, rel=0.03)
    plot = (tmp_path / "white_pds.csv.loglog.dat").read_text().splitlines()
    assert len([ln for ln in plot if not ln.startswith("#")]) == len(sp)


def test_pds_errors(runner, tmp_path):
    res = invoke(runner, ["pds", tmp_path / "nope.csv", "--rate", FS, "-o", tmp_path / "o.csv"])
    assert res.exit_code == 2
    assert "nope.csv" in res.stderr
    src = write_timeseries(TimeSeries(np.random.default_rng(1).standard_normal(4096), FS), tmp_path / "w.csv")
    res = invoke(runner, ["pds", src, "--rate", FS, "--band", 10, 600, "-o", tmp_path / "o.csv"])
    assert res.exit_code == 2
    assert "InvalidBand" in res.stderr


def test_fingerprint_binary_alternating(runner, tmp_path):
    src = synth_file(runner, tmp_path, ALTERNATING, 3, n=2**20)
    bars = tmp_path / "bars.csv"
    res = invoke(runner, ["fingerprint", src, "--rate", FS, "--band", *BAND, "--bars", bars])
    assert res.exit_code == 0, res.stderr
    doc = json.loads(res.stdout)
    assert doc["symbols"] == [-1, 1, -1, 1, 1]
    assert doc["kind"] == "binary"
    rows = bars.read_text().splitlines()
    assert rows[0].startswith("source,band,f_lo_hz")
    assert len(rows) == 6
    assert "band 0" in res.stderr


def test_fingerprint_ternary_self_reference(runner, tmp_path):
    src = synth_file(runner, tmp_path, ALTERNATING, 4)
    res = invoke(runner, ["fingerprint", src, "--mode", "ternary", "--reference", src, "--rate", FS, "--band", *BAND])
    assert res.exit_code == 0, res.stderr
    assert json.loads(res.stdout)["symbols"] == [0, 0, 0, 0, 0]


def test_fingerprint_ternary_needs_reference(runner, tmp_path):
    src = synth_file(runner, tmp_path, ALTERNATING, 4, n=4096)
    res = invoke(runner, ["fingerprint", src, "--mode", "ternary", "--rate", FS, "--band", *BAND])
    assert res.exit_code == 2


def test_fingerprint_from_spectrum_file_and_config(runner, tmp_path):
    src = synth_file(runner, tmp_path, ALTERNATING, 9)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"schema_version": 1, "band": [EDGES[0], EDGES[-1]], "n_bands": 5}))
    res = invoke(runner, ["pds", src, "--rate", FS, "-o", tmp_path / "sp.json"])
    assert res.exit_code == 0
    a = invoke(runner, ["fingerprint", tmp_path / "sp.json", "--config", cfg, "--quiet"])
    b = invoke(runner, ["fingerprint", src, "--rate", FS, "--config", cfg, "--quiet"])
    assert a.exit_code == 0 and b.exit_code == 0, a.stderr + b.stderr
    assert json.loads(a.stdout)["local_slopes"] == json.loads(b.stdout)["local_slopes"]
    # flags win over the config file
    c = invoke(runner, ["fingerprint", src, "--rate", FS, "--config", cfg, "--n-bands", 3, "--quiet"])
    assert json.loads(c.stdout)["n_bands"] == 3


def test_compare_and_entropy(runner, tmp_path):
    paths = []
    for seed in (1, 2):
        src = synth_file(runner, tmp_path, ALTERNATING, seed)
        out = tmp_path / f"fp{seed}.json"
        res = invoke(runner, ["fingerprint", src, "--rate", FS, "--band", *BAND, "-o", out, "--quiet"])
        assert res.exit_code == 0
        paths.append(out)
    rep = json.loads(invoke(runner, ["compare", *paths]).stdout)
    assert rep["mean_pairwise_similarity"] >= 0.8
    same = json.loads(invoke(runner, ["compare", paths[0], paths[0]]).stdout)
    assert same["mean_pairwise_similarity"] == 1.0
    text = invoke(runner, ["compare", "--text", *paths]).stdout
    assert "mean pairwise similarity" in text

    doc = json.loads(paths[0].read_text())
    doc["symbols"] = [-s for s in doc["symbols"]]
    comp = tmp_path / "complement.json"
    comp.write_text(json.dumps(doc))
    assert json.loads(invoke(runner, ["compare", paths[0], comp]).stdout)["mean_pairwise_similarity"] == 0.0

    ent = json.loads(invoke(runner, ["entropy", paths[0], comp]).stdout)
    assert ent["bits_per_symbol"] == pytest.approx(1.0)
    res = invoke(runner, ["compare", paths[0]])
    assert res.exit_code == 2


def test_entropy_uniform_ternary_fixture(runner, tmp_path):
    base = {"kind": "ternary", "f_lo_hz": 1.0, "f_hi_hz": 1000.0, "n_bands": 3, "slope_tolerance": 0.1, "reference_label": "r"}
    files = []
    for i, sym in enumerate([[-1, 0, 1], [0, 1, -1], [1, -1, 0]]):
        p = tmp_path / f"t{i}.json"
        p.write_text(json.dumps({**base, "symbols": sym}))
        files.append(p)
    ent = json.loads(invoke(runner, ["entropy", *files]).stdout)
    assert ent["bits_per_symbol"] == pytest.approx(1.58496, abs=1e-5)
    assert ent["bits_per_symbol"] == pytest.approx(np.log2(3), abs=1e-9)
    flat = tmp_path / "flat.json"
    flat.write_text(json.dumps({**base, "symbols": [1, 1, 1]}))
    assert json.loads(invoke(runner, ["entropy", flat, flat]).stdout)["bits_per_symbol"] == 0.0


def test_ref_workflow(runner, tmp_path):
    lib = tmp_path / "lib.json"
    ref = synth_file(runner, tmp_path, ALTERNATING, 21)
    sample = synth_file(runner, tmp_path, ALTERNATING, 22)
    res = invoke(runner, ["--library", lib, "ref", "add", "lab-air", ref, "--rate", FS, "--band", *BAND, "--meta", "site=lab"])
    assert res.exit_code == 0, res.stderr
    assert json.loads(invoke(runner, ["--library", lib, "ref", "list"]).stdout) == ["lab-air"]

    # env var selects the library when --library is absent
    listed = invoke(runner, ["ref", "list"], env={"FES_LIBRARY": str(lib)})
    assert json.loads(listed.stdout) == ["lab-air"]

    res = invoke(runner, ["--library", lib, "fingerprint", sample, "--mode", "ternary", "--reference", "lab-air", "--rate", FS, "--band", *BAND])
    assert res.exit_code == 0, res.stderr
    doc = json.loads(res.stdout)
    assert doc["reference_label"] == "lab-air"
    assert set(doc["symbols"]) <= {-1, 0, 1}

    res = invoke(runner, ["--library", lib, "fingerprint", sample, "--mode", "ternary", "--reference", "lab-air", "--rate", FS, "--band", *BAND, "--n-bands", 4])
    assert res.exit_code == 2
    assert "PartitionMismatch" in res.stderr

    res = invoke(runner, ["--library", lib, "fingerprint", sample, "--mode", "ternary", "--reference", "nobody", "--rate", FS, "--band", *BAND])
    assert res.exit_code == 2
    assert "NotFound" in res.stderr

    assert invoke(runner, ["--library", lib, "ref", "remove", "lab-air"]).exit_code == 0
    assert invoke(runner, ["--library", lib, "ref", "remove", "lab-air"]).exit_code == 2


def test_ref_round_trip_across_processes(runner, tmp_path):
    lib = tmp_path / "lib.json"
    src = synth_file(runner, tmp_path, ALTERNATING, 31)
    res = invoke(runner, ["--library", lib, "ref", "add", "tsa", src, "--rate", FS, "--band", *BAND])
    assert res.exit_code == 0
    stored = json.loads(invoke(runner, ["--library", lib, "ref", "get", "tsa"]).stdout)
    proc = subprocess.run(
        [sys.executable, "-m", "fesprint", "--library", str(lib), "ref", "get", "tsa"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(proc.stdout) == stored


def test_jobs_batch_matches_sequential(runner, tmp_path):
    srcs = [synth_file(runner, tmp_path, ALTERNATING, s, n=2**16) for s in range(4)]
    seq = invoke(runner, ["fingerprint", *srcs, "--rate", FS, "--band", *BAND, "--quiet"])
    par = invoke(runner, ["fingerprint", *srcs, "--rate", FS, "--band", *BAND, "--quiet", "--jobs", 3])
    assert seq.exit_code == 0 and par.exit_code == 0
    assert seq.stdout == par.stdout
    assert len(json.loads(seq.stdout)) == 4

"""
Driving the pipeline from the shell
===================================

The same steps through the ``fesprint`` command. Each call below is what
you would type in a terminal; here they run in a scratch directory.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np


def fesprint(*args):
    cmd = [sys.executable, "-m", "fesprint", *map(str, args)]
    print("$ fesprint", " ".join(map(str, args)))
    out = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    print(out.rstrip()[:400])
    return out


fs = 1000
lo, hi = fs / 256, fs / 4
edges = np.geomspace(lo, hi, 6).tolist()
spec = json.dumps({"bands": [[a, b, -1.0] for a, b in zip(edges[:-1], edges[1:])]})
odor = json.dumps({"bands": [[a, b, e] for a, b, e in zip(edges[:-1], edges[1:], [-0.4, -1.5, -0.5, -1.6, -0.5])]})

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    lib = tmp / "refs.json"
    band = ["--band", lo, hi, "--rate", fs]

    fesprint("synth", "--spec", spec, "-n", 2**20, "--rate", fs, "--seed", 1, "-o", tmp / "air.bin")
    fesprint("synth", "--spec", odor, "-n", 2**20, "--rate", fs, "--seed", 2, "-o", tmp / "odor.bin")

    fesprint("pds", tmp / "odor.bin", *band, "-o", tmp / "odor_pds.csv")

    # store clean air as a named reference, then fingerprint the odor against it
    fesprint("--library", lib, "ref", "add", "air", tmp / "air.bin", *band)
    fesprint("--library", lib, "ref", "list")
    fesprint("--library", lib, "fingerprint", tmp / "odor.bin", *band,
             "--mode", "ternary", "--reference", "air", "--quiet")

    # binary codes for two takes of the odor, then how well they agree
    fesprint("synth", "--spec", odor, "-n", 2**20, "--rate", fs, "--seed", 3, "-o", tmp / "odor2.bin")
    for name in ("odor", "odor2"):
        fesprint("fingerprint", tmp / f"{name}.bin", *band, "--quiet", "-o", tmp / f"{name}_fp.json")
    fesprint("compare", "--text", tmp / "odor_fp.json", tmp / "odor2_fp.json")
    fesprint("entropy", tmp / "odor_fp.json", tmp / "odor2_fp.json")

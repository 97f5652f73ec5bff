"""
From raw noise to a binary fingerprint
======================================

Synthesize a sensor-like noise record, estimate its power density
spectrum, measure log-log slopes over five sub-bands and encode them.
"""

import numpy as np

import fesprint as fp

# a 1 kHz record whose spectrum alternates between steep and shallow bands
fs = 1000.0
edges = np.geomspace(fs / 256, fs / 4, 6)
spec = fp.SpectrumSpec.from_exponents(edges, [-1.3, -0.7, -1.3, -0.7, -0.7])
ts = fp.synthesize(spec, n_samples=2**20, sample_rate_hz=fs, seed=1)
print(f"{len(ts.samples)} samples, {ts.duration_s:.0f} s, variance {ts.samples.var():.4f}")

# Welch estimate with 1024-sample Hann segments and 50 % overlap
sp = fp.estimate_pds(fp.detrend(ts), fp.WelchConfig())
print(f"{len(sp)} frequency bins from {sp.frequencies_hz[0]:.3f} to {sp.frequencies_hz[-1]:.1f} Hz")

# chord slopes over a log-equal partition of the band
part = fp.make_partition(edges[0], edges[-1], 5)
profile = fp.local_slopes(sp, part)
print("global slope:", round(profile.global_slope, 3))
print("local slopes:", np.round(profile.local_slopes, 3))

# log-equal bands telescope, so the local slopes average to the global one
print("mean of local slopes:", round(float(np.mean(profile.local_slopes)), 3))

binary = fp.binary_fingerprint(profile)
print("binary fingerprint:", binary.symbols.tolist())
for row in binary.bar_rows():
    print(row)

"""
Ternary fingerprints against a reference
========================================

A binary fingerprint only says whether each band is steeper or shallower
than the record as a whole. A ternary fingerprint compares each band with
the same band of a reference record and adds a "no change" symbol.
"""

import numpy as np

import fesprint as fp

fs = 1000.0
edges = np.geomspace(fs / 256, fs / 4, 6)
part = fp.make_partition(edges[0], edges[-1], 5)
cfg = fp.WelchConfig()

reference_spec = fp.SpectrumSpec.from_exponents(edges, [-1.0, -1.2, -1.0, -1.1, -1.4])
sample_spec = fp.SpectrumSpec.from_exponents(edges, [-0.5, -1.8, -1.0, -0.6, -0.9])


def measured(spec, seed):
    ts = fp.synthesize(spec, n_samples=2**21, sample_rate_hz=fs, seed=seed)
    return fp.local_slopes(fp.estimate_pds(fp.detrend(ts), cfg), part)


reference = measured(reference_spec, seed=10)
sample = measured(sample_spec, seed=11)

# slope differences within +-0.1 count as unchanged
tern = fp.ternary_fingerprint(sample, reference, tolerance=0.1)
print("slope differences:", np.round(sample.local_slopes - reference.local_slopes, 3))
print("ternary fingerprint:", tern.symbols.tolist())

# closed-form answer for the same pair of spectra
expected = fp.expected_fingerprint(sample_spec, part, "ternary", reference_spec, 0.1)
print("analytic fingerprint:", expected.symbols.tolist())

# the sample's own binary code for comparison
print("binary fingerprint:", fp.binary_fingerprint(sample).symbols.tolist())

# a record compared with itself is all zeros
print("self-reference:", fp.ternary_fingerprint(reference, reference).symbols.tolist())

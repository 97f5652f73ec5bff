import numpy as np
import pytest
from scipy import integrate

from fesprint.errors import BandExceedsNyquist, InvalidSpec, OutOfRange
from fesprint.fingerprint import global_slope, make_partition
from fesprint.spectral import estimate_pds, restrict_band
from fesprint.synth import SpectrumSpec, expected_fingerprint, expected_profile, load_spec, synthesize

FS = 1000.0


def tabulated_log_psd(spec, f):
    """Brute-force S_target: walk the bands and chain amplitudes explicitly."""
    amp = spec.amplitude_at_f_lo
    out = np.empty_like(f)
    for i, (lo, hi, b) in enumerate(spec.bands):
        a0 = amp if spec.continuity else spec.amplitude_at_f_lo
        mask = (f >= lo) & ((f < hi) if i < len(spec.bands) - 1 else (f <= hi))
        out[mask] = np.log10(a0 * (f[mask] / lo) ** b)
        amp = a0 * (hi / lo) ** b
    return out


def dense_chord_slopes(spec, partition, per_decade=10_000):
    n = int(np.ceil(np.log10(spec.f_hi / spec.f_lo) * per_decade)) + 1
    f = np.geomspace(spec.f_lo, spec.f_hi, n)
    lf, ls = np.log10(f), tabulated_log_psd(spec, f)
    v = np.interp(partition.log_edges, lf, ls)
    le = partition.log_edges
    return np.diff(v) / np.diff(le), (v[-1] - v[0]) / (le[-1] - le[0])


def test_spec_validation():
    with pytest.raises(InvalidSpec):
        SpectrumSpec(((1.0, 10.0, -1.0), (11.0, 20.0, -1.0)))
    with pytest.raises(InvalidSpec):
        SpectrumSpec(((10.0, 1.0, -1.0),))
    with pytest.raises(InvalidSpec):
        SpectrumSpec(((1.0, 10.0, float("nan")),))
    with pytest.raises(InvalidSpec):
        SpectrumSpec(((1.0, 10.0, -1.0),), amplitude_at_f_lo=0.0)
    with pytest.raises(InvalidSpec):
        SpectrumSpec(())
    with pytest.raises(InvalidSpec):
        load_spec('{"bands": [[1, 2]]}')
    with pytest.raises(InvalidSpec):
        load_spec("{not json")


def test_synthesize_errors():
    spec = SpectrumSpec(((1.0, 600.0, -1.0),))
    with pytest.raises(BandExceedsNyquist):
        synthesize(spec, 4096, FS, 0)
    with pytest.raises(InvalidSpec):
        synthesize(SpectrumSpec(((1.0, 100.0, -1.0),)), 1000, FS, 0)


def test_flat_spec_gives_flat_pds():
    spec = SpectrumSpec(((1.0, FS / 2, 0.0),), amplitude_at_f_lo=3e-3)
    for seed in (0, 1, 2**63 + 5):
        sp = restrict_band(estimate_pds(synthesize(spec, 2**18, FS, seed)), 5.0, 450.0)
        assert sp.psd.mean() == pytest.approx(3e-3, rel=0.03)


def test_single_exponent_global_slope():
    spec = SpectrumSpec(((FS / 1000, FS / 8, -1.0),))
    sp = estimate_pds(synthesize(spec, 2**20, FS, 42))
    assert global_slope(sp, make_partition(FS / 1000, FS / 8)) == pytest.approx(-1.0, abs=0.1)


def test_determinism():
    spec = SpectrumSpec.from_exponents([1, 10, 100], [-0.5, -1.5])
    a = synthesize(spec, 8192, FS, 123)
    b = synthesize(spec, 8192, FS, 123)
    assert a.samples.tobytes() == b.samples.tobytes()
    assert a.samples.tobytes() != synthesize(spec, 8192, FS, 124).samples.tobytes()


def test_variance_matches_integrated_target():
    spec = SpectrumSpec.from_exponents([2.0, 20.0, 200.0], [-0.5, -1.5], amplitude_at_f_lo=1e-2)
    n = 2**18
    ts = synthesize(spec, n, FS, 8)

    def s(f):
        return 10 ** tabulated_log_psd(spec, np.atleast_1d(np.clip(f, spec.f_lo, spec.f_hi)))[0]

    target = sum(integrate.quad(s, a, b, limit=200)[0] for a, b in [(0, 2), (2, 20), (20, 200), (200, FS / 2)])
    assert ts.samples.var() == pytest.approx(target, rel=0.05)
    assert abs(ts.samples.mean()) < 1e-12


def test_expected_profile_examples():
    spec = SpectrumSpec(((1.0, 1000.0, -2.0),))
    prof = expected_profile(spec, make_partition(3.0, 700.0, 4))
    np.testing.assert_allclose(prof.local_slopes, -2.0, atol=1e-12)
    assert prof.global_slope == pytest.approx(-2.0, abs=1e-12)

    spec2 = SpectrumSpec.from_exponents([1.0, 10.0, 100.0], [-0.5, -1.5])
    prof2 = expected_profile(spec2, make_partition(1.0, 100.0, 2))
    np.testing.assert_allclose(prof2.local_slopes, [-0.5, -1.5], atol=1e-12)
    assert prof2.global_slope == pytest.approx(-1.0, abs=1e-12)

    with pytest.raises(OutOfRange):
        expected_profile(spec2, make_partition(0.5, 100.0, 2))


@pytest.mark.parametrize("continuity", [True, False])
def test_expected_profile_against_dense_tabulation(continuity):
    edges = np.geomspace(1.0, 1e5, 6)
    spec = SpectrumSpec(
        tuple((edges[i], edges[i + 1], b) for i, b in enumerate([-0.2, -0.8, -1.0, -1.4, -2.1])),
        amplitude_at_f_lo=0.7,
        continuity=continuity,
    )
    # partition offset by half a band
    half = 10**0.5
    part = make_partition(edges[0] * half, edges[-1] / half, 4)
    prof = expected_profile(spec, part)
    local, glob = dense_chord_slopes(spec, part)
    np.testing.assert_allclose(prof.local_slopes, local, atol=1e-6)
    assert prof.global_slope == pytest.approx(glob, abs=1e-6)


def test_expected_fingerprints():
    edges = np.geomspace(1.0, 1e5, 6)
    part = make_partition(1.0, 1e5, 5)
    alternating = SpectrumSpec.from_exponents(edges, [-1.3, -0.7, -1.3, -0.7, -0.7])
    assert expected_fingerprint(alternating, part).symbols.tolist() == [-1, 1, -1, 1, 1]
    assert expected_fingerprint(alternating, part, "ternary", alternating).symbols.tolist() == [0] * 5

    sample = SpectrumSpec.from_exponents(edges, [-0.5, -1.8, -1.0, -0.6, -0.9])
    ref = SpectrumSpec.from_exponents(edges, [-1.0, -1.2, -1.0, -1.1, -1.4])
    fp = expected_fingerprint(sample, part, "ternary", ref, tolerance=0.1)
    assert fp.symbols.tolist() == [1, -1, 0, 1, 1]
    with pytest.raises(InvalidSpec):
        expected_fingerprint(sample, part, "ternary")


def test_spec_json_round_trip(tmp_path):
    spec = SpectrumSpec.from_exponents([1.5, 15.0, 150.0], [-0.25, -1.75], amplitude_at_f_lo=2.5e-4)
    assert SpectrumSpec.from_json(spec.to_json()) == spec
    path = tmp_path / "spec.json"
    path.write_text(spec.to_json())
    assert load_spec(path) == spec
    assert load_spec(spec.to_json()) == spec

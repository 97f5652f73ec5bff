"""Synthetic fluctuation records with prescribed piecewise power-law spectra.

These serve as ground truth: :func:`synthesize` produces noise whose
expected spectrum is known exactly, and :func:`expected_profile` gives the
chord slopes of that spectrum in closed form.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BandExceedsNyquist, InvalidSpec, OutOfRange
from .fingerprint import BINARY, DEFAULT_TOLERANCE, TERNARY, SlopeProfile, binary_fingerprint, ternary_fingerprint
from .ingest import TimeSeries


@dataclass(frozen=True)
class SpectrumSpec:
    """Piecewise power law ``S(f)`` over contiguous bands.

    ``bands`` holds ``(f_lo, f_hi, exponent)`` triples. With ``continuity``
    the segments join without jumps in log-log, anchored at
    ``amplitude_at_f_lo`` on the first edge. Without it every segment starts
    again from ``amplitude_at_f_lo`` at its own lower edge.

    Outside its range the spectrum is held at the boundary values.
    """

    bands: tuple
    amplitude_at_f_lo: float = 1.0
    continuity: bool = True

    def __post_init__(self):
        try:
            bands = tuple((float(lo), float(hi), float(b)) for lo, hi, b in self.bands)
        except (TypeError, ValueError):
            raise InvalidSpec(f"bands must be (f_lo, f_hi, exponent) triples, got {self.bands!r}") from None
        if not bands:
            raise InvalidSpec("spec needs at least one band")
        for i, (lo, hi, b) in enumerate(bands):
            if not (np.isfinite(lo) and np.isfinite(hi) and 0 < lo < hi):
                raise InvalidSpec(f"band {i}: need 0 < f_lo < f_hi, got ({lo}, {hi})")
            if not np.isfinite(b):
                raise InvalidSpec(f"band {i}: exponent must be finite, got {b}")
            if i and bands[i - 1][1] != lo:
                raise InvalidSpec(f"band {i} starts at {lo} Hz but band {i - 1} ends at {bands[i - 1][1]} Hz")
        if not (np.isfinite(self.amplitude_at_f_lo) and self.amplitude_at_f_lo > 0):
            raise InvalidSpec(f"amplitude_at_f_lo must be positive, got {self.amplitude_at_f_lo}")
        object.__setattr__(self, "bands", bands)
        object.__setattr__(self, "amplitude_at_f_lo", float(self.amplitude_at_f_lo))
        object.__setattr__(self, "continuity", bool(self.continuity))

    @classmethod
    def from_exponents(cls, edges, exponents, amplitude_at_f_lo=1.0):
        """Continuous spec from ``n + 1`` edges and ``n`` exponents."""
        edges = [float(e) for e in edges]
        if len(edges) != len(exponents) + 1:
            raise InvalidSpec(f"{len(edges)} edges do not match {len(exponents)} exponents")
        bands = [(edges[i], edges[i + 1], exponents[i]) for i in range(len(exponents))]
        return cls(tuple(bands), amplitude_at_f_lo)

    @property
    def f_lo(self):
        return self.bands[0][0]

    @property
    def f_hi(self):
        return self.bands[-1][1]

    @property
    def edges(self):
        return np.array([b[0] for b in self.bands] + [self.f_hi])

    @property
    def exponents(self):
        return np.array([b[2] for b in self.bands])

    def _anchors(self):
        # log10 S at the lower edge of each band
        la = np.log10(self.amplitude_at_f_lo)
        if not self.continuity:
            return np.full(len(self.bands), la)
        widths = np.diff(np.log10(self.edges))
        return la + np.concatenate([[0.0], np.cumsum(self.exponents[:-1] * widths[:-1])])

    def log_psd(self, f):
        """log10 of the target spectrum at ``f`` (scalar or array)."""
        f = np.asarray(f, dtype=np.float64)
        lf = np.log10(np.clip(f, self.f_lo, self.f_hi))
        log_edges = np.log10(self.edges)
        idx = np.clip(np.searchsorted(log_edges, lf, side="right") - 1, 0, len(self.bands) - 1)
        return self._anchors()[idx] + self.exponents[idx] * (lf - log_edges[idx])

    def psd(self, f):
        return 10.0 ** self.log_psd(f)

    def to_dict(self):
        return {
            "bands": [list(b) for b in self.bands],
            "amplitude_at_f_lo": self.amplitude_at_f_lo,
            "continuity": self.continuity,
        }

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or "bands" not in d:
            raise InvalidSpec("spec must be an object with a 'bands' list")
        return cls(tuple(d["bands"]), d.get("amplitude_at_f_lo", 1.0), d.get("continuity", True))

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"spec is not valid JSON: {exc}") from None


def load_spec(source):
    """Parse a spec given inline as JSON text or as a path to a JSON file."""
    text = str(source).strip()
    if not text.startswith("{"):
        path = Path(text)
        if not path.exists():
            raise FileNotFoundError(f"no such spec file: {path}")
        text = path.read_text(encoding="utf-8")
    return SpectrumSpec.from_json(text)


def synthesize(spec, n_samples, sample_rate_hz, seed):
    """Gaussian noise whose expected one-sided spectrum is ``spec``.

    White noise is drawn in the time domain, transformed, and each rFFT
    coefficient (normalized to unit variance) is scaled by
    ``sqrt(S(f) * fs * n / 2)``. The DC coefficient is zeroed, so the output
    has zero mean and its variance approximates the integral of ``S`` over
    ``(0, fs / 2]``.
    """
    if not sample_rate_hz > 0:
        raise InvalidSpec(f"sample rate must be positive, got {sample_rate_hz}")
    if int(n_samples) != n_samples or n_samples < 1024:
        raise InvalidSpec(f"n_samples must be an integer >= 1024, got {n_samples}")
    if spec.f_hi > sample_rate_hz / 2:
        raise BandExceedsNyquist(f"spec reaches {spec.f_hi} Hz, above Nyquist {sample_rate_hz / 2} Hz")
    n = int(n_samples)
    rng = np.random.default_rng(np.uint64(seed))
    coeffs = np.fft.rfft(rng.standard_normal(n)) / np.sqrt(n)
    freqs = np.fft.rfftfreq(n, d=1.0 / sample_rate_hz)
    gain = np.zeros_like(freqs)
    gain[1:] = np.sqrt(spec.psd(freqs[1:]) * sample_rate_hz * n / 2)
    samples = np.fft.irfft(coeffs * gain, n)
    source = json.dumps({"synth": spec.to_dict(), "seed": int(seed), "n_samples": n})
    return TimeSeries(samples, sample_rate_hz, label=f"synth-{int(seed)}", source=source)


def expected_profile(spec, partition, label="expected"):
    """Exact chord slopes of ``spec`` over ``partition``."""
    if partition.f_lo < spec.f_lo or partition.f_hi > spec.f_hi:
        raise OutOfRange(
            f"partition [{partition.f_lo:g}, {partition.f_hi:g}] Hz leaves spec range "
            f"[{spec.f_lo:g}, {spec.f_hi:g}] Hz"
        )
    values = spec.log_psd(partition.edges)
    log_edges = partition.log_edges
    local = np.diff(values) / np.diff(log_edges)
    overall = (values[-1] - values[0]) / (log_edges[-1] - log_edges[0])
    return SlopeProfile(partition, overall, local, label)


def expected_fingerprint(spec, partition, kind=BINARY, reference_spec=None, tolerance=DEFAULT_TOLERANCE):
    """Fingerprint of the ideal spectrum; ground truth for the estimation pipeline."""
    profile = expected_profile(spec, partition, label="expected")
    if kind == BINARY:
        return binary_fingerprint(profile)
    if kind == TERNARY:
        if reference_spec is None:
            raise InvalidSpec("ternary fingerprint needs reference_spec")
        reference = expected_profile(reference_spec, partition, label="expected-reference")
        return ternary_fingerprint(profile, reference, tolerance)
    raise ValueError(f"kind must be {BINARY!r} or {TERNARY!r}, got {kind!r}")

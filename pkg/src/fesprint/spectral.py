"""Power density spectrum estimation and log-log access."""

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import signal

from .errors import EmptyBand, InvalidConfig, NonpositivePsd, OutOfRange, ParseError, TooShort

WINDOWS = {"hann": "hann", "hamming": "hamming", "rectangular": "boxcar"}
SEGMENT_DETRENDS = {"none": False, "mean": "constant", "linear": "linear"}


@dataclass(frozen=True)
class WelchConfig:
    """Parameters of the Welch estimator.

    The overlap in samples is ``floor(overlap_fraction * segment_length)``.
    """

    segment_length: int = 1024
    overlap_fraction: float = 0.5
    window: str = "hann"
    per_segment_detrend: str = "mean"

    def __post_init__(self):
        n = self.segment_length
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise InvalidConfig(f"segment_length must be an integer, got {n!r}")
        if n < 16 or n & (n - 1):
            raise InvalidConfig(f"segment_length must be a power of two >= 16, got {n}")
        if not 0 <= self.overlap_fraction < 1:
            raise InvalidConfig(f"overlap_fraction must be in [0, 1), got {self.overlap_fraction}")
        if self.window not in WINDOWS:
            raise InvalidConfig(f"unknown window {self.window!r}; expected one of {sorted(WINDOWS)}")
        if self.per_segment_detrend not in SEGMENT_DETRENDS:
            raise InvalidConfig(
                f"unknown per_segment_detrend {self.per_segment_detrend!r}; "
                f"expected one of {sorted(SEGMENT_DETRENDS)}"
            )
        object.__setattr__(self, "segment_length", int(n))
        object.__setattr__(self, "overlap_fraction", float(self.overlap_fraction))

    @property
    def overlap_samples(self):
        return int(np.floor(self.overlap_fraction * self.segment_length))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(
                segment_length=int(d.get("segment_length", cls.segment_length)),
                overlap_fraction=float(d.get("overlap_fraction", cls.overlap_fraction)),
                window=str(d.get("window", cls.window)),
                per_segment_detrend=str(d.get("per_segment_detrend", cls.per_segment_detrend)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidConfig):
                raise
            raise InvalidConfig(str(exc)) from None


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    """One-sided power density spectrum, DC excluded.

    ``band`` records a :func:`restrict_band` call and ``points_per_decade`` a
    :func:`smooth_log` call; both are ``None`` for a raw estimate.
    """

    frequencies_hz: np.ndarray
    psd: np.ndarray
    config: WelchConfig = None
    label: str = ""
    band: tuple = None
    points_per_decade: int = None
    _log: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        f = np.array(self.frequencies_hz, dtype=np.float64).ravel()
        p = np.array(self.psd, dtype=np.float64).ravel()
        if f.size != p.size:
            raise ValueError(f"length mismatch: {f.size} frequencies, {p.size} psd values")
        if f.size < 2:
            raise EmptyBand(f"spectrum needs at least 2 bins, got {f.size}")
        if not (np.all(np.isfinite(f)) and f[0] > 0 and np.all(np.diff(f) > 0)):
            raise ValueError("frequencies must be finite, positive and strictly increasing")
        if not (np.all(np.isfinite(p)) and np.all(p >= 0)):
            raise ValueError("psd values must be finite and non-negative")
        f.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "frequencies_hz", f)
        object.__setattr__(self, "psd", p)
        if self.band is not None:
            object.__setattr__(self, "band", (float(self.band[0]), float(self.band[1])))

    def __len__(self):
        return self.frequencies_hz.size

    def __eq__(self, other):
        if not isinstance(other, PowerSpectrum):
            return NotImplemented
        return (
            np.array_equal(self.frequencies_hz, other.frequencies_hz)
            and np.array_equal(self.psd, other.psd)
            and self.config == other.config
            and self.label == other.label
            and self.band == other.band
            and self.points_per_decade == other.points_per_decade
        )

    def scaled(self, gain):
        """Copy with every psd value multiplied by ``gain``."""
        return replace(self, psd=self.psd * gain, _log=None)

    def total_power(self):
        """Trapezoidal integral of the psd over the frequency grid."""
        return float(np.trapezoid(self.psd, self.frequencies_hz))

    def to_dict(self):
        return {
            "schema_version": 1,
            "label": self.label,
            "config": None if self.config is None else self.config.to_dict(),
            "band": None if self.band is None else list(self.band),
            "points_per_decade": self.points_per_decade,
            "frequencies_hz": self.frequencies_hz.tolist(),
            "psd": self.psd.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        cfg = d.get("config")
        band = d.get("band")
        return cls(
            np.asarray(d["frequencies_hz"], dtype=np.float64),
            np.asarray(d["psd"], dtype=np.float64),
            config=None if cfg is None else WelchConfig.from_dict(cfg),
            label=d.get("label", ""),
            band=None if band is None else tuple(band),
            points_per_decade=d.get("points_per_decade"),
        )


def estimate_pds(ts, cfg=None):
    """Welch estimate of the one-sided power density spectrum of ``ts``.

    The output grid is ``k * fs / segment_length`` for
    ``k = 1 .. segment_length / 2``; the DC bin is dropped. Densities are
    normalized so that their integral over frequency approximates the
    variance of the (segment-detrended) signal.

    Raises
    ------
    TooShort
        When ``ts`` holds fewer samples than one segment.
    """
    cfg = cfg or WelchConfig()
    n = cfg.segment_length
    if len(ts) < n:
        raise TooShort(f"{len(ts)} samples is shorter than one segment ({n})")
    f, p = signal.welch(
        ts.samples,
        fs=ts.sample_rate_hz,
        window=WINDOWS[cfg.window],
        nperseg=n,
        noverlap=cfg.overlap_samples,
        detrend=SEGMENT_DETRENDS[cfg.per_segment_detrend],
        return_onesided=True,
        scaling="density",
        average="mean",
    )
    # scipy leaves the Nyquist bin single-sided; double it so the density is
    # one-sided everywhere (flat for white noise up to fs/2).
    p[-1] *= 2
    return PowerSpectrum(f[1:], p[1:], config=cfg, label=ts.label)


def restrict_band(sp, f_lo, f_hi):
    """Keep only the bins with ``f_lo <= f <= f_hi``."""
    f = sp.frequencies_hz
    keep = (f >= f_lo) & (f <= f_hi)
    if f_lo >= f_hi or np.count_nonzero(keep) < 2:
        raise EmptyBand(
            f"band [{f_lo:g}, {f_hi:g}] Hz keeps fewer than 2 bins of a spectrum "
            f"spanning [{f[0]:g}, {f[-1]:g}] Hz"
        )
    return replace(sp, frequencies_hz=f[keep], psd=sp.psd[keep], band=(f_lo, f_hi), _log=None)


def _log_arrays(sp):
    # Cached on the instance; spectra are immutable.
    if sp._log is None:
        with np.errstate(divide="ignore"):
            cache = {"lf": np.log10(sp.frequencies_hz), "lp": np.log10(sp.psd)}
        object.__setattr__(sp, "_log", cache)
    return sp._log["lf"], sp._log["lp"]


def log_value_at(sp, f):
    """log10 of the psd at frequency ``f``.

    Interpolates linearly in (log10 f, log10 S) between the bracketing bins,
    so the result is exact on any stretch that is a pure power law. Accepts
    a scalar or an array of frequencies.

    Raises
    ------
    OutOfRange
        ``f`` lies outside the spectrum's frequency range.
    NonpositivePsd
        A bracketing bin has zero power.
    """
    freqs = sp.frequencies_hz
    q = np.asarray(f, dtype=np.float64)
    if np.any(~np.isfinite(q)) or np.any(q < freqs[0]) or np.any(q > freqs[-1]):
        raise OutOfRange(f"frequency {f} Hz outside [{freqs[0]:g}, {freqs[-1]:g}] Hz")
    lf, lp = _log_arrays(sp)
    hi = np.searchsorted(freqs, q, side="left")
    exact = freqs[np.minimum(hi, freqs.size - 1)] == q
    lo = np.where(exact, hi, np.maximum(hi - 1, 0))
    if np.any(sp.psd[lo] <= 0) or np.any(sp.psd[hi] <= 0):
        raise NonpositivePsd(f"zero psd in a bin bracketing {f} Hz")
    lq = np.log10(q)
    out = np.where(
        exact,
        lp[hi],
        np.interp(lq, lf, lp),
    )
    return float(out) if out.ndim == 0 else out


def smooth_log(sp, points_per_decade):
    """Average the spectrum into logarithmically equal bins.

    Bins start at the first frequency and are ``1 / points_per_decade``
    decades wide; the last bin is closed on the right. Each non-empty bin
    yields the geometric mean of its frequencies and the arithmetic mean of
    its psd values.
    """
    if points_per_decade < 4:
        raise ValueError(f"points_per_decade must be >= 4, got {points_per_decade}")
    lf, _ = _log_arrays(sp)
    pos = (lf - lf[0]) * points_per_decade
    n_bins = max(int(np.ceil(pos[-1] - 1e-9)), 1)
    idx = np.minimum(np.floor(pos + 1e-9).astype(int), n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    occupied = counts > 0
    if np.count_nonzero(occupied) < 2:
        raise EmptyBand("smoothing leaves fewer than 2 bins")
    logf_sum = np.bincount(idx, weights=lf, minlength=n_bins)
    psd_sum = np.bincount(idx, weights=sp.psd, minlength=n_bins)
    f_out = 10 ** (logf_sum[occupied] / counts[occupied])
    p_out = psd_sum[occupied] / counts[occupied]
    return replace(sp, frequencies_hz=f_out, psd=p_out, points_per_decade=int(points_per_decade), _log=None)


def _fmt(v):
    return "%.17g" % v


def write_spectrum(sp, path):
    """Write a spectrum as JSON (``.json``) or two-column CSV (anything else)."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps(sp.to_dict(), indent=1) + "\n", encoding="utf-8")
        return path
    lines = [f"# label={sp.label}"]
    if sp.config is not None:
        lines += [f"# {k}={v}" for k, v in sp.config.to_dict().items()]
    if sp.band is not None:
        lines.append(f"# band={_fmt(sp.band[0])},{_fmt(sp.band[1])}")
    if sp.points_per_decade is not None:
        lines.append(f"# points_per_decade={sp.points_per_decade}")
    lines.append("frequency_hz,psd")
    lines += [f"{_fmt(f)},{_fmt(p)}" for f, p in zip(sp.frequencies_hz, sp.psd)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_spectrum(path):
    """Inverse of :func:`write_spectrum`."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    if path.suffix.lower() == ".json":
        try:
            return PowerSpectrum.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except (KeyError, json.JSONDecodeError) as exc:
            raise ParseError(0, f"{path}: not a spectrum JSON file ({exc})") from None
    meta, freqs, psd = {}, [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                key, sep, value = text[1:].strip().partition("=")
                if sep:
                    meta[key.strip()] = value.strip()
                continue
            if text.replace(" ", "") == "frequency_hz,psd":
                continue
            try:
                f, p = text.split(",")
                freqs.append(float(f))
                psd.append(float(p))
            except ValueError:
                raise ParseError(lineno, f"{path}:{lineno}: expected 'frequency_hz,psd', got {text!r}") from None
    cfg = None
    if "segment_length" in meta:
        cfg = WelchConfig.from_dict(meta)
    band = None
    if "band" in meta:
        band = tuple(float(v) for v in meta["band"].split(","))
    ppd = int(meta["points_per_decade"]) if "points_per_decade" in meta else None
    return PowerSpectrum(freqs, psd, config=cfg, label=meta.get("label", ""), band=band, points_per_decade=ppd)


def write_loglog(sp, path):
    """Write a whitespace-separated ``log10 f  log10 S`` table for plotting tools."""
    path = Path(path)
    with np.errstate(divide="ignore"):
        lf = np.log10(sp.frequencies_hz)
        lp = np.log10(sp.psd)
    lines = [f"# label={sp.label}", "# log10_frequency_hz log10_psd"]
    lines += [f"{_fmt(a)} {_fmt(b)}" for a, b in zip(lf, lp)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path

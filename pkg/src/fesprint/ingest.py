"""Loading, writing and detrending of fluctuation time series."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal

from .errors import EmptyInput, InvalidRate, InvalidSeries, ParseError

FORMATS = ("csv", "raw-binary-f64")
DETREND_MODES = ("mean", "linear")


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly sampled fluctuation record.

    ``samples`` is stored as a read-only float64 array.
    """

    samples: np.ndarray
    sample_rate_hz: float
    label: str = ""
    source: str = ""

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.float64, copy=True).ravel()
        if not self.sample_rate_hz > 0:
            raise InvalidRate(f"sample rate must be positive, got {self.sample_rate_hz}")
        if x.size < 2:
            raise EmptyInput(f"need at least 2 samples, got {x.size}")
        if not np.all(np.isfinite(x)):
            raise InvalidSeries("samples contain NaN or Inf")
        x.flags.writeable = False
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    def __len__(self):
        return self.samples.size

    @property
    def duration_s(self):
        return self.samples.size / self.sample_rate_hz

    def with_samples(self, samples):
        return TimeSeries(samples, self.sample_rate_hz, self.label, self.source)


def _format_from_path(path):
    suffix = Path(path).suffix.lower()
    if suffix in (".bin", ".f64", ".raw"):
        return "raw-binary-f64"
    return "csv"


def _read_csv(path):
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise ParseError(lineno, f"{path}:{lineno}: not a number: {text!r}") from None
    return np.asarray(values, dtype=np.float64)


def load_timeseries(path, format=None, sample_rate_hz=None, label=None):
    """Read a time series from disk.

    Parameters
    ----------
    path : str or Path
        CSV file (one float per line, ``#`` comments) or raw little-endian
        float64 binary.
    format : {"csv", "raw-binary-f64"}, optional
        Guessed from the suffix when omitted (``.bin``/``.f64``/``.raw`` mean
        binary, anything else CSV).
    sample_rate_hz : float
        Required; neither format stores the rate.
    label : str, optional
        Defaults to the file stem.

    Raises
    ------
    FileNotFoundError, ParseError, EmptyInput, InvalidRate
    """
    path = Path(path)
    if sample_rate_hz is None:
        raise InvalidRate("a sample rate is required for time-series input")
    if not sample_rate_hz > 0:
        raise InvalidRate(f"sample rate must be positive, got {sample_rate_hz}")
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    fmt = format or _format_from_path(path)
    if fmt == "csv":
        samples = _read_csv(path)
    elif fmt == "raw-binary-f64":
        raw = path.read_bytes()
        if len(raw) % 8:
            raise ParseError(len(raw) // 8 + 1, f"{path}: size {len(raw)} is not a multiple of 8 bytes")
        samples = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    else:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    if samples.size < 2:
        raise EmptyInput(f"{path}: need at least 2 samples, got {samples.size}")
    return TimeSeries(samples, sample_rate_hz, label=label or path.stem, source=str(path))


def write_timeseries(ts, path, format=None):
    """Write ``ts`` so that :func:`load_timeseries` reads back identical samples.

    CSV uses 17 significant digits, which round-trips float64 exactly.
    """
    path = Path(path)
    fmt = format or _format_from_path(path)
    if fmt == "csv":
        lines = [f"# label={ts.label}"]
        lines.extend("%.17g" % v for v in ts.samples)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif fmt == "raw-binary-f64":
        path.write_bytes(ts.samples.astype("<f8").tobytes())
    else:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    return path


def detrend(ts, mode="mean"):
    """Remove the slow sensor signal, keeping only the fluctuations.

    ``mode="mean"`` subtracts the mean; ``mode="linear"`` subtracts the
    least-squares line over the sample index.
    """
    x = ts.samples
    if mode == "mean":
        y = x - x.mean()
    elif mode == "linear":
        y = signal.detrend(x, type="linear")
    else:
        raise ValueError(f"unknown detrend mode {mode!r}; expected one of {DETREND_MODES}")
    return ts.with_samples(y)

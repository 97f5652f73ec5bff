"""Log-log slope profiles and binary / ternary fingerprints.

A spectrum is reduced to chord slopes on the log-log plot: the global slope
connects the two ends of the analysis band, and each local slope connects
the two ends of one sub-band. Binary fingerprints compare each local slope
with the global slope of the same spectrum; ternary fingerprints compare it
with the local slope of a reference spectrum in the same sub-band.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidBand, PartitionMismatch, ParseError
from .spectral import log_value_at

BINARY = "binary"
TERNARY = "ternary"
DEFAULT_N_BANDS = 5
DEFAULT_TOLERANCE = 0.1


@dataclass(frozen=True, eq=False)
class BandPartition:
    """``[f_lo, f_hi]`` split into ``n_bands`` logarithmically equal sub-bands."""

    f_lo: float
    f_hi: float
    n_bands: int
    edges: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, BandPartition):
            return NotImplemented
        return self.n_bands == other.n_bands and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n_bands, self.edges.tobytes()))

    @property
    def log_edges(self):
        return np.log10(self.edges)

    def bands(self):
        """List of ``(lo, hi)`` edge pairs."""
        return list(zip(self.edges[:-1].tolist(), self.edges[1:].tolist()))


def make_partition(f_lo, f_hi, n_bands=DEFAULT_N_BANDS):
    """Build a :class:`BandPartition` with log-equal sub-bands.

    >>> make_partition(1.0, 100.0, 2).edges
    array([  1.,  10., 100.])
    """
    if isinstance(n_bands, bool) or int(n_bands) != n_bands or n_bands < 1:
        raise InvalidBand(f"n_bands must be a positive integer, got {n_bands!r}")
    if not (np.isfinite(f_lo) and np.isfinite(f_hi) and 0 < f_lo < f_hi):
        raise InvalidBand(f"need 0 < f_lo < f_hi, got f_lo={f_lo}, f_hi={f_hi}")
    n_bands = int(n_bands)
    edges = 10 ** np.linspace(np.log10(f_lo), np.log10(f_hi), n_bands + 1)
    edges[0], edges[-1] = f_lo, f_hi
    edges.flags.writeable = False
    return BandPartition(float(f_lo), float(f_hi), n_bands, edges)


@dataclass(frozen=True, eq=False)
class SlopeProfile:
    """Global and per-sub-band chord slopes of one spectrum."""

    partition: BandPartition
    global_slope: float
    local_slopes: np.ndarray
    source_label: str = ""

    def __post_init__(self):
        local = np.array(self.local_slopes, dtype=np.float64).ravel()
        if local.size != self.partition.n_bands:
            raise ValueError(f"expected {self.partition.n_bands} local slopes, got {local.size}")
        if not (np.all(np.isfinite(local)) and np.isfinite(self.global_slope)):
            raise ValueError("slopes must be finite")
        local.flags.writeable = False
        object.__setattr__(self, "local_slopes", local)
        object.__setattr__(self, "global_slope", float(self.global_slope))

    def __eq__(self, other):
        if not isinstance(other, SlopeProfile):
            return NotImplemented
        return (
            self.partition == other.partition
            and self.global_slope == other.global_slope
            and np.array_equal(self.local_slopes, other.local_slopes)
            and self.source_label == other.source_label
        )

    def to_dict(self):
        return {
            "f_lo_hz": self.partition.f_lo,
            "f_hi_hz": self.partition.f_hi,
            "n_bands": self.partition.n_bands,
            "global_slope": self.global_slope,
            "local_slopes": self.local_slopes.tolist(),
            "source_label": self.source_label,
        }

    @classmethod
    def from_dict(cls, d):
        part = make_partition(d["f_lo_hz"], d["f_hi_hz"], d["n_bands"])
        return cls(part, d["global_slope"], d["local_slopes"], d.get("source_label", ""))


@dataclass(frozen=True, eq=False)
class Fingerprint:
    """Symbol string produced by :func:`binary_fingerprint` or :func:`ternary_fingerprint`.

    ``global_slope`` and ``local_slopes`` are those of the source spectrum,
    kept for reporting.
    """

    kind: str
    symbols: np.ndarray
    partition: BandPartition
    slope_tolerance: float = 0.0
    reference_label: str = None
    source_label: str = ""
    global_slope: float = None
    local_slopes: np.ndarray = None

    def __post_init__(self):
        sym = np.array(self.symbols).ravel()
        if sym.size != self.partition.n_bands:
            raise ValueError(f"expected {self.partition.n_bands} symbols, got {sym.size}")
        if not np.all(np.isin(sym, (-1, 0, 1))):
            raise ValueError(f"symbols must be -1, 0 or +1, got {sym.tolist()}")
        sym = sym.astype(np.int8)
        if self.kind == BINARY:
            if np.any(sym == 0):
                raise ValueError("binary fingerprint cannot contain 0")
        elif self.kind == TERNARY:
            if not self.reference_label:
                raise ValueError("ternary fingerprint needs a reference label")
        else:
            raise ValueError(f"kind must be {BINARY!r} or {TERNARY!r}, got {self.kind!r}")
        if self.slope_tolerance < 0:
            raise ValueError("slope_tolerance must be non-negative")
        sym.flags.writeable = False
        object.__setattr__(self, "symbols", sym)
        object.__setattr__(self, "slope_tolerance", float(self.slope_tolerance))
        if self.local_slopes is not None:
            local = np.array(self.local_slopes, dtype=np.float64).ravel()
            local.flags.writeable = False
            object.__setattr__(self, "local_slopes", local)
        if self.global_slope is not None:
            object.__setattr__(self, "global_slope", float(self.global_slope))

    def __len__(self):
        return self.symbols.size

    def __eq__(self, other):
        """Fingerprints are equal when kind, symbols, partition and tolerance agree."""
        if not isinstance(other, Fingerprint):
            return NotImplemented
        return (
            self.kind == other.kind
            and np.array_equal(self.symbols, other.symbols)
            and self.partition == other.partition
            and self.slope_tolerance == other.slope_tolerance
        )

    def __hash__(self):
        return hash((self.kind, self.symbols.tobytes(), self.partition, self.slope_tolerance))

    def to_dict(self):
        return {
            "schema_version": 1,
            "kind": self.kind,
            "symbols": [int(s) for s in self.symbols],
            "f_lo_hz": self.partition.f_lo,
            "f_hi_hz": self.partition.f_hi,
            "n_bands": self.partition.n_bands,
            "slope_tolerance": self.slope_tolerance,
            "reference_label": self.reference_label,
            "source_label": self.source_label,
            "global_slope": self.global_slope,
            "local_slopes": None if self.local_slopes is None else self.local_slopes.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        part = make_partition(d["f_lo_hz"], d["f_hi_hz"], d["n_bands"])
        return cls(
            kind=d["kind"],
            symbols=d["symbols"],
            partition=part,
            slope_tolerance=d.get("slope_tolerance", 0.0),
            reference_label=d.get("reference_label"),
            source_label=d.get("source_label", ""),
            global_slope=d.get("global_slope"),
            local_slopes=d.get("local_slopes"),
        )

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    def bar_rows(self):
        """Per-band rows ``(index, lo_hz, hi_hz, symbol)`` for bar-chart output."""
        return [(i, lo, hi, int(s)) for i, ((lo, hi), s) in enumerate(zip(self.partition.bands(), self.symbols))]


def global_slope(sp, partition):
    """Chord slope of log10 S vs log10 f between the partition's outer edges.

    This is the line connecting the two endpoints of the band, not a
    least-squares fit.
    """
    lo, hi = log_value_at(sp, np.array([partition.f_lo, partition.f_hi]))
    return float((hi - lo) / (np.log10(partition.f_hi) - np.log10(partition.f_lo)))


def local_slopes(sp, partition):
    """Compute the :class:`SlopeProfile` of ``sp`` over ``partition``.

    With log-equal sub-bands the mean of the local slopes equals the global
    slope up to rounding, since the chord slopes telescope.
    """
    values = log_value_at(sp, partition.edges)
    local = np.diff(values) / np.diff(partition.log_edges)
    return SlopeProfile(partition, global_slope(sp, partition), local, sp.label)


def binary_fingerprint(profile):
    """-1 where the local slope is below the global slope, +1 otherwise."""
    symbols = np.where(profile.local_slopes < profile.global_slope, -1, 1)
    return Fingerprint(
        kind=BINARY,
        symbols=symbols,
        partition=profile.partition,
        slope_tolerance=0.0,
        source_label=profile.source_label,
        global_slope=profile.global_slope,
        local_slopes=profile.local_slopes,
    )


def ternary_fingerprint(sample, reference, tolerance=DEFAULT_TOLERANCE):
    """Encode each sub-band against the reference profile's local slope.

    With ``d = sample.local - reference.local`` the symbol is 0 where
    ``|d| <= tolerance``, +1 where ``d > tolerance`` and -1 where
    ``d < -tolerance``.

    Raises
    ------
    PartitionMismatch
        The two profiles were computed over different partitions.
    """
    if sample.partition != reference.partition:
        raise PartitionMismatch(
            f"sample partition {sample.partition.edges.tolist()} differs from "
            f"reference partition {reference.partition.edges.tolist()}"
        )
    if not tolerance >= 0:
        raise ValueError(f"tolerance must be non-negative, got {tolerance}")
    d = sample.local_slopes - reference.local_slopes
    symbols = np.where(d > tolerance, 1, np.where(d < -tolerance, -1, 0))
    return Fingerprint(
        kind=TERNARY,
        symbols=symbols,
        partition=sample.partition,
        slope_tolerance=tolerance,
        reference_label=reference.source_label or "reference",
        source_label=sample.source_label,
        global_slope=sample.global_slope,
        local_slopes=sample.local_slopes,
    )


def write_fingerprint(fp, path):
    path = Path(path)
    path.write_text(fp.to_json() + "\n", encoding="utf-8")
    return path


def read_fingerprint(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        return Fingerprint.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (KeyError, json.JSONDecodeError) as exc:
        raise ParseError(0, f"{path}: not a fingerprint JSON file ({exc})") from None

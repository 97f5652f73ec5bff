"""Pipeline configuration and the end-to-end fingerprinting helpers."""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import InvalidBand, InvalidConfig
from .fingerprint import DEFAULT_N_BANDS, DEFAULT_TOLERANCE, binary_fingerprint, local_slopes, make_partition, ternary_fingerprint
from .ingest import DETREND_MODES, detrend
from .spectral import WelchConfig, estimate_pds

CONFIG_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PipelineConfig:
    """Everything needed to turn a time series into a fingerprint.

    ``band`` is ``(f_lo, f_hi)`` in Hz. It has no default because the useful
    part of a spectrum depends on the sensor; it must be set before
    fingerprinting.
    """

    welch: WelchConfig = field(default_factory=WelchConfig)
    band: tuple = None
    n_bands: int = DEFAULT_N_BANDS
    tolerance: float = DEFAULT_TOLERANCE
    detrend_mode: str = "mean"
    reference_label: str = None

    def __post_init__(self):
        if self.detrend_mode not in DETREND_MODES:
            raise InvalidConfig(f"unknown detrend_mode {self.detrend_mode!r}; expected one of {DETREND_MODES}")
        if not self.tolerance >= 0:
            raise InvalidConfig(f"tolerance must be non-negative, got {self.tolerance}")
        if isinstance(self.n_bands, bool) or int(self.n_bands) != self.n_bands or self.n_bands < 1:
            raise InvalidConfig(f"n_bands must be a positive integer, got {self.n_bands!r}")
        object.__setattr__(self, "n_bands", int(self.n_bands))
        object.__setattr__(self, "tolerance", float(self.tolerance))
        if self.band is not None:
            lo, hi = (float(v) for v in self.band)
            if not 0 < lo < hi:
                raise InvalidBand(f"band must satisfy 0 < f_lo < f_hi, got ({lo}, {hi})")
            object.__setattr__(self, "band", (lo, hi))

    def partition(self):
        if self.band is None:
            raise InvalidBand("no analysis band configured; set band = (f_lo, f_hi)")
        return make_partition(self.band[0], self.band[1], self.n_bands)

    def check_nyquist(self, sample_rate_hz):
        if self.band is not None and self.band[1] > sample_rate_hz / 2:
            raise InvalidBand(f"f_hi = {self.band[1]:g} Hz exceeds Nyquist frequency {sample_rate_hz / 2:g} Hz")

    def updated(self, **changes):
        """Copy with the non-``None`` entries of ``changes`` applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self):
        return {
            "schema_version": CONFIG_SCHEMA_VERSION,
            "welch": self.welch.to_dict(),
            "band": None if self.band is None else list(self.band),
            "n_bands": self.n_bands,
            "tolerance": self.tolerance,
            "detrend_mode": self.detrend_mode,
            "reference_label": self.reference_label,
        }

    @classmethod
    def from_dict(cls, d):
        version = d.get("schema_version", CONFIG_SCHEMA_VERSION)
        if version != CONFIG_SCHEMA_VERSION:
            raise InvalidConfig(f"unsupported config schema_version {version!r}")
        band = d.get("band")
        return cls(
            welch=WelchConfig.from_dict(d.get("welch", {})),
            band=None if band is None else tuple(band),
            n_bands=d.get("n_bands", DEFAULT_N_BANDS),
            tolerance=d.get("tolerance", DEFAULT_TOLERANCE),
            detrend_mode=d.get("detrend_mode", "mean"),
            reference_label=d.get("reference_label"),
        )


def load_config(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}: invalid JSON: {exc}") from None
    return PipelineConfig.from_dict(doc)


def save_config(cfg, path):
    path = Path(path)
    path.write_text(json.dumps(cfg.to_dict(), indent=1) + "\n", encoding="utf-8")
    return path


def spectrum_of(ts, cfg):
    """Detrend ``ts`` and estimate its spectrum with ``cfg.welch``."""
    return estimate_pds(detrend(ts, cfg.detrend_mode), cfg.welch)


def profile_of(ts, cfg):
    cfg.check_nyquist(ts.sample_rate_hz)
    return local_slopes(spectrum_of(ts, cfg), cfg.partition())


def fingerprint_of(ts, cfg, reference=None):
    """Binary fingerprint of ``ts``, or ternary when a reference profile is given."""
    profile = profile_of(ts, cfg)
    if reference is None:
        return binary_fingerprint(profile)
    return ternary_fingerprint(profile, reference, cfg.tolerance)

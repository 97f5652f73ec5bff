"""Fluctuation-enhanced sensing fingerprints.

Estimate the power density spectrum of a sensor's noise, reduce it to
log-log chord slopes over sub-bands, and encode those slopes as binary
(local vs. global slope) or ternary (local vs. reference slope)
fingerprints.
"""

from .analysis import (
    ReferenceLibrary,
    SimilarityReport,
    comparison_report,
    empirical_entropy,
    reproducibility,
    similarity,
    similarity_matrix,
)
from .config import PipelineConfig, fingerprint_of, load_config, profile_of, save_config, spectrum_of
from .errors import FesError
from .fingerprint import (
    BandPartition,
    Fingerprint,
    SlopeProfile,
    binary_fingerprint,
    global_slope,
    local_slopes,
    make_partition,
    read_fingerprint,
    ternary_fingerprint,
    write_fingerprint,
)
from .ingest import TimeSeries, detrend, load_timeseries, write_timeseries
from .spectral import (
    PowerSpectrum,
    WelchConfig,
    estimate_pds,
    log_value_at,
    read_spectrum,
    restrict_band,
    smooth_log,
    write_spectrum,
)
from .synth import SpectrumSpec, expected_fingerprint, expected_profile, synthesize

__version__ = "0.1.0"

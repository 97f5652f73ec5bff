"""Fingerprint comparison, entropy and the reference library."""

import itertools
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateLabel,
    KindMismatch,
    NotFound,
    PartitionMismatch,
    StorageError,
    ToleranceMismatch,
    TooFew,
)
from .fingerprint import TERNARY, Fingerprint, SlopeProfile, binary_fingerprint

LIBRARY_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SimilarityReport:
    matches: int
    total: int
    similarity: float
    per_position: tuple

    def to_dict(self):
        return {
            "matches": self.matches,
            "total": self.total,
            "similarity": self.similarity,
            "per_position": list(self.per_position),
        }


def _check_comparable(a, b):
    if a.kind != b.kind:
        raise KindMismatch(f"cannot compare a {a.kind} fingerprint with a {b.kind} one")
    if a.partition != b.partition:
        raise PartitionMismatch("fingerprints were computed over different partitions")
    if a.kind == TERNARY and a.slope_tolerance != b.slope_tolerance:
        raise ToleranceMismatch(f"tolerances differ: {a.slope_tolerance} vs {b.slope_tolerance}")


def similarity(a, b):
    """Fraction of positions where the two fingerprints carry the same symbol."""
    _check_comparable(a, b)
    same = a.symbols == b.symbols
    matches = int(np.count_nonzero(same))
    total = int(same.size)
    return SimilarityReport(matches, total, matches / total, tuple(bool(s) for s in same))


def similarity_matrix(fingerprints):
    """Symmetric matrix of pairwise similarities (ones on the diagonal)."""
    n = len(fingerprints)
    out = np.eye(n)
    for i, j in itertools.combinations(range(n), 2):
        out[i, j] = out[j, i] = similarity(fingerprints[i], fingerprints[j]).similarity
    return out


def reproducibility(fingerprints):
    """Mean pairwise similarity over all unordered pairs of repeated measurements."""
    fingerprints = list(fingerprints)
    if len(fingerprints) < 2:
        raise TooFew(f"need at least 2 fingerprints, got {len(fingerprints)}")
    scores = [similarity(a, b).similarity for a, b in itertools.combinations(fingerprints, 2)]
    return float(np.mean(scores))


def _shannon_bits(symbols):
    _, counts = np.unique(symbols, return_counts=True)
    p = counts / counts.sum()
    # zero-count symbols never appear in `counts`, so 0 log 0 needs no special case
    return float(max(0.0, -np.sum(p * np.log2(p))))


def empirical_entropy(fingerprints, per_position=False):
    """Shannon entropy of the symbols, in bits per symbol.

    By default all positions of all fingerprints are pooled into one symbol
    distribution. With ``per_position=True`` the entropy is computed for each
    band position separately and the mean over positions is returned.
    """
    fingerprints = list(fingerprints)
    if not fingerprints:
        raise TooFew("need at least one fingerprint")
    first = fingerprints[0]
    for fp in fingerprints[1:]:
        if fp.kind != first.kind:
            raise KindMismatch(f"mixed kinds: {first.kind} and {fp.kind}")
        if len(fp) != len(first):
            raise PartitionMismatch(f"mixed lengths: {len(first)} and {len(fp)}")
    table = np.stack([fp.symbols for fp in fingerprints])
    if per_position:
        return float(np.mean([_shannon_bits(col) for col in table.T]))
    return _shannon_bits(table.ravel())


def comparison_report(fingerprints, labels=None):
    """Pairwise similarity matrix plus mean, as a JSON-ready dict."""
    fingerprints = list(fingerprints)
    if len(fingerprints) < 2:
        raise TooFew(f"need at least 2 fingerprints, got {len(fingerprints)}")
    labels = list(labels) if labels is not None else [fp.source_label or f"fp{i}" for i, fp in enumerate(fingerprints)]
    matrix = similarity_matrix(fingerprints)
    return {
        "schema_version": 1,
        "kind": fingerprints[0].kind,
        "labels": labels,
        "matrix": matrix.tolist(),
        "mean_pairwise_similarity": reproducibility(fingerprints),
    }


def format_report_text(report):
    """Aligned-column text rendering of :func:`comparison_report` output."""
    labels = report["labels"]
    width = max(8, *(len(s) for s in labels))
    lines = [" " * width + "".join(f"{s:>{width + 2}}" for s in labels)]
    for name, row in zip(labels, report["matrix"]):
        lines.append(f"{name:<{width}}" + "".join(f"{v:>{width + 2}.3f}" for v in row))
    lines.append(f"mean pairwise similarity: {report['mean_pairwise_similarity']:.4f}")
    return "\n".join(lines)


class ReferenceLibrary:
    """JSON-file-backed catalog of reference profiles.

    Every mutation is written straight to disk through a temporary file and
    an atomic rename. The library is single-writer: callers must serialize
    concurrent mutations themselves.
    """

    def __init__(self, storage_path, entries=None):
        self.storage_path = Path(storage_path)
        self.entries = dict(entries or {})

    @classmethod
    def open(cls, storage_path):
        """Load the library at ``storage_path``; a missing file means an empty library."""
        path = Path(storage_path)
        if not path.exists():
            return cls(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise StorageError(f"cannot read reference library {path}: {exc}") from None
        version = doc.get("schema_version")
        if version != LIBRARY_SCHEMA_VERSION:
            raise StorageError(f"{path}: unsupported schema_version {version!r}")
        entries = {}
        try:
            for label, raw in doc.get("entries", {}).items():
                entries[label] = {
                    "profile": SlopeProfile.from_dict(raw["profile"]),
                    "fingerprint": Fingerprint.from_dict(raw["fingerprint"]),
                    "metadata": dict(raw.get("metadata", {})),
                }
        except (KeyError, TypeError, ValueError) as exc:
            raise StorageError(f"{path}: malformed entry: {exc}") from None
        return cls(path, entries)

    def to_dict(self):
        return {
            "schema_version": LIBRARY_SCHEMA_VERSION,
            "entries": {
                label: {
                    "profile": e["profile"].to_dict(),
                    "fingerprint": e["fingerprint"].to_dict(),
                    "metadata": e["metadata"],
                }
                for label, e in sorted(self.entries.items())
            },
        }

    def save(self):
        path = self.storage_path
        text = json.dumps(self.to_dict(), indent=1) + "\n"
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except OSError as exc:
            raise StorageError(f"cannot write reference library {path}: {exc}") from None

    def add(self, label, profile, metadata=None):
        if label in self.entries:
            raise DuplicateLabel(f"reference {label!r} already exists")
        self.entries[label] = {
            "profile": profile,
            "fingerprint": binary_fingerprint(profile),
            "metadata": dict(metadata or {}),
        }
        try:
            self.save()
        except StorageError:
            del self.entries[label]
            raise
        return self

    def get(self, label):
        """Return the entry dict (``profile``, ``fingerprint``, ``metadata``)."""
        try:
            return self.entries[label]
        except KeyError:
            raise NotFound(f"no reference named {label!r} in {self.storage_path}") from None

    def profile(self, label):
        return self.get(label)["profile"]

    def list(self):
        return sorted(self.entries)

    def remove(self, label):
        entry = self.get(label)
        del self.entries[label]
        try:
            self.save()
        except StorageError:
            self.entries[label] = entry
            raise
        return self

    def __contains__(self, label):
        return label in self.entries

    def __len__(self):
        return len(self.entries)

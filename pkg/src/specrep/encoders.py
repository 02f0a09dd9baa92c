"""The three spectrum representations: binned vector, peak set, peak graph.

Shared preprocessing comes first and its order matters: intensities are
max-normalized to 1.0, then the precursor m/z is inserted as a normal peak
with intensity 2.0. Normalizing first is what makes 2.0 a reliable marker
for the precursor; fragment intensities can never reach it.

All encoders are pure functions of the preprocessed spectrum, so shuffling
the input peak order changes nothing in their output (bit-for-bit, absent
exact m/z ties).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .spectra import Peak, Spectrum

PRECURSOR_INTENSITY = 2.0


@dataclass(frozen=True)
class BinConfig:
    """Fixed-width m/z binning over [min_mz, max_mz).

    ``aggregate`` is "sum" (default) or "max"; the switch exists for
    sensitivity checks only.
    """

    min_mz: float = 0.0
    max_mz: float = 10_000.0
    bin_width: float = 1.0
    aggregate: str = "sum"

    def __post_init__(self):
        if not self.min_mz < self.max_mz:
            raise ValidationError(f"need min_mz < max_mz, got {self.min_mz}/{self.max_mz}")
        if self.bin_width <= 0:
            raise ValidationError(f"bin_width must be > 0, got {self.bin_width}")
        if self.aggregate not in ("sum", "max"):
            raise ValidationError(f"aggregate must be 'sum' or 'max', got {self.aggregate!r}")

    @property
    def n_bins(self) -> int:
        return math.ceil((self.max_mz - self.min_mz) / self.bin_width)

    def to_dict(self) -> dict:
        return {
            "min_mz": self.min_mz,
            "max_mz": self.max_mz,
            "bin_width": self.bin_width,
            "aggregate": self.aggregate,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BinConfig":
        return cls(**doc)


@dataclass(frozen=True)
class BinnedVector:
    """Length-n_bins intensity vector plus a tally of out-of-range peaks."""

    values: np.ndarray  # float32 [n_bins]
    config: BinConfig
    dropped_peaks: int = 0
    dropped_intensity: float = 0.0


@dataclass(frozen=True)
class PeakSet:
    """Unordered multiset of (m/z, intensity) pairs as two parallel arrays."""

    mz: np.ndarray  # float32 [N]
    intensity: np.ndarray  # float32 [N]

    def __len__(self) -> int:
        return len(self.mz)


@dataclass(frozen=True)
class PeakGraph:
    """Chain graph over peaks in m/z order, preceded by a sentinel vertex.

    Vertex 0 is the sentinel (m/z 0, intensity 0) so the first real peak
    still has an incoming m/z delta. Edges connect consecutive vertices and
    are stored as both directed arcs: the first V-1 columns of
    ``edge_index`` are the forward arcs (i -> i+1), the last V-1 columns the
    reversed ones, with identical ``edge_attr`` (the m/z difference).
    """

    vertex_attr: np.ndarray  # float32 [V], intensities (sentinel = 0)
    edge_index: np.ndarray  # int64 [2, 2*(V-1)]
    edge_attr: np.ndarray  # float32 [2*(V-1)], |delta m/z| per arc

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_attr)

    @property
    def n_arcs(self) -> int:
        return self.edge_index.shape[1]


def normalize_intensities(s: Spectrum) -> Spectrum:
    """Divide every intensity by the maximum; the maximum becomes exactly 1.0."""
    if s.n_peaks == 0:
        raise ValidationError(f"spectrum {s.id!r}: no peaks to normalize")
    top = max(p.intensity for p in s.peaks)
    if top <= 0:
        raise ValidationError(f"spectrum {s.id!r}: all intensities are zero")
    return s.with_peaks(Peak(p.mz, p.intensity / top) for p in s.peaks)


def insert_precursor(s: Spectrum) -> Spectrum:
    """Insert (precursor_mz, 2.0) as a normal peak, keeping m/z order.

    On an exact m/z tie the precursor peak goes after the existing peak.
    """
    peaks = list(s.peaks)
    at = bisect.bisect_right([p.mz for p in peaks], s.precursor_mz)
    peaks.insert(at, Peak(s.precursor_mz, PRECURSOR_INTENSITY))
    return s.with_peaks(peaks)


def preprocess(s: Spectrum) -> Spectrum:
    """Shared pipeline for all encoders: normalize, then insert the precursor."""
    return insert_precursor(normalize_intensities(s))


def encode_binned(s: Spectrum, config: BinConfig | None = None) -> BinnedVector:
    """Aggregate intensities of a preprocessed spectrum into fixed-width bins.

    Peaks with ``min_mz <= mz < max_mz`` land in bin
    ``floor((mz - min_mz) / bin_width)``; peaks outside the range are
    dropped and tallied, not an error.
    """
    config = config or BinConfig()
    mz = s.mz_array()
    intensity = s.intensity_array()
    inside = (mz >= config.min_mz) & (mz < config.max_mz)
    idx = np.floor((mz[inside] - config.min_mz) / config.bin_width).astype(np.int64)
    # guard against float edge effects at the top boundary
    idx = np.minimum(idx, config.n_bins - 1)

    values = np.zeros(config.n_bins, dtype=np.float32)
    kept = intensity[inside].astype(np.float32)
    if config.aggregate == "sum":
        np.add.at(values, idx, kept)
    else:
        np.maximum.at(values, idx, kept)
    dropped = int((~inside).sum())
    return BinnedVector(
        values=values,
        config=config,
        dropped_peaks=dropped,
        dropped_intensity=float(intensity[~inside].sum()),
    )


def encode_set(s: Spectrum) -> PeakSet:
    """One (m/z, intensity) pair per peak of the preprocessed spectrum."""
    return PeakSet(
        mz=s.mz_array().astype(np.float32),
        intensity=s.intensity_array().astype(np.float32),
    )


def encode_graph(s: Spectrum) -> PeakGraph:
    """Chain graph of the preprocessed spectrum with a leading sentinel vertex."""
    mz = np.concatenate([[0.0], s.mz_array()])
    intensity = np.concatenate([[0.0], s.intensity_array()])
    n = len(mz)
    if n < 2:
        raise ValidationError(f"spectrum {s.id!r}: graph needs at least one peak")

    fwd_src = np.arange(n - 1, dtype=np.int64)
    fwd_dst = fwd_src + 1
    edge_index = np.stack(
        [np.concatenate([fwd_src, fwd_dst]), np.concatenate([fwd_dst, fwd_src])]
    )
    delta = np.abs(np.diff(mz)).astype(np.float32)
    return PeakGraph(
        vertex_attr=intensity.astype(np.float32),
        edge_index=edge_index,
        edge_attr=np.concatenate([delta, delta]),
    )

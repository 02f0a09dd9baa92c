"""Peak lists, MGF parsing/serialization, label and split files.

A :class:`Spectrum` is the single source all encoders consume: an id, a
precursor m/z, a peak list sorted nondecreasing by m/z, and an optional
scalar label in [0, 1].

The MGF dialect understood here is deliberately small: ``BEGIN IONS`` /
``END IONS`` blocks, ``PEPMASS`` (first numeric token), ``TITLE`` (used as
the spectrum id when present), and ``mz intensity`` peak lines. Every other
``KEY=VALUE`` line is ignored. Both ``\\n`` and ``\\r\\n`` line endings are
accepted.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import ValidationError


class MgfError(ValidationError):
    """Malformed MGF input; carries the offending line number (1-based)."""

    def __init__(self, message: str, line: int | None = None, block: int | None = None):
        ctx = []
        if block is not None:
            ctx.append(f"block {block}")
        if line is not None:
            ctx.append(f"line {line}")
        suffix = f" ({', '.join(ctx)})" if ctx else ""
        super().__init__(f"{message}{suffix}")
        self.line = line
        self.block = block


class Peak(NamedTuple):
    mz: float
    intensity: float


@dataclass(frozen=True)
class Spectrum:
    """One tandem mass spectrum.

    ``peaks`` are sorted nondecreasing by m/z; ties keep their input order.
    ``label`` is the regression target (drug-likeness score), in [0, 1].
    """

    id: str
    precursor_mz: float
    peaks: tuple[Peak, ...]
    label: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.precursor_mz) and self.precursor_mz > 0):
            raise ValidationError(
                f"spectrum {self.id!r}: precursor_mz must be finite and > 0, "
                f"got {self.precursor_mz}"
            )
        prev = -math.inf
        for p in self.peaks:
            if not (math.isfinite(p.mz) and p.mz > 0):
                raise ValidationError(
                    f"spectrum {self.id!r}: peak m/z must be finite and > 0, got {p.mz}"
                )
            if not (math.isfinite(p.intensity) and p.intensity >= 0):
                raise ValidationError(
                    f"spectrum {self.id!r}: intensity must be finite and >= 0, "
                    f"got {p.intensity}"
                )
            if p.mz < prev:
                raise ValidationError(f"spectrum {self.id!r}: peaks not sorted by m/z")
            prev = p.mz
        if self.label is not None and not (0.0 <= self.label <= 1.0):
            raise ValidationError(
                f"spectrum {self.id!r}: label must lie in [0, 1], got {self.label}"
            )

    @property
    def n_peaks(self) -> int:
        return len(self.peaks)

    def mz_array(self) -> np.ndarray:
        return np.array([p.mz for p in self.peaks], dtype=np.float64)

    def intensity_array(self) -> np.ndarray:
        return np.array([p.intensity for p in self.peaks], dtype=np.float64)

    def with_label(self, label: float | None) -> "Spectrum":
        return Spectrum(self.id, self.precursor_mz, self.peaks, label)

    def with_peaks(self, peaks: Iterable[Peak]) -> "Spectrum":
        return Spectrum(self.id, self.precursor_mz, tuple(peaks), self.label)


def _parse_float(token: str) -> float:
    value = float(token)  # may raise ValueError, callers wrap it
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {token!r}")
    return value


def parse_mgf(stream: io.TextIOBase | str) -> list[Spectrum]:
    """Parse MGF text into spectra.

    Accepts a text stream or a string. Raises :class:`MgfError` on missing
    PEPMASS, non-numeric peak tokens, nested or unterminated blocks. Blocks
    with zero peaks are accepted; whether to reject them is an encoder-level
    policy.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)

    spectra: list[Spectrum] = []
    in_block = False
    block_no = 0
    block_start = 0
    title: str | None = None
    pepmass: float | None = None
    peaks: list[Peak] = []
    line_no = 0

    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        upper = line.upper()

        if upper == "BEGIN IONS":
            if in_block:
                raise MgfError(
                    "BEGIN IONS inside an open block", line=line_no, block=block_no
                )
            in_block = True
            block_no += 1
            block_start = line_no
            title, pepmass, peaks = None, None, []
            continue

        if upper == "END IONS":
            if not in_block:
                raise MgfError("END IONS without BEGIN IONS", line=line_no)
            if pepmass is None:
                raise MgfError(
                    "block has no PEPMASS line", line=block_start, block=block_no
                )
            spec_id = title if title is not None else f"spectrum-{block_no - 1}"
            ordered = sorted(peaks, key=lambda p: p.mz)  # stable: ties keep input order
            try:
                spectra.append(Spectrum(spec_id, pepmass, tuple(ordered)))
            except ValidationError as exc:
                raise MgfError(str(exc), line=block_start, block=block_no) from exc
            in_block = False
            continue

        if not in_block:
            continue  # headers/comments between blocks are ignored

        if "=" in line and not line[0].isdigit():
            key, _, value = line.partition("=")
            key = key.strip().upper()
            value = value.strip()
            if key == "PEPMASS":
                # two-token form "mass intensity": take the mass only
                token = value.split()[0] if value.split() else ""
                try:
                    pepmass = _parse_float(token)
                except ValueError:
                    raise MgfError(
                        f"bad PEPMASS value {value!r}", line=line_no, block=block_no
                    ) from None
            elif key == "TITLE":
                title = value
            # all other KEY=VALUE metadata is ignored
            continue

        tokens = line.split()
        if len(tokens) < 2:
            raise MgfError(
                f"peak line needs 'mz intensity', got {line!r}",
                line=line_no,
                block=block_no,
            )
        try:
            mz = _parse_float(tokens[0])
            intensity = _parse_float(tokens[1])
        except ValueError:
            raise MgfError(
                f"non-numeric peak token in {line!r}", line=line_no, block=block_no
            ) from None
        peaks.append(Peak(mz, intensity))

    if in_block:
        raise MgfError(
            "unterminated block (missing END IONS)", line=block_start, block=block_no
        )
    return spectra


def _fmt(value: float) -> str:
    return format(value, ".6g")


def serialize_mgf(spectra: Iterable[Spectrum]) -> str:
    """Serialize spectra to MGF text; floats carry 6 significant digits.

    ``parse_mgf(serialize_mgf(s))`` recovers ``s`` up to that text precision.
    """
    out: list[str] = []
    for s in spectra:
        out.append("BEGIN IONS")
        out.append(f"TITLE={s.id}")
        out.append(f"PEPMASS={_fmt(s.precursor_mz)}")
        for p in s.peaks:
            out.append(f"{_fmt(p.mz)} {_fmt(p.intensity)}")
        out.append("END IONS")
        out.append("")
    return "\n".join(out)


def load_labels(stream: io.TextIOBase | str) -> dict[str, float]:
    """Load the labels CSV (header ``id,qed``) into an id -> label map.

    Labels must lie in [0, 1]; duplicate ids are rejected.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("labels CSV is empty, expected header 'id,qed'") from None
    if [h.strip() for h in header] != ["id", "qed"]:
        raise ValidationError(f"labels CSV header must be 'id,qed', got {header!r}")

    labels: dict[str, float] = {}
    for row_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ValidationError(f"labels CSV row {row_no}: expected 2 fields, got {len(row)}")
        spec_id, raw = row[0].strip(), row[1].strip()
        try:
            value = float(raw)
        except ValueError:
            raise ValidationError(f"labels CSV row {row_no}: non-numeric label {raw!r}") from None
        if not (0.0 <= value <= 1.0):
            raise ValidationError(
                f"labels CSV row {row_no}: label {value} outside [0, 1]"
            )
        if spec_id in labels:
            raise ValidationError(f"labels CSV row {row_no}: duplicate id {spec_id!r}")
        labels[spec_id] = value
    return labels


@dataclass(frozen=True)
class DatasetSplit:
    """Train/val/test id sets; pairwise disjoint."""

    train_ids: frozenset[str]
    val_ids: frozenset[str]
    test_ids: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        overlaps = (
            (self.train_ids & self.val_ids)
            | (self.train_ids & self.test_ids)
            | (self.val_ids & self.test_ids)
        )
        if overlaps:
            sample = sorted(overlaps)[:3]
            raise ValidationError(f"split id sets overlap, e.g. {sample}")

    def all_ids(self) -> frozenset[str]:
        return self.train_ids | self.val_ids | self.test_ids

    def validate_against(self, labels: dict[str, float]) -> None:
        missing = sorted(self.all_ids() - labels.keys())
        if missing:
            raise ValidationError(
                f"{len(missing)} split ids missing from the labeled dataset, "
                f"e.g. {missing[:3]}"
            )


def load_splits(stream: io.TextIOBase | str) -> DatasetSplit:
    """Load a splits JSON object ``{"train": [...], "val": [...], "test": [...]}``."""
    text = stream if isinstance(stream, str) else stream.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"splits file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or not {"train", "val"} <= doc.keys():
        raise ValidationError("splits JSON must contain 'train', 'val' (and optionally 'test') lists")
    return DatasetSplit(
        frozenset(doc["train"]),
        frozenset(doc["val"]),
        frozenset(doc.get("test", [])),
    )

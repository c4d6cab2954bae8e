"""Frequency-response data model and interpolation-point bookkeeping.

A dataset is an ordered collection of (frequency point, response value)
pairs.  Measured data lives on the imaginary axis, which is also the only
on-disk representation (omega plus real/imaginary response parts); in
memory, arbitrary complex points are allowed so synthetic test data can be
placed anywhere in the plane.

Two operations prepare a dataset for the Loewner build: conjugate closure,
which guarantees that realizations projected from the data can be made
real, and partitioning, which splits the points into two disjoint halves
(the "left" and "right" interpolation sets) of equal size.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConjugateConflictError,
    DataFormatError,
    DuplicatePointError,
    PartitionSizeError,
)

__all__ = [
    "FrequencySample",
    "FrequencyDataset",
    "PointPartition",
    "load_csv",
    "save_csv",
    "load_json",
    "save_json",
    "close_conjugate",
    "partition_points",
]

CSV_HEADER = ("omega_rad_s", "re", "im")


@dataclass(frozen=True)
class FrequencySample:
    """One measurement: complex frequency point ``z`` and response ``phi``."""

    z: complex
    phi: complex

    def __post_init__(self) -> None:
        if not (np.isfinite(self.z.real) and np.isfinite(self.z.imag)):
            raise ValueError(f"non-finite frequency point {self.z}")
        if not (np.isfinite(self.phi.real) and np.isfinite(self.phi.imag)):
            raise ValueError(f"non-finite response value {self.phi}")


@dataclass(frozen=True)
class FrequencyDataset:
    """Ordered, duplicate-free collection of frequency samples."""

    samples: tuple[FrequencySample, ...]
    conjugate_closed: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))
        seen: set[complex] = set()
        for k, smp in enumerate(self.samples):
            if smp.z in seen:
                raise DuplicatePointError(
                    f"sample {k}: frequency point {smp.z} already present"
                )
            seen.add(smp.z)

    def __len__(self) -> int:
        return len(self.samples)

    def points(self) -> np.ndarray:
        return np.array([s.z for s in self.samples], dtype=complex)

    def values(self) -> np.ndarray:
        return np.array([s.phi for s in self.samples], dtype=complex)

    @staticmethod
    def from_arrays(z, phi, conjugate_closed: bool = False) -> "FrequencyDataset":
        z = np.asarray(z, dtype=complex).ravel()
        phi = np.asarray(phi, dtype=complex).ravel()
        if z.shape != phi.shape:
            raise ValueError("point and value arrays differ in length")
        samples = tuple(
            FrequencySample(complex(a), complex(b)) for a, b in zip(z, phi)
        )
        return FrequencyDataset(samples, conjugate_closed=conjugate_closed)


@dataclass(frozen=True)
class PointPartition:
    """Disjoint equal-size split of a dataset into left and right point sets.

    Each side is itself conjugate-closed, with conjugate partners stored
    adjacently; the realness transform of the Loewner build relies on that
    layout.
    """

    left_points: np.ndarray
    left_values: np.ndarray
    right_points: np.ndarray
    right_values: np.ndarray

    def __post_init__(self) -> None:
        for name in ("left_points", "left_values", "right_points", "right_values"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=complex))
        if self.left_points.shape != self.right_points.shape:
            raise PartitionSizeError(
                f"left/right sizes differ: {self.left_points.size} vs "
                f"{self.right_points.size}"
            )
        if self.left_points.size != self.left_values.size:
            raise ValueError("left point/value length mismatch")
        if self.right_points.size != self.right_values.size:
            raise ValueError("right point/value length mismatch")
        if set(map(complex, self.left_points)) & set(map(complex, self.right_points)):
            raise PartitionSizeError("left and right point sets overlap")

    @property
    def size(self) -> int:
        return int(self.left_points.size)


def _parse_float(token: str, line_no: int, col: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise DataFormatError(
            f"line {line_no}: field '{col}' is not a number: {token!r}"
        ) from None


def load_csv(path) -> FrequencyDataset:
    """Read a dataset from ``omega_rad_s,re,im`` CSV.

    Points are placed on the imaginary axis (z = i*omega).  The returned
    dataset is marked not conjugate-closed; run :func:`close_conjugate`
    before partitioning.
    """
    path = Path(path)
    samples: list[FrequencySample] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file, expected header") from None
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise DataFormatError(
                f"{path}: bad header {header!r}, expected {','.join(CSV_HEADER)}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise DataFormatError(
                    f"line {line_no}: expected 3 fields, got {len(row)}"
                )
            w = _parse_float(row[0], line_no, CSV_HEADER[0])
            re = _parse_float(row[1], line_no, CSV_HEADER[1])
            im = _parse_float(row[2], line_no, CSV_HEADER[2])
            samples.append(FrequencySample(1j * w, complex(re, im)))
    try:
        return FrequencyDataset(tuple(samples))
    except DuplicatePointError as exc:
        raise DuplicatePointError(f"{path}: {exc}") from None


def save_csv(dataset: FrequencyDataset, path) -> None:
    """Write a dataset as ``omega_rad_s,re,im`` rows with 17 significant digits.

    Only imaginary-axis data can be stored on disk; points with a nonzero
    real part are rejected.
    """
    path = Path(path)
    rows = []
    for k, smp in enumerate(dataset.samples):
        if smp.z.real != 0.0:
            raise DataFormatError(
                f"sample {k}: point {smp.z} is off the imaginary axis, "
                "cannot be stored in the CSV schema"
            )
        rows.append(
            f"{smp.z.imag:.17g},{smp.phi.real:.17g},{smp.phi.imag:.17g}"
        )
    path.write_text(",".join(CSV_HEADER) + "\n" + "".join(r + "\n" for r in rows))


def load_json(path) -> FrequencyDataset:
    """Read the JSON mirror of the CSV schema (array of field objects)."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(raw, list):
        raise DataFormatError(f"{path}: expected a JSON array of samples")
    samples = []
    for k, item in enumerate(raw):
        try:
            w = float(item["omega_rad_s"])
            re = float(item["re"])
            im = float(item["im"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"{path}: sample {k}: {exc}") from None
        samples.append(FrequencySample(1j * w, complex(re, im)))
    return FrequencyDataset(tuple(samples))


def save_json(dataset: FrequencyDataset, path) -> None:
    path = Path(path)
    items = []
    for k, smp in enumerate(dataset.samples):
        if smp.z.real != 0.0:
            raise DataFormatError(
                f"sample {k}: point {smp.z} is off the imaginary axis"
            )
        items.append(
            {"omega_rad_s": smp.z.imag, "re": smp.phi.real, "im": smp.phi.imag}
        )
    path.write_text(json.dumps(items, indent=1) + "\n")


def close_conjugate(dataset: FrequencyDataset) -> FrequencyDataset:
    """Add the conjugate partner of every non-real-axis point.

    Inserted partners land immediately after their originals, so conjugate
    pairs end up adjacent.  Idempotent.  If a partner is already present
    its response must equal the conjugated response to 1e-12 relative,
    otherwise a :class:`ConjugateConflictError` is raised.
    """
    by_point = {smp.z: smp.phi for smp in dataset.samples}
    out: list[FrequencySample] = []
    for smp in dataset.samples:
        out.append(smp)
        if smp.z.imag == 0.0:
            continue
        zc = smp.z.conjugate()
        if zc in by_point:
            expected = smp.phi.conjugate()
            tol = 1e-12 * max(abs(smp.phi), 1e-300)
            if abs(by_point[zc] - expected) > tol:
                raise ConjugateConflictError(
                    f"point {zc}: response {by_point[zc]} conflicts with "
                    f"conjugate of response at {smp.z}"
                )
        else:
            partner = FrequencySample(zc, smp.phi.conjugate())
            by_point[zc] = partner.phi
            out.append(partner)
    return FrequencyDataset(tuple(out), conjugate_closed=True)


def _units(dataset: FrequencyDataset) -> list[list[int]]:
    """Group sample indices into conjugate units (pairs, or real singletons)."""
    index_of: dict[complex, int] = {s.z: k for k, s in enumerate(dataset.samples)}
    used = [False] * len(dataset.samples)
    units: list[list[int]] = []
    for k, smp in enumerate(dataset.samples):
        if used[k]:
            continue
        used[k] = True
        if smp.z.imag == 0.0:
            units.append([k])
            continue
        j = index_of.get(smp.z.conjugate())
        if j is None or used[j]:
            raise PartitionSizeError(
                f"point {smp.z} has no available conjugate partner; "
                "dataset is not conjugate-closed"
            )
        used[j] = True
        units.append([k, j])
    return units


def partition_points(dataset: FrequencyDataset) -> PointPartition:
    """Split a conjugate-closed dataset into left and right interpolation sets.

    Conjugate units (a point plus its partner, or a lone real-axis point)
    are assigned alternately: unit 1 to the left set, unit 2 to the right
    set, and so on.  Alternation interleaves the frequency coverage of the
    two sides, which conditions the Loewner pencil noticeably better than
    a contiguous split.
    """
    if not dataset.conjugate_closed:
        raise PartitionSizeError(
            "dataset must be conjugate-closed before partitioning"
        )
    units = _units(dataset)
    if len(units) % 2 != 0:
        raise PartitionSizeError(
            f"cannot split an odd number of conjugate units ({len(units)})"
        )
    left_idx: list[int] = []
    right_idx: list[int] = []
    for u, unit in enumerate(units):
        (left_idx if u % 2 == 0 else right_idx).extend(unit)
    if len(left_idx) != len(right_idx):
        raise PartitionSizeError(
            f"alternating split is unbalanced: {len(left_idx)} left vs "
            f"{len(right_idx)} right points (mixed real/complex units)"
        )
    z = dataset.points()
    phi = dataset.values()
    return PointPartition(
        left_points=z[left_idx],
        left_values=phi[left_idx],
        right_points=z[right_idx],
        right_values=phi[right_idx],
    )

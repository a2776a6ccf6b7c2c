"""Portable containers for hyperspectral cubes and ground-truth maps.

Two single-file binary formats are used throughout:

``HSIC v1`` (cube)
    One ASCII header line ``HSIC1 height=<h> width=<w> n_bands=<n>
    dtype=f32le order=bsq`` -- optionally followed by a trailing
    ``wavelengths=<nm;nm;...>`` field -- terminated by ``\\n``, then the
    payload: ``h*w*n`` little-endian 32-bit floats in band-sequential
    order (all pixels of band 1 row-major, then band 2, ...).

``HSIG v1`` (ground truth)
    Header line ``HSIG1 height=<h> width=<w> dtype=u16le`` then ``h*w``
    little-endian 16-bit unsigned class labels, row-major.  Label 0 is
    reserved for background pixels.

Writers emit the canonical header spelling above, so loading a canonical
file and writing it back reproduces the input byte for byte.

For tiny test fixtures a plain-text form is also accepted: a directory of
per-band ``*.csv`` files (comma-separated, one row per line; band order is
the sorted file-name order) for cubes, and a single ``.csv`` file of
integer labels for ground truth.

Band indices are 0-based inside the library; all user-facing output uses
1-based ids.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ContainerError, ValidationError

_CUBE_MAGIC = "HSIC1"
_GT_MAGIC = "HSIG1"
_MAX_HEADER_BYTES = 1 << 20


@dataclass(frozen=True)
class HsiCube:
    """A hyperspectral image: ``values[row, col, band]``.

    ``values`` keeps whatever float dtype it was constructed with; the
    on-disk payload is always 32-bit.  All values must be finite.
    """

    height: int
    width: int
    n_bands: int
    values: np.ndarray
    wavelengths: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValidationError("cube spatial dimensions must be positive")
        if self.n_bands < 2:
            raise ValidationError("a cube needs at least 2 bands")
        if self.values.shape != (self.height, self.width, self.n_bands):
            raise ValidationError(
                f"cube values shape {self.values.shape} does not match "
                f"header {self.height}x{self.width}x{self.n_bands}"
            )
        if not np.isfinite(self.values).all():
            bsq = np.moveaxis(self.values, 2, 0)
            bad = int(np.flatnonzero(~np.isfinite(bsq).reshape(-1))[0])
            raise ValidationError(f"cube contains a non-finite value at payload index {bad}")
        if self.wavelengths is not None and len(self.wavelengths) != self.n_bands:
            raise ValidationError("wavelength count does not match band count")


@dataclass(frozen=True)
class GroundTruth:
    """Per-pixel integer class labels; 0 marks background."""

    height: int
    width: int
    labels: np.ndarray

    def __post_init__(self):
        if self.labels.shape != (self.height, self.width):
            raise ValidationError(
                f"label shape {self.labels.shape} does not match header "
                f"{self.height}x{self.width}"
            )
        if (self.labels < 0).any():
            raise ValidationError("class labels must be non-negative")
        if not (self.labels != 0).any():
            raise ValidationError("ground truth contains no non-background pixels")


@dataclass(frozen=True)
class PixelMatrix:
    """Standardized non-background pixels, one row per retained pixel.

    Rows follow row-major grid order (``pixel_index_map`` is strictly
    increasing in flat order).  Each non-constant band column is z-scored
    over the retained pixels using the sample standard deviation
    (divisor ``p_prime - 1``); constant bands are mapped to all zeros and
    listed in ``constant_bands`` (0-based).
    """

    p_prime: int
    n_bands: int
    values: np.ndarray
    pixel_index_map: np.ndarray
    labels: np.ndarray
    constant_bands: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.values.shape != (self.p_prime, self.n_bands):
            raise ValidationError("pixel matrix shape mismatch")
        if len(self.labels) != self.p_prime or len(self.pixel_index_map) != self.p_prime:
            raise ValidationError("labels / index map length mismatch")


def mask_and_standardize(cube: HsiCube, gt: GroundTruth) -> PixelMatrix:
    """Drop background pixels and z-score every band over the survivors."""
    if (cube.height, cube.width) != (gt.height, gt.width):
        raise ValidationError(
            f"cube is {cube.height}x{cube.width} but ground truth is "
            f"{gt.height}x{gt.width}"
        )
    flat_labels = gt.labels.reshape(-1)
    keep = np.flatnonzero(flat_labels != 0)
    if keep.size == 0:
        raise ValidationError("ground truth contains no non-background pixels")
    if keep.size < 2:
        raise ValidationError("fewer than 2 non-background pixels; statistics are undefined")

    x = cube.values.reshape(-1, cube.n_bands)[keep].astype(np.float64)
    constant = (x == x[0]).all(axis=0)
    mean = x.mean(axis=0)
    std = x.std(axis=0, ddof=1)
    std_safe = np.where(constant, 1.0, std)
    z = (x - mean) / std_safe
    z[:, constant] = 0.0
    for b in np.flatnonzero(constant):
        warnings.warn(f"band {b + 1} is constant over non-background pixels; standardized to zeros")

    rows, cols = np.divmod(keep, cube.width)
    return PixelMatrix(
        p_prime=int(keep.size),
        n_bands=cube.n_bands,
        values=z,
        pixel_index_map=np.stack([rows, cols], axis=1),
        labels=flat_labels[keep].astype(np.int64),
        constant_bands=tuple(int(b) for b in np.flatnonzero(constant)),
    )


def _read_header_line(raw: bytes, path: Path) -> tuple[str, bytes]:
    nl = raw.find(b"\n")
    if nl < 0 or nl > _MAX_HEADER_BYTES:
        raise ContainerError(f"{path}: missing header line terminator")
    try:
        header = raw[:nl].decode("ascii")
    except UnicodeDecodeError as exc:
        raise ContainerError(f"{path}: header is not ASCII text") from exc
    return header, raw[nl + 1 :]


def _parse_fields(header: str, magic: str, required: tuple[str, ...],
                  optional: tuple[str, ...], path: Path) -> dict[str, str]:
    tokens = header.split(" ")
    if not tokens or tokens[0] != magic:
        raise ContainerError(f"{path}: bad magic, expected {magic!r}")
    fields: dict[str, str] = {}
    for tok in tokens[1:]:
        key, sep, value = tok.partition("=")
        if not sep or not value:
            raise ContainerError(f"{path}: malformed header field {tok!r}")
        if key not in required and key not in optional:
            raise ContainerError(f"{path}: unknown header field {key!r}")
        if key in fields:
            raise ContainerError(f"{path}: duplicate header field {key!r}")
        fields[key] = value
    for key in required:
        if key not in fields:
            raise ContainerError(f"{path}: missing header field {key!r}")
    return fields


def _int_field(fields: dict[str, str], key: str, path: Path) -> int:
    try:
        value = int(fields[key])
    except ValueError as exc:
        raise ContainerError(f"{path}: header field {key!r} is not an integer") from exc
    if value < 1:
        raise ContainerError(f"{path}: header field {key!r} must be positive")
    return value


def load_cube(path: str | Path) -> HsiCube:
    """Read an HSIC v1 container, or a directory of per-band CSV files."""
    path = Path(path)
    if path.is_dir():
        return _load_cube_csv_dir(path)
    if not path.exists():
        raise ContainerError(f"cube file not found: {path}")
    raw = path.read_bytes()
    header, payload = _read_header_line(raw, path)
    fields = _parse_fields(
        header, _CUBE_MAGIC,
        required=("height", "width", "n_bands", "dtype", "order"),
        optional=("wavelengths",), path=path,
    )
    h = _int_field(fields, "height", path)
    w = _int_field(fields, "width", path)
    n = _int_field(fields, "n_bands", path)
    if fields["dtype"] != "f32le":
        raise ContainerError(f"{path}: unsupported dtype {fields['dtype']!r}")
    if fields["order"] != "bsq":
        raise ContainerError(f"{path}: unsupported order {fields['order']!r}")

    expected = h * w * n * 4
    if len(payload) != expected:
        raise ContainerError(
            f"{path}: payload size mismatch, header declares {h * w * n} values "
            f"({expected} bytes) but payload has {len(payload)} bytes"
        )
    flat = np.frombuffer(payload, dtype="<f4")
    finite = np.isfinite(flat)
    if not finite.all():
        bad = int(np.flatnonzero(~finite)[0])
        raise ContainerError(f"{path}: non-finite value at payload index {bad}")

    wavelengths = None
    if "wavelengths" in fields:
        try:
            wavelengths = tuple(float(v) for v in fields["wavelengths"].split(";"))
        except ValueError as exc:
            raise ContainerError(f"{path}: malformed wavelengths field") from exc
    values = np.moveaxis(flat.reshape(n, h, w), 0, 2).copy()
    try:
        return HsiCube(h, w, n, values, wavelengths)
    except ValidationError as exc:
        raise ContainerError(f"{path}: {exc}") from exc


def write_cube(cube: HsiCube, path: str | Path) -> None:
    """Write an HSIC v1 container (payload cast to 32-bit floats)."""
    path = Path(path)
    header = (
        f"{_CUBE_MAGIC} height={cube.height} width={cube.width} "
        f"n_bands={cube.n_bands} dtype=f32le order=bsq"
    )
    if cube.wavelengths is not None:
        header += " wavelengths=" + ";".join(repr(float(w)) for w in cube.wavelengths)
    bsq = np.moveaxis(cube.values, 2, 0)
    payload = np.ascontiguousarray(bsq, dtype="<f4").tobytes()
    path.write_bytes(header.encode("ascii") + b"\n" + payload)


def load_ground_truth(path: str | Path) -> GroundTruth:
    """Read an HSIG v1 container, or a CSV label grid."""
    path = Path(path)
    if not path.exists():
        raise ContainerError(f"ground truth file not found: {path}")
    raw = path.read_bytes()
    if not raw.startswith(_GT_MAGIC.encode("ascii")):
        return _load_gt_csv(path)
    header, payload = _read_header_line(raw, path)
    fields = _parse_fields(
        header, _GT_MAGIC, required=("height", "width", "dtype"), optional=(), path=path
    )
    h = _int_field(fields, "height", path)
    w = _int_field(fields, "width", path)
    if fields["dtype"] != "u16le":
        raise ContainerError(f"{path}: unsupported dtype {fields['dtype']!r}")
    expected = h * w * 2
    if len(payload) != expected:
        raise ContainerError(
            f"{path}: payload size mismatch, header declares {h * w} labels "
            f"({expected} bytes) but payload has {len(payload)} bytes"
        )
    labels = np.frombuffer(payload, dtype="<u2").reshape(h, w).astype(np.int64)
    try:
        return GroundTruth(h, w, labels)
    except ValidationError as exc:
        raise ContainerError(f"{path}: {exc}") from exc


def write_ground_truth(gt: GroundTruth, path: str | Path) -> None:
    """Write an HSIG v1 container."""
    path = Path(path)
    if (gt.labels > 0xFFFF).any():
        raise ValidationError("labels exceed the u16 container range")
    header = f"{_GT_MAGIC} height={gt.height} width={gt.width} dtype=u16le"
    payload = np.ascontiguousarray(gt.labels, dtype="<u2").tobytes()
    path.write_bytes(header.encode("ascii") + b"\n" + payload)


def _read_csv_grid(path: Path) -> list[list[str]]:
    rows = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if line:
            rows.append([cell.strip() for cell in line.split(",")])
    if not rows:
        raise ContainerError(f"{path}: empty CSV grid")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ContainerError(f"{path}: ragged CSV row {i}")
    return rows


def _load_cube_csv_dir(path: Path) -> HsiCube:
    files = sorted(p for p in path.iterdir() if p.suffix == ".csv")
    if len(files) < 2:
        raise ContainerError(f"{path}: need at least 2 per-band CSV files, found {len(files)}")
    planes = []
    for f in files:
        rows = _read_csv_grid(f)
        try:
            planes.append(np.array([[float(c) for c in row] for row in rows], dtype=np.float64))
        except ValueError as exc:
            raise ContainerError(f"{f}: non-numeric cell") from exc
    shape = planes[0].shape
    for f, plane in zip(files, planes):
        if plane.shape != shape:
            raise ContainerError(f"{f}: band shape {plane.shape} differs from {shape}")
    values = np.stack(planes, axis=2)
    try:
        return HsiCube(shape[0], shape[1], len(planes), values)
    except ValidationError as exc:
        raise ContainerError(f"{path}: {exc}") from exc


def _load_gt_csv(path: Path) -> GroundTruth:
    rows = _read_csv_grid(path)
    try:
        labels = np.array([[int(c) for c in row] for row in rows], dtype=np.int64)
    except ValueError as exc:
        raise ContainerError(f"{path}: non-integer label cell") from exc
    try:
        return GroundTruth(labels.shape[0], labels.shape[1], labels)
    except ValidationError as exc:
        raise ContainerError(f"{path}: {exc}") from exc

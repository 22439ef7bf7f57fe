"""Bit-exact reader/writer for the MNIST IDX image and label containers.

Image files: u32be magic 2051, count, rows, cols, then one byte per pixel,
row-major, images concatenated.  Label files: u32be magic 2049, count, then
one byte per label.  Files may be gzip-wrapped; a ``.gz`` payload decodes
identically to its plain form.
"""

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801

# MNIST's conventional file names, so generated directories are drop-in
# replacements for the original dataset.
TRAIN_IMAGES_NAME = "train-images-idx3-ubyte"
TRAIN_LABELS_NAME = "train-labels-idx1-ubyte"
TEST_IMAGES_NAME = "t10k-images-idx3-ubyte"
TEST_LABELS_NAME = "t10k-labels-idx1-ubyte"


class IdxError(ValueError):
    """Malformed IDX data."""


class BadMagicError(IdxError):
    """Payload does not start with the expected magic number."""


class TruncatedError(IdxError):
    """Payload is shorter than its header declares."""


class TrailingDataError(IdxError):
    """Payload continues past the declared length."""


@dataclass(frozen=True)
class IdxImageSet:
    """A stack of equally sized grayscale images."""

    count: int
    rows: int
    cols: int
    pixels: bytes

    def __post_init__(self):
        if self.count < 0:
            raise IdxError(f"negative image count {self.count}")
        if self.rows <= 0 or self.cols <= 0:
            raise IdxError(f"non-positive image shape {self.rows}x{self.cols}")
        expected = self.count * self.rows * self.cols
        if len(self.pixels) != expected:
            raise IdxError(
                f"pixel buffer holds {len(self.pixels)} bytes, "
                f"expected {self.count}*{self.rows}*{self.cols}={expected}"
            )

    def image(self, i: int) -> bytes:
        size = self.rows * self.cols
        return self.pixels[i * size:(i + 1) * size]


@dataclass(frozen=True)
class IdxLabelSet:
    """Class labels, one byte each, values 0..9."""

    count: int
    labels: bytes

    def __post_init__(self):
        if self.count < 0:
            raise IdxError(f"negative label count {self.count}")
        if len(self.labels) != self.count:
            raise IdxError(
                f"label buffer holds {len(self.labels)} bytes, expected {self.count}"
            )
        for i, v in enumerate(self.labels):
            if v > 9:
                raise IdxError(f"label {v} at index {i} out of range 0..9")


def write_images(s: IdxImageSet) -> bytes:
    return struct.pack(">IIII", IMAGE_MAGIC, s.count, s.rows, s.cols) + s.pixels


def write_labels(s: IdxLabelSet) -> bytes:
    return struct.pack(">II", LABEL_MAGIC, s.count) + s.labels


def _ungzip(data: bytes) -> bytes:
    if data[:2] == b"\x1f\x8b":
        return gzip.decompress(data)
    return data


def read_images(data: bytes) -> IdxImageSet:
    data = _ungzip(data)
    if len(data) < 16:
        raise TruncatedError(f"need 16 header bytes, got {len(data)}")
    magic, count, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != IMAGE_MAGIC:
        raise BadMagicError(f"image magic 0x{IMAGE_MAGIC:08x} expected, got 0x{magic:08x}")
    expected = 16 + count * rows * cols
    if len(data) < expected:
        raise TruncatedError(f"payload is {len(data)} bytes, header declares {expected}")
    if len(data) > expected:
        raise TrailingDataError(f"{len(data) - expected} bytes past declared length")
    return IdxImageSet(count=count, rows=rows, cols=cols, pixels=data[16:])


def read_labels(data: bytes) -> IdxLabelSet:
    data = _ungzip(data)
    if len(data) < 8:
        raise TruncatedError(f"need 8 header bytes, got {len(data)}")
    magic, count = struct.unpack(">II", data[:8])
    if magic != LABEL_MAGIC:
        raise BadMagicError(f"label magic 0x{LABEL_MAGIC:08x} expected, got 0x{magic:08x}")
    expected = 8 + count
    if len(data) < expected:
        raise TruncatedError(f"payload is {len(data)} bytes, header declares {expected}")
    if len(data) > expected:
        raise TrailingDataError(f"{len(data) - expected} bytes past declared length")
    return IdxLabelSet(count=count, labels=data[8:])


def _write_file(path, data: bytes):
    path = Path(path)
    if path.suffix == ".gz":
        data = gzip.compress(data)
    path.write_bytes(data)


def _read_file(path) -> bytes:
    return _ungzip(Path(path).read_bytes())


def save_images(path, s: IdxImageSet):
    _write_file(path, write_images(s))


def save_labels(path, s: IdxLabelSet):
    _write_file(path, write_labels(s))


def load_images(path) -> IdxImageSet:
    return read_images(_read_file(path))


def load_labels(path) -> IdxLabelSet:
    return read_labels(_read_file(path))

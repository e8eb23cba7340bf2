"""8-bit images with binary PPM (P6) / PGM (P5) I/O and luma statistics."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class ImageFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Image:
    pixels: np.ndarray  # (h, w) or (h, w, 3), uint8

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.dtype != np.uint8:
            raise ImageFormatError("pixels must be uint8")
        if px.ndim == 3 and px.shape[2] == 1:
            px = px[:, :, 0]
        if px.ndim not in (2, 3) or (px.ndim == 3 and px.shape[2] != 3):
            raise ImageFormatError(f"unsupported pixel array shape {px.shape}")
        if px.shape[0] == 0 or px.shape[1] == 0:
            raise ImageFormatError("image must be non-empty")
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else 3

    @property
    def size(self) -> tuple[int, int]:
        return self.width, self.height

    def __eq__(self, other):
        return isinstance(other, Image) and np.array_equal(self.pixels, other.pixels)

    def to_bytes(self) -> bytes:
        magic = b"P5" if self.channels == 1 else b"P6"
        return magic + f"\n{self.width} {self.height}\n255\n".encode() + self.pixels.tobytes()

    def sha256(self) -> str:
        return hashlib.sha256(self.to_bytes()).hexdigest()

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> "Image":
        fields, pos = [], 0
        while len(fields) < 4:
            while pos < len(data) and data[pos:pos + 1].isspace():
                pos += 1
            if data[pos:pos + 1] == b"#":
                while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
                continue
            start = pos
            while pos < len(data) and not data[pos:pos + 1].isspace():
                pos += 1
            if start == pos:
                raise ImageFormatError("truncated PNM header")
            fields.append(data[start:pos])
        magic = fields[0]
        if magic not in (b"P5", b"P6"):
            raise ImageFormatError(f"unsupported PNM magic {magic!r}")
        try:
            width, height, maxval = (int(f) for f in fields[1:])
        except ValueError as exc:
            raise ImageFormatError("bad PNM header") from exc
        if maxval != 255:
            raise ImageFormatError("only 8-bit PNM (maxval 255) is supported")
        pos += 1  # single whitespace after maxval
        channels = 1 if magic == b"P5" else 3
        n = width * height * channels
        body = data[pos:pos + n]
        if len(body) != n or width <= 0 or height <= 0:
            raise ImageFormatError("PNM pixel data length mismatch")
        px = np.frombuffer(body, dtype=np.uint8)
        shape = (height, width) if channels == 1 else (height, width, 3)
        return cls(px.reshape(shape).copy())

    @classmethod
    def load(cls, path) -> "Image":
        return cls.from_bytes(Path(path).read_bytes())

    @classmethod
    def constant(cls, width: int, height: int, value: int, channels: int = 1) -> "Image":
        shape = (height, width) if channels == 1 else (height, width, 3)
        return cls(np.full(shape, value, dtype=np.uint8))


def luma(img: Image) -> np.ndarray:
    """Per-pixel luma ``(299 R + 587 G + 114 B) / 1000``; gray images pass through."""
    px = img.pixels.astype(np.int64)
    if img.channels == 1:
        return px.astype(float)
    return (299 * px[..., 0] + 587 * px[..., 1] + 114 * px[..., 2]) / 1000.0


@dataclass(frozen=True)
class LumaStats:
    mean: float
    p5: float
    p95: float

    def to_dict(self) -> dict:
        return {"mean": self.mean, "p5": self.p5, "p95": self.p95}


def _nearest_rank(sorted_values: np.ndarray, pct: float) -> float:
    rank = max(1, math.ceil(pct / 100.0 * len(sorted_values)))
    return float(sorted_values[rank - 1])


def luminance_stats(img: Image) -> LumaStats:
    y = np.sort(luma(img), axis=None)
    # integer accumulation keeps the mean exact before the final division
    if img.channels == 1:
        total = int(img.pixels.astype(np.int64).sum())
        mean = total / y.size
    else:
        px = img.pixels.astype(np.int64)
        total = int((299 * px[..., 0] + 587 * px[..., 1] + 114 * px[..., 2]).sum())
        mean = total / (1000 * y.size)
    return LumaStats(mean, _nearest_rank(y, 5), _nearest_rank(y, 95))

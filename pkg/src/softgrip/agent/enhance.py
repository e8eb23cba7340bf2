"""Brightness gating and the built-in lookup-table enhancer.

Enhancement is gamma correction followed by global histogram equalization,
both applied as 256-entry tables so every transfer function is monotone.
Brighten keeps the pointwise maximum of the gamma and equalized tables and
darken the minimum, so neither mode moves a pixel the wrong way.
"""

from __future__ import annotations

import enum
import subprocess
from dataclasses import asdict, dataclass

import numpy as np

from .image import Image, ImageFormatError, LumaStats


class Mode(str, enum.Enum):
    NONE = "none"
    BRIGHTEN = "brighten"
    DARKEN = "darken"


@dataclass(frozen=True)
class GateThresholds:
    low: float = 60.0
    high: float = 200.0

    def __post_init__(self):
        if not 0 <= self.low < self.high <= 255:
            raise ValueError("need 0 <= low < high <= 255")


def should_enhance(stats: LumaStats, thresholds: GateThresholds | None = None) -> Mode:
    t = thresholds or GateThresholds()
    if stats.mean < t.low:
        return Mode.BRIGHTEN
    if stats.mean > t.high:
        return Mode.DARKEN
    return Mode.NONE


@dataclass(frozen=True)
class EnhanceParams:
    brighten_gamma: float = 0.5
    darken_gamma: float = 2.0
    equalize: bool = True

    def __post_init__(self):
        if self.brighten_gamma <= 0 or self.darken_gamma <= 0:
            raise ValueError("gamma must be > 0")

    def gamma_for(self, mode: Mode) -> float:
        return {Mode.BRIGHTEN: self.brighten_gamma, Mode.DARKEN: self.darken_gamma}.get(mode, 1.0)

    def to_dict(self) -> dict:
        return asdict(self)


def round_half_up(x: np.ndarray) -> np.ndarray:
    return np.floor(np.asarray(x, dtype=float) + 0.5)


def gamma_table(gamma: float) -> np.ndarray:
    """``v -> 255 * (v / 255) ** gamma``, rounded half up."""
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    v = np.arange(256, dtype=float)
    return np.clip(round_half_up(255.0 * (v / 255.0) ** gamma), 0, 255).astype(np.uint8)


def equalization_table(values: np.ndarray) -> np.ndarray:
    """Classic cdf remap; single-valued histograms map to the identity."""
    hist = np.bincount(np.asarray(values, dtype=np.uint8).ravel(), minlength=256)
    cdf = np.cumsum(hist)
    total = int(cdf[-1])
    cdf_min = int(cdf[np.flatnonzero(hist)[0]])
    if total == cdf_min:
        return np.arange(256, dtype=np.uint8)
    scaled = round_half_up((cdf - cdf_min) * 255.0 / (total - cdf_min))
    return np.clip(scaled, 0, 255).astype(np.uint8)


def transfer_table(img: Image, mode: Mode, params: EnhanceParams | None = None) -> np.ndarray:
    params = params or EnhanceParams()
    identity = np.arange(256, dtype=np.uint8)
    if mode is Mode.NONE:
        return identity
    g = gamma_table(params.gamma_for(mode))
    if not params.equalize:
        return g
    eq = equalization_table(g[img.pixels])
    combined = eq[g]
    pick = np.maximum if mode is Mode.BRIGHTEN else np.minimum
    return pick(g, combined)


def enhance(img: Image, mode: Mode, params: EnhanceParams | None = None) -> Image:
    mode = Mode(mode)
    if mode is Mode.NONE or np.all(img.pixels == img.pixels.flat[0]):
        return img
    table = transfer_table(img, mode, params)
    return Image(table[img.pixels])


class EnhancerHookError(RuntimeError):
    pass


def run_external_enhancer(command: list[str], img: Image, timeout: float = 30.0) -> Image:
    """Pipe ``img`` as PNM through ``command``; it must write a PNM of the same size."""
    try:
        proc = subprocess.run(command, input=img.to_bytes(), capture_output=True, timeout=timeout)
    except (OSError, subprocess.SubprocessError) as exc:
        raise EnhancerHookError(f"enhancer hook failed to run: {exc}") from exc
    if proc.returncode != 0:
        raise EnhancerHookError(f"enhancer hook exited with status {proc.returncode}")
    try:
        out = Image.from_bytes(proc.stdout)
    except ImageFormatError as exc:
        raise EnhancerHookError(f"enhancer hook wrote an unreadable image: {exc}") from exc
    if out.pixels.shape != img.pixels.shape:
        raise EnhancerHookError("enhancer hook changed the image dimensions")
    return out

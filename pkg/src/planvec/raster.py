"""Loading plans and reducing them to a clean black/white ink mask.

Images are plain numpy arrays: ``uint8`` of shape ``(H, W)`` for one
channel or ``(H, W, 3)`` for RGB. Binary images are ``bool`` ``(H, W)``
arrays where ``True`` marks ink (wall).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from planvec.errors import UnsupportedFormatError

DEFAULT_THRESHOLD = 128


def _channels(img: np.ndarray) -> int:
    if img.ndim == 2:
        return 1
    if img.ndim == 3:
        return img.shape[2]
    raise UnsupportedFormatError(f"expected a 2-D or 3-D pixel array, got {img.ndim}-D")


def check_raster(img: np.ndarray) -> np.ndarray:
    """Validate a raster and return it as ``uint8``."""
    img = np.asarray(img)
    ch = _channels(img)
    if ch not in (1, 3):
        raise UnsupportedFormatError(f"unsupported channel count {ch}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise UnsupportedFormatError("image must be at least 1x1")
    if img.dtype != np.uint8:
        if img.size and (img.min() < 0 or img.max() > 255):
            raise UnsupportedFormatError("samples must lie in [0, 255]")
        img = img.astype(np.uint8)
    return img


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Unweighted channel mean, rounded to the nearest integer."""
    img = check_raster(img)
    if img.ndim == 2:
        return img
    s = img.astype(np.uint16).sum(axis=2)
    # s/3 never lands on .5, so (s + 1) // 3 is exact rounding
    return ((s + 1) // 3).astype(np.uint8)


def binarize(gray: np.ndarray, threshold: int = DEFAULT_THRESHOLD) -> np.ndarray:
    gray = np.asarray(gray)
    if gray.ndim != 2:
        raise ValueError("binarize expects a single-channel image")
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold {threshold} outside [0, 255]")
    return gray < threshold


def to_rgb(binary: np.ndarray) -> np.ndarray:
    binary = np.asarray(binary, dtype=bool)
    out = np.where(binary, 0, 255).astype(np.uint8)
    return np.repeat(out[:, :, None], 3, axis=2)


def to_intensity(binary: np.ndarray) -> np.ndarray:
    """Single-channel 0/255 rendering of a binary mask."""
    return np.where(np.asarray(binary, dtype=bool), 0, 255).astype(np.uint8)


def preprocess(img: np.ndarray, threshold: int = DEFAULT_THRESHOLD) -> np.ndarray:
    return binarize(to_grayscale(img), threshold)


def load_image(path: str | Path) -> np.ndarray:
    """Read a PNG or PGM/PPM file.

    Alpha is composited over white. Returns ``(H, W)`` or ``(H, W, 3)`` uint8.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            if im.format not in ("PNG", "PPM"):
                raise UnsupportedFormatError(f"{path}: unsupported format {im.format}")
            im.load()
            if im.mode in ("RGBA", "LA", "PA") or (im.mode == "P" and "transparency" in im.info):
                rgba = im.convert("RGBA")
                white = Image.new("RGBA", rgba.size, (255, 255, 255, 255))
                im = Image.alpha_composite(white, rgba).convert("RGB")
            elif im.mode == "P":
                im = im.convert("RGB")
            elif im.mode in ("I;16", "I;16B", "I"):
                arr = np.asarray(im, dtype=np.float64)
                return np.clip(np.round(arr / 257.0), 0, 255).astype(np.uint8)
            elif im.mode == "1":
                im = im.convert("L")
            if im.mode not in ("L", "RGB"):
                raise UnsupportedFormatError(f"{path}: unsupported mode {im.mode}")
            return np.array(im, dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as exc:
        raise UnsupportedFormatError(f"{path}: cannot decode image ({exc})") from exc


def save_image(img: np.ndarray, path: str | Path) -> None:
    """Write PNG, or PGM/PPM when the suffix asks for it."""
    img = np.asarray(img)
    if img.dtype == bool:
        img = to_intensity(img)
    img = check_raster(img)
    path = Path(path)
    fmt = "PPM" if path.suffix.lower() in (".pgm", ".ppm", ".pnm") else "PNG"
    Image.fromarray(img).save(path, format=fmt)

"""Deterministic image conditioning: grayscale, downscale, threshold, morphology.

Images are 2D numpy arrays, row-major, row 0 at the top. Grayscale images are
uint8, masks are bool. All functions are pure and safe to run on independent
images in parallel.
"""

import numpy as np
from PIL import Image

# BT.601 luma weights; the conversion used by the source study is unspecified.
_LUMA = np.array([0.299, 0.587, 0.114])

DEFAULT_THRESHOLD = 200


class GeometryError(ValueError):
    """Raised for unsupported image geometry (e.g. odd dims in resize_half)."""


def _round_half_up(x):
    # np.round is banker's rounding; the pipeline pins half-up everywhere.
    return np.floor(x + 0.5)


def to_grayscale(img):
    """Convert an (H, W, 3) uint8 RGB array to (H, W) uint8 luma.

    Per-pixel value is round(0.299*r + 0.587*g + 0.114*b), half-up.
    """
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) RGB array, got shape {img.shape}")
    luma = _round_half_up(img.astype(np.float64) @ _LUMA)
    return np.clip(luma, 0, 255).astype(np.uint8)


def resize_half(img):
    """Downscale a grayscale image by 2x using exact 2x2 area averaging.

    Both dimensions must be even; each output pixel is the half-up rounded
    mean of its 2x2 source block.
    """
    img = np.asarray(img)
    h, w = img.shape
    if h % 2 or w % 2:
        raise GeometryError(f"resize_half needs even dimensions, got {h}x{w}")
    blocks = img.astype(np.float64).reshape(h // 2, 2, w // 2, 2)
    return np.clip(_round_half_up(blocks.mean(axis=(1, 3))), 0, 255).astype(np.uint8)


def threshold(img, k=DEFAULT_THRESHOLD, invert=False):
    """Binarize a grayscale image: foreground where intensity < k.

    Dark tissue on a light background is the default orientation; pass
    invert=True to keep intensity >= k instead.
    """
    img = np.asarray(img)
    return (img >= k) if invert else (img < k)


def dilate(mask):
    """Dilate a boolean mask with a 2x2 kernel anchored at the top-left.

    Every foreground pixel (r, c) also marks (r, c+1), (r+1, c), (r+1, c+1);
    offsets falling outside the image are discarded.
    """
    mask = np.asarray(mask, dtype=bool)
    out = mask.copy()
    out[:, 1:] |= mask[:, :-1]
    out[1:, :] |= mask[:-1, :]
    out[1:, 1:] |= mask[:-1, :-1]
    return out


def erode(mask):
    """Erode a boolean mask with the same 2x2 kernel as dilate.

    A pixel survives iff its whole 2x2 block (anchored at the pixel) is
    foreground; blocks extending past the border do not survive.
    """
    mask = np.asarray(mask, dtype=bool)
    out = np.zeros_like(mask)
    out[:-1, :-1] = mask[:-1, :-1] & mask[:-1, 1:] & mask[1:, :-1] & mask[1:, 1:]
    return out


def load_image(path):
    """Load a PNG/JPEG file as an RGB or grayscale uint8 array.

    16-bit inputs are rescaled to 8-bit by integer division by 257.
    """
    with Image.open(path) as im:
        if im.mode in ("I", "I;16", "I;16B", "I;16L"):
            arr = np.asarray(im, dtype=np.uint32)
            return (arr // 257).astype(np.uint8)
        if im.mode == "L":
            return np.asarray(im, dtype=np.uint8)
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def prepare(img, k=DEFAULT_THRESHOLD, invert=False, morphology="dilate",
            max_side=512):
    """Full conditioning pipeline: grayscale, halve while too large, threshold,
    then one morphology pass.

    Returns (gray, mask). `morphology` is one of "dilate", "erode", "none".
    """
    img = np.asarray(img)
    gray = to_grayscale(img) if img.ndim == 3 else img.astype(np.uint8)
    while max(gray.shape) > max_side:
        gray = resize_half(gray)
    mask = threshold(gray, k, invert=invert)
    if morphology == "dilate":
        mask = dilate(mask)
    elif morphology == "erode":
        mask = erode(mask)
    elif morphology != "none":
        raise ValueError(f"unknown morphology {morphology!r}")
    return gray, mask

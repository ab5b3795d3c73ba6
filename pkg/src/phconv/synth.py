"""Synthetic slide generation: ring-textured grayscale images in three
classes with distinct cell-size statistics, plus a fixed two-legged test
structure with three enclosed regions. Used by the benchmark mode and by
test suites; real datasets are ingested from disk instead.
"""

import numpy as np
from PIL import Image

CLASSES = ("necrotic-tumor", "non-tumor", "viable-tumor")

# (ring count range, ring radius range) per class; radii in pixels at
# side=512 and scaled linearly for other sides.
_CLASS_PARAMS = {
    "non-tumor": ((40, 70), (4.0, 9.0)),
    "necrotic-tumor": ((8, 18), (18.0, 36.0)),
    "viable-tumor": ((70, 110), (6.0, 16.0)),
}


def a_frame_mask(side=64):
    """Two-legged frame mask enclosing exactly three regions.

    The structure spans the full height; one leg starts at 10% height and
    joins the body at 40%; the upper-right region's bounding cycle tops out
    near 90% and bottoms near 60% of the height. Stroke coordinates are
    expressed on a 64-pixel grid and scaled to `side`.
    """
    m = np.zeros((side, side), dtype=bool)
    s = side / 64.0

    def stroke(x0, x1, y0, y1):
        xa, xb = int(round(x0 * s)), int(round((x1 + 1) * s)) - 1
        ya, yb = int(round(y0 * s)), int(round((y1 + 1) * s)) - 1
        m[side - 1 - yb:side - ya, xa:xb + 1] = True

    stroke(52, 55, 0, 63)    # right stroke, full height
    stroke(8, 11, 6, 24)     # left leg (separate component until the rung)
    stroke(8, 11, 25, 63)    # left arm
    stroke(8, 55, 25, 26)    # bottom rung, joins leg, arm, rail and stroke
    stroke(24, 27, 25, 57)   # middle rail
    stroke(8, 27, 33, 34)    # rung arm-rail (hole 1 top)
    stroke(24, 55, 38, 39)   # rung rail-stroke (hole 2 top, hole 3 bottom)
    stroke(24, 55, 56, 57)   # rung rail-stroke (hole 3 top)
    return m


def lace_slide(side=512, pitch=12, seed=0, jitter=0.25):
    """Dense cell-lattice texture: touching rings on a jittered lattice.

    Mimics the connected cell-boundary lace that thresholding dilated tissue
    boundaries produces; used by benchmarks as a heavy synthetic workload.
    """
    rng = np.random.default_rng(seed)
    img = np.full((side, side), 232.0)
    img += rng.normal(0.0, 5.0, size=img.shape)
    r = pitch / 2.0
    rows = np.arange(r, side - r + 1, pitch * 0.87)
    for k, cy in enumerate(rows):
        for cx in np.arange(r + (k % 2) * r, side - r + 1, pitch):
            rad = r * rng.uniform(1.0 - jitter, 1.0 + jitter)
            _draw_ring(img, cy + rng.uniform(-2, 2), cx + rng.uniform(-2, 2),
                       rad, 2.4, rng.uniform(70, 150))
    return np.clip(np.round(img), 0, 255).astype(np.uint8)


def _draw_ring(img, cy, cx, radius, thickness, value):
    h, w = img.shape
    r0 = int(max(0, np.floor(cy - radius - thickness)))
    r1 = int(min(h, np.ceil(cy + radius + thickness) + 1))
    c0 = int(max(0, np.floor(cx - radius - thickness)))
    c1 = int(min(w, np.ceil(cx + radius + thickness) + 1))
    if r0 >= r1 or c0 >= c1:
        return
    yy, xx = np.mgrid[r0:r1, c0:c1]
    dist = np.sqrt((yy - cy) ** 2 + (xx - cx) ** 2)
    band = np.abs(dist - radius) <= thickness / 2.0
    patch = img[r0:r1, c0:c1]
    patch[band] = np.minimum(patch[band], value)


def synth_slide(label, side=512, seed=0):
    """One synthetic grayscale slide: dark cell-boundary rings on a light
    background; ring statistics depend on the class label."""
    if label not in _CLASS_PARAMS:
        raise ValueError(f"unknown class {label!r}; expected one of {CLASSES}")
    rng = np.random.default_rng(seed)
    (n_lo, n_hi), (r_lo, r_hi) = _CLASS_PARAMS[label]
    scale = side / 512.0
    img = np.full((side, side), 232, dtype=np.float64)
    img += rng.normal(0.0, 5.0, size=img.shape)

    n_rings = int(rng.integers(n_lo, n_hi + 1))
    thickness = max(1.6, 2.4 * scale)
    margin = thickness / 2.0 + 4.0  # keep strokes clear of the border
    for _ in range(n_rings):
        radius = rng.uniform(r_lo, r_hi) * scale
        cy = rng.uniform(radius + margin, side - radius - margin)
        cx = rng.uniform(radius + margin, side - radius - margin)
        value = rng.uniform(70, 150)
        _draw_ring(img, cy, cx, radius, thickness, value)
    return np.clip(np.round(img), 0, 255).astype(np.uint8)


def synth_dataset(outdir, per_class=4, side=512, seed=0):
    """Write a class-subfoldered PNG dataset; returns the written paths."""
    from pathlib import Path

    out = Path(outdir)
    paths = []
    for ci, label in enumerate(CLASSES):
        d = out / label
        d.mkdir(parents=True, exist_ok=True)
        for k in range(per_class):
            img = synth_slide(label, side=side, seed=seed * 100_003 + ci * 1009 + k)
            p = d / f"{label}-{k:04d}.png"
            Image.fromarray(img, mode="L").save(p)
            paths.append(str(p))
    return paths

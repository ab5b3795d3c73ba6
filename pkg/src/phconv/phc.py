"""Windowed persistence: slide an M x M window over an N x N image with
stride c, compute per-window persistence of the configured filtration,
vectorize each diagram, and stack the grids into a (W, n, n) tensor.

Windows are independent work items; the stack is assembled in row-major
window order regardless of scheduling, so output is deterministic for any
worker count.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from phconv import imgprep
from phconv.complexes import (build_adjacency_complex, build_alpha,
                              build_lower_star)
from phconv.persistence import Kind, reduce_extended, reduce_ordinary
from phconv.vectorize import VectorizationParams, persistence_image, select_intervals

FILTRATIONS = ("height", "alpha", "lowerstar")


class ConfigError(ValueError):
    """Raised for invalid window/stride/kernel geometry or parameters."""


@dataclass(frozen=True)
class WindowGrid:
    n_image: int   # image side N
    window: int    # window side M
    stride: int    # stride c
    k_side: int
    origins: tuple  # ((row, col), ...) in row-major window order

    @property
    def n_windows(self):
        return self.k_side * self.k_side


def make_window_grid(n_image, window, stride):
    """Window origins covering an N x N image: K = floor((N - M) / c) + 1
    positions per axis, so the reported tensor shape arithmetic holds."""
    if not (1 <= stride <= window <= n_image):
        raise ConfigError(
            f"need 1 <= stride <= window <= image side, got c={stride}, "
            f"M={window}, N={n_image}")
    k_side = (n_image - window) // stride + 1
    origins = tuple((stride * i, stride * j)
                    for i in range(k_side) for j in range(k_side))
    return WindowGrid(n_image, window, stride, k_side, origins)


@dataclass(frozen=True)
class PHCConfig:
    filtration: str = "height"
    window: int = 32
    stride: int = 32
    resolution: int = 20
    threshold: int = imgprep.DEFAULT_THRESHOLD
    invert: bool = False
    morphology: str = "dilate"
    sigma: float = 1.0
    weight: str = "linear"
    range_max: float = None   # None: window side (image side in global mode)
    kinds: tuple = None       # None: Ext1 for height, Ord1 otherwise
    connectivity: int = 8
    flag_triangles: bool = True
    max_side: int = 512
    workers: int = 1

    def __post_init__(self):
        if self.filtration not in FILTRATIONS:
            raise ConfigError(f"filtration must be one of {FILTRATIONS}")

    def interval_kinds(self):
        if self.kinds is not None:
            return frozenset(Kind(k) if not isinstance(k, Kind) else k
                             for k in self.kinds)
        return frozenset({Kind.EXT1} if self.filtration == "height"
                         else {Kind.ORD1})

    def vector_params(self, extent):
        return VectorizationParams(
            n=self.resolution,
            range_max=self.range_max if self.range_max is not None else float(extent),
            sigma=self.sigma,
            weight=self.weight,
        )

    def describe(self):
        d = asdict(self)
        d["kinds"] = sorted(k.value for k in self.interval_kinds())
        return d


@dataclass(frozen=True)
class PHCTensor:
    data: np.ndarray          # (W, n, n) float32
    grid: WindowGrid
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.data.shape

    def window_index(self, flat):
        return self.grid.origins[flat]

    def slice_at(self, row, col):
        return self.data[self.grid.origins.index((row, col))]


def window_diagram(sub, cfg, extent=None, window=None, kinds=None):
    """Diagram of one window (mask for height/alpha, grayscale for lowerstar).

    `kinds` restricts which interval kinds are materialized; None keeps all.
    """
    if cfg.filtration == "height":
        cx = build_adjacency_complex(sub, cfg.connectivity, cfg.flag_triangles)
        return reduce_extended(cx, "height", window, kinds=kinds)
    if cfg.filtration == "alpha":
        return reduce_ordinary(build_alpha(sub), "alpha", window)
    cx = build_lower_star(sub, cfg.connectivity, cfg.flag_triangles)
    return reduce_ordinary(cx, "lowerstar", window)


def _window_job(args):
    sub, cfg, extent = args
    kinds = cfg.interval_kinds()
    t0 = time.perf_counter()
    diagram = window_diagram(sub, cfg, extent, kinds=kinds)
    t1 = time.perf_counter()
    grid = persistence_image(select_intervals(diagram, kinds),
                             cfg.vector_params(extent))
    t2 = time.perf_counter()
    return grid.astype(np.float32), t1 - t0, t2 - t1


def _map_jobs(fn, jobs, workers):
    if workers and workers > 1 and len(jobs) > 1:
        chunk = max(1, len(jobs) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, jobs, chunksize=chunk))
    return [fn(j) for j in jobs]


def window_source(gray, cfg):
    """Per-window input plane: global threshold + morphology for mask-based
    filtrations, raw grayscale for lowerstar."""
    if cfg.filtration == "lowerstar":
        return np.asarray(gray)
    mask = imgprep.threshold(gray, cfg.threshold, invert=cfg.invert)
    if cfg.morphology == "dilate":
        mask = imgprep.dilate(mask)
    elif cfg.morphology == "erode":
        mask = imgprep.erode(mask)
    elif cfg.morphology != "none":
        raise ConfigError(f"unknown morphology {cfg.morphology!r}")
    return mask


def phc_stack(gray, cfg: PHCConfig = None, timings=None):
    """Per-window vectorized persistence of an N x N grayscale image.

    Thresholding happens once, globally; each window is a restriction of the
    thresholded plane. Returns a PHCTensor of shape (K^2, n, n).
    """
    cfg = cfg or PHCConfig()
    gray = np.asarray(gray)
    if gray.ndim != 2 or gray.shape[0] != gray.shape[1]:
        raise ConfigError(f"expected a square grayscale image, got {gray.shape}")
    n_image = gray.shape[0]
    grid = make_window_grid(n_image, cfg.window, cfg.stride)

    t0 = time.perf_counter()
    plane = window_source(gray, cfg)
    t_prep = time.perf_counter() - t0

    m = cfg.window
    jobs = [(plane[r:r + m, c:c + m].copy(), cfg, m) for r, c in grid.origins]
    results = _map_jobs(_window_job, jobs, cfg.workers)
    data = np.stack([g for g, _, _ in results]) if results else \
        np.zeros((0, cfg.resolution, cfg.resolution), dtype=np.float32)
    if timings is not None:
        timings["prep_ms"] = 1e3 * t_prep
        timings["persistence_ms"] = 1e3 * sum(t for _, t, _ in results)
        timings["vectorize_ms"] = 1e3 * sum(t for _, _, t in results)
    return PHCTensor(data=data, grid=grid, meta=cfg.describe())


def global_ph(gray, cfg: PHCConfig = None, timings=None):
    """Whole-image pipeline: one window covering the image, range_max = N."""
    cfg = cfg or PHCConfig()
    gray = np.asarray(gray)
    n_image = max(gray.shape) if gray.size else 0
    t0 = time.perf_counter()
    plane = window_source(gray, cfg)
    t_prep = time.perf_counter() - t0
    grid, t_pers, t_vec = _window_job((plane, cfg, n_image))
    if timings is not None:
        timings["prep_ms"] = 1e3 * t_prep
        timings["persistence_ms"] = 1e3 * t_pers
        timings["vectorize_ms"] = 1e3 * t_vec
    return grid.astype(np.float64)


def global_diagram(gray, cfg: PHCConfig = None):
    """Diagram of the whole image under cfg.filtration (window tag (0, 0))."""
    cfg = cfg or PHCConfig()
    plane = window_source(np.asarray(gray), cfg)
    return window_diagram(plane, cfg, window=(0, 0))


def phc_convolve(stack: PHCTensor, kernel):
    """Weighted sum of window slices: sum_ij kernel[i, j] * slice(i, j)."""
    kernel = np.asarray(kernel, dtype=np.float64)
    k = stack.grid.k_side
    if kernel.shape != (k, k):
        raise ConfigError(f"kernel shape {kernel.shape} != window grid ({k}, {k})")
    return np.einsum("w,wij->ij", kernel.ravel(), stack.data.astype(np.float64))

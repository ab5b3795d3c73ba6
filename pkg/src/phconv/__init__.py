"""Persistent homology convolutions for raster images.

Window an image, compute extended persistence of a per-window filtration,
vectorize the diagrams into persistence images, and stack the result into a
tensor for downstream models. Also ships global-persistence and benchmark
modes plus dataset plumbing (ingest / balance / split / export).
"""

from phconv.imgprep import (
    to_grayscale,
    resize_half,
    threshold,
    dilate,
    erode,
    load_image,
)
from phconv.complexes import (
    FilteredComplex,
    build_adjacency_complex,
    build_lower_star,
    build_alpha,
    assign_height,
)
from phconv.persistence import (
    Interval,
    Kind,
    PersistenceDiagram,
    reduce_ordinary,
    reduce_extended,
    fast_h0,
    oracle_reduce,
)
from phconv.vectorize import (
    VectorizationParams,
    select_intervals,
    persistence_image,
)
from phconv.phc import (
    PHCConfig,
    WindowGrid,
    PHCTensor,
    make_window_grid,
    phc_stack,
    phc_convolve,
    global_ph,
)

__version__ = "0.1.0"

__all__ = [
    "to_grayscale",
    "resize_half",
    "threshold",
    "dilate",
    "erode",
    "load_image",
    "FilteredComplex",
    "build_adjacency_complex",
    "build_lower_star",
    "build_alpha",
    "assign_height",
    "Interval",
    "Kind",
    "PersistenceDiagram",
    "reduce_ordinary",
    "reduce_extended",
    "fast_h0",
    "oracle_reduce",
    "VectorizationParams",
    "select_intervals",
    "persistence_image",
    "PHCConfig",
    "WindowGrid",
    "PHCTensor",
    "make_window_grid",
    "phc_stack",
    "phc_convolve",
    "global_ph",
    "__version__",
]

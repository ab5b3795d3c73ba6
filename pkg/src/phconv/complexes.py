"""Filtered simplicial complexes (dim <= 2) built from masks and grayscale images.

Three builders: the 8-neighbor adjacency (flag) complex of a mask with a
bottom-to-top height filtration, the lower-star filtration of pixel
intensities, and the alpha complex on foreground pixel centers.

A complex is stored flat: an (n, 3) int32 array of sorted vertex ids padded
with -1, per-simplex filtration values, per-vertex (x, y) coordinates with
y = height - 1 - row, and a total order that is nondecreasing in filtration
with faces before cofaces (ties broken by dim, then lexicographic ids).
"""

from dataclasses import dataclass, field

import numpy as np


class ComplexError(ValueError):
    """Raised when a complex violates its structural invariants."""


@dataclass(frozen=True)
class FilteredComplex:
    simplices: np.ndarray      # (n, 3) int32, sorted vertex ids, -1 padded
    dims: np.ndarray           # (n,) int8
    filtration: np.ndarray     # (n,) float64
    vertex_coords: np.ndarray  # (V, 2) float64, columns (x, y)
    order: np.ndarray = field(default=None)  # (n,) int64 permutation

    def __post_init__(self):
        if self.order is None:
            object.__setattr__(self, "order", _sort_order(
                self.filtration, self.dims, self.simplices))

    def __len__(self):
        return len(self.simplices)

    @property
    def n_vertices(self):
        return len(self.vertex_coords)

    def count(self, dim):
        return int(np.count_nonzero(self.dims == dim))

    def keys(self):
        """Encode each simplex as a single int64 for exact lookup."""
        return _encode(self.simplices, self.n_vertices)

    def face_blocks(self):
        """Codim-1 faces of all simplices, vectorized, as order positions.

        Returns {dim: (cols, faces)} for dims 1 and 2, where `cols` is the
        array of order positions of the dim-d simplices and `faces` the
        (len(cols), d+1) array of their faces' order positions, row-sorted.
        Raises ComplexError if a face is missing.
        """
        keys = self.keys()
        sorter = np.argsort(keys)
        sorted_keys = keys[sorter]
        pos = np.empty(len(self), dtype=np.int64)
        pos[self.order] = np.arange(len(self))

        def lookup(face_keys):
            idx = np.searchsorted(sorted_keys, face_keys)
            if np.any(idx >= len(keys)) or np.any(sorted_keys[np.minimum(idx, len(keys) - 1)] != face_keys):
                raise ComplexError("missing face in complex")
            return pos[sorter[idx]]

        out = {}
        v = self.simplices
        nv = self.n_vertices
        for d, face_cols in ((1, [(0,), (1,)]), (2, [(0, 1), (0, 2), (1, 2)])):
            rows = np.flatnonzero(self.dims == d)
            if not len(rows):
                continue
            face_pos = []
            for cols in face_cols:
                fv = np.full((len(rows), 3), -1, dtype=np.int32)
                fv[:, :len(cols)] = v[rows][:, cols]
                face_pos.append(lookup(_encode(fv, nv)))
            out[d] = (pos[rows], np.sort(np.stack(face_pos, axis=1), axis=1))
        return out

    def face_positions(self):
        """Face order-positions per simplex, aligned with `order`."""
        out = [()] * len(self)
        for _d, (cols, faces) in self.face_blocks().items():
            rows = faces.tolist()
            for i, c in enumerate(cols.tolist()):
                out[c] = rows[i]
        return out

    def validate(self):
        """Check face closure, filtration monotonicity, and order validity."""
        if np.any(self.filtration[self.order][1:] < self.filtration[self.order][:-1]):
            raise ComplexError("order is not nondecreasing in filtration")
        pos_filt = self.filtration[self.order]
        for _d, (cols, faces) in self.face_blocks().items():  # raises on gaps
            if np.any(faces >= cols[:, None]):
                raise ComplexError("face does not precede coface in order")
            if np.any(pos_filt[faces].max(axis=1) > pos_filt[cols] + 1e-12):
                raise ComplexError("filtration not monotone on faces")
        return self


def _encode(simplices, n_vertices):
    s = n_vertices + 1
    v = simplices.astype(np.int64) + 1
    return (v[:, 0] * s + v[:, 1]) * s + v[:, 2]


def _sort_order(filtration, dims, simplices):
    return np.lexsort((simplices[:, 2], simplices[:, 1], simplices[:, 0],
                       dims, filtration))


def _empty_complex():
    return FilteredComplex(
        simplices=np.empty((0, 3), dtype=np.int32),
        dims=np.empty(0, dtype=np.int8),
        filtration=np.empty(0, dtype=np.float64),
        vertex_coords=np.empty((0, 2), dtype=np.float64),
    )


def _grid_cells(mask, connectivity=8, flag_triangles=True):
    """Vertices, edges, and flag triangles of the pixel adjacency graph.

    Vertex ids are the row-major rank among foreground pixels, so the output
    is independent of iteration order. Returns (coords, edges, triangles).
    """
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")

    flat = np.flatnonzero(mask.ravel())
    ids = np.full(h * w, -1, dtype=np.int64)
    ids[flat] = np.arange(len(flat))
    grid = ids.reshape(h, w)
    rows, cols = flat // w, flat % w
    coords = np.stack([cols.astype(np.float64), (h - 1 - rows).astype(np.float64)], axis=1)

    pairs = []
    # Offsets listed (drow, dcol); source pixel always has the smaller id.
    offsets = [(0, 1), (1, 0)]
    if connectivity == 8:
        offsets += [(1, 1), (1, -1)]
    for dr, dc in offsets:
        src = mask[:h - dr, max(0, -dc):w - max(0, dc)]
        dst = mask[dr:, max(0, dc):w - max(0, -dc)]
        both = src & dst
        a = grid[:h - dr, max(0, -dc):w - max(0, dc)][both]
        b = grid[dr:, max(0, dc):w - max(0, -dc)][both]
        pairs.append(np.stack([a, b], axis=1))
    edges = np.concatenate(pairs, axis=0) if pairs else np.empty((0, 2), dtype=np.int64)

    tris = []
    if flag_triangles and connectivity == 8 and h > 1 and w > 1:
        # Every 3-clique of the 8-neighbor graph fits in one 2x2 block.
        m00, m01 = mask[:-1, :-1], mask[:-1, 1:]
        m10, m11 = mask[1:, :-1], mask[1:, 1:]
        g00, g01 = grid[:-1, :-1], grid[:-1, 1:]
        g10, g11 = grid[1:, :-1], grid[1:, 1:]
        for ma, mb, mc, ga, gb, gc in (
            (m00, m01, m10, g00, g01, g10),
            (m00, m01, m11, g00, g01, g11),
            (m00, m10, m11, g00, g10, g11),
            (m01, m10, m11, g01, g10, g11),
        ):
            sel = ma & mb & mc
            tris.append(np.stack([ga[sel], gb[sel], gc[sel]], axis=1))
    triangles = np.concatenate(tris, axis=0) if tris else np.empty((0, 3), dtype=np.int64)
    return coords, edges, triangles


def _assemble(coords, edges, triangles, vertex_values):
    """Pack cells into a FilteredComplex with max-of-vertices filtration."""
    nv, ne, nt = len(coords), len(edges), len(triangles)
    simplices = np.full((nv + ne + nt, 3), -1, dtype=np.int32)
    simplices[:nv, 0] = np.arange(nv)
    if ne:
        simplices[nv:nv + ne, :2] = edges
    if nt:
        simplices[nv + ne:, :] = triangles
    dims = np.repeat(np.array([0, 1, 2], dtype=np.int8), [nv, ne, nt])
    filtration = np.concatenate([
        vertex_values,
        vertex_values[edges].max(axis=1) if ne else np.empty(0),
        vertex_values[triangles].max(axis=1) if nt else np.empty(0),
    ])
    return FilteredComplex(simplices=simplices, dims=dims,
                           filtration=filtration, vertex_coords=coords)


def build_adjacency_complex(mask, connectivity=8, flag_triangles=True):
    """Adjacency (flag) complex of a mask with the height filtration.

    One vertex per foreground pixel, one edge per pair of 8-neighboring
    foreground pixels, one triangle per 3-clique, filtered bottom-to-top by
    vertex height (simplex value = max over its vertices).
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return _empty_complex()
    coords, edges, triangles = _grid_cells(mask, connectivity, flag_triangles)
    return _assemble(coords, edges, triangles, coords[:, 1].copy())


def assign_height(cx):
    """Re-filter a complex by vertex height: f(v) = y, simplex = max of vertices."""
    values = cx.vertex_coords[:, 1]
    filtration = np.empty(len(cx))
    for d in (0, 1, 2):
        rows = np.flatnonzero(cx.dims == d)
        if len(rows):
            filtration[rows] = values[cx.simplices[rows, :d + 1].astype(np.int64)].max(axis=1)
    return FilteredComplex(simplices=cx.simplices, dims=cx.dims,
                           filtration=filtration, vertex_coords=cx.vertex_coords)


def build_lower_star(img, connectivity=8, flag_triangles=True):
    """Lower-star filtration of a grayscale image.

    One vertex per pixel with value intensity/255, edges between all
    8-neighbor pairs, flag triangles, simplex value = max of its vertices.
    """
    img = np.asarray(img)
    if img.size == 0:
        return _empty_complex()
    coords, edges, triangles = _grid_cells(np.ones(img.shape, dtype=bool),
                                           connectivity, flag_triangles)
    values = img.astype(np.float64).ravel() / 255.0
    return _assemble(coords, edges, triangles, values)


def _circumradius2(a, b, c):
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-12:
        # Degenerate (collinear) triangle: circle degenerates to the longest
        # edge's diametral circle.
        return max(_dist2(a, b), _dist2(b, c), _dist2(a, c)) / 4.0
    a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    return (ax - ux) ** 2 + (ay - uy) ** 2


def _dist2(a, b):
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def _collinear_alpha(points):
    """Alpha complex of collinear points: a path along the line."""
    pts = points
    spread = pts.max(axis=0) - pts.min(axis=0)
    axis = int(np.argmax(spread))
    idx = np.lexsort((pts[:, 1 - axis], pts[:, axis]))
    edges = np.stack([idx[:-1], idx[1:]], axis=1).astype(np.int64)
    edges.sort(axis=1)
    values = np.array([_dist2(pts[a], pts[b]) / 4.0 for a, b in edges])
    return edges, values


def build_alpha(mask=None, points=None):
    """Alpha complex on foreground pixel centers (or an explicit point set).

    Delaunay triangulation filtered by squared circumradius: triangles at
    their circumradius^2, edges at their diametral radius^2 when Gabriel
    (no opposite Delaunay vertex inside the diametral circle), otherwise at
    the min over incident triangle values; vertices at 0.
    """
    from scipy.spatial import Delaunay  # deferred: heavy import

    if points is None:
        mask = np.asarray(mask, dtype=bool)
        h, _w = mask.shape
        rows, cols = np.nonzero(mask)
        points = np.stack([cols.astype(np.float64),
                           (h - 1 - rows).astype(np.float64)], axis=1)
    points = np.asarray(points, dtype=np.float64)
    if len(points):
        # Deduplicate, keeping first-occurrence order (np.unique sorts).
        _, first = np.unique(points, axis=0, return_index=True)
        points = points[np.sort(first)]
    else:
        points = points.reshape(0, 2)
    n = len(points)
    if n == 0:
        return _empty_complex()
    if n == 1:
        return _assemble(points, np.empty((0, 2), dtype=np.int64),
                         np.empty((0, 3), dtype=np.int64), np.zeros(1))

    tri_arr = np.empty((0, 3), dtype=np.int64)
    if n >= 3:
        try:
            # Qt: triangulated output, cocircular ties broken by point index.
            tri_arr = np.sort(Delaunay(points, qhull_options="Qbb Qc Qz Q12 Qt")
                              .simplices.astype(np.int64), axis=1)
        except Exception:
            tri_arr = np.empty((0, 3), dtype=np.int64)  # degenerate input

    if len(tri_arr) == 0:
        edges, edge_vals = _collinear_alpha(points)
        simplices = np.full((n + len(edges), 3), -1, dtype=np.int32)
        simplices[:n, 0] = np.arange(n)
        simplices[n:, :2] = edges
        dims = np.repeat(np.array([0, 1], dtype=np.int8), [n, len(edges)])
        filtration = np.concatenate([np.zeros(n), edge_vals])
        return FilteredComplex(simplices=simplices, dims=dims,
                               filtration=filtration, vertex_coords=points)

    tri_vals = np.array([_circumradius2(points[a], points[b], points[c])
                         for a, b, c in tri_arr])

    # Collect unique edges and their incident triangles.
    edge_map = {}
    for t, (a, b, c) in enumerate(tri_arr):
        for e in ((a, b), (a, c), (b, c)):
            edge_map.setdefault((int(e[0]), int(e[1])), []).append(t)

    edges = np.array(sorted(edge_map), dtype=np.int64)
    edge_vals = np.empty(len(edges))
    for i, (a, b) in enumerate(edges):
        pa, pb = points[a], points[b]
        mid = (pa + pb) / 2.0
        r2 = _dist2(pa, pb) / 4.0
        incident = edge_map[(int(a), int(b))]
        gabriel = True
        for t in incident:
            opp = [v for v in tri_arr[t] if v != a and v != b][0]
            if _dist2(points[opp], mid) < r2 - 1e-12:
                gabriel = False
                break
        edge_vals[i] = r2 if gabriel else min(tri_vals[t] for t in incident)

    nv, ne, nt = n, len(edges), len(tri_arr)
    simplices = np.full((nv + ne + nt, 3), -1, dtype=np.int32)
    simplices[:nv, 0] = np.arange(nv)
    simplices[nv:nv + ne, :2] = edges
    simplices[nv + ne:, :] = np.sort(tri_arr, axis=1)
    dims = np.repeat(np.array([0, 1, 2], dtype=np.int8), [nv, ne, nt])
    filtration = np.concatenate([np.zeros(nv), edge_vals, tri_vals])
    return FilteredComplex(simplices=simplices, dims=dims,
                           filtration=filtration, vertex_coords=points)


def complex_to_csv(cx):
    """One CSV row per simplex in filtration order: vertices, dim, filtration."""
    lines = ["vertices;dim;filtration"]
    for idx in cx.order:
        verts = " ".join(str(int(v)) for v in cx.simplices[idx] if v >= 0)
        lines.append(f"{verts};{int(cx.dims[idx])};{cx.filtration[idx]:.9g}")
    return "\n".join(lines) + "\n"

"""Ordinary and extended persistent homology of a FilteredComplex.

Extended persistence uses the cone construction: a cone apex enters before
everything else, the ascending phase inserts the complex's simplices in
filtration order, and the descending phase inserts coned copies ordered by
descending min-vertex value. Column reduction over Z/2 with the clearing
optimization yields the pairing; pairs are classified by which phases the
paired columns lie in:

  ascending/ascending   -> Ord0, Ord1   (ordinary sublevel pairs)
  ascending/descending  -> Ext0, Ext1   (essential components / cycles)
  descending/descending -> Rel1         (relative classes of the down sweep)

Ext0 intervals are (component min height, component max height); Ext1 are
(cycle max height, cycle min height), so Ext1 birth >= death. Dimension-2
pairs (possible: 2x2 solid pixel blocks are 2-spheres in the flag complex)
are dropped from diagrams, which carry dims 0 and 1 only.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dep, but degrade
    njit = None

from phconv.complexes import FilteredComplex

ORACLE_MAX_SIMPLICES = 10_000

# Dense word-packed bitset columns need n^2/8 bytes; past this column count
# (or without numba) fall back to sorted index arrays / int bitmasks.
_DENSE_LIMIT = 32_768
_BITMASK_LIMIT = 70_000


class Kind(Enum):
    ORD0 = "ord0"
    EXT0 = "ext0"
    ORD1 = "ord1"
    EXT1 = "ext1"
    REL1 = "rel1"


class Interval(NamedTuple):
    kind: Kind
    dim: int
    birth: float
    death: float

    @property
    def persistence(self):
        return abs(self.birth - self.death)


@dataclass(frozen=True)
class PersistenceDiagram:
    intervals: tuple
    filtration: str = ""
    window: tuple = None

    def __len__(self):
        return len(self.intervals)

    def count(self, kind):
        return sum(1 for iv in self.intervals if iv.kind is kind)

    def select(self, kinds):
        return [iv for iv in self.intervals if iv.kind in kinds]

    def multiset(self):
        """Canonical sortable representation for multiset comparisons."""
        return sorted((iv.kind.value, iv.dim, iv.birth, iv.death)
                      for iv in self.intervals)


def diagram_to_csv(diagrams, header=True):
    """CSV dump: kind, dim, birth, death, window_row, window_col."""
    if isinstance(diagrams, PersistenceDiagram):
        diagrams = [diagrams]
    lines = ["kind,dim,birth,death,window_row,window_col"] if header else []
    for d in diagrams:
        wr, wc = d.window if d.window is not None else ("", "")
        for iv in d.intervals:
            lines.append(f"{iv.kind.value},{iv.dim},{iv.birth:.9g},{iv.death:.9g},{wr},{wc}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Column reduction
#
# Columns arrive as "blocks": (positions, faces) pairs of int arrays, one
# block per simplex dimension, faces given as row positions. Pairs come back
# sorted by row for cross-backend determinism.

if njit is not None:

    @njit(cache=True)
    def _reduce_words_jit(words, tops, dims, max_dim, pivot, is_zero):
        n, _w = words.shape
        cleared = np.zeros(n, dtype=np.uint8)
        for d in range(max_dim, 0, -1):
            for j in range(n):
                if dims[j] != d or cleared[j]:
                    continue
                top = tops[j]
                low = -1
                while True:
                    # Highest set bit at or below word `top`.
                    low = -1
                    for w in range(top, -1, -1):
                        x = words[j, w]
                        if x != np.uint64(0):
                            b = 0
                            if x >> np.uint64(32):
                                b += 32
                                x >>= np.uint64(32)
                            if x >> np.uint64(16):
                                b += 16
                                x >>= np.uint64(16)
                            if x >> np.uint64(8):
                                b += 8
                                x >>= np.uint64(8)
                            if x >> np.uint64(4):
                                b += 4
                                x >>= np.uint64(4)
                            if x >> np.uint64(2):
                                b += 2
                                x >>= np.uint64(2)
                            if x >> np.uint64(1):
                                b += 1
                            low = (w << 6) | b
                            top = w
                            break
                    if low < 0:
                        break
                    k = pivot[low]
                    if k < 0:
                        break
                    kt = tops[k]
                    if kt > top:
                        top = kt
                    for w in range(kt + 1):
                        words[j, w] ^= words[k, w]
                tops[j] = top if low >= 0 else 0
                if low >= 0:
                    pivot[low] = j
                    cleared[low] = 1
                    for w in range(tops[low] + 1):
                        words[low, w] = np.uint64(0)
                    tops[low] = 0
                    is_zero[low] = True
                else:
                    is_zero[j] = True

    @njit(cache=True)
    def _set_bits_jit(words, tops, cols, rows):
        for i in range(len(cols)):
            c = cols[i]
            r = rows[i]
            w = r >> 6
            words[c, w] |= np.uint64(1) << np.uint64(r & 63)
            if w > tops[c]:
                tops[c] = w


def _reduce_dense(n, blocks, dims):
    n_words = (n + 63) >> 6
    words = np.zeros((n, n_words), dtype=np.uint64)
    tops = np.zeros(n, dtype=np.int64)
    is_zero = np.ones(n, dtype=np.bool_)  # empty-boundary columns are creators
    for cols, faces in blocks:
        rep = np.repeat(cols.astype(np.int64), faces.shape[1])
        _set_bits_jit(words, tops, rep, faces.astype(np.int64).ravel())
        is_zero[cols] = False
    pivot = np.full(n, -1, dtype=np.int64)
    _reduce_words_jit(words, tops, dims.astype(np.int8),
                      int(dims.max(initial=0)), pivot, is_zero)
    rows = np.flatnonzero(pivot >= 0)
    pairs = list(zip(rows.tolist(), pivot[rows].tolist()))
    zeros = np.flatnonzero(is_zero).tolist()
    return pairs, zeros


def _reduce_bitmask(n, blocks, dims):
    columns = [0] * n
    one = 1
    for cols, faces in blocks:
        w = faces.shape[1]
        fc = [faces[:, k].tolist() for k in range(w)]
        if w == 2:
            ints = [(one << a) | (one << b) for a, b in zip(*fc)]
        elif w == 3:
            ints = [(one << a) | (one << b) | (one << c)
                    for a, b, c in zip(*fc)]
        else:
            ints = [(one << a) | (one << b) | (one << c) | (one << d)
                    for a, b, c, d in zip(*fc)]
        for c, m in zip(cols.tolist(), ints):
            columns[c] = m
    pivot = {}
    cleared = bytearray(n)
    for d in range(int(dims.max(initial=0)), 0, -1):
        get = pivot.get
        for j in np.flatnonzero(dims == d).tolist():
            if cleared[j]:
                continue
            col = columns[j]
            while col:
                low = col.bit_length() - 1
                k = get(low)
                if k is None:
                    break
                col ^= columns[k]
            columns[j] = col
            if col:
                low = col.bit_length() - 1
                pivot[low] = j
                cleared[low] = True
                columns[low] = 0
    zeros = [j for j in range(n) if columns[j] == 0]
    return sorted(pivot.items()), zeros


def _reduce_sparse(n, blocks, dims):
    empty = np.empty(0, dtype=np.int64)
    columns = [empty] * n
    for cols, faces in blocks:
        sorted_faces = np.sort(faces.astype(np.int64), axis=1)
        for i, c in enumerate(cols.tolist()):
            columns[c] = sorted_faces[i]
    pivot = {}
    cleared = bytearray(n)
    for d in range(int(dims.max(initial=0)), 0, -1):
        get = pivot.get
        for j in np.flatnonzero(dims == d).tolist():
            if cleared[j]:
                continue
            col = columns[j]
            while col.size:
                low = int(col[-1])
                k = get(low)
                if k is None:
                    break
                col = np.setxor1d(col, columns[k], assume_unique=True)
            columns[j] = col
            if col.size:
                low = int(col[-1])
                pivot[low] = j
                cleared[low] = True
                columns[low] = empty
    zeros = [j for j in range(n) if columns[j].size == 0]
    return sorted(pivot.items()), zeros


def _reduce_blocks(n, blocks, dims):
    if njit is not None and n <= _DENSE_LIMIT:
        return _reduce_dense(n, blocks, dims)
    if n <= _BITMASK_LIMIT:
        return _reduce_bitmask(n, blocks, dims)
    return _reduce_sparse(n, blocks, dims)


# ---------------------------------------------------------------------------
# Ordinary persistence

def reduce_ordinary(cx: FilteredComplex, filtration_name="", window=None):
    """Sublevel persistence pairing by column reduction in filtration order.

    Unpaired creators are reported as essential with death = +inf; pairs of
    zero persistence are retained (dropped later, at vectorization).
    """
    n = len(cx)
    if n == 0:
        return PersistenceDiagram((), filtration_name, window)
    blocks = list(cx.face_blocks().values())
    dims = cx.dims[cx.order]
    values = cx.filtration[cx.order].tolist()
    pairs, zeros = _reduce_blocks(n, blocks, dims)

    dim_l = dims.tolist()
    intervals = []
    paired = set()
    for r, j in pairs:
        paired.add(r)
        d = dim_l[r]
        if d == 0:
            intervals.append(Interval(Kind.ORD0, 0, values[r], values[j]))
        elif d == 1:
            intervals.append(Interval(Kind.ORD1, 1, values[r], values[j]))
    for j in zeros:
        if j in paired:
            continue
        d = dim_l[j]
        if d == 0:
            intervals.append(Interval(Kind.ORD0, 0, values[j], math.inf))
        elif d == 1:
            intervals.append(Interval(Kind.ORD1, 1, values[j], math.inf))
    return PersistenceDiagram(tuple(intervals), filtration_name, window)


# ---------------------------------------------------------------------------
# Extended persistence

def _vertex_values(cx):
    vv = np.empty(cx.n_vertices)
    rows = np.flatnonzero(cx.dims == 0)
    vv[cx.simplices[rows, 0].astype(np.int64)] = cx.filtration[rows]
    return vv


def _cone_order(cx, vertex_values):
    """Descending-phase order: indices of cx sorted by (-min vertex value,
    dim, lexicographic ids)."""
    n = len(cx)
    minv = np.empty(n)
    for d in (0, 1, 2):
        rows = np.flatnonzero(cx.dims == d)
        if len(rows):
            minv[rows] = vertex_values[cx.simplices[rows, :d + 1].astype(np.int64)].min(axis=1)
    order = np.lexsort((cx.simplices[:, 2], cx.simplices[:, 1],
                        cx.simplices[:, 0], cx.dims, -minv))
    return order, minv


def _cone_assembly(cx):
    """Build the coned column blocks.

    Positions: 0 = apex, 1..n = ascending simplices in cx.order, n+1..2n =
    coned simplices in descending order. Returns (total, blocks, dims,
    values, phase); apex value is -inf.
    """
    n = len(cx)
    vertex_values = _vertex_values(cx)
    asc_blocks = cx.face_blocks()
    cone_idx, minv = _cone_order(cx, vertex_values)

    cone_pos = np.empty(n, dtype=np.int64)       # simplex index -> position
    cone_pos[cone_idx] = n + 1 + np.arange(n)
    cone_pos_of_asc = cone_pos[cx.order]         # ascending position -> cone
    asc_position = np.empty(n, dtype=np.int64)   # simplex index -> position
    asc_position[cx.order] = 1 + np.arange(n)

    dims = np.concatenate([
        np.zeros(1, dtype=np.int8), cx.dims[cx.order], cx.dims[cone_idx] + 1])
    values = np.concatenate([[-math.inf], cx.filtration[cx.order],
                             minv[cone_idx]])
    phase = np.concatenate([
        np.zeros(1, dtype=np.int8),
        np.ones(n, dtype=np.int8),
        np.full(n, 2, dtype=np.int8)])

    blocks = []
    # Ascending columns (order positions shifted by 1 for the apex slot).
    for _d, (cols, ff) in asc_blocks.items():
        blocks.append((cols + 1, ff + 1))
    # Coned columns: the base simplex plus the cone over each of its faces
    # (the apex itself when the base is a vertex).
    vert_rows = np.flatnonzero(cx.dims == 0)
    if len(vert_rows):
        blocks.append((cone_pos[vert_rows], np.stack(
            [asc_position[vert_rows], np.zeros(len(vert_rows), dtype=np.int64)],
            axis=1)))
    for _d, (cols, ff) in asc_blocks.items():
        blocks.append((cone_pos[cx.order[cols]],
                       np.concatenate([(cols + 1)[:, None],
                                       cone_pos_of_asc[ff]], axis=1)))
    return 2 * n + 1, blocks, dims, values, phase


def _classify_extended(pairs, dims, values, phase, kinds=None):
    dim_l = dims.tolist()
    val_l = values.tolist()
    ph_l = phase.tolist()
    ord0, ext0, ord1, ext1, rel1 = (Kind.ORD0, Kind.EXT0, Kind.ORD1,
                                    Kind.EXT1, Kind.REL1)
    keep = (lambda k: True) if kinds is None else frozenset(kinds).__contains__
    intervals = []
    append = intervals.append
    for r, j in pairs:
        if r == 0:
            continue  # apex artifact
        # A creator of dimension d makes a d-class; cone dims are base + 1.
        d = dim_l[r]
        if d > 1:
            continue
        pr = ph_l[r]
        if pr == 1:
            if ph_l[j] == 1:
                kind = ord0 if d == 0 else ord1
            else:
                kind = ext0 if d == 0 else ext1
        elif d == 1:
            kind = rel1
        else:
            continue
        if keep(kind):
            append(Interval(kind, d, val_l[r], val_l[j]))
    return intervals


def reduce_extended(cx: FilteredComplex, filtration_name="", window=None,
                    kinds=None):
    """Extended persistence via cone-construction reduction with clearing.

    `kinds` optionally restricts which interval kinds are materialized in the
    diagram (the pairing itself is always complete).
    """
    if len(cx) == 0:
        return PersistenceDiagram((), filtration_name, window)
    if not np.all(np.isfinite(cx.filtration)):
        raise ValueError("extended persistence requires finite filtration values")
    total, blocks, dims, values, phase = _cone_assembly(cx)
    pairs, _zeros = _reduce_blocks(total, blocks, dims)
    intervals = _classify_extended(pairs, dims, values, phase, kinds)
    return PersistenceDiagram(tuple(intervals), filtration_name, window)


# ---------------------------------------------------------------------------
# Union-find fast path for dimension 0

class _UnionFind:
    __slots__ = ("parent", "birth_pos", "birth_val")

    def __init__(self, n):
        self.parent = list(range(n))
        self.birth_pos = [0] * n
        self.birth_val = [0.0] * n

    def find(self, x):
        root = x
        p = self.parent
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root


def fast_h0(cx: FilteredComplex, filtration_name="", window=None):
    """Dimension-0 part of extended persistence via an ascending union-find.

    Merges follow the elder rule (the younger component dies); surviving
    roots report (component min, component max) intervals. Output is
    multiset-identical to the dim-0 restriction of reduce_extended.
    """
    if len(cx) == 0:
        return PersistenceDiagram((), filtration_name, window)
    uf = _UnionFind(cx.n_vertices)
    vertex_values = _vertex_values(cx).tolist()
    filt = cx.filtration.tolist()
    intervals = []
    for p in range(len(cx)):
        i = int(cx.order[p])
        d = int(cx.dims[i])
        if d == 0:
            v = int(cx.simplices[i, 0])
            uf.birth_pos[v] = p
            uf.birth_val[v] = filt[i]
        elif d == 1:
            a = uf.find(int(cx.simplices[i, 0]))
            b = uf.find(int(cx.simplices[i, 1]))
            if a == b:
                continue
            if uf.birth_pos[a] > uf.birth_pos[b]:
                a, b = b, a
            # b is the younger component: it dies here.
            intervals.append(Interval(Kind.ORD0, 0, uf.birth_val[b], filt[i]))
            uf.parent[b] = a
    comp_max = {}
    for v in range(cx.n_vertices):
        r = uf.find(v)
        m = comp_max.get(r)
        if m is None or vertex_values[v] > m:
            comp_max[r] = vertex_values[v]
    for r, mx in comp_max.items():
        intervals.append(Interval(Kind.EXT0, 0, uf.birth_val[r], mx))
    return PersistenceDiagram(tuple(intervals), filtration_name, window)


# ---------------------------------------------------------------------------
# Brute-force oracle (tests only)

def oracle_reduce(cx: FilteredComplex, filtration_name=""):
    """Naive dense cone reduction; same contract as reduce_extended.

    Independent implementation: re-derives both phase orders from scratch and
    reduces a dense Z/2 matrix column by column with no optimizations.
    Refuses complexes larger than ORACLE_MAX_SIMPLICES.
    """
    n = len(cx)
    if n > ORACLE_MAX_SIMPLICES:
        raise ValueError(f"oracle_reduce caps at {ORACLE_MAX_SIMPLICES} simplices")
    if n == 0:
        return PersistenceDiagram((), filtration_name)

    simp = [tuple(int(v) for v in row if v >= 0) for row in cx.simplices]
    filt = [float(x) for x in cx.filtration]
    vval = {}
    for s, f in zip(simp, filt):
        if len(s) == 1:
            vval[s[0]] = f
    minv = [min(vval[v] for v in s) for s in simp]

    asc = sorted(range(n), key=lambda i: (filt[i], len(simp[i]), simp[i]))
    desc = sorted(range(n), key=lambda i: (-minv[i], len(simp[i]), simp[i]))

    # Sequence of (tag, simplex index); tag 0 = apex, 1 = ascending, 2 = cone.
    seq = [(0, -1)] + [(1, i) for i in asc] + [(2, i) for i in desc]
    pos_asc = {i: 1 + k for k, i in enumerate(asc)}
    pos_cone = {i: 1 + n + k for k, i in enumerate(desc)}
    index_of = {s: i for i, s in enumerate(simp)}

    total = 2 * n + 1
    R = np.zeros((total, total), dtype=bool)
    for p, (tag, i) in enumerate(seq):
        if tag == 0:
            continue
        s = simp[i]
        if tag == 1:
            if len(s) > 1:
                for skip in range(len(s)):
                    face = tuple(v for k, v in enumerate(s) if k != skip)
                    R[pos_asc[index_of[face]], p] = True
        else:
            R[pos_asc[i], p] = True
            if len(s) == 1:
                R[0, p] = True
            else:
                for skip in range(len(s)):
                    face = tuple(v for k, v in enumerate(s) if k != skip)
                    R[pos_cone[index_of[face]], p] = True

    low_inv = np.full(total, -1, dtype=np.int64)
    for j in range(total):
        while True:
            nz = np.flatnonzero(R[:, j])
            if len(nz) == 0:
                break
            low = int(nz[-1])
            k = int(low_inv[low])
            if k < 0:
                low_inv[low] = j
                break
            R[:, j] ^= R[:, k]

    intervals = []
    for low in range(total):
        j = int(low_inv[low])
        if j < 0 or low == 0:
            continue
        tag_r, i_r = seq[low]
        tag_j, i_j = seq[j]
        # Class dim = creator's dim in the coned complex (base + 1 for cones).
        d = len(simp[i_r]) - 1 if tag_r == 1 else len(simp[i_r])
        if d > 1:
            continue
        birth = filt[i_r] if tag_r == 1 else minv[i_r]
        death = filt[i_j] if tag_j == 1 else minv[i_j]
        if tag_r == 1 and tag_j == 1:
            kind = Kind.ORD0 if d == 0 else Kind.ORD1
        elif tag_r == 1:
            kind = Kind.EXT0 if d == 0 else Kind.EXT1
        elif d == 1:
            kind = Kind.REL1
        else:
            continue
        intervals.append(Interval(kind, d, birth, death))
    return PersistenceDiagram(tuple(intervals), filtration_name)

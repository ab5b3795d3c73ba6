"""Dataset plumbing: ingest a class-subfoldered slide directory, balance the
classes by subsampling/augmentation, split stratified by class, export
tensors + manifest, and benchmark the pipeline.

All randomized operations are pure functions of (inputs, seed). Exports are
NPY v1.0 files (little-endian float32, C order), one array per image, plus a
JSON manifest carrying labels, splits, configuration, and SHA-256 checksums.
"""

import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace, asdict
from pathlib import Path

import numpy as np

from phconv import __version__ as _version
from phconv import imgprep
from phconv.phc import PHCConfig, phc_stack, global_ph

log = logging.getLogger("phconv")

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}
DIHEDRAL = ("r0", "r90", "r180", "r270", "fh", "fv", "d1", "d2")
SPLITS = ("train", "val", "test")
DEFAULT_BALANCE_TARGET = 381
DEFAULT_RATIOS = (0.70, 0.10, 0.20)
MODES = ("local", "global", "image")


def apply_dihedral(arr, tag):
    """Apply one of the eight axis-aligned rotations/reflections."""
    if tag == "r0":
        return arr
    if tag == "r90":
        return np.rot90(arr, 1)
    if tag == "r180":
        return np.rot90(arr, 2)
    if tag == "r270":
        return np.rot90(arr, 3)
    if tag == "fh":
        return np.fliplr(arr)
    if tag == "fv":
        return np.flipud(arr)
    if tag == "d1":
        return np.swapaxes(arr, 0, 1)
    if tag == "d2":
        return np.fliplr(np.rot90(arr, 1))
    raise ValueError(f"unknown dihedral tag {tag!r}")


@dataclass(frozen=True)
class Entry:
    path: str
    label: str
    aug: str = "r0"
    split: str = ""


@dataclass(frozen=True)
class DatasetIndex:
    entries: tuple
    classes: tuple
    seed: int = 0

    def counts(self):
        out = {c: 0 for c in self.classes}
        for e in self.entries:
            out[e.label] += 1
        return out

    def by_class(self, label):
        return [e for e in self.entries if e.label == label]

    def to_json(self):
        return json.dumps({
            "classes": list(self.classes),
            "seed": self.seed,
            "entries": [asdict(e) for e in self.entries],
        }, indent=2)

    @staticmethod
    def from_json(text):
        d = json.loads(text)
        return DatasetIndex(
            entries=tuple(Entry(**e) for e in d["entries"]),
            classes=tuple(d["classes"]),
            seed=d.get("seed", 0),
        )


def ingest(directory):
    """Index a directory of class subfolders of images.

    Non-image files are skipped with a warning; an empty result is an error.
    """
    root = Path(directory)
    if not root.is_dir():
        raise OSError(f"not a readable directory: {directory}")
    classes = sorted(p.name for p in root.iterdir() if p.is_dir())
    entries = []
    for label in classes:
        for p in sorted((root / label).iterdir()):
            if not p.is_file():
                continue
            if p.suffix.lower() not in IMAGE_SUFFIXES:
                log.warning("skipping non-image file %s", p)
                continue
            entries.append(Entry(path=str(p), label=label))
    if not entries:
        raise ValueError(f"no images found under {directory}")
    index = DatasetIndex(entries=tuple(entries), classes=tuple(classes))
    log.info("ingested %d images, per-class counts: %s",
             len(entries), index.counts())
    return index


def balance(index, target_per_class=DEFAULT_BALANCE_TARGET, seed=0):
    """Equalize class sizes at `target_per_class`.

    Classes above the target are subsampled without replacement; classes
    below it gain augmented copies tagged with non-identity dihedral
    transforms, never repeating a (file, tag) pair.
    """
    rng = np.random.default_rng(seed)
    out = []
    for label in index.classes:
        members = index.by_class(label)
        if not members:
            raise ValueError(f"class {label!r} is empty")
        n = len(members)
        if n > target_per_class:
            keep = rng.choice(n, size=target_per_class, replace=False)
            out.extend(members[i] for i in sorted(keep))
        elif n < target_per_class:
            if n * len(DIHEDRAL) < target_per_class:
                raise ValueError(
                    f"class {label!r} has {n} images; cannot reach "
                    f"{target_per_class} with 8-fold augmentation")
            out.extend(members)
            pool = [(e, tag) for e in members for tag in DIHEDRAL[1:]]
            pick = rng.choice(len(pool), size=target_per_class - n, replace=False)
            out.extend(replace(pool[i][0], aug=pool[i][1]) for i in sorted(pick))
        else:
            out.extend(members)
    return DatasetIndex(entries=tuple(out), classes=index.classes, seed=seed)


def split(index, ratios=DEFAULT_RATIOS, seed=0):
    """Seeded stratified train/val/test split; rounding leftovers go to train."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {ratios}")
    rng = np.random.default_rng(seed)
    out = []
    for label in index.classes:
        members = index.by_class(label)
        n = len(members)
        if n < 3 and (ratios[1] > 0 or ratios[2] > 0):
            log.warning("class %r has only %d entries; assigning all to train",
                        label, n)
            out.extend(replace(e, split="train") for e in members)
            continue
        perm = rng.permutation(n)
        n_val = int(np.floor(ratios[1] * n))
        n_test = int(np.floor(ratios[2] * n))
        tags = {}
        for k in perm[:n_val]:
            tags[k] = "val"
        for k in perm[n_val:n_val + n_test]:
            tags[k] = "test"
        out.extend(replace(e, split=tags.get(k, "train"))
                   for k, e in enumerate(members))
    return DatasetIndex(entries=tuple(out), classes=index.classes, seed=seed)


# ---------------------------------------------------------------------------
# Export

def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def save_npy(path, array):
    """Write an NPY v1.0 file: little-endian float32, C-contiguous."""
    np.save(path, np.ascontiguousarray(array, dtype="<f4"))


def process_entry(entry, cfg: PHCConfig, mode="local"):
    """Conditioned array for one dataset entry under `mode`."""
    img = imgprep.load_image(entry.path)
    img = apply_dihedral(img, entry.aug)
    gray, mask = imgprep.prepare(img, k=cfg.threshold, invert=cfg.invert,
                                 morphology=cfg.morphology, max_side=cfg.max_side)
    if mode == "local":
        return phc_stack(gray, cfg).data
    if mode == "global":
        return global_ph(gray, cfg).astype(np.float32)
    if mode == "image":
        return mask.astype(np.float32)
    raise ValueError(f"unknown export mode {mode!r}")


def _export_job(args):
    entry, cfg, mode, out_path = args
    out = Path(out_path)
    if out.exists():
        try:
            existing = np.load(out)
            return str(out), list(existing.shape), _sha256(out), True
        except Exception:
            pass  # unreadable partial file: recompute
    arr = process_entry(entry, cfg, mode)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_npy(out, arr)
    return str(out), list(arr.shape), _sha256(out), False


def export(index, cfg: PHCConfig, outdir, mode="local", workers=1):
    """Run the pipeline over an index and write NPY tensors + manifest.

    Existing readable outputs are reused (resumable); the manifest is written
    last, by the single parent process.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    # Parallelism lives at the image level here; keep windows serial inside
    # each job so worker pools do not nest.
    job_cfg = replace(cfg, workers=1) if workers and workers > 1 else cfg
    jobs = []
    for e in index.entries:
        stem = Path(e.path).stem
        jobs.append((e, job_cfg, mode,
                     str(outdir / "tensors" / e.label / f"{stem}__{e.aug}.npy")))
    results = []
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_export_job, jobs))
    else:
        results = [_export_job(j) for j in jobs]

    manifest = {
        "version": _version,
        "mode": mode,
        "config": cfg.describe(),
        "seed": index.seed,
        "classes": list(index.classes),
        "entries": [
            {
                "source": e.path,
                "label": e.label,
                "aug": e.aug,
                "split": e.split,
                "file": str(Path(out).relative_to(outdir)),
                "shape": shape,
                "sha256": sha,
                "reused": reused,
            }
            for e, (out, shape, sha, reused) in zip(index.entries, results)
        ],
    }
    manifest_path = outdir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2))
    return manifest


def verify_manifest(outdir):
    """Re-hash every referenced file; returns the list of mismatches."""
    outdir = Path(outdir)
    manifest = json.loads((outdir / "manifest.json").read_text())
    bad = []
    for e in manifest["entries"]:
        p = outdir / e["file"]
        if not p.exists() or _sha256(p) != e["sha256"]:
            bad.append(e["file"])
    return bad


# ---------------------------------------------------------------------------
# Benchmark

def bench(index, sample_size=100, filtrations=("alpha", "height", "lowerstar"),
          modes=("local", "global"), cfg: PHCConfig = None, seed=0):
    """Mean wall-clock seconds per image for every (filtration, mode) cell.

    Timing covers preprocessing, persistence, and vectorization, on a seeded
    sample of the index. Returns a list of report rows.
    """
    cfg = cfg or PHCConfig()
    entries = list(index.entries)
    if len(entries) < sample_size:
        raise ValueError(
            f"need at least {sample_size} ingested images, have {len(entries)}")
    rng = np.random.default_rng(seed)
    picks = [entries[i] for i in rng.choice(len(entries), size=sample_size,
                                            replace=False)]
    grays = []
    for e in picks:
        img = apply_dihedral(imgprep.load_image(e.path), e.aug)
        gray = imgprep.to_grayscale(img) if img.ndim == 3 else img
        while max(gray.shape) > cfg.max_side:
            gray = imgprep.resize_half(gray)
        grays.append(gray)

    rows = []
    for filtration in filtrations:
        fcfg = replace(cfg, filtration=filtration)
        for mode in modes:
            total = 0.0
            for gray in grays:
                t0 = time.perf_counter()
                if mode == "local":
                    phc_stack(gray, fcfg)
                else:
                    global_ph(gray, fcfg)
                total += time.perf_counter() - t0
            rows.append({"filtration": filtration, "mode": mode,
                         "mean_seconds": total / len(grays),
                         "images": len(grays)})
            log.info("bench %s/%s: %.3f s/image", filtration, mode,
                     rows[-1]["mean_seconds"])
    return rows


def bench_table(rows):
    lines = [f"{'filtration':<12} {'mode':<8} {'mean s/image':>14} {'images':>8}"]
    for r in rows:
        lines.append(f"{r['filtration']:<12} {r['mode']:<8} "
                     f"{r['mean_seconds']:>14.4f} {r['images']:>8}")
    return "\n".join(lines) + "\n"


def bench_csv(rows):
    lines = ["filtration,mode,mean_seconds,images"]
    for r in rows:
        lines.append(f"{r['filtration']},{r['mode']},{r['mean_seconds']:.6f},"
                     f"{r['images']}")
    return "\n".join(lines) + "\n"

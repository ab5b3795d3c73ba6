import json

import numpy as np
import pytest

from phconv import dataset as ds
from phconv.phc import PHCConfig
from phconv.synth import CLASSES, synth_dataset


@pytest.fixture(scope="module")
def tiny_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("slides")
    synth_dataset(root, per_class=3, side=64, seed=1)
    (root / "non-tumor" / "notes.txt").write_text("not an image")
    return root


def small_cfg(**kw):
    base = dict(window=32, stride=32, resolution=8, max_side=64)
    base.update(kw)
    return PHCConfig(**base)


class TestDihedral:
    def test_group_is_complete_and_distinct(self):
        rng = np.random.default_rng(0)
        img = rng.integers(0, 255, size=(5, 5), dtype=np.uint8)
        outs = {tag: ds.apply_dihedral(img, tag).tobytes()
                for tag in ds.DIHEDRAL}
        assert len(set(outs.values())) == 8
        assert outs["r0"] == img.tobytes()

    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            ds.apply_dihedral(np.zeros((2, 2)), "r45")

    def test_applies_to_rgb(self):
        img = np.arange(24, dtype=np.uint8).reshape(2, 4, 3)
        out = ds.apply_dihedral(img, "d1")
        assert out.shape == (4, 2, 3)


class TestIngest:
    def test_counts_and_skips(self, tiny_dataset):
        index = ds.ingest(tiny_dataset)
        assert index.counts() == {c: 3 for c in CLASSES}
        assert all(e.aug == "r0" for e in index.entries)

    def test_empty_errors(self, tmp_path):
        (tmp_path / "a").mkdir()
        with pytest.raises(ValueError):
            ds.ingest(tmp_path)

    def test_unreadable_errors(self, tmp_path):
        with pytest.raises(OSError):
            ds.ingest(tmp_path / "missing")


class TestBalance:
    def test_subsample_and_augment_to_target(self, tiny_dataset):
        index = ds.ingest(tiny_dataset)
        out = ds.balance(index, target_per_class=8, seed=3)
        assert out.counts() == {c: 8 for c in CLASSES}
        pairs = [(e.path, e.aug) for e in out.entries]
        assert len(set(pairs)) == len(pairs)  # no duplicate (file, tag)
        augmented = [e for e in out.entries if e.aug != "r0"]
        assert len(augmented) == 3 * (8 - 3)

    def test_exact_target_untouched(self, tiny_dataset):
        index = ds.ingest(tiny_dataset)
        out = ds.balance(index, target_per_class=3, seed=3)
        assert out.entries == index.entries

    def test_subsample_above_target(self, tiny_dataset):
        index = ds.ingest(tiny_dataset)
        out = ds.balance(index, target_per_class=2, seed=3)
        assert out.counts() == {c: 2 for c in CLASSES}
        assert all(e.aug == "r0" for e in out.entries)

    def test_unreachable_target(self, tiny_dataset):
        index = ds.ingest(tiny_dataset)
        with pytest.raises(ValueError):
            ds.balance(index, target_per_class=25, seed=3)  # 3 * 8 < 25

    def test_seeded_determinism(self, tiny_dataset):
        index = ds.ingest(tiny_dataset)
        a = ds.balance(index, target_per_class=8, seed=5)
        b = ds.balance(index, target_per_class=8, seed=5)
        assert a == b

    def test_small_class_augments_to_target(self):
        entries = tuple(ds.Entry(path=f"c/{i}.png", label="c")
                        for i in range(50))
        index = ds.DatasetIndex(entries=entries, classes=("c",))
        out = ds.balance(index, target_per_class=381, seed=2)
        augmented = [e for e in out.entries if e.aug != "r0"]
        assert len(augmented) == 331
        assert all(e.aug in ds.DIHEDRAL[1:] for e in augmented)

    def test_paper_scale_arithmetic(self):
        # classes {537, 263, 344} -> 381 each via subsample / augmentation
        entries = []
        for label, n in zip(CLASSES, (263, 537, 344)):
            entries += [ds.Entry(path=f"{label}/{i}.png", label=label)
                        for i in range(n)]
        index = ds.DatasetIndex(entries=tuple(entries), classes=CLASSES)
        out = ds.balance(index, target_per_class=381, seed=0)
        assert out.counts() == {c: 381 for c in CLASSES}


class TestSplit:
    def test_ratios_and_leftover_to_train(self):
        entries = tuple(ds.Entry(path=f"c/{i}.png", label="c")
                        for i in range(381))
        index = ds.DatasetIndex(entries=entries, classes=("c",))
        out = ds.split(index, seed=1)
        sizes = {s: sum(1 for e in out.entries if e.split == s)
                 for s in ds.SPLITS}
        assert sizes == {"train": 267, "val": 38, "test": 76}

    def test_all_train(self):
        entries = tuple(ds.Entry(path=f"c/{i}.png", label="c")
                        for i in range(10))
        index = ds.DatasetIndex(entries=entries, classes=("c",))
        out = ds.split(index, ratios=(1.0, 0.0, 0.0), seed=1)
        assert all(e.split == "train" for e in out.entries)

    def test_determinism(self, tiny_dataset):
        index = ds.ingest(tiny_dataset)
        assert ds.split(index, seed=9) == ds.split(index, seed=9)

    def test_stratified_by_class(self, tiny_dataset):
        index = ds.balance(ds.ingest(tiny_dataset), 10, seed=0)
        out = ds.split(index, ratios=(0.5, 0.2, 0.3), seed=2)
        for c in CLASSES:
            per = [e.split for e in out.entries if e.label == c]
            assert per.count("val") == 2 and per.count("test") == 3

    def test_bad_ratios(self, tiny_dataset):
        with pytest.raises(ValueError):
            ds.split(ds.ingest(tiny_dataset), ratios=(0.5, 0.2, 0.2))

    def test_degenerate_class_warns_all_train(self, caplog):
        entries = (ds.Entry(path="c/0.png", label="c"),)
        index = ds.DatasetIndex(entries=entries, classes=("c",))
        out = ds.split(index, seed=0)
        assert out.entries[0].split == "train"


class TestExport:
    def test_local_mode_shapes_and_manifest(self, tiny_dataset, tmp_path):
        index = ds.split(ds.ingest(tiny_dataset), seed=0)
        out = tmp_path / "out"
        manifest = ds.export(index, small_cfg(), out, mode="local")
        assert len(manifest["entries"]) == 9
        for e in manifest["entries"]:
            assert e["shape"] == [4, 8, 8]
            arr = np.load(out / e["file"])
            assert arr.dtype == np.dtype("<f4")
            assert arr.flags["C_CONTIGUOUS"]
        assert not ds.verify_manifest(out)

    def test_npy_header_format(self, tiny_dataset, tmp_path):
        index = ds.ingest(tiny_dataset)
        out = tmp_path / "out"
        manifest = ds.export(index, small_cfg(), out, mode="global")
        p = out / manifest["entries"][0]["file"]
        raw = p.read_bytes()
        assert raw[:6] == b"\x93NUMPY"
        assert raw[6:8] == b"\x01\x00"  # version 1.0
        header = raw[10:10 + int.from_bytes(raw[8:10], "little")].decode()
        assert "'descr': '<f4'" in header
        assert "'fortran_order': False" in header
        assert "(8, 8)" in header

    def test_global_and_image_modes(self, tiny_dataset, tmp_path):
        index = ds.ingest(tiny_dataset)
        m_global = ds.export(index, small_cfg(), tmp_path / "g", mode="global")
        assert all(e["shape"] == [8, 8] for e in m_global["entries"])
        m_img = ds.export(index, small_cfg(), tmp_path / "i", mode="image")
        assert all(e["shape"] == [64, 64] for e in m_img["entries"])

    def test_rerun_is_byte_identical_and_resumes(self, tiny_dataset, tmp_path):
        index = ds.ingest(tiny_dataset)
        out = tmp_path / "out"
        m1 = ds.export(index, small_cfg(), out, mode="local")
        first = {e["file"]: e["sha256"] for e in m1["entries"]}
        m2 = ds.export(index, small_cfg(), out, mode="local")
        assert {e["file"]: e["sha256"] for e in m2["entries"]} == first
        assert all(e["reused"] for e in m2["entries"])

    def test_augmented_entries_transform_input(self, tiny_dataset, tmp_path):
        index = ds.ingest(tiny_dataset)
        e = index.entries[0]
        rot = ds.Entry(path=e.path, label=e.label, aug="r90")
        idx2 = ds.DatasetIndex(entries=(e, rot), classes=index.classes)
        # thresholding commutes with rotation; anchored dilation would not
        manifest = ds.export(idx2, small_cfg(morphology="none"),
                             tmp_path / "a", mode="image")
        a = np.load(tmp_path / "a" / manifest["entries"][0]["file"])
        b = np.load(tmp_path / "a" / manifest["entries"][1]["file"])
        assert np.array_equal(np.rot90(a), b)


class TestBench:
    def test_report_shape(self, tiny_dataset):
        index = ds.ingest(tiny_dataset)
        rows = ds.bench(index, sample_size=2, cfg=small_cfg(), seed=0)
        assert len(rows) == 6  # 3 filtrations x 2 modes
        cells = {(r["filtration"], r["mode"]) for r in rows}
        assert cells == {(f, m) for f in ("alpha", "height", "lowerstar")
                         for m in ("local", "global")}
        assert all(r["mean_seconds"] > 0 for r in rows)
        table = ds.bench_table(rows)
        assert "filtration" in table and "height" in table
        csv = ds.bench_csv(rows)
        assert csv.count("\n") == 7

    def test_insufficient_sample(self, tiny_dataset):
        with pytest.raises(ValueError):
            ds.bench(ds.ingest(tiny_dataset), sample_size=100)


class TestIndexJson:
    def test_roundtrip(self, tiny_dataset):
        index = ds.split(ds.balance(ds.ingest(tiny_dataset), 5, seed=1), seed=1)
        back = ds.DatasetIndex.from_json(index.to_json())
        assert back == index

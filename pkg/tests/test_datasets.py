"""Planted generators, iid partitioning, and CSV ingestion."""

import numpy as np
import pytest

from fedfs.datasets import (
    MAV_COLUMNS,
    WESAD_COLUMNS,
    PlantedSpec,
    erid_schema,
    generate_planted,
    load_csv,
    partition_iid,
    preset_planted_spec,
    save_csv,
)
from fedfs.info import DiscreteDataset, conditional_entropy, entropy, mutual_information


class TestPlantedSpec:
    def test_noise_indices(self):
        spec = PlantedSpec(m=5, n=16, relevant=(0, 1), redundant={2: 0})
        assert spec.noise == (3, 4)

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            PlantedSpec(m=4, n=16, relevant=(0, 1), redundant={1: 0})

    def test_redundant_must_copy_relevant(self):
        with pytest.raises(ValueError):
            PlantedSpec(m=4, n=16, relevant=(0,), redundant={2: 3})

    def test_xor_needs_balanced_n(self):
        with pytest.raises(ValueError):
            PlantedSpec(m=3, n=10, relevant=(0, 1), label_rule="xor")

    def test_out_of_range_index(self):
        with pytest.raises(ValueError):
            PlantedSpec(m=2, n=8, relevant=(0, 5))


class TestGeneratePlanted:
    def test_relevant_mask_resolves_labels(self):
        spec = PlantedSpec(m=4, n=128, relevant=(0, 1), redundant={2: 0}, rng_seed=1)
        ds = generate_planted(spec)
        assert conditional_entropy(ds, [1, 1, 0, 0]) == 0.0

    def test_copy_is_equivalent_blanket(self):
        spec = PlantedSpec(m=4, n=128, relevant=(0, 1), redundant={2: 0}, rng_seed=1)
        ds = generate_planted(spec)
        assert conditional_entropy(ds, [0, 1, 1, 0]) == 0.0
        assert np.array_equal(ds.features[:, 2], ds.features[:, 0])

    def test_noise_feature_nearly_independent(self):
        spec = PlantedSpec(m=4, n=4096, relevant=(0, 1), redundant={2: 0}, rng_seed=5)
        ds = generate_planted(spec)
        mask = [0, 0, 0, 1]
        assert mutual_information(ds, mask) <= 0.02

    def test_xor_marginal_exactly_independent(self):
        # Balanced joint counts make each relevant column carry zero marginal
        # information about an XOR label.
        spec = PlantedSpec(m=3, n=64, relevant=(0, 1), label_rule="xor", rng_seed=9)
        ds = generate_planted(spec)
        assert mutual_information(ds, [1, 0, 0]) == 0.0
        assert mutual_information(ds, [0, 1, 0]) == 0.0

    def test_sum_mod_k_label_range(self):
        spec = PlantedSpec(
            m=6, n=512, relevant=(0, 1, 2, 3), label_rule="sum_mod_k", modulus=4, rng_seed=2
        )
        ds = generate_planted(spec)
        assert set(np.unique(ds.labels)) <= {0, 1, 2, 3}
        assert entropy(ds.labels) > 0.5

    def test_deterministic(self):
        spec = PlantedSpec(m=5, n=64, relevant=(0, 1), rng_seed=11)
        a, b = generate_planted(spec), generate_planted(spec)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)


class TestPartitionIid:
    def test_reference_split(self):
        ds = generate_planted(
            PlantedSpec(m=3, n=2911, relevant=(0,), label_rule="sum_mod_k", rng_seed=0)
        )
        parts = partition_iid(ds, 10, rng_seed=1)
        assert len(parts) == 10
        assert all(p.n == 291 for p in parts)

    def test_single_partition_is_shuffled_dataset(self, xor_dataset):
        parts = partition_iid(xor_dataset, 1, rng_seed=3)
        assert parts[0].n == 4
        joined = sorted(map(tuple, np.column_stack([parts[0].features, parts[0].labels])))
        original = sorted(map(tuple, np.column_stack([xor_dataset.features, xor_dataset.labels])))
        assert joined == original

    def test_remainder_dropped(self):
        ds = DiscreteDataset(np.zeros((10, 2), dtype=np.int64), np.zeros(10, dtype=np.int64))
        parts = partition_iid(ds, 3, rng_seed=0)
        assert [p.n for p in parts] == [3, 3, 3]

    def test_partitions_disjoint_and_exhaustive(self):
        ds = DiscreteDataset(
            np.arange(24, dtype=np.int64).reshape(12, 2), np.zeros(12, dtype=np.int64)
        )
        parts = partition_iid(ds, 4, rng_seed=7)
        rows = sorted(tuple(r) for p in parts for r in p.features)
        assert rows == sorted(tuple(r) for r in ds.features)

    def test_label_distribution_roughly_uniform(self):
        ds = generate_planted(
            PlantedSpec(m=3, n=4000, relevant=(0, 1), label_rule="xor", rng_seed=0)
        )
        parts = partition_iid(ds, 10, rng_seed=2)
        for part in parts:
            ones = part.labels.mean()
            assert 0.35 <= ones <= 0.65

    def test_too_many_partitions_rejected(self, xor_dataset):
        with pytest.raises(ValueError):
            partition_iid(xor_dataset, 5)


class TestCsvIo:
    def test_round_trip_xor(self, xor_dataset, tmp_path):
        path = tmp_path / "xor.csv"
        save_csv(xor_dataset, path)
        loaded = load_csv(path, spec=None)
        # Feature codes 0/1 survive equal-width binning into 10 bins as 0/9,
        # which leaves the information content intact; compare via entropy.
        assert loaded.n == 4 and loaded.m == 2
        assert np.array_equal(loaded.labels, xor_dataset.labels)
        assert conditional_entropy(loaded, [1, 1]) == 0.0
        assert loaded.feature_names == ("f0", "f1")

    def test_non_numeric_cell_located(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(
            "a,b,c,d,label\n"
            "1,2,3,4,0\n"
            "1,2,3,4,1\n"
            "1,2,3,oops,0\n"
        )
        with pytest.raises(ValueError, match="row 2, column 3"):
            load_csv(path)

    def test_missing_label_column(self, tmp_path):
        path = tmp_path / "nolabel.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="label"):
            load_csv(path)

    def test_ragged_row_located(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("a,label\n1,0\n1\n")
        with pytest.raises(ValueError, match="row 1"):
            load_csv(path)

    def test_wesad_shaped_csv(self, tmp_path):
        rng = np.random.default_rng(0)
        header = ",".join(name for name, _ in WESAD_COLUMNS) + ",label"
        lines = [header]
        for _ in range(20):
            values = rng.random(8)
            lines.append(",".join(f"{v:.4f}" for v in values) + f",{rng.integers(0, 3)}")
        path = tmp_path / "wesad.csv"
        path.write_text("\n".join(lines) + "\n")
        ds = load_csv(path)
        assert ds.m == 8
        assert ds.feature_names == tuple(name for name, _ in WESAD_COLUMNS)

    def test_non_integer_label_rejected(self, tmp_path):
        path = tmp_path / "fl.csv"
        path.write_text("a,label\n1,0.5\n")
        with pytest.raises(ValueError, match="label"):
            load_csv(path)


class TestPresets:
    def test_schema_shapes(self):
        assert len(erid_schema("wesad")) == 8
        assert len(erid_schema("mav")) == 2166
        assert len(MAV_COLUMNS) == 2166

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            erid_schema("other")

    def test_wesad_preset_spec(self):
        spec = preset_planted_spec("wesad", rng_seed=1)
        assert (spec.m, spec.n) == (8, 4000)
        assert spec.relevant == (1, 2, 5, 6)

    def test_mav_preset_spec(self):
        spec = preset_planted_spec("mav")
        assert (spec.m, spec.n) == (2166, 2911)
        ds = generate_planted(spec)
        mask = np.zeros(2166, dtype=np.int64)
        mask[list(spec.relevant)] = 1
        assert conditional_entropy(ds, mask) == 0.0

"""Dataset model, CSV/JSON round trips, conjugate closure, partitioning."""

import numpy as np
import pytest

from loewner_lab.errors import (
    ConjugateConflictError,
    DataFormatError,
    DuplicatePointError,
    PartitionSizeError,
)
from loewner_lab.freq_data import (
    FrequencyDataset,
    FrequencySample,
    close_conjugate,
    load_csv,
    load_json,
    partition_points,
    save_csv,
    save_json,
)


def _pairs_dataset(n_pairs, rng=None):
    rng = rng or np.random.default_rng(7)
    w = np.sort(rng.uniform(0.1, 10.0, n_pairs))
    vals = rng.normal(size=n_pairs) + 1j * rng.normal(size=n_pairs)
    return close_conjugate(FrequencyDataset.from_arrays(1j * w, vals))


def test_sample_rejects_nonfinite():
    with pytest.raises(ValueError):
        FrequencySample(complex(np.inf, 0), 1.0)
    with pytest.raises(ValueError):
        FrequencySample(1j, complex(np.nan, 0))


def test_dataset_rejects_duplicates():
    with pytest.raises(DuplicatePointError):
        FrequencyDataset.from_arrays([1j, 1j], [1.0, 2.0])


def test_csv_round_trip_exact(tmp_path):
    rng = np.random.default_rng(3)
    w = np.sort(rng.uniform(1e-3, 1e3, 40))
    vals = rng.normal(size=40) * 10.0 ** rng.integers(-8, 8, 40) + 1j * rng.normal(size=40)
    ds = FrequencyDataset.from_arrays(1j * w, vals)
    path = tmp_path / "data.csv"
    save_csv(ds, path)
    back = load_csv(path)
    assert not back.conjugate_closed
    # 17 significant digits round-trip doubles exactly.
    assert np.array_equal(back.points(), ds.points())
    assert np.array_equal(back.values(), ds.values())


def test_json_round_trip_exact(tmp_path):
    ds = FrequencyDataset.from_arrays([0.5j, 2j], [1.25 - 3.5j, -0.125j])
    path = tmp_path / "data.json"
    save_json(ds, path)
    back = load_json(path)
    assert np.array_equal(back.points(), ds.points())
    assert np.array_equal(back.values(), ds.values())


def test_csv_schema_read_back(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text("omega_rad_s,re,im\n0.0628,1.2,-3.4\n")
    ds = load_csv(path)
    assert len(ds) == 1
    assert ds.samples[0].z == 0.0628j
    assert ds.samples[0].phi == 1.2 - 3.4j


def test_csv_empty_data_section(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("omega_rad_s,re,im\n")
    assert len(load_csv(path)) == 0


def test_csv_parse_errors_name_the_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("omega_rad_s,re,im\n1.0,2.0,3.0\n1.5,oops,0\n")
    with pytest.raises(DataFormatError, match="line 3"):
        load_csv(path)
    path.write_text("wrong,header,here\n1,2,3\n")
    with pytest.raises(DataFormatError, match="header"):
        load_csv(path)
    path.write_text("omega_rad_s,re,im\n1.0,2.0\n")
    with pytest.raises(DataFormatError, match="line 2"):
        load_csv(path)


def test_csv_duplicate_frequency(tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text("omega_rad_s,re,im\n1.0,2.0,3.0\n1.0,2.0,3.0\n")
    with pytest.raises(DuplicatePointError):
        load_csv(path)


def test_save_csv_rejects_off_axis(tmp_path):
    ds = FrequencyDataset.from_arrays([1.0 + 1j], [1.0])
    with pytest.raises(DataFormatError):
        save_csv(ds, tmp_path / "offaxis.csv")


def test_close_conjugate_definition():
    ds = FrequencyDataset.from_arrays([1j], [2.0 + 1j])
    closed = close_conjugate(ds)
    assert closed.conjugate_closed
    assert len(closed) == 2
    assert closed.samples[0].z == 1j
    assert closed.samples[1].z == -1j
    assert closed.samples[1].phi == 2.0 - 1j


def test_close_conjugate_pairs_adjacent():
    ds = FrequencyDataset.from_arrays([1j, 3j, 7j], [1 + 1j, 2 + 2j, 3 + 3j])
    closed = close_conjugate(ds)
    z = closed.points()
    for k in range(0, 6, 2):
        assert z[k + 1] == np.conj(z[k])


def test_close_conjugate_idempotent():
    ds = _pairs_dataset(5)
    again = close_conjugate(ds)
    assert np.array_equal(again.points(), ds.points())
    assert np.array_equal(again.values(), ds.values())


def test_close_conjugate_conflict():
    ds = FrequencyDataset.from_arrays([1j, -1j], [2.0 + 1j, 5.0 + 0j])
    with pytest.raises(ConjugateConflictError):
        close_conjugate(ds)


def test_close_conjugate_keeps_real_axis_points():
    ds = FrequencyDataset.from_arrays([2.0 + 0j], [1.5 + 0j])
    closed = close_conjugate(ds)
    assert len(closed) == 1


def test_partition_disjoint_and_exhaustive():
    ds = _pairs_dataset(8)
    part = partition_points(ds)
    left = set(map(complex, part.left_points))
    right = set(map(complex, part.right_points))
    assert not left & right
    assert left | right == set(map(complex, ds.points()))
    assert part.size == 8


def test_partition_alternates_pairs():
    ds = _pairs_dataset(4)
    part = partition_points(ds)
    z = ds.points()
    # Pairs 1 and 3 go left, pairs 2 and 4 go right.
    assert set(map(complex, part.left_points)) == {
        complex(z[0]), complex(z[1]), complex(z[4]), complex(z[5])
    }
    assert set(map(complex, part.right_points)) == {
        complex(z[2]), complex(z[3]), complex(z[6]), complex(z[7])
    }


def test_partition_sides_conjugate_closed():
    ds = _pairs_dataset(6)
    part = partition_points(ds)
    for side in (part.left_points, part.right_points):
        assert set(map(complex, side)) == set(map(complex, np.conj(side)))


def test_partition_values_follow_points():
    ds = _pairs_dataset(4)
    part = partition_points(ds)
    lookup = {complex(s.z): s.phi for s in ds.samples}
    for pt, val in zip(part.left_points, part.left_values):
        assert lookup[complex(pt)] == val
    for pt, val in zip(part.right_points, part.right_values):
        assert lookup[complex(pt)] == val


def test_partition_odd_pair_count():
    ds = _pairs_dataset(3)
    with pytest.raises(PartitionSizeError):
        partition_points(ds)


def test_partition_requires_closure():
    ds = FrequencyDataset.from_arrays([1j, 2j], [1.0, 2.0])
    with pytest.raises(PartitionSizeError):
        partition_points(ds)

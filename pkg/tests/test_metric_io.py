import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from circlet.errors import FormatError, UnsupportedQueryError, ValidationError
from circlet.metric_io import (DistanceSource, distance, dump_json, euclidean_cross,
                               load_distance_matrix, load_point_cloud, write_angles_csv)


def write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_three_points(tmp_path):
    src = load_point_cloud(write(tmp_path, "0,0\n1,0\n0,1\n"))
    assert src.n == 3
    assert math.isclose(src.distance(1, 2), math.sqrt(2))


def test_single_row(tmp_path):
    src = load_point_cloud(write(tmp_path, "2.5,1\n"))
    assert src.n == 1
    assert src.distance(0, 0) == 0.0


def test_non_numeric_row_reports_line(tmp_path):
    with pytest.raises(FormatError) as info:
        load_point_cloud(write(tmp_path, "a,b\n"))
    assert info.value.line == 1


def test_ragged_row_reports_line(tmp_path):
    with pytest.raises(FormatError) as info:
        load_point_cloud(write(tmp_path, "0,0\n1,2,3\n"))
    assert info.value.line == 2


def test_empty_file(tmp_path):
    with pytest.raises(FormatError):
        load_point_cloud(write(tmp_path, "\n\n"))


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_point_cloud(tmp_path / "absent.csv")


def test_header_and_delimiter(tmp_path):
    src = load_point_cloud(write(tmp_path, "x;y\n0;0\n3;4\n"), delimiter=";", header=True)
    assert src.n == 2
    assert src.distance(0, 1) == 5.0


def test_matrix_two_by_two(tmp_path):
    src = load_distance_matrix(write(tmp_path, "0,1\n1,0\n"))
    assert src.n == 2 and src.distance(0, 1) == 1.0


def test_matrix_asymmetric(tmp_path):
    with pytest.raises(ValidationError):
        load_distance_matrix(write(tmp_path, "0,1\n2,0\n"))


@pytest.mark.parametrize("text", ["0,1,2\n1,0,1\n", "0,-1\n-1,0\n", "1,1\n1,0\n"])
def test_matrix_invalid(tmp_path, text):
    with pytest.raises(ValidationError):
        load_distance_matrix(write(tmp_path, text))


def test_ten_by_ten_matrix_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    P = rng.normal(size=(10, 3))
    D = euclidean_cross(P, P)
    path = write(tmp_path, "\n".join(",".join(repr(float(v)) for v in row) for row in D) + "\n")
    src = load_distance_matrix(path)
    direct = np.loadtxt(path, delimiter=",")
    assert src.n == 10
    assert np.array_equal(src.matrix, 0.5 * (direct + direct.T))
    assert np.all(np.diag(src.matrix) == 0)
    assert np.array_equal(src.matrix, src.matrix.T)


def test_three_four_five():
    src = DistanceSource.from_points([[0, 0], [3, 4]])
    assert distance(src, 0, 1) == 5.0
    assert src.distance(np.array([3.0, 4.0]), 0) == 5.0


def test_raw_vector_on_matrix_unsupported():
    src = DistanceSource.from_matrix([[0, 1], [1, 0]])
    with pytest.raises(UnsupportedQueryError):
        src.distance(np.array([0.0, 1.0]), 0)
    with pytest.raises(UnsupportedQueryError):
        src.cross_distances(np.zeros((1, 2)), [0, 1])


def test_cross_distances_index_and_vector_agree():
    rng = np.random.default_rng(1)
    P = rng.normal(size=(30, 4))
    src = DistanceSource.from_points(P)
    idx = np.array([3, 7, 11])
    assert np.array_equal(src.cross_distances(idx, np.arange(30)),
                          src.cross_distances(P[idx], np.arange(30)))


def test_triangle_inequality_on_random_triples():
    rng = np.random.default_rng(0)
    src = DistanceSource.from_points(rng.normal(size=(200, 5)))
    trip = rng.integers(0, 200, size=(1000, 3))
    for a, b, c in trip:
        assert src.distance(a, c) <= src.distance(a, b) + src.distance(b, c) + 1e-12


@given(arrays(np.float64, st.tuples(st.integers(2, 12), st.integers(1, 4)),
              elements=st.floats(-1e3, 1e3)))
@settings(max_examples=60, deadline=None)
def test_submatrix_symmetric_zero_diagonal(P):
    src = DistanceSource.from_points(P)
    D = src.submatrix(np.arange(src.n))
    assert np.array_equal(D, D.T)
    assert np.all(np.diag(D) == 0)
    assert np.all(D >= 0)


def test_angles_csv_markers_empty(tmp_path):
    p = tmp_path / "a.csv"
    write_angles_csv(p, range(3), [np.array([0.5, np.nan, -1.0])])
    assert p.read_text() == "point_id,angle\n0,0.5\n1,\n2,-1.0\n"


def test_json_stable_key_order():
    assert dump_json({"b": 1, "a": [1.5, None]}) == dump_json({"a": [1.5, None], "b": 1})

import json
import math

import numpy as np

from maxhyp.outputs import canonical_json, content_hash, csv_bytes, read_csv, write_csv


def test_csv_roundtrip(tmp_path):
    rows = [[0, 0.1, 1e-17], [1, 1 / 3, -2.5]]
    p = tmp_path / "t.csv"
    data = write_csv(p, ["i", "x", "y"], rows)
    assert b"\r" not in data
    header, arr = read_csv(p)
    assert header == ["i", "x", "y"]
    np.testing.assert_array_equal(arr, np.array(rows, dtype=float))


def test_csv_is_byte_stable():
    rows = [[np.float64(0.1), np.int64(3), True]]
    assert csv_bytes(["a", "b", "c"], rows) == b"a,b,c\n0.1,3,1\n"


def test_json_non_finite_and_sorted():
    text = canonical_json({"b": math.inf, "a": [np.float64(1.5), np.bool_(True)]})
    assert json.loads(text) == {"a": [1.5, True], "b": "inf"}
    assert text.index('"a"') < text.index('"b"')


def test_content_hash_order_independent():
    h1 = content_hash({"x": b"1", "y": b"2"}, {"k": 1})
    h2 = content_hash({"y": b"2", "x": b"1"}, {"k": 1})
    assert h1 == h2
    assert h1 != content_hash({"x": b"1", "y": b"3"}, {"k": 1})

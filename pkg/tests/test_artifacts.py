import math

import numpy as np

from artifacts import ArtifactHeader, format_value, read_csv, write_csv


def test_header_line():
    assert ArtifactHeader("abc", 7, version="9.9").line() == "# gasball 9.9 config=abc seed=7"
    assert ArtifactHeader("abc", None, version="9.9").line() == "# gasball 9.9 config=abc seed=none"


def test_format_value_round_trips_floats():
    assert format_value(True) == "1"
    assert format_value(0.1) == "0.1"
    assert float(format_value(1 / 3)) == 1 / 3
    assert format_value(np.float64(2.5)) == "2.5"
    assert format_value(np.int64(3)) == "3"
    assert format_value(math.inf) == "inf"


def test_write_and_read_csv(tmp_path):
    header = ArtifactHeader("0011223344556677", 1)
    path = write_csv(tmp_path / "nested" / "out.csv", header, ["a", "b"], [[1, 0.5], ["x", False]])
    line, columns, rows = read_csv(path)
    assert line == header.line()
    assert columns == ["a", "b"]
    assert rows == [["1", "0.5"], ["x", "0"]]


def test_numpy_scalars_are_written_as_plain_numbers(tmp_path):
    values = np.array([0.1686, 2.5, -1e-300])
    assert format_value(values[0]) == "0.1686"
    assert format_value(np.bool_(True)) == "1"
    assert format_value(np.float32(0.5)) == "0.5"
    header = ArtifactHeader("0011223344556677", 1)
    path = write_csv(tmp_path / "scalars.csv", header, ["x", "flag"], [[value, value > 0] for value in values])
    _, _, rows = read_csv(path)
    assert [float(row[0]) for row in rows] == values.tolist()
    assert [row[1] for row in rows] == ["1", "1", "0"]
    assert "np." not in path.read_text(encoding="utf-8")

import numpy as np
import pytest

import quasiminimal as qm
from quasiminimal.analysis import Classification
from quasiminimal.flows import Direction, Status


def test_density_table(tmp_path):
    rows = [
        (
            0.5,
            0.5,
            Direction.FORWARD,
            0.0025,
            None,
            Classification.FIXED,
            Status.COMPLETED,
        ),
        (
            0.1,
            0.2,
            Direction.BACKWARD,
            1.0,
            -73.25,
            Classification.DENSE,
            Status.COMPLETED,
        ),
    ]
    path = tmp_path / "density.csv"
    qm.results.density_table.write(path, rows)

    with open(path) as f:
        assert f.readline() == (
            "start_x,start_y,direction,covered_fraction,"
            "first_cover_time,classification,status\n"
        )

    fixed, dense = qm.results.density_table(path)
    assert fixed["classification"] == "Fixed"
    assert fixed["first_cover_time"] is None
    assert fixed["direction"] == "Forward"
    assert dense["first_cover_time"] == -73.25
    assert dense["start_y"] == 0.2
    assert dense["status"] == "Completed"


def test_density_table_row_length(tmp_path):
    with pytest.raises(ValueError, match="does not match header"):
        qm.results.density_table.write(tmp_path / "density.csv", [(0.1, 0.2)])


def test_scan_t_table(tmp_path):
    rows = [
        (1.0, 0.05, Classification.CONFINED, "dependent", (0, 1, 0)),
        (0.3, 0.4, Classification.UNDETERMINED, None, None),
    ]
    path = tmp_path / "scan_t.csv"
    qm.results.scan_t_table.write(path, rows)

    confined, slowed = qm.results.scan_t_table(path)
    assert confined == {
        "t": 1.0,
        "covered_fraction": 0.05,
        "classification": "Confined",
        "oracle_verdict": "dependent",
        "relation": (0, 1, 0),
    }
    assert slowed["oracle_verdict"] is None
    assert slowed["relation"] is None


def test_recurrence_table(tmp_path):
    points = qm.recurrence.grid_centres(2)
    first = np.array([2, -1, 12, 1])
    path = tmp_path / "recurrence.csv"
    qm.results.recurrence_table.write(path, points, first)

    with open(path) as f:
        lines = f.read().splitlines()
    assert lines[0] == "grid_x,grid_y,first_return_n"
    assert lines[2] == "0.25,0.75,FAIL"

    points_, first_ = qm.results.recurrence_table(path)
    np.testing.assert_array_equal(points_, points)
    np.testing.assert_array_equal(first_, first)

    with pytest.raises(ValueError):
        qm.results.recurrence_table.write(path, points, first[:2])


def test_orbit_table(tmp_path):
    times = np.array([0.0, 0.1, 0.2])
    points = np.array([[0.1, 0.2], [0.2, 0.3414213562373095], [0.3, 0.4828427124746]])
    path = tmp_path / "orbit.csv"
    qm.results.orbit_table.write(path, times, points)
    times_, points_ = qm.results.orbit_table(path)
    np.testing.assert_array_equal(times_, times)
    np.testing.assert_array_equal(points_, points)


def test_wrong_header(tmp_path):
    path = tmp_path / "orbit.csv"
    qm.results.orbit_table.write(path, [0.0], [[0.1, 0.2]])
    with pytest.raises(ValueError, match="requires header"):
        qm.results.density_table(path)


def test_summary(tmp_path):
    data = {"b": [1, 2], "a": {"y": None, "x": 0.5}}
    path = tmp_path / "summary.json"
    qm.results.summary.write(path, data)
    assert qm.results.summary(path) == data
    text = path.read_text()
    assert text.endswith("}\n")
    assert text.index('"a"') < text.index('"b"')

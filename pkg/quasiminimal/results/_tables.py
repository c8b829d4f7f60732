"""
CSV tables and JSON summaries of experiment runs.

Each reader has the matching writer attached as ``reader.write``.  Floats
are written with ``repr`` so that identical runs give identical files.
"""

from __future__ import annotations

import csv
import enum
import json
from os import PathLike
from typing import TYPE_CHECKING

import numpy as np

from .._util import writer

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence
    from typing import Any
    from numpy.typing import ArrayLike, NDArray

DENSITY_HEADER = (
    "start_x",
    "start_y",
    "direction",
    "covered_fraction",
    "first_cover_time",
    "classification",
    "status",
)
SCAN_T_HEADER = (
    "t",
    "covered_fraction",
    "classification",
    "oracle_verdict",
    "relation",
)
RECURRENCE_HEADER = ("grid_x", "grid_y", "first_return_n")
ORBIT_HEADER = ("t", "x", "y")

FAIL = "FAIL"


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _float_or_none(s: str) -> float | None:
    return float(s) if s else None


def _write_csv(
    path: str | PathLike[str],
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        out = csv.writer(f, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            if len(row) != len(header):
                msg = f"row {row!r} does not match header {header!r}"
                raise ValueError(msg)
            out.writerow(map(_cell, row))


def _read_csv(path: str | PathLike[str], header: Sequence[str]) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if not rows or tuple(rows[0]) != tuple(header):
        msg = f"{path}: requires header {','.join(header)}"
        raise ValueError(msg)
    return rows[1:]


def density_table(path: str | PathLike[str]) -> list[dict[str, Any]]:
    """Read a density table.

    Parameters
    ----------
    path : str
        Path to a CSV file with the density header.

    Returns
    -------
    list of dict
        One dict per row, keyed by column, with coordinates and fractions
        as floats and an empty ``first_cover_time`` as ``None``.

    """
    out = []
    for x, y, direction, frac, first, cls, status in _read_csv(path, DENSITY_HEADER):
        out.append(
            {
                "start_x": float(x),
                "start_y": float(y),
                "direction": direction,
                "covered_fraction": float(frac),
                "first_cover_time": _float_or_none(first),
                "classification": cls,
                "status": status,
            }
        )
    return out


@writer(density_table)
def _(path: str | PathLike[str], rows: Iterable[Sequence[Any]]) -> None:
    """
    Write density rows, each in the column order of the header.
    """
    _write_csv(path, DENSITY_HEADER, rows)


def _relation(s: str) -> tuple[int, int, int] | None:
    if not s:
        return None
    a, b, c = map(int, s.split())
    return a, b, c


def scan_t_table(path: str | PathLike[str]) -> list[dict[str, Any]]:
    """
    Read a time-t scan table.  The oracle columns are ``None`` where
    empty; a relation is stored as three space-separated integers.
    """
    out = []
    for t, frac, cls, verdict, relation in _read_csv(path, SCAN_T_HEADER):
        out.append(
            {
                "t": float(t),
                "covered_fraction": float(frac),
                "classification": cls,
                "oracle_verdict": verdict or None,
                "relation": _relation(relation),
            }
        )
    return out


@writer(scan_t_table)
def _(path: str | PathLike[str], rows: Iterable[Sequence[Any]]) -> None:
    def fmt(row: Sequence[Any]) -> Sequence[Any]:
        *head, relation = row
        return (*head, " ".join(map(str, relation)) if relation else None)

    _write_csv(path, SCAN_T_HEADER, map(fmt, rows))


def recurrence_table(
    path: str | PathLike[str],
) -> tuple[NDArray[Any], NDArray[Any]]:
    """Read a recurrence table.

    Returns
    -------
    points : ndarray
        Grid points, shape ``(n, 2)``.
    first_return : ndarray
        First return per point, ``-1`` for ``FAIL``.

    """
    rows = _read_csv(path, RECURRENCE_HEADER)
    points = np.array([(float(x), float(y)) for x, y, _ in rows]).reshape(-1, 2)
    first = np.array([-1 if n == FAIL else int(n) for _, _, n in rows], dtype=int)
    return points, first


@writer(recurrence_table)
def _(path: str | PathLike[str], points: ArrayLike, first_return: ArrayLike) -> None:
    points = np.asarray(points)
    first_return = np.asarray(first_return)
    if len(points) != len(first_return):
        msg = "shape mismatch between points and returns"
        raise ValueError(msg)
    _write_csv(
        path,
        RECURRENCE_HEADER,
        (
            (x, y, FAIL if n < 0 else n)
            for (x, y), n in zip(points, first_return)
        ),
    )


def orbit_table(path: str | PathLike[str]) -> tuple[NDArray[Any], NDArray[Any]]:
    """
    Read sample times and points of an orbit.
    """
    rows = _read_csv(path, ORBIT_HEADER)
    times = np.array([float(t) for t, _, _ in rows])
    points = np.array([(float(x), float(y)) for _, x, y in rows]).reshape(-1, 2)
    return times, points


@writer(orbit_table)
def _(path: str | PathLike[str], times: ArrayLike, points: ArrayLike) -> None:
    times = np.asarray(times)
    points = np.asarray(points)
    if points.shape != (len(times), 2):
        msg = "shape mismatch between times and points"
        raise ValueError(msg)
    _write_csv(path, ORBIT_HEADER, ((t, x, y) for t, (x, y) in zip(times, points)))


def summary(path: str | PathLike[str]) -> dict[str, Any]:
    """
    Read a JSON summary.
    """
    with open(path, encoding="utf-8") as f:
        data: dict[str, Any] = json.load(f)
    return data


@writer(summary)
def _(path: str | PathLike[str], data: Mapping[str, Any]) -> None:
    """
    Write a JSON summary with sorted keys.
    """
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(data, indent=2, sort_keys=True))
        f.write("\n")

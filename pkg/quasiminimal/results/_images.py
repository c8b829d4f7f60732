from __future__ import annotations

from os import PathLike
from typing import TYPE_CHECKING

import numpy as np

from .._util import writer

if TYPE_CHECKING:
    from typing import Any
    from numpy.typing import ArrayLike, NDArray

MAXVAL = 255


def coverage_image(path: str | PathLike[str]) -> NDArray[Any]:
    """Read a coverage raster in binary PGM format.

    Parameters
    ----------
    path : str
        Path to a ``P5`` file with maximum value 255.

    Returns
    -------
    visited : ndarray of bool
        Occupancy indexed by cell ``[i, j]`` with ``i`` along x and ``j``
        along y; the first image row is the top row of cells.

    """
    with open(path, "rb") as f:
        data = f.read()
    parts = data.split(maxsplit=4)
    if len(parts) < 4 or parts[0] != b"P5":
        msg = f"{path}: not a binary PGM file"
        raise ValueError(msg)
    width, height, maxval = map(int, parts[1:4])
    if maxval != MAXVAL:
        msg = f"{path}: requires maximum value {MAXVAL}"
        raise ValueError(msg)
    pixels = np.frombuffer(data[-width * height :], dtype=np.uint8)
    image = pixels.reshape(height, width)
    return image[::-1].T > 0


@writer(coverage_image)
def _(path: str | PathLike[str], visited: ArrayLike) -> None:
    """
    Write cell occupancy as a ``P5`` image: 0 is unvisited, 255 visited.
    """
    visited = np.asarray(visited, dtype=bool)
    if visited.ndim != 2:
        msg = "occupancy must be a 2D array"
        raise ValueError(msg)
    nx, ny = visited.shape
    image = np.where(visited.T[::-1], MAXVAL, 0).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P5\n{nx} {ny}\n{MAXVAL}\n".encode("ascii"))
        f.write(image.tobytes())

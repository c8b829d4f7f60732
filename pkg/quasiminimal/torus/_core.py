"""
Geometry of the flat torus R^2/Z^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .._errors import InvalidInput

if TYPE_CHECKING:
    from typing import Any
    from numpy.typing import ArrayLike, NDArray

# largest possible distance on the unit torus
DIAMETER = math.sqrt(2.0) / 2


def _unit(r: float) -> float:
    """reduce a finite real mod 1 into [0, 1)"""
    u = r - math.floor(r)
    # tiny negative inputs round up to 1.0
    return 0.0 if u >= 1.0 else u


@dataclass(frozen=True)
class TorusPoint:
    """
    A point of the flat torus in canonical coordinates ``[0, 1)^2``.
    """

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.x < 1.0 and 0.0 <= self.y < 1.0):
            msg = f"coordinates ({self.x!r}, {self.y!r}) are not in [0, 1)"
            raise InvalidInput(msg)

    def __iter__(self):  # type: ignore [no-untyped-def]
        yield self.x
        yield self.y

    def as_array(self) -> NDArray[Any]:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class TangentVector:
    """
    A value of a vector field on the torus.
    """

    dx: float
    dy: float

    @property
    def norm(self) -> float:
        return math.hypot(self.dx, self.dy)


def wrap(rx: float, ry: float) -> TorusPoint:
    """Wrap a point of the plane onto the torus.

    Parameters
    ----------
    rx, ry : float
        Planar coordinates.

    Returns
    -------
    TorusPoint
        The point ``(rx mod 1, ry mod 1)``.

    Raises
    ------
    InvalidInput
        If a coordinate is not finite.

    """
    if not (math.isfinite(rx) and math.isfinite(ry)):
        msg = f"cannot wrap non-finite coordinates ({rx!r}, {ry!r})"
        raise InvalidInput(msg)
    return TorusPoint(_unit(rx), _unit(ry))


def wrap_array(r: ArrayLike) -> NDArray[Any]:
    """
    Vectorised :func:`wrap` for arrays of planar coordinates.
    """
    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)):
        msg = "cannot wrap non-finite coordinates"
        raise InvalidInput(msg)
    u = r - np.floor(r)
    u[u >= 1.0] = 0.0
    return u


def _fold(d: float) -> float:
    """shortest representative of a coordinate difference in (-1, 1)"""
    a = abs(d)
    if a < 0.5:
        return d
    if a == 0.5:
        return -0.5
    return math.copysign(1.0 - a, -d)


def lift_displacement(p: TorusPoint, q: TorusPoint) -> tuple[float, float]:
    """
    Shortest planar representative of ``q - p``.

    Each axis is folded separately, so ``lift_displacement(q, p)`` is the
    exact negative except on ties.  A difference of exactly one half is
    represented by ``-0.5``, which is the first of the tied lattice offsets
    in lexicographic order.
    """
    return _fold(q.x - p.x), _fold(q.y - p.y)


def dist(p: TorusPoint, q: TorusPoint) -> float:
    """
    Flat torus distance; symmetric in its arguments to the last bit.
    """
    return math.hypot(*lift_displacement(p, q))


def displacement_array(a: ArrayLike, b: ArrayLike) -> NDArray[Any]:
    """
    Shortest displacements ``b - a`` for arrays of shape ``(..., 2)``,
    with the tie rule of :func:`lift_displacement`.
    """
    d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    r = d - np.rint(d)
    result: NDArray[Any] = np.where(r == 0.5, -0.5, r)
    return result


def dist_array(a: ArrayLike, b: ArrayLike) -> NDArray[Any]:
    """
    Vectorised :func:`dist` for arrays of shape ``(..., 2)``.
    """
    d = displacement_array(a, b)
    result: NDArray[Any] = np.hypot(d[..., 0], d[..., 1])
    return result

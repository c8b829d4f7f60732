"""
Positive recurrence of conjugated rotations, measured on grids of start
points and certified on nested pairs of balls.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .._errors import InvalidInput
from .._util import parallel_map
from ..torus import DIAMETER, TorusPoint, dist, dist_array, wrap_array

if TYPE_CHECKING:
    from collections.abc import Sequence
    from typing import Any
    from numpy.typing import NDArray

    from ._conjugacy import ConjugatedMap

logger = logging.getLogger(__name__)

FAILURE = -1


def _first_hits(
    f: ConjugatedMap,
    points: NDArray[Any],
    centers: NDArray[Any],
    radii: NDArray[Any],
    n_max: int,
) -> NDArray[Any]:
    """
    Least ``n`` in ``1..n_max`` with ``f^n(points[i])`` in the open ball
    ``B(centers[i], radii[i])``, or ``FAILURE``.
    """
    hits = np.full(len(points), FAILURE, dtype=int)
    active = np.arange(len(points))
    z = np.array(points, dtype=float)
    for n in range(1, n_max + 1):
        if len(active) == 0:
            break
        z = f.apply_array(z)
        inside = dist_array(z, centers[active]) < radii[active]
        hits[active[inside]] = n
        active = active[~inside]
        z = z[~inside]
    return hits


@dataclass(frozen=True, eq=False)
class RecurrenceReport:
    """First returns on the grid of cell centres.

    Parameters
    ----------
    m : int
        Cells per side.
    delta : float
        Return radius.
    n_max : int
        Iteration budget.
    points : ndarray
        Grid points, shape ``(m*m, 2)``, in row-major order of the cell
        indices ``(i, j)``.
    first_return : ndarray
        Least ``n`` with ``dist(f^n(x), x) < delta`` per point, ``-1`` for
        a failure.

    """

    m: int
    delta: float
    n_max: int
    points: NDArray[Any]
    first_return: NDArray[Any]

    @property
    def failures(self) -> int:
        return int(np.count_nonzero(self.first_return == FAILURE))

    @property
    def max_return(self) -> int | None:
        ok = self.first_return[self.first_return != FAILURE]
        return int(ok.max()) if len(ok) else None

    def grid(self) -> NDArray[Any]:
        """first returns as an ``(m, m)`` array indexed by cell"""
        return self.first_return.reshape(self.m, self.m)


def grid_centres(m: int) -> NDArray[Any]:
    c = (np.arange(m) + 0.5) / m
    ii, jj = np.meshgrid(c, c, indexing="ij")
    return np.stack([ii.ravel(), jj.ravel()], axis=-1)


def recurrence_scan(
    f: ConjugatedMap,
    m: int = 20,
    delta: float = 0.05,
    n_max: int = 50_000,
) -> RecurrenceReport:
    """Scan first-return times over the ``m x m`` grid of cell centres.

    Iterates are computed by repeated application of the closed-form map.

    Parameters
    ----------
    f : ConjugatedMap
        The map.
    m : int, optional
        Cells per side.
    delta : float, optional
        Return radius, in ``(0, 1/4)``.
    n_max : int, optional
        Largest iterate tried.

    Returns
    -------
    RecurrenceReport
        First return per grid point; unreturned points are failures.

    Raises
    ------
    InvalidInput
        If *delta* or *n_max* is out of range.

    """
    if m < 1:
        msg = f"grid size must be positive, got {m}"
        raise InvalidInput(msg)
    if not 0 < delta < 0.25:
        msg = f"return radius must lie in (0, 1/4), got {delta!r}"
        raise InvalidInput(msg)
    if n_max < 1:
        msg = f"iteration budget must be positive, got {n_max}"
        raise InvalidInput(msg)

    points = grid_centres(m)
    first = _first_hits(f, points, points, np.full(len(points), delta), n_max)
    report = RecurrenceReport(m, delta, n_max, points, first)
    logger.debug(
        "t=%r: %d failures, max return %s", f.t, report.failures, report.max_return
    )
    return report


@dataclass(frozen=True)
class BallPair:
    """
    Balls ``U`` and ``V`` with the closure of ``U`` inside ``V``.
    """

    u_center: TorusPoint
    u_radius: float
    v_center: TorusPoint
    v_radius: float

    def __post_init__(self) -> None:
        if not 0 < self.u_radius < self.v_radius:
            msg = (
                f"need 0 < U radius < V radius, got {self.u_radius!r}"
                f" and {self.v_radius!r}"
            )
            raise InvalidInput(msg)
        if dist(self.u_center, self.v_center) + self.u_radius >= self.v_radius:
            msg = "closure of U is not contained in V"
            raise InvalidInput(msg)


@dataclass(frozen=True)
class CertificateResult:
    """
    Outcome for one ball pair.  *witness* is the first failing sample, or
    for a pass the sample with the longest wait; *n* is its return, ``-1``
    for a failure.
    """

    pair: BallPair
    passed: bool
    witness: TorusPoint
    n: int
    returns: tuple[int, ...]

    @property
    def label(self) -> str:
        return "Pass" if self.passed else "Fail"


def ball_samples(center: TorusPoint, radius: float, count: int) -> NDArray[Any]:
    """
    Deterministic sample of the closed ball: the centre, then concentric
    rings out to the boundary with up to eight points each.
    """
    if count < 1:
        msg = f"sample count must be positive, got {count}"
        raise InvalidInput(msg)
    pts = [(center.x, center.y)]
    rings = math.ceil((count - 1) / 8)
    for j in range(rings):
        size = len(range(j, count - 1, rings))
        r = radius * (j + 1) / rings
        # odd rings are turned by half a step
        phase = math.pi / size if j % 2 else 0.0
        for i in range(size):
            a = phase + 2 * math.pi * i / size
            pts.append((center.x + r * math.cos(a), center.y + r * math.sin(a)))
    return wrap_array(pts)


def _check_pair(
    pair: BallPair,
    *,
    f: ConjugatedMap,
    samples_per_u: int,
    n_max: int,
) -> CertificateResult:
    samples = ball_samples(pair.u_center, pair.u_radius, samples_per_u)
    if pair.v_radius >= DIAMETER:
        # V covers the whole torus
        hits = np.ones(len(samples), dtype=int)
    else:
        centre = np.broadcast_to(pair.v_center.as_array(), samples.shape)
        radii = np.full(len(samples), pair.v_radius)
        hits = _first_hits(f, samples, centre, radii, n_max)
    failed = np.flatnonzero(hits == FAILURE)
    i = int(failed[0]) if len(failed) else int(np.argmax(hits))
    witness = TorusPoint(*map(float, samples[i]))
    return CertificateResult(
        pair, len(failed) == 0, witness, int(hits[i]), tuple(map(int, hits))
    )


def certificate_check(
    f: ConjugatedMap,
    pairs: Sequence[BallPair],
    samples_per_u: int = 9,
    n_max: int = 50_000,
    *,
    workers: int = 1,
) -> list[CertificateResult]:
    """
    For each pair, check that every sample of the closed ball ``U`` enters
    the open ball ``V`` under some iterate ``1 <= n <= n_max``.
    Results are returned in input order.
    """
    if n_max < 1:
        msg = f"iteration budget must be positive, got {n_max}"
        raise InvalidInput(msg)
    func = functools.partial(
        _check_pair, f=f, samples_per_u=samples_per_u, n_max=n_max
    )
    results = parallel_map(func, pairs, workers)
    for res in results:
        if not res.passed:
            logger.warning("certificate failed at %s", res.witness)
    return results

"""
Start points whose orbits keep clear of the punctures.

Trajectories of a slowed field run along the lines of the linear field, so
how close an orbit comes to a puncture is a question about straight lines
on the torus and has an exact answer.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import numpy as np

from .._errors import InvalidInput
from ..torus import TorusPoint, dist, wrap

if TYPE_CHECKING:
    from ..flows import CompositeField, SlopeParam

logger = logging.getLogger(__name__)


def closest_approach(
    slope: SlopeParam,
    x0: TorusPoint,
    q: TorusPoint,
    s_max: float,
    *,
    two_sided: bool = True,
) -> tuple[float, float]:
    """Closest approach of a line segment to a point on the torus.

    Parameters
    ----------
    slope : SlopeParam
        Slope of the line.
    x0 : TorusPoint
        Point on the line at ``s = 0``.
    q : TorusPoint
        Target point.
    s_max : float
        Half-length of the segment in the line parameter ``s``.
    two_sided : bool, optional
        Use ``[-s_max, s_max]``; otherwise ``[0, s_max]``.

    Returns
    -------
    distance : float
        Minimum torus distance between ``x0 + s (1, alpha)`` and *q*.
    s : float
        Parameter at which the minimum is attained.

    """
    if s_max < 0:
        msg = f"segment length must be nonnegative, got {s_max}"
        raise InvalidInput(msg)
    a = slope.alpha
    b2 = 1.0 + a * a
    s_lo = -s_max if two_sided else 0.0

    # translates q + (i, j) whose foot point may lie on the segment
    i = np.arange(
        math.floor(x0.x + s_lo - q.x) - 1, math.ceil(x0.x + s_max - q.x) + 2
    )
    k = math.ceil(a) + 1
    dx = q.x + i - x0.x
    j0 = np.rint(x0.y + a * dx - q.y)
    j = j0[:, None] + np.arange(-k, k + 1)[None, :]
    dx = np.broadcast_to(dx[:, None], j.shape)
    dy = q.y + j - x0.y

    s = np.clip((dx + a * dy) / b2, s_lo, s_max)
    d = np.hypot(dx - s, dy - a * s)
    n = int(np.argmin(d))
    best, s_best = float(d.flat[n]), float(s.flat[n])

    # endpoints, in case no translate has its foot inside the segment
    for s_end in (s_lo, s_max):
        d_end = dist(wrap(x0.x + s_end, x0.y + a * s_end), q)
        if d_end < best:
            best, s_best = d_end, s_end
    return best, s_best


def passing_clearance(T: float, bound: float) -> float:
    """Closest approach, in units of ``r0``, at which an orbit still passes a
    slowing disk within time *T*.

    Near a puncture the factor behaves like ``exp(-r0**2 / d**2)``, so an
    orbit line that stays ``d`` away crosses the disk in time of order
    ``exp(r0**2 / d**2) / bound``.

    Parameters
    ----------
    T : float
        Time budget of the run.
    bound : float
        Speed bound of the field.

    Returns
    -------
    float
        ``1 / sqrt(log(T * bound))``, at most one.

    """
    if not (math.isfinite(T) and T > 0):
        msg = f"time budget must be positive, got {T!r}"
        raise InvalidInput(msg)
    budget = T * bound
    if budget <= math.e:
        return 1.0
    return 1.0 / math.sqrt(math.log(budget))


def generic_starts(
    field: CompositeField,
    count: int,
    *,
    T: float = 1e4,
    s_max: float = 20.0,
    clearance: float | None = None,
    seed: int = 0,
    two_sided: bool = False,
    max_tries: int = 100_000,
) -> tuple[TorusPoint, ...]:
    """Seeded uniform starts whose orbit line keeps clear of the punctures.

    A start is accepted when the line ``x0 + s (1, alpha)`` stays at least
    ``clearance * r0`` away from every puncture for ``s`` in ``[0, s_max]``
    (``[-s_max, s_max]`` if *two_sided*).  For the linear field every
    uniform point is accepted.

    Parameters
    ----------
    field : CompositeField
        The vector field.
    count : int
        Number of starts.
    T : float, optional
        Time budget of the runs; sets the default clearance.
    s_max : float, optional
        Horizon along the line.  Every line of this length passes within
        roughly ``0.5 / s_max`` of a given point, so long horizons need
        small slowing radii.
    clearance : float, optional
        Required closest approach in units of ``r0``; defaults to
        :func:`passing_clearance`.
    seed : int, optional
        Seed of the generator.
    two_sided : bool, optional
        Check the backward half of the line too.
    max_tries : int, optional
        Number of draws before giving up.

    Raises
    ------
    InvalidInput
        If fewer than *count* starts qualify within *max_tries* draws.

    """
    if count < 0:
        msg = f"count must be nonnegative, got {count}"
        raise InvalidInput(msg)
    if clearance is None:
        clearance = passing_clearance(T, field.bound)
    rng = np.random.default_rng(seed)
    starts: list[TorusPoint] = []
    tries = 0
    while len(starts) < count:
        if tries >= max_tries:
            msg = (
                f"only {len(starts)} of {count} clear starts in {max_tries} tries"
                f" (clearance {clearance:.3g} r0 over s_max={s_max:g})"
            )
            raise InvalidInput(msg)
        tries += 1
        x, y = rng.random(2)
        p = TorusPoint(float(x), float(y))
        if field.r0 is not None:
            limit = clearance * field.r0
            if any(
                closest_approach(field.slope, p, q, s_max, two_sided=two_sided)[0]
                < limit
                for q in field.zeros
            ):
                continue
        starts.append(p)
    logger.debug("drew %d clear starts in %d tries", count, tries)
    return tuple(starts)

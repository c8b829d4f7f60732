"""
Vector fields on the torus: the irrational linear field and its slowed
versions that vanish exactly on a finite puncture set.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np

from .._errors import ConstructionRejected, InvalidInput
from ..torus import TangentVector, TorusPoint, dist

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = math.sqrt(2.0)
DEFAULT_R0 = 0.05

# irrationality surrogate
Q_MAX = 10**6
TOL_RATIONAL = 1e-12

# orbit-distinctness tolerance
TOL_ORBIT = 1e-9

MAX_PUNCTURES = 16

# smallest positive double; the slowing factor never drops below it off the
# punctures, where exp(-1/u) underflows
FACTOR_FLOOR = 5e-324


def convergents(x: float, depth: int = 40) -> tuple[tuple[int, int], ...]:
    """
    Continued-fraction convergents ``(p_k, q_k)`` of the exact binary value
    of *x*, at most *depth* of them.
    """
    if depth < 1:
        msg = f"depth must be positive, got {depth}"
        raise InvalidInput(msg)
    frac = Fraction(x)
    a = math.floor(frac)
    p_prev, q_prev, p, q = 1, 0, a, 1
    out = [(p, q)]
    rem = frac - a
    while rem and len(out) < depth:
        frac = 1 / rem
        a = math.floor(frac)
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
        rem = frac - a
    return tuple(out)


def rational_witness(
    alpha: float,
    q_max: int = Q_MAX,
    tol: float = TOL_RATIONAL,
) -> tuple[int, int] | None:
    """
    Return the rational ``p/q`` with smallest ``q <= q_max`` lying within
    *tol* of *alpha*, or ``None``.
    """
    q = np.arange(1, q_max + 1, dtype=float)
    p = np.rint(alpha * q)
    close = np.abs(alpha - p / q) < tol
    if not close.any():
        return None
    i = int(np.argmax(close))
    return int(p[i]), int(q[i])


@dataclass(frozen=True)
class SlopeParam:
    """Slope of the linear flow ``(1, alpha)``.

    The slope must pass the irrationality surrogate: no rational with
    denominator at most ``q_max`` approximates it within ``tol_rational``.

    """

    alpha: float
    cf_convergents: tuple[tuple[int, int], ...] = ()
    q_max: int = Q_MAX
    tol_rational: float = TOL_RATIONAL

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            msg = f"slope must be finite and positive, got {self.alpha!r}"
            raise InvalidInput(msg)
        witness = rational_witness(self.alpha, self.q_max, self.tol_rational)
        if witness is not None:
            p, q = witness
            msg = f"slope {self.alpha!r} is within {self.tol_rational:g} of {p}/{q}"
            raise InvalidInput(msg)

    @classmethod
    def from_alpha(
        cls,
        alpha: float = DEFAULT_ALPHA,
        *,
        depth: int = 40,
        q_max: int = Q_MAX,
        tol: float = TOL_RATIONAL,
    ) -> SlopeParam:
        return cls(alpha, convergents(alpha, depth), q_max, tol)


@dataclass(frozen=True)
class PunctureSet:
    """
    Finite set of punctures with their common slowing radius.
    """

    points: tuple[TorusPoint, ...]
    r0: float = DEFAULT_R0

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        n = len(self.points)
        if not 1 <= n <= MAX_PUNCTURES:
            msg = f"need between 1 and {MAX_PUNCTURES} punctures, got {n}"
            raise InvalidInput(msg)
        if not 0 < self.r0 < 0.25:
            msg = f"slowing radius must lie in (0, 1/4), got {self.r0!r}"
            raise InvalidInput(msg)
        for p, q in itertools.combinations(self.points, 2):
            if dist(p, q) <= 2 * self.r0:
                msg = f"punctures {p} and {q} are closer than 2 r0 = {2 * self.r0}"
                raise InvalidInput(msg)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class CompositeField:
    """The slowed field ``f * (1, alpha)``.

    Parameters
    ----------
    slope : SlopeParam
        Slope of the underlying linear field.
    punctures : PunctureSet or None
        Zeros of the field.  ``None`` gives the pure linear field.

    """

    slope: SlopeParam
    punctures: PunctureSet | None = None

    @property
    def alpha(self) -> float:
        return self.slope.alpha

    @property
    def bound(self) -> float:
        return math.sqrt(1.0 + self.slope.alpha**2)

    @property
    def zeros(self) -> tuple[TorusPoint, ...]:
        return () if self.punctures is None else self.punctures.points

    @property
    def r0(self) -> float | None:
        return None if self.punctures is None else self.punctures.r0

    def factor(self, x: float, y: float) -> float:
        """
        Slowing factor at planar coordinates, which need not be canonical.
        Zero only on a lift of a puncture.
        """
        if self.punctures is None:
            return 1.0
        r2 = self.punctures.r0 ** 2
        f = 1.0
        for q in self.punctures.points:
            dx = q.x - x
            dx -= round(dx)
            dy = q.y - y
            dy -= round(dy)
            if dx == 0.0 and dy == 0.0:
                return 0.0
            u = (dx * dx + dy * dy) / r2
            if u < 1.0:
                f *= max(smooth_step(u), FACTOR_FLOOR)
        return f

    def clearance(self, x: float, y: float) -> float:
        """
        Distance from planar coordinates to the nearest puncture.
        """
        best = math.inf
        for q in self.zeros:
            dx = q.x - x
            dx -= round(dx)
            dy = q.y - y
            dy -= round(dy)
            best = min(best, math.hypot(dx, dy))
        return best

    @classmethod
    def linear(cls, alpha: float = DEFAULT_ALPHA) -> CompositeField:
        return cls(SlopeParam.from_alpha(alpha))


def _chi(u: float) -> float:
    return math.exp(-1.0 / u) if u > 0.0 else 0.0


def smooth_step(u: float) -> float:
    """Smooth monotone transition from 0 to 1 on ``[0, 1]``.

    Built from ``chi(u) = exp(-1/u)``; flat to all orders at both ends.
    Values on ``(0, 1)`` are clamped to :data:`FACTOR_FLOOR` from below.

    Parameters
    ----------
    u : float
        Argument.

    Returns
    -------
    float
        ``chi(u) / (chi(u) + chi(1 - u))``.

    """
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    a = _chi(u)
    b = _chi(1.0 - u)
    return max(a / (a + b), FACTOR_FLOOR)


def slowing_factor(p: TorusPoint, F: PunctureSet | None) -> float:
    """
    Product of smooth steps in the squared distance to every puncture.

    Exactly zero on the punctures and only there; one outside all slowing
    disks.  Elsewhere it is at least :data:`FACTOR_FLOOR`.
    """
    if F is None:
        return 1.0
    f = 1.0
    for q in F.points:
        d = dist(p, q)
        if d == 0.0:
            return 0.0
        f *= max(smooth_step(d**2 / F.r0**2), FACTOR_FLOOR)
    return f


def eval_field(field: CompositeField, p: TorusPoint) -> TangentVector:
    """
    Value of the slowed field at *p*.
    """
    f = slowing_factor(p, field.punctures)
    return TangentVector(f, f * field.alpha)


class OrbitRelation(enum.Enum):
    SAME_ORBIT = "SameOrbit"
    DISTINCT_WITHIN_DEPTH = "DistinctWithinDepth"


@dataclass(frozen=True)
class PairVerdict:
    pair: tuple[TorusPoint, TorusPoint]
    relation: OrbitRelation
    s: float | None = None

    @property
    def same_orbit(self) -> bool:
        return self.relation is OrbitRelation.SAME_ORBIT


@dataclass(frozen=True)
class OrbitDistinctnessReport:
    """
    Pairwise orbit verdicts, and per puncture whether it lies on the orbit
    line of one of the designated special points.
    """

    pairs: tuple[PairVerdict, ...]
    on_special_orbit: tuple[bool, ...]
    depth: int
    tol: float

    @property
    def all_distinct(self) -> bool:
        return not any(v.same_orbit for v in self.pairs)

    @property
    def first_same_orbit(self) -> PairVerdict | None:
        return next((v for v in self.pairs if v.same_orbit), None)


def _orbit_time(
    p: TorusPoint,
    q: TorusPoint,
    alpha: float,
    depth: int,
    tol: float,
) -> float | None:
    """
    Flow time ``s`` with ``q = p + s (1, alpha) mod Z^2`` found by scanning
    ``|m| <= depth`` in the order 0, 1, -1, 2, -2, ..., or ``None``.
    """
    m = np.zeros(2 * depth + 1)
    m[1::2] = np.arange(1, depth + 1)
    m[2::2] = -np.arange(1, depth + 1)
    s = (q.x - p.x) + m
    r = (q.y - p.y) - s * alpha
    hit = np.abs(r - np.rint(r)) < tol
    if not hit.any():
        return None
    return float(s[np.argmax(hit)])


def check_distinct_dense_orbits(
    F: PunctureSet,
    slope: SlopeParam,
    depth: int,
    *,
    special: Sequence[TorusPoint] = (),
    tol: float = TOL_ORBIT,
) -> OrbitDistinctnessReport:
    """Check that the punctures lie on pairwise distinct orbits.

    Every orbit of an irrational linear flow is dense in both directions,
    so distinctness is the only condition to verify.  It is decided up to
    the scan *depth* and tolerance *tol*.

    Parameters
    ----------
    F : PunctureSet
        The punctures.
    slope : SlopeParam
        Slope of the linear flow.
    depth : int
        Largest lattice shift ``|m|`` scanned.
    special : sequence of TorusPoint, optional
        Designated points whose orbit lines each puncture is checked
        against (a puncture equal to a special point is not compared with
        itself).
    tol : float, optional
        Distance to an integer counted as a hit.

    Returns
    -------
    OrbitDistinctnessReport
        Verdict per pair of punctures.

    Raises
    ------
    InvalidInput
        If *depth* is not positive.

    """
    if depth <= 0:
        msg = f"scan depth must be positive, got {depth}"
        raise InvalidInput(msg)

    verdicts = []
    for p, q in itertools.combinations(F.points, 2):
        s = _orbit_time(p, q, slope.alpha, depth, tol)
        if s is None:
            verdicts.append(PairVerdict((p, q), OrbitRelation.DISTINCT_WITHIN_DEPTH))
        else:
            verdicts.append(PairVerdict((p, q), OrbitRelation.SAME_ORBIT, s))

    flags = []
    for p in F.points:
        flags.append(
            any(
                _orbit_time(z, p, slope.alpha, depth, tol) is not None
                for z in special
                if z != p
            )
        )

    return OrbitDistinctnessReport(tuple(verdicts), tuple(flags), depth, tol)


def build_punctured_field(
    slope: SlopeParam,
    F: PunctureSet,
    depth: int,
) -> CompositeField:
    """
    Slow the linear field to a halt on *F*.

    A single puncture gives the stopped flow with one exceptional point;
    several punctures on distinct orbits give one exceptional point each.

    Raises
    ------
    ConstructionRejected
        If two punctures are found on the same orbit.
    """
    report = check_distinct_dense_orbits(F, slope, depth)
    bad = report.first_same_orbit
    if bad is not None:
        p, q = bad.pair
        msg = f"punctures {p} and {q} share an orbit (s = {bad.s!r})"
        logger.warning(msg)
        raise ConstructionRejected(msg, bad.pair, bad.s)
    logger.debug("accepted %d punctures with r0=%g", len(F), F.r0)
    return CompositeField(slope, F)


def place_punctures(
    count: int,
    slope: SlopeParam,
    r0: float = DEFAULT_R0,
    *,
    depth: int = 50,
    seed: int = 0,
    max_tries: int = 1000,
) -> PunctureSet:
    """
    Draw seeded random punctures until a placement passes the separation
    and orbit-distinctness checks.
    """
    rng = np.random.default_rng(seed)
    for attempt in range(max_tries):
        xy = rng.random((count, 2))
        points = tuple(TorusPoint(float(x), float(y)) for x, y in xy)
        try:
            F = PunctureSet(points, r0)
        except InvalidInput:
            continue
        if check_distinct_dense_orbits(F, slope, depth).all_distinct:
            logger.debug("placed %d punctures after %d tries", count, attempt + 1)
            return F
    msg = f"no admissible placement of {count} punctures in {max_tries} tries"
    raise ConstructionRejected(msg)

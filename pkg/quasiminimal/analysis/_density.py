"""
Empirical density of orbits.

An orbit is called dense at resolution ``1/m`` when its samples visit every
cell of the ``m x m`` grid on the torus.  This is exact and monotone in the
length of the orbit, and cell coverage implies that every ball of radius
``sqrt(2)/(2m)`` holds a sample.
"""

from __future__ import annotations

import dataclasses
import enum
import functools
import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .._config import IntegratorConfig
from .._errors import InvalidInput, QuasiMinimalError
from .._util import parallel_map
from ..flows import Direction, Status, iterate_map, trace_orbit
from ..torus import dist, wrap
from ._oracle import DEFAULT_BOUND, IndependenceVerdict, translation_density_oracle
from ._starts import closest_approach

if TYPE_CHECKING:
    from collections.abc import Sequence
    from typing import Any
    from numpy.typing import NDArray

    from ..flows import CompositeField, OrbitTrace
    from ..torus import TorusPoint

logger = logging.getLogger(__name__)

DEFAULT_M = 20

# closest approach below which a start lies on the incoming line of a puncture
TOL_HIT = 1e-9


class Classification(enum.Enum):
    DENSE = "Dense"
    ASYMPTOTIC = "AsymptoticToPuncture"
    FIXED = "Fixed"
    CONFINED = "Confined"
    UNDETERMINED = "Undetermined"


@dataclass(eq=False)
class DensityGrid:
    """
    Occupancy of the ``m x m`` cell grid; ``visited[i, j]`` is the cell
    ``[i/m, (i+1)/m) x [j/m, (j+1)/m)``.
    """

    m: int
    visited: NDArray[Any]
    first_cover_time: float | None = None
    _count: int = dataclasses.field(default=0, repr=False)

    @classmethod
    def empty(cls, m: int) -> DensityGrid:
        if m < 1:
            msg = f"grid size must be positive, got {m}"
            raise InvalidInput(msg)
        return cls(m, np.zeros((m, m), dtype=bool))

    @classmethod
    def from_samples(
        cls,
        m: int,
        times: NDArray[Any],
        points: NDArray[Any],
    ) -> DensityGrid:
        grid = cls.empty(m)
        if len(points) == 0:
            return grid
        cells = np.minimum((np.asarray(points) * m).astype(int), m - 1)
        ids = cells[:, 0] * m + cells[:, 1]
        uniq, first = np.unique(ids, return_index=True)
        grid.visited.flat[uniq] = True
        grid._count = len(uniq)
        if grid._count == m * m:
            grid.first_cover_time = float(times[first.max()])
        return grid

    def mark(self, t: float, x: float, y: float) -> bool:
        """
        Mark the cell of ``(x, y)``; returns true once the grid is covered.
        """
        m = self.m
        i = min(int(x * m), m - 1)
        j = min(int(y * m), m - 1)
        if not self.visited[i, j]:
            self.visited[i, j] = True
            self._count += 1
            if self._count == m * m:
                self.first_cover_time = t
        return self._count == m * m

    @property
    def count(self) -> int:
        return self._count

    @property
    def covered_fraction(self) -> float:
        return self._count / self.m**2

    @property
    def covered(self) -> bool:
        return self._count == self.m**2

    @property
    def columns(self) -> int:
        """number of grid columns holding a sample"""
        return int(self.visited.any(axis=1).sum())

    @property
    def rows(self) -> int:
        """number of grid rows holding a sample"""
        return int(self.visited.any(axis=0).sum())


@dataclass(frozen=True, eq=False)
class DensityReport:
    """Coverage of one orbit and its classification.

    Parameters
    ----------
    grid : DensityGrid
        Coverage by the samples of the orbit (the discrete samples for an
        orbit of a time-t map).
    classification : Classification
        Dense, asymptotic to a puncture, fixed, confined or undetermined.
    direction : Direction
        Direction of the orbit.
    status : Status
        Terminal status of the underlying integration.
    start : TorusPoint
        Start of the orbit.
    budget : dict
        Time or iteration budget and the integrator configuration.
    refined : DensityGrid or None
        For maps, coverage by the flow path between iterates.

    """

    grid: DensityGrid
    classification: Classification
    direction: Direction
    status: Status
    start: TorusPoint
    budget: dict[str, Any]
    refined: DensityGrid | None = None

    @property
    def covered_fraction(self) -> float:
        return self.grid.covered_fraction

    @property
    def first_cover_time(self) -> float | None:
        return self.grid.first_cover_time


def _heads_into_puncture(
    field: CompositeField,
    start: TorusPoint,
    end: TorusPoint,
    direction: Direction,
    length: float,
) -> bool:
    """
    The run ended inside a slowing disk whose puncture lies ahead of
    *start* on its orbit line, within line parameter *length*.
    """
    r0 = field.r0
    if r0 is None:
        return False
    for q in field.zeros:
        if dist(end, q) >= r0:
            continue
        x0 = start
        if direction is Direction.BACKWARD:
            # the backward ray from x0 is the forward ray from -x0 towards -q
            x0, q = wrap(-x0.x, -x0.y), wrap(-q.x, -q.y)
        d, _ = closest_approach(field.slope, x0, q, length + r0, two_sided=False)
        if d < TOL_HIT:
            return True
    return False


def _classify(
    trace: OrbitTrace,
    grid: DensityGrid,
    verdict: IndependenceVerdict | None = None,
    *,
    asymptotic: bool | None = None,
) -> Classification:
    """
    *asymptotic* says whether the orbit converges to a puncture; when it is
    not known a stalled run counts as asymptotic.
    """
    if trace.stationary:
        return Classification.FIXED
    if grid.covered:
        return Classification.DENSE
    if asymptotic is None:
        asymptotic = trace.status is Status.STALLED
    if asymptotic:
        return Classification.ASYMPTOTIC
    if verdict is not None and verdict.dependent:
        return Classification.CONFINED
    return Classification.UNDETERMINED


def _check_no_skip(max_step_len: float | None, m: int) -> None:
    if m < 1:
        msg = f"grid size must be positive, got {m}"
        raise InvalidInput(msg)
    if max_step_len is not None and max_step_len > 1 / (2 * m):
        msg = (
            f"sample spacing {max_step_len} exceeds 1/(2m) = {1 / (2 * m)};"
            " cells could be skipped"
        )
        raise InvalidInput(msg)


def _failed(
    x0: TorusPoint,
    direction: Direction,
    m: int,
    budget: dict[str, Any],
) -> DensityReport:
    """report for a run the solver gave up on"""
    return DensityReport(
        DensityGrid.empty(m),
        Classification.UNDETERMINED,
        direction,
        Status.FAILED,
        x0,
        budget,
    )


def epsilon_density_test(
    trace: OrbitTrace,
    m: int = DEFAULT_M,
    *,
    budget: dict[str, Any] | None = None,
    field: CompositeField | None = None,
) -> DensityReport:
    """Grid coverage of an orbit trace.

    Parameters
    ----------
    trace : OrbitTrace
        Flow trace with sample spacing at most ``1/(2m)``, or the discrete
        orbit of a map.
    m : int
        Cells per side.
    budget : dict, optional
        Budget echoed in the report.
    field : CompositeField, optional
        Field of a flow trace.  With the field a run is asymptotic to a
        puncture when it ends in a slowing disk on the incoming line of its
        puncture; without it, when it stalled.

    Returns
    -------
    DensityReport
        Dense iff all ``m**2`` cells hold a sample.

    Raises
    ------
    InvalidInput
        If the sample spacing of a flow trace exceeds ``1/(2m)``.

    """
    _check_no_skip(trace.max_step_len, m)
    grid = DensityGrid.from_samples(m, trace.times, trace.points)
    asymptotic = None
    if field is not None:
        asymptotic = _heads_into_puncture(
            field,
            trace.start,
            trace.end,
            trace.direction,
            float(abs(trace.times[-1])),
        )
    return DensityReport(
        grid,
        _classify(trace, grid, asymptotic=asymptotic),
        trace.direction,
        trace.status,
        trace.start,
        budget or {},
    )


def double_density_test(
    field: CompositeField,
    x0: TorusPoint,
    T: float,
    m: int = DEFAULT_M,
    cfg: IntegratorConfig | None = None,
) -> tuple[DensityReport, DensityReport]:
    """
    Forward and backward coverage of the orbit of *x0*.  Each direction
    stops as soon as its grid is covered.
    """
    cfg = cfg or IntegratorConfig()
    _check_no_skip(cfg.max_step_len, m)
    budget = {"T": T, "integrator": cfg.model_dump()}
    reports = []
    for direction in (Direction.FORWARD, Direction.BACKWARD):
        watch = DensityGrid.empty(m)
        try:
            trace = trace_orbit(
                field,
                x0,
                T,
                direction,
                cfg,
                until=lambda t, p, watch=watch: watch.mark(t, p.x, p.y),
            )
        except InvalidInput:
            raise
        except QuasiMinimalError as exc:
            logger.warning("start %s, %s: %s", x0, direction.value, exc)
            reports.append(_failed(x0, direction, m, budget))
            continue
        reports.append(epsilon_density_test(trace, m, budget=budget, field=field))
    return reports[0], reports[1]


@dataclass(frozen=True, eq=False)
class ExceptionalEntry:
    """
    Forward and backward density reports for one start.
    """

    start: TorusPoint
    forward: DensityReport
    backward: DensityReport

    @property
    def classification(self) -> tuple[Classification, Classification]:
        return self.forward.classification, self.backward.classification

    @property
    def exceptional(self) -> bool:
        """neither direction is dense"""
        return Classification.DENSE not in self.classification


def exceptional_set(entries: Sequence[ExceptionalEntry]) -> tuple[TorusPoint, ...]:
    """
    Starts of the entries whose orbit is dense in neither direction.
    """
    return tuple(e.start for e in entries if e.exceptional)


def _double_density_entry(
    x0: TorusPoint,
    *,
    field: CompositeField,
    T: float,
    m: int,
    cfg: IntegratorConfig,
) -> ExceptionalEntry:
    forward, backward = double_density_test(field, x0, T, m, cfg)
    return ExceptionalEntry(x0, forward, backward)


def exceptional_set_scan(
    field: CompositeField,
    starts: Sequence[TorusPoint],
    T: float,
    m: int = DEFAULT_M,
    cfg: IntegratorConfig | None = None,
    *,
    workers: int = 1,
) -> list[ExceptionalEntry]:
    """Classify the orbit of every start in both directions.

    The empirical exceptional set is the set of starts whose orbit is dense
    in neither direction, see :func:`exceptional_set`.  Undetermined
    orbits are kept in the result.  Entries are returned in input order.

    """
    if len(starts) == 0:
        msg = "need at least one start"
        raise InvalidInput(msg)
    cfg = cfg or IntegratorConfig()
    func = functools.partial(_double_density_entry, field=field, T=T, m=m, cfg=cfg)
    entries = parallel_map(func, starts, workers)
    logger.info(
        "%d of %d starts exceptional", len(exceptional_set(entries)), len(entries)
    )
    return entries


def _map_report(
    field: CompositeField,
    t: float,
    x0: TorusPoint,
    n: int,
    m: int,
    cfg: IntegratorConfig,
    verdict: IndependenceVerdict | None = None,
) -> DensityReport:
    """
    Coverage by the discrete orbit of the time-t map, stopping once the
    discrete orbit covers the grid, with the refined flow coverage.
    """
    budget = {"t": t, "n": n, "integrator": cfg.model_dump()}
    direction = Direction.FORWARD if t >= 0 else Direction.BACKWARD
    watch = DensityGrid.empty(m)
    refined = None
    on_flow_sample = None
    if cfg.max_step_len <= 1 / (2 * m):
        refined = DensityGrid.empty(m)

        def on_flow_sample(s: float, x: float, y: float) -> bool:
            refined.mark(s, x, y)
            return False

    try:
        trace = iterate_map(
            field,
            t,
            x0,
            n,
            cfg,
            until=lambda k, p: watch.mark(k, p.x, p.y),
            on_flow_sample=on_flow_sample,
        )
    except InvalidInput:
        raise
    except QuasiMinimalError as exc:
        logger.warning("t=%r, start %s: %s", t, x0, exc)
        return _failed(x0, direction, m, budget)
    grid = DensityGrid.from_samples(m, trace.times, trace.points)
    asymptotic = _heads_into_puncture(
        field, x0, trace.end, trace.direction, abs(t) * (len(trace) - 1)
    )
    return DensityReport(
        grid,
        _classify(trace, grid, verdict, asymptotic=asymptotic),
        trace.direction,
        trace.status,
        x0,
        budget,
        refined,
    )


@dataclass(frozen=True, eq=False)
class TimeScanRow:
    t: float
    report: DensityReport
    verdict: IndependenceVerdict | None

    @property
    def agrees(self) -> bool:
        """
        Empirical density matches the oracle where the oracle is decisive.
        """
        if self.verdict is None:
            return True
        dense = self.report.classification is Classification.DENSE
        return dense != self.verdict.dependent


def _time_scan_row(
    t: float,
    *,
    field: CompositeField,
    x0: TorusPoint,
    n: int,
    m: int,
    cfg: IntegratorConfig,
    bound: int,
) -> TimeScanRow:
    verdict = None
    if field.punctures is None:
        verdict = translation_density_oracle(t % 1.0, (t * field.alpha) % 1.0, bound)
    report = _map_report(field, t, x0, n, m, cfg, verdict)
    row = TimeScanRow(t, report, verdict)
    if not row.agrees:
        logger.warning(
            "t=%r: coverage %s disagrees with oracle %s",
            t,
            report.classification.value,
            verdict.label if verdict else None,
        )
    return row


def time_t_scan(
    field: CompositeField,
    t_values: Sequence[float],
    x0: TorusPoint,
    n: int,
    m: int = DEFAULT_M,
    cfg: IntegratorConfig | None = None,
    *,
    bound: int = DEFAULT_BOUND,
    workers: int = 1,
) -> list[TimeScanRow]:
    """Density of the time-t maps for a list of times.

    For each *t* the map is iterated up to *n* times from *x0*.  The
    classification uses the discrete iterates only; the coverage of the
    flow path between iterates is recorded as ``report.refined``.  For the
    unslowed field the oracle verdict for the translation
    ``(t mod 1, t alpha mod 1)`` is attached.

    Parameters
    ----------
    field : CompositeField
        The vector field.
    t_values : sequence of float
        Times of the maps.
    x0 : TorusPoint
        Start point.
    n : int
        Iteration budget.
    m : int, optional
        Cells per side.
    cfg : IntegratorConfig, optional
        Tolerances and budgets.
    bound : int, optional
        Coefficient bound of the oracle.
    workers : int, optional
        Worker processes; rows are returned in input order.

    Returns
    -------
    list of TimeScanRow
        One row per time.

    """
    if len(t_values) == 0:
        msg = "need at least one time"
        raise InvalidInput(msg)
    cfg = cfg or IntegratorConfig()
    func = functools.partial(
        _time_scan_row, field=field, x0=x0, n=n, m=m, cfg=cfg, bound=bound
    )
    return parallel_map(func, t_values, workers)


def _map_entry(
    x0: TorusPoint,
    *,
    field: CompositeField,
    t: float,
    n: int,
    m: int,
    cfg: IntegratorConfig,
) -> ExceptionalEntry:
    forward = _map_report(field, t, x0, n, m, cfg)
    backward = _map_report(field, -t, x0, n, m, cfg)
    return ExceptionalEntry(x0, forward, backward)


def map_exceptional_set_scan(
    field: CompositeField,
    t: float,
    starts: Sequence[TorusPoint],
    n: int,
    m: int = DEFAULT_M,
    cfg: IntegratorConfig | None = None,
    *,
    workers: int = 1,
) -> list[ExceptionalEntry]:
    """
    Forward and backward discrete coverage of the time-t map for every
    start; the exceptional set of the map is compared with the one of the
    flow through :func:`exceptional_set`.
    """
    if len(starts) == 0:
        msg = "need at least one start"
        raise InvalidInput(msg)
    if t == 0:
        msg = "the time-0 map is the identity"
        raise InvalidInput(msg)
    cfg = cfg or IntegratorConfig()
    func = functools.partial(_map_entry, field=field, t=t, n=n, m=m, cfg=cfg)
    return parallel_map(func, starts, workers)


def closure_agreement(forward: DensityReport, backward: DensityReport) -> bool:
    """
    Forward coverage contains backward coverage, i.e. at grid resolution
    the closure of the forward orbit is the closure of the whole orbit.
    """
    if forward.grid.m != backward.grid.m:
        msg = "reports use different grids"
        raise InvalidInput(msg)
    return bool(np.all(forward.grid.visited | ~backward.grid.visited))

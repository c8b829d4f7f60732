"""
Orbit integration of composite fields.

Trajectories are integrated on a planar lift with scipy's DOP853 stepper
(Dormand-Prince 8(5,3)) and wrapped onto the torus only when samples are
emitted.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import DOP853

from .._config import IntegratorConfig
from .._errors import InvalidInput, QuasiMinimalError
from ..torus import TorusPoint, wrap
from ..torus._core import _unit
from ._field import smooth_step

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator
    from typing import Any
    from numpy.typing import NDArray

    from ._field import CompositeField, SlopeParam

    # callback on emitted samples (time, x, y); returning True stops the run
    SampleHook = Callable[[float, float, float], bool]

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = IntegratorConfig()


class Status(enum.Enum):
    COMPLETED = "Completed"
    STALLED = "StalledNearPuncture"
    BUDGET_EXHAUSTED = "StepBudgetExhausted"
    # set by scans that record a solver failure instead of raising
    FAILED = "IntegratorFailure"


class Direction(enum.Enum):
    FORWARD = "Forward"
    BACKWARD = "Backward"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.FORWARD else -1


@dataclass(frozen=True, eq=False)
class OrbitTrace:
    """Time-stamped samples of an orbit.

    Parameters
    ----------
    times : ndarray
        Sample times, strictly monotone in the trace direction.  Discrete
        orbits of a time-t map use the iteration index.
    points : ndarray
        Canonical torus coordinates, shape ``(len(times), 2)``.
    status : Status
        Terminal status of the run.
    direction : Direction
        Direction of the run.
    max_step_len : float or None
        Bound on the displacement between consecutive samples.  ``None``
        for discrete orbits of a map.
    stationary : bool
        The start is a zero of the field.

    """

    times: NDArray[Any]
    points: NDArray[Any]
    status: Status
    direction: Direction
    max_step_len: float | None
    stationary: bool = False

    def __len__(self) -> int:
        return len(self.times)

    @property
    def start(self) -> TorusPoint:
        return TorusPoint(*map(float, self.points[0]))

    @property
    def end(self) -> TorusPoint:
        return TorusPoint(*map(float, self.points[-1]))

    @property
    def samples(self) -> Iterator[tuple[float, TorusPoint]]:
        for t, (x, y) in zip(self.times, self.points):
            yield float(t), TorusPoint(float(x), float(y))


def _slope(alpha: SlopeParam | float) -> float:
    return float(alpha) if isinstance(alpha, (int, float)) else alpha.alpha


def exact_linear_flow_map(
    alpha: SlopeParam | float,
    x0: TorusPoint,
    t: float,
) -> TorusPoint:
    """
    Closed-form time-t map of the unslowed linear flow.
    """
    a = _slope(alpha)
    return wrap(x0.x + t, x0.y + t * a)


def _step_cap(field: CompositeField, y: NDArray[Any]) -> float:
    """
    Longest step in time over which the trajectory from *y* cannot reach a
    puncture.

    Outside the slowing disks the speed is at most ``bound``.  Inside the
    disk of a puncture at distance ``d`` the speed on the ball of radius
    ``d/2`` is at most ``bound`` times the factor at distance ``3d/2``, and
    the step may cover a quarter of ``d`` at that speed.
    """
    r0 = field.r0
    if r0 is None:
        return math.inf
    bound = field.bound
    cap = math.inf
    for q in field.zeros:
        dx = q.x - y[0]
        dx -= round(dx)
        dy = q.y - y[1]
        dy -= round(dy)
        d = math.hypot(dx, dy)
        if d > r0:
            cap = min(cap, max(d - r0, r0 / 2) / bound)
        elif d > 0.0:
            fmax = smooth_step((1.5 * d / r0) ** 2)
            cap = min(cap, 0.25 * d / (bound * fmax))
    return cap


def _sample_spacing(field: CompositeField, cfg: IntegratorConfig) -> float:
    """largest displacement between emitted samples"""
    r0 = field.r0
    return cfg.max_step_len if r0 is None else min(cfg.max_step_len, r0)


def _subdivide(
    sol: Callable[[float], NDArray[Any]],
    t0: float,
    y0: NDArray[Any],
    t1: float,
    y1: NDArray[Any],
    h: float,
) -> list[tuple[float, NDArray[Any]]]:
    """
    Intermediate samples of one step so that consecutive samples are at
    most *h* apart.  The end point is not included.
    """
    out: list[tuple[float, NDArray[Any]]] = []
    stack = [(t0, y0, t1, y1)]
    while stack:
        ta, ya, tb, yb = stack.pop()
        d = math.hypot(*(yb - ya))
        if d <= h:
            if ta != t0:
                out.append((ta, ya))
            continue
        k = math.ceil(d / h)
        ts = [ta + (tb - ta) * j / k for j in range(k + 1)]
        ys = [ya] + [sol(tj) for tj in ts[1:-1]] + [yb]
        # reversed so that pieces pop in time order
        for j in reversed(range(k)):
            stack.append((ts[j], ys[j], ts[j + 1], ys[j + 1]))
    return out


@dataclass
class _Run:
    status: Status
    stationary: bool
    end: NDArray[Any]
    steps: int


def _integrate(
    field: CompositeField,
    x0: TorusPoint,
    duration: float,
    sign: int,
    cfg: IntegratorConfig,
    *,
    emit: SampleHook | None = None,
    marks: float | None = None,
    on_mark: SampleHook | None = None,
) -> _Run:
    """Integrate ``sign * field`` from *x0* over ``[0, duration]``.

    *emit* receives every sample (start included) with consecutive samples
    at most ``cfg.max_step_len`` and ``r0`` apart; *on_mark* receives the
    states at the multiples of *marks*, after the samples of the solver
    step that holds them.  Either callback stops the run by returning true.
    Times passed to the callbacks carry the sign of the direction.

    """
    alpha = field.alpha
    bound = field.bound
    spacing = _sample_spacing(field, cfg)
    y0 = np.array([x0.x, x0.y])

    def sample(s: float, y: NDArray[Any], hook: SampleHook | None) -> bool:
        if hook is None:
            return False
        return hook(sign * s, _unit(float(y[0])), _unit(float(y[1])))

    if sample(0.0, y0, emit):
        return _Run(Status.COMPLETED, False, y0, 0)

    if duration == 0.0:
        return _Run(Status.COMPLETED, False, y0, 0)

    # a zero of the field is a fixed point for all time
    if x0 in field.zeros:
        if marks is not None and on_mark is not None:
            k = 1
            while k * marks <= duration:
                if on_mark(sign * k * marks, x0.x, x0.y):
                    break
                k += 1
        sample(duration, y0, emit)
        return _Run(Status.COMPLETED, True, y0, 0)

    def rhs(s: float, y: NDArray[Any]) -> NDArray[Any]:
        f = sign * field.factor(y[0], y[1])
        return np.array([f, f * alpha])

    solver = DOP853(
        rhs,
        0.0,
        y0,
        duration,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=_step_cap(field, y0),
    )

    next_mark = 1
    steps = 0
    while solver.status == "running":
        if steps >= cfg.max_steps:
            logger.warning("step budget of %d exhausted at s=%g", steps, solver.t)
            return _Run(Status.BUDGET_EXHAUSTED, False, solver.y, steps)

        solver.max_step = _step_cap(field, solver.y)
        t_old, y_old = solver.t, solver.y.copy()
        message = solver.step()
        steps += 1
        if solver.status == "failed":
            msg = f"integration failed at s={solver.t}: {message}"
            raise QuasiMinimalError(msg)
        t_new, y_new = solver.t, solver.y

        sol = None
        stop = False

        if emit is not None:
            if math.hypot(*(y_new - y_old)) > spacing:
                sol = sol or solver.dense_output()
                for ts, ys in _subdivide(sol, t_old, y_old, t_new, y_new, spacing):
                    if sample(ts, ys, emit):
                        stop = True
                        break
            if not stop:
                stop = sample(t_new, y_new, emit)

        if marks is not None and on_mark is not None and not stop:
            while next_mark * marks <= t_new:
                tm = next_mark * marks
                if tm == t_new:
                    ym = y_new
                else:
                    sol = sol or solver.dense_output()
                    ym = sol(tm)
                if on_mark(sign * tm, ym[0], ym[1]):
                    stop = True
                    break
                next_mark += 1

        if stop:
            return _Run(Status.COMPLETED, False, y_new, steps)

        speed = bound * field.factor(y_new[0], y_new[1])
        if speed < cfg.stall_speed and duration - t_new > cfg.stall_horizon:
            logger.debug("stalled at speed %g after %d steps", speed, steps)
            return _Run(Status.STALLED, False, y_new, steps)

    logger.debug("integrated s=%g in %d steps", duration, steps)
    return _Run(Status.COMPLETED, False, solver.y, steps)


def flow_map(
    field: CompositeField,
    x0: TorusPoint,
    t: float,
    cfg: IntegratorConfig | None = None,
) -> tuple[TorusPoint, Status]:
    """Time-t map of the flow of *field*.

    Negative *t* integrates the negated field.

    Parameters
    ----------
    field : CompositeField
        The vector field.
    x0 : TorusPoint
        Start point.
    t : float
        Flow time, of either sign.
    cfg : IntegratorConfig, optional
        Tolerances and budgets.

    Returns
    -------
    point : TorusPoint
        Image of *x0*, or the last point reached if the run stopped early.
    status : Status
        Terminal status.

    """
    if not math.isfinite(t):
        msg = f"flow time must be finite, got {t!r}"
        raise InvalidInput(msg)
    cfg = cfg or DEFAULT_CONFIG
    run = _integrate(field, x0, abs(t), 1 if t >= 0 else -1, cfg)
    return wrap(*map(float, run.end)), run.status


def trace_orbit(
    field: CompositeField,
    x0: TorusPoint,
    T: float,
    direction: Direction = Direction.FORWARD,
    cfg: IntegratorConfig | None = None,
    *,
    until: Callable[[float, TorusPoint], bool] | None = None,
) -> OrbitTrace:
    """
    Sample the orbit of *x0* over time *T* in the given direction.

    Consecutive samples are at most ``cfg.max_step_len`` apart, and never
    farther apart than the slowing radius.  *until*
    is called on every sample and stops the run when it returns true.
    """
    if not (math.isfinite(T) and T > 0):
        msg = f"trace length must be positive, got {T!r}"
        raise InvalidInput(msg)
    cfg = cfg or DEFAULT_CONFIG
    times: list[float] = []
    points: list[tuple[float, float]] = []

    def emit(t: float, x: float, y: float) -> bool:
        times.append(t)
        points.append((x, y))
        return until is not None and until(t, TorusPoint(x, y))

    run = _integrate(field, x0, T, direction.sign, cfg, emit=emit)
    return OrbitTrace(
        np.array(times),
        np.array(points).reshape(-1, 2),
        run.status,
        direction,
        _sample_spacing(field, cfg),
        run.stationary,
    )


def iterate_map(
    field: CompositeField,
    t: float,
    x0: TorusPoint,
    n: int,
    cfg: IntegratorConfig | None = None,
    *,
    until: Callable[[int, TorusPoint], bool] | None = None,
    on_flow_sample: SampleHook | None = None,
) -> OrbitTrace:
    """Discrete orbit ``x0, f(x0), ..., f^n(x0)`` of the time-t map.

    The iterates are read off one trajectory over ``[0, n t]`` at the
    multiples of *t*, which by the group law equals repeated application
    of :func:`flow_map`.  The trace uses the iteration index as time.

    Parameters
    ----------
    field : CompositeField
        The vector field.
    t : float
        Time of the map, of either sign.
    x0 : TorusPoint
        Start point.
    n : int
        Number of iterations.
    cfg : IntegratorConfig, optional
        Tolerances and budgets.
    until : callable, optional
        Called with ``(k, f^k(x0))``; stops the iteration when true.
    on_flow_sample : callable, optional
        Receives the flow samples between iterates, at most
        ``cfg.max_step_len`` apart, up to the end of the solver step that
        holds the last iterate.

    """
    if n < 1:
        msg = f"number of iterations must be positive, got {n}"
        raise InvalidInput(msg)
    if not math.isfinite(t):
        msg = f"map time must be finite, got {t!r}"
        raise InvalidInput(msg)
    cfg = cfg or DEFAULT_CONFIG
    direction = Direction.FORWARD if t >= 0 else Direction.BACKWARD
    steps = [0]
    points = [(x0.x, x0.y)]
    if until is not None and until(0, x0):
        return OrbitTrace(
            np.array(steps), np.array(points), Status.COMPLETED, direction, None
        )

    if t == 0.0:
        for k in range(1, n + 1):
            steps.append(k)
            points.append((x0.x, x0.y))
            if until is not None and until(k, x0):
                break
        return OrbitTrace(
            np.array(steps), np.array(points), Status.COMPLETED, direction, None
        )

    def on_mark(s: float, x: float, y: float) -> bool:
        p = TorusPoint(_unit(float(x)), _unit(float(y)))
        steps.append(len(steps))
        points.append((p.x, p.y))
        return until is not None and until(steps[-1], p)

    run = _integrate(
        field,
        x0,
        n * abs(t),
        direction.sign,
        cfg,
        emit=on_flow_sample,
        marks=abs(t),
        on_mark=on_mark,
    )
    return OrbitTrace(
        np.array(steps),
        np.array(points),
        run.status,
        direction,
        None,
        run.stationary,
    )

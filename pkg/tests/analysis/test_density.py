import math

import numpy as np
import pytest

import quasiminimal as qm
from quasiminimal.analysis import Classification
from quasiminimal.flows import Direction, Status
from quasiminimal.torus import TorusPoint

SQRT2 = math.sqrt(2.0)


@pytest.fixture
def stall_field(slope):
    F = qm.flows.PunctureSet((TorusPoint(0.5, 0.5),), r0=0.005)
    return qm.flows.CompositeField(slope, F)


def test_density_grid_mark():
    with pytest.raises(qm._errors.InvalidInput):
        qm.analysis.DensityGrid.empty(0)

    grid = qm.analysis.DensityGrid.empty(2)
    assert not grid.mark(0.0, 0.1, 0.1)
    assert not grid.mark(1.0, 0.2, 0.3)
    assert grid.count == 1
    assert grid.columns == 1
    assert grid.rows == 1
    assert not grid.mark(2.0, 0.9, 0.1)
    assert not grid.mark(3.0, 0.1, 0.9)
    assert grid.covered_fraction == 0.75
    assert grid.first_cover_time is None
    assert grid.mark(4.0, 0.9, 0.9)
    assert grid.covered
    assert grid.first_cover_time == 4.0


def test_density_grid_from_samples():
    times = np.arange(5.0)
    points = np.array([[0.1, 0.1], [0.1, 0.2], [0.9, 0.1], [0.6, 0.6], [0.2, 0.7]])
    grid = qm.analysis.DensityGrid.from_samples(2, times, points)
    assert grid.covered
    assert grid.first_cover_time == 4.0
    np.testing.assert_array_equal(grid.visited, [[True, True], [True, True]])

    grid = qm.analysis.DensityGrid.from_samples(2, times[:3], points[:3])
    np.testing.assert_array_equal(grid.visited, [[True, False], [True, False]])
    assert grid.first_cover_time is None


def test_epsilon_density_linear(linear_field):
    trace = qm.flows.trace_orbit(linear_field, TorusPoint(0.1, 0.2), 100.0)
    report = qm.analysis.epsilon_density_test(trace, 20)
    assert report.classification is Classification.DENSE
    assert report.covered_fraction == 1.0
    assert 0.0 < report.first_cover_time <= 100.0
    assert report.direction is Direction.FORWARD
    assert report.status is Status.COMPLETED


def test_epsilon_density_short_orbit(linear_field):
    trace = qm.flows.trace_orbit(linear_field, TorusPoint(0.1, 0.2), 1.0)
    report = qm.analysis.epsilon_density_test(trace, 20)
    assert report.classification is Classification.UNDETERMINED
    assert 0.0 < report.covered_fraction < 1.0
    assert report.first_cover_time is None


def test_epsilon_density_rejects_coarse_samples(linear_field):
    trace = qm.flows.trace_orbit(linear_field, TorusPoint(0.1, 0.2), 1.0)
    with pytest.raises(qm._errors.InvalidInput, match="skipped"):
        qm.analysis.epsilon_density_test(trace, 40)


def test_epsilon_density_rational_map(linear_field):
    # the time-1 map is a vertical circle rotation
    trace = qm.flows.iterate_map(linear_field, 1.0, TorusPoint(0.525, 0.525), 2000)
    report = qm.analysis.epsilon_density_test(trace, 20)
    assert report.classification is not Classification.DENSE
    assert report.grid.columns <= 2


def test_double_density_fixed(puncture_field):
    q = puncture_field.zeros[0]
    forward, backward = qm.analysis.double_density_test(puncture_field, q, 100.0)
    assert forward.classification is Classification.FIXED
    assert backward.classification is Classification.FIXED
    assert backward.direction is Direction.BACKWARD


def test_double_density_generic(two_puncture_field):
    (x0,) = qm.analysis.generic_starts(
        two_puncture_field, 1, T=1e3, s_max=40.0, two_sided=True, seed=2
    )
    forward, backward = qm.analysis.double_density_test(
        two_puncture_field, x0, 1e3
    )
    assert forward.classification is Classification.DENSE
    assert backward.classification is Classification.DENSE
    assert forward.first_cover_time > 0
    assert backward.first_cover_time < 0
    assert qm.analysis.closure_agreement(forward, backward)
    assert forward.budget["T"] == 1e3


def test_double_density_stalled(stall_field):
    x0 = qm.torus.wrap(0.5 - 0.3, 0.5 - 0.3 * SQRT2)
    cfg = qm._config.IntegratorConfig(stall_speed=1e-3)
    forward, backward = qm.analysis.double_density_test(
        stall_field, x0, 200.0, 20, cfg
    )
    assert forward.classification is Classification.ASYMPTOTIC
    assert forward.status is Status.STALLED
    assert backward.classification is Classification.DENSE

    assert not qm.analysis.closure_agreement(forward, backward)
    assert qm.analysis.closure_agreement(backward, forward)



def test_double_density_upstream_default_config(slope):
    q = TorusPoint(0.5, 0.5)
    field = qm.flows.CompositeField(slope, qm.flows.PunctureSet((q,), 0.05))
    x0 = qm.torus.wrap(q.x - 0.3, q.y - 0.3 * SQRT2)

    forward, _ = qm.analysis.double_density_test(field, x0, 1e4)
    assert forward.classification is Classification.ASYMPTOTIC
    assert forward.status is not Status.BUDGET_EXHAUSTED

    # a start just off the incoming line creeps past the puncture instead
    x1 = qm.torus.wrap(x0.x + 1e-3, x0.y)
    forward, backward = qm.analysis.double_density_test(field, x1, 1e4)
    assert forward.classification is Classification.UNDETERMINED
    assert qm.torus.dist(forward.start, x1) == 0.0
    assert backward.classification is not Classification.FIXED


def test_double_density_near_puncture_is_not_fixed(slope):
    q = TorusPoint(0.5, 0.5)
    field = qm.flows.CompositeField(slope, qm.flows.PunctureSet((q,), 0.05))
    x0 = TorusPoint(0.501, 0.5)
    for report in qm.analysis.double_density_test(field, x0, 10.0):
        assert report.classification is not Classification.FIXED
        assert report.status is Status.STALLED


def test_double_density_rejects_coarse_samples(linear_field):
    cfg = qm._config.IntegratorConfig(max_step_len=0.1)
    with pytest.raises(qm._errors.InvalidInput):
        qm.analysis.double_density_test(
            linear_field, TorusPoint(0.1, 0.2), 10.0, 20, cfg
        )


@pytest.mark.parametrize("workers", [1, 2])
def test_exceptional_set_scan(puncture_field, workers):
    q = puncture_field.zeros[0]
    starts = (
        q,
        *qm.analysis.generic_starts(
            puncture_field, 3, T=1e3, s_max=40.0, two_sided=True, seed=5
        ),
    )
    entries = qm.analysis.exceptional_set_scan(
        puncture_field, starts, 1e3, workers=workers
    )
    assert [e.start for e in entries] == list(starts)
    assert entries[0].classification == (Classification.FIXED, Classification.FIXED)
    assert qm.analysis.exceptional_set(entries) == (q,)



def test_exceptional_set_scan_one_puncture(puncture_field):
    q = puncture_field.zeros[0]
    starts = qm.analysis.generic_starts(puncture_field, 50, T=1e3, s_max=40.0, seed=11)
    entries = qm.analysis.exceptional_set_scan(
        puncture_field, (q, *starts), 1e3, workers=2
    )
    assert qm.analysis.exceptional_set(entries) == (q,)
    for entry in entries[1:]:
        assert entry.forward.classification is Classification.DENSE


def test_exceptional_set_scan_linear(linear_field):
    starts = qm.analysis.generic_starts(linear_field, 3, seed=1)
    entries = qm.analysis.exceptional_set_scan(linear_field, starts, 1e3)
    assert qm.analysis.exceptional_set(entries) == ()

    with pytest.raises(qm._errors.InvalidInput):
        qm.analysis.exceptional_set_scan(linear_field, [], 1e3)


def test_time_t_scan_rational_times(linear_field):
    rows = qm.analysis.time_t_scan(
        linear_field,
        [1.0, 0.5, SQRT2 / 2],
        TorusPoint(0.525, 0.525),
        2000,
    )
    assert [r.t for r in rows] == [1.0, 0.5, SQRT2 / 2]
    for row in rows:
        assert row.verdict.dependent
        assert row.verdict.bound == 10_000
        assert row.report.classification is Classification.CONFINED
        assert row.agrees
    # x is fixed or two-periodic for t = 1 and 1/2, y is fixed for sqrt(2)/2
    assert rows[0].report.grid.columns == 1
    assert rows[1].report.grid.columns <= 2
    assert rows[2].report.grid.rows == 1
    assert rows[2].report.grid.columns == 20
    assert rows[0].verdict.relation == (0, 1, 0)
    assert rows[1].verdict.relation == (-1, 2, 0)


def test_time_t_scan_irrational_times(linear_field):
    rows = qm.analysis.time_t_scan(
        linear_field,
        [math.sqrt(3.0), math.pi / 3, math.e / 2],
        TorusPoint(0.525, 0.525),
        50_000,
    )
    for row in rows:
        assert not row.verdict.dependent
        assert row.report.classification is Classification.DENSE
        assert row.agrees
        # stopped once the iterates covered the grid
        assert row.report.first_cover_time < 50_000
        assert row.report.refined.covered


def test_time_t_scan_slowed_field(puncture_field):
    (row,) = qm.analysis.time_t_scan(
        puncture_field, [1.0], TorusPoint(0.525, 0.525), 10
    )
    assert row.verdict is None
    assert row.agrees
    assert row.report.classification is not Classification.CONFINED

    with pytest.raises(qm._errors.InvalidInput):
        qm.analysis.time_t_scan(puncture_field, [], TorusPoint(0.5, 0.5), 10)


def test_map_exceptional_set_scan(slope):
    F = qm.flows.PunctureSet((TorusPoint(0.0, 0.0), TorusPoint(0.0, 0.5)), r0=1e-5)
    field = qm.flows.build_punctured_field(slope, F, 50)
    t, n = math.sqrt(3.0), 10_000
    starts = (
        *field.zeros,
        *qm.analysis.generic_starts(field, 2, s_max=n * t, seed=4),
    )
    # sample spacing above 1/(2m) turns off the refined flow coverage
    cfg = qm._config.IntegratorConfig(max_step_len=0.25)
    entries = qm.analysis.map_exceptional_set_scan(field, t, starts, n, 20, cfg)
    assert set(qm.analysis.exceptional_set(entries)) == set(field.zeros)
    for entry in entries[2:]:
        assert entry.forward.refined is None
        assert entry.backward.direction is Direction.BACKWARD

    with pytest.raises(qm._errors.InvalidInput):
        qm.analysis.map_exceptional_set_scan(field, 0.0, starts, n)
    with pytest.raises(qm._errors.InvalidInput):
        qm.analysis.map_exceptional_set_scan(field, t, [], n)


def test_map_exceptional_set_scan_slowed(two_puncture_field):
    field = two_puncture_field
    # iterates about 0.03 apart along the line, closer than a cell
    t, n = math.sqrt(3.0) / 100, 4000
    starts = (
        *field.zeros,
        *qm.analysis.generic_starts(field, 2, T=n * t, s_max=52.0, seed=6),
    )
    entries = qm.analysis.map_exceptional_set_scan(field, t, starts, n, 20)
    assert set(qm.analysis.exceptional_set(entries)) == set(field.zeros)
    for entry in entries[:2]:
        assert entry.classification == (Classification.FIXED, Classification.FIXED)
    for entry in entries[2:]:
        assert entry.forward.classification is Classification.DENSE
        assert entry.forward.first_cover_time < n
        assert entry.forward.refined.covered


def test_closure_agreement_grid_mismatch(linear_field):
    trace = qm.flows.trace_orbit(linear_field, TorusPoint(0.1, 0.2), 1.0)
    a = qm.analysis.epsilon_density_test(trace, 10)
    b = qm.analysis.epsilon_density_test(trace, 20)
    with pytest.raises(qm._errors.InvalidInput):
        qm.analysis.closure_agreement(a, b)

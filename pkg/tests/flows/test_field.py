import math

import numpy as np
import pytest

import quasiminimal as qm
from quasiminimal.torus import TorusPoint

SQRT2 = math.sqrt(2.0)


def chi(u):
    return math.exp(-1.0 / u) if u > 0 else 0.0


@pytest.mark.parametrize(
    ("u", "value"), [(-1.0, 0.0), (0.0, 0.0), (2.0, 1.0), (1.0, 1.0), (0.5, 0.5)]
)
def test_smooth_step(u, value):
    assert qm.flows.smooth_step(u) == value


def test_smooth_step_shape():
    u = np.linspace(0.05, 0.95, 181)
    s = np.array([qm.flows.smooth_step(v) for v in u])
    assert np.all(np.diff(s) > 0)
    np.testing.assert_allclose(
        s + np.array([qm.flows.smooth_step(1 - v) for v in u]), 1.0, atol=1e-12
    )


def test_slowing_factor():
    q = TorusPoint(0.5, 0.5)
    F = qm.flows.PunctureSet((q,), r0=0.1)

    assert qm.flows.slowing_factor(q, F) == 0.0
    assert qm.flows.slowing_factor(TorusPoint(0.0, 0.0), F) == 1.0
    assert qm.flows.slowing_factor(TorusPoint(0.5, 0.4), F) == 1.0
    assert qm.flows.slowing_factor(TorusPoint(0.3, 0.3), None) == 1.0

    # distance r0/2 gives the smooth step at 1/4
    expected = chi(0.25) / (chi(0.25) + chi(0.75))
    assert qm.flows.slowing_factor(TorusPoint(0.55, 0.5), F) == pytest.approx(
        expected, rel=1e-12
    )


def test_slowing_factor_positive_off_punctures(slope, rng):
    F = qm.flows.PunctureSet((TorusPoint(0.0, 0.0), TorusPoint(0.0, 0.5)), r0=0.05)
    field = qm.flows.CompositeField(slope, F)
    for x, y in rng.random((2000, 2)):
        p = TorusPoint(float(x), float(y))
        f = qm.flows.slowing_factor(p, F)
        assert 0.0 < f <= 1.0

    # exp(-1/u) underflows this close to a puncture
    for r in (1e-3, 1e-6, 1e-170):
        p = TorusPoint(r, 0.5)
        assert qm.flows.slowing_factor(p, F) == qm.flows._field.FACTOR_FLOOR
        assert qm.flows.eval_field(field, p).dx > 0.0
        assert field.factor(p.x, p.y) > 0.0
    assert qm.flows.smooth_step(1e-4) == qm.flows._field.FACTOR_FLOOR


def test_eval_field(slope, rng):
    q = TorusPoint(0.5, 0.5)
    F = qm.flows.PunctureSet((q,), r0=0.1)
    field = qm.flows.CompositeField(slope, F)

    assert qm.flows.eval_field(field, q) == qm.torus.TangentVector(0.0, 0.0)

    v = qm.flows.eval_field(qm.flows.CompositeField(slope), TorusPoint(0.1, 0.7))
    assert v.dx == 1.0
    assert v.dy == SQRT2

    v = qm.flows.eval_field(field, TorusPoint(0.55, 0.5))
    s = qm.flows.smooth_step(0.25)
    assert v.dx == pytest.approx(s, rel=1e-12)
    assert v.dy == pytest.approx(s * SQRT2, rel=1e-12)

    for x, y in rng.random((1000, 2)):
        p = TorusPoint(float(x), float(y))
        assert qm.flows.eval_field(field, p).norm <= field.bound + 1e-15
        # the fast planar evaluation agrees with the torus one
        if qm.torus.dist(p, q) > 0.01:
            assert field.factor(x, y) == pytest.approx(
                qm.flows.slowing_factor(p, F), rel=1e-9
            )


def test_field_properties(linear_field, puncture_field):
    assert linear_field.bound == pytest.approx(math.sqrt(3.0))
    assert linear_field.zeros == ()
    assert linear_field.r0 is None
    assert puncture_field.zeros == (TorusPoint(0.5, 0.5),)
    assert puncture_field.r0 == 0.01
    assert puncture_field.clearance(1.5, 0.5) == pytest.approx(0.0)


def test_convergents():
    assert qm.flows.convergents(SQRT2, 4) == ((1, 1), (3, 2), (7, 5), (17, 12))
    assert qm.flows.convergents(0.5) == ((0, 1), (1, 2))
    with pytest.raises(qm._errors.InvalidInput):
        qm.flows.convergents(0.5, 0)


def test_slope_param():
    slope = qm.flows.SlopeParam.from_alpha(SQRT2, depth=5)
    assert slope.alpha == SQRT2
    assert slope.cf_convergents[:3] == ((1, 1), (3, 2), (7, 5))

    assert qm.flows._field.rational_witness(0.5) == (1, 2)

    with pytest.raises(qm._errors.InvalidInput, match="3/2"):
        qm.flows.SlopeParam(1.5)
    with pytest.raises(qm._errors.InvalidInput):
        qm.flows.SlopeParam(-SQRT2)
    with pytest.raises(qm._errors.InvalidInput):
        qm.flows.SlopeParam(math.nan)


def test_puncture_set():
    p, q = TorusPoint(0.0, 0.0), TorusPoint(0.0, 0.5)
    F = qm.flows.PunctureSet([p, q], r0=0.05)
    assert F.points == (p, q)
    assert len(F) == 2

    with pytest.raises(qm._errors.InvalidInput):
        qm.flows.PunctureSet((), r0=0.05)
    with pytest.raises(qm._errors.InvalidInput):
        qm.flows.PunctureSet((p, TorusPoint(0.05, 0.0)), r0=0.05)
    with pytest.raises(qm._errors.InvalidInput):
        qm.flows.PunctureSet((p,), r0=0.25)
    with pytest.raises(qm._errors.InvalidInput):
        qm.flows.PunctureSet((p,), r0=0.0)
    with pytest.raises(qm._errors.InvalidInput):
        qm.flows.PunctureSet(
            tuple(TorusPoint(i / 17, 0.0) for i in range(17)), r0=0.01
        )


def test_check_distinct_dense_orbits(slope):
    p = TorusPoint(0.0, 0.0)
    same = qm.torus.wrap(0.5, 0.5 * SQRT2)
    other = TorusPoint(0.0, 0.5)

    report = qm.flows.check_distinct_dense_orbits(
        qm.flows.PunctureSet((p, same), 0.05), slope, 50
    )
    assert not report.all_distinct
    (verdict,) = report.pairs
    assert verdict.relation is qm.flows.OrbitRelation.SAME_ORBIT
    assert verdict.s == pytest.approx(0.5)
    assert report.first_same_orbit is verdict

    report = qm.flows.check_distinct_dense_orbits(
        qm.flows.PunctureSet((p, other), 0.05), slope, 50
    )
    assert report.all_distinct
    assert report.pairs[0].relation is qm.flows.OrbitRelation.DISTINCT_WITHIN_DEPTH
    assert report.pairs[0].s is None

    report = qm.flows.check_distinct_dense_orbits(
        qm.flows.PunctureSet((p,), 0.05), slope, 50
    )
    assert report.pairs == ()
    assert report.all_distinct

    with pytest.raises(qm._errors.InvalidInput):
        qm.flows.check_distinct_dense_orbits(
            qm.flows.PunctureSet((p,), 0.05), slope, 0
        )


def test_special_orbits(slope):
    p = TorusPoint(0.0, 0.0)
    q = TorusPoint(0.0, 0.5)
    special = (qm.torus.wrap(0.25, 0.25 * SQRT2),)
    report = qm.flows.check_distinct_dense_orbits(
        qm.flows.PunctureSet((p, q), 0.05), slope, 50, special=special
    )
    assert report.on_special_orbit == (True, False)


def test_build_punctured_field(slope):
    p = TorusPoint(0.0, 0.0)
    q = TorusPoint(0.0, 0.5)
    F = qm.flows.PunctureSet((p, q), 0.05)
    field = qm.flows.build_punctured_field(slope, F, 50)
    assert field.zeros == (p, q)
    for z in field.zeros:
        assert qm.flows.eval_field(field, z) == qm.torus.TangentVector(0.0, 0.0)

    same = qm.torus.wrap(0.5, 0.5 * SQRT2)
    with pytest.raises(qm._errors.ConstructionRejected) as excinfo:
        qm.flows.build_punctured_field(slope, qm.flows.PunctureSet((p, same), 0.05), 50)
    assert excinfo.value.pair == (p, same)
    assert excinfo.value.s == pytest.approx(0.5)


def test_single_puncture_field(slope):
    F = qm.flows.PunctureSet((TorusPoint(0.3, 0.6),), 0.05)
    field = qm.flows.build_punctured_field(slope, F, 50)
    assert len(field.zeros) == 1


def test_place_punctures(slope):
    F = qm.flows.place_punctures(3, slope, 0.05, seed=1)
    assert len(F) == 3
    assert qm.flows.check_distinct_dense_orbits(F, slope, 50).all_distinct
    assert qm.flows.place_punctures(3, slope, 0.05, seed=1) == F

    # cannot separate 16 points by 2 r0 = 0.48
    with pytest.raises(qm._errors.ConstructionRejected):
        qm.flows.place_punctures(16, slope, 0.24, seed=0, max_tries=5)

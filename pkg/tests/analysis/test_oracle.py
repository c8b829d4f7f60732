import math

import pytest

import quasiminimal as qm


def test_dependent_translations():
    v = qm.analysis.translation_density_oracle(1.0, math.sqrt(2.0))
    assert v.dependent
    assert v.relation == (-1, 1, 0)
    assert v.label == "dependent"

    v = qm.analysis.translation_density_oracle(0.5, 1 / 3)
    assert v.dependent
    assert v.relation == (-1, 2, 0)
    assert v.residual < 1e-12


def test_independent_translation():
    v = qm.analysis.translation_density_oracle(math.sqrt(2.0), math.sqrt(3.0), 1000)
    assert not v.dependent
    assert v.relation is None
    assert v.bound == 1000
    assert v.label == "independent-within-bound"


@pytest.mark.parametrize(
    ("t", "relation"),
    [
        (1.0, (0, 1, 0)),
        (0.5, (-1, 2, 0)),
    ],
)
def test_time_t_translations(t, relation):
    beta, gamma = t % 1.0, (t * math.sqrt(2.0)) % 1.0
    v = qm.analysis.translation_density_oracle(beta, gamma, 100)
    assert v.relation == relation


def test_rational_ratio_is_dependent():
    t = math.sqrt(2.0) / 2
    v = qm.analysis.translation_density_oracle(t, (t * math.sqrt(2.0)) % 1.0, 100)
    assert v.dependent
    a, b, c = v.relation
    assert abs(a + b * t + c * ((t * math.sqrt(2.0)) % 1.0)) < 1e-9


@pytest.mark.parametrize(
    ("t", "dependent"),
    [
        (1.0, True),
        (0.5, True),
        (math.sqrt(2.0) / 2, True),
        (math.sqrt(3.0), False),
        (math.pi / 3, False),
        (math.e / 2, False),
    ],
)
def test_time_t_translations_full_bound(t, dependent):
    beta, gamma = t % 1.0, (t * math.sqrt(2.0)) % 1.0
    v = qm.analysis.translation_density_oracle(beta, gamma)
    assert v.bound == 10_000
    assert v.dependent is dependent
    if dependent:
        a, b, c = v.relation
        assert max(abs(b), abs(c)) <= 2
        assert v.residual < 1e-15


def test_near_miss_is_no_relation():
    # (-7865, 4209, 6890) leaves a residual of about 2e-10 for t = e/2
    t = math.e / 2
    beta, gamma = t % 1.0, (t * math.sqrt(2.0)) % 1.0
    assert abs(-7865 + 4209 * beta + 6890 * gamma) < 1e-9
    v = qm.analysis.translation_density_oracle(beta, gamma, 8000)
    assert not v.dependent

    # the plain tolerance alone accepts it
    v = qm.analysis.translation_density_oracle(beta, gamma, 8000, rounding=1.0)
    assert v.dependent
    assert v.residual < 1e-9


def test_invalid_bound():
    with pytest.raises(qm._errors.InvalidInput):
        qm.analysis.translation_density_oracle(0.1, 0.2, 0)


def test_rotation_return_bound():
    assert qm.analysis.rotation_return_bound(math.sqrt(2.0) - 1, 0.05) == 12
    assert qm.analysis.rotation_return_bound(0.5, 0.05) == 2
    assert qm.analysis.rotation_return_bound(0.0, 0.05) == 1

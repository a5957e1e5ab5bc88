import numpy as np
import pytest

from models.velocity import VelocityLaw, reciprocal


def test_reciprocal():
    law = reciprocal()
    assert law(0.) == 1.
    assert law(1.) == 0.5
    np.testing.assert_allclose(law(np.array([0., 1., 3.])), [1., 0.5, 0.25])
    assert law.lipschitz == 1.


def test_v_min_and_large_mass_threshold():
    law = reciprocal()
    v_min = law.v_min(1., 0.)
    assert v_min == pytest.approx(1. / 3.)
    assert law.large_mass_threshold(v_min) == pytest.approx(1. / 12.)


def test_affine_floor():
    law = VelocityLaw("affine-floor", {"w0": 2., "floor": 0.2})
    assert law(1.) == pytest.approx(0.5)
    assert law(10.) == pytest.approx(0.2)
    assert law.lipschitz == pytest.approx(0.5)


def test_table_is_constant_past_the_last_point():
    law = VelocityLaw("table", {"points": [[0., 1.], [1., 0.5], [3., 0.25]]})
    assert law(0.5) == pytest.approx(0.75)
    assert law(2.) == pytest.approx(0.375)
    assert law(10.) == pytest.approx(0.25)
    assert law.lipschitz == pytest.approx(0.5)


@pytest.mark.parametrize("kind, params, message", [
    ("affine", {}, "unknown law kind"),
    ("affine-floor", {"w0": 2.}, "missing param: floor"),
    ("affine-floor", {"w0": 2., "floor": 1.5}, "floor"),
    ("table", {"points": [[0., 1.], [1., 2.]]}, "decreasing"),
    ("table", {"points": [[0.5, 1.], [1., 0.5]]}, "start"),
])
def test_invalid_laws(kind, params, message):
    with pytest.raises(ValueError, match=message):
        VelocityLaw(kind, params)


def test_negative_load_is_rejected():
    with pytest.raises(ValueError):
        reciprocal()(-1.)


def test_dict_round_trip():
    law = VelocityLaw("table", {"points": [[0., 1.], [2., 0.5]]})
    assert VelocityLaw.from_dict(law.to_dict()) == law
    assert law != reciprocal()


@pytest.mark.parametrize("law", [
    reciprocal(),
    VelocityLaw("affine-floor", {"w0": 2., "floor": 0.2}),
    VelocityLaw("table", {"points": [[0., 1.], [1., 0.6], [3., 0.25]]}),
])
def test_sampled_lipschitz_bound(law):
    rng = np.random.default_rng(3)
    a, b = 10. * rng.random(500), 10. * rng.random(500)
    assert np.all(np.abs(law(a) - law(b)) <= law.lipschitz * np.abs(a - b) + 1e-12)

import numpy as np
import pytest

from models.curve import CharCurve, xi_inverse
from utils.grid import merge_nodes, uniform_nodes


@pytest.fixture
def kinked():
    return CharCurve([0., 1., 2.], [0., 0.5, 1.5], v_min=0.4)


def test_evaluation_and_inverse(kinked):
    assert kinked(1.5) == pytest.approx(1.)
    assert kinked.inverse(1.) == pytest.approx(1.5)
    np.testing.assert_allclose(kinked(np.array([0., 0.5, 2.])), [0., 0.25, 1.5])
    with pytest.raises(ValueError):
        kinked.inverse(2.)
    assert xi_inverse(kinked, 0.25) == pytest.approx(0.5)


def test_slope_is_right_continuous(kinked):
    assert kinked.slope_at(0.5) == pytest.approx(0.5)
    assert kinked.slope_at(1.) == pytest.approx(1.)
    assert kinked.slope_at(2.) == pytest.approx(1.)


@pytest.mark.parametrize("times, values", [
    ([0.1, 1.], [0., 0.5]),
    ([0., 1.], [0., 2.]),
    ([0., 1.], [0., 0.1]),
    ([0., 1., 1.], [0., 0.5, 0.6]),
])
def test_invalid_curves(times, values):
    with pytest.raises(ValueError):
        CharCurve(times, values, v_min=0.4)


def test_truncate_and_extend(kinked):
    short = kinked.truncated(1.5)
    assert short.horizon == 1.5
    assert short.end_value == pytest.approx(1.)
    piece = CharCurve([0., 1.], [0., 0.5], v_min=0.4)
    longer = kinked.extended(piece, 2.)
    assert longer.horizon == 3.
    assert longer.end_value == pytest.approx(2.)
    with pytest.raises(ValueError):
        kinked.extended(piece, 1.)
    with pytest.raises(ValueError):
        kinked.truncated(3.)


def test_straight_curve():
    line = CharCurve.straight(0.5, uniform_nodes(0., 2., 0.1), v_min=0.5)
    assert line.node_times.size == 21
    assert line.end_value == pytest.approx(1.)
    assert line.sup_distance(CharCurve([0., 2.], [0., 1.], 0.5)) == pytest.approx(0., abs=1e-15)


def test_uniform_nodes_respect_the_step():
    nodes = uniform_nodes(0., 1., 0.3)
    assert nodes.size == 5
    assert np.diff(nodes).max() <= 0.3


def test_merge_nodes_collapses_near_duplicates():
    nodes = merge_nodes([0., 0.5, 1.], [0.5 + 1e-15, 0.25, 2.], lower=0., upper=1.)
    assert nodes.tolist() == [0., 0.25, 0.5, 1.]
    assert merge_nodes([0.3], lower=0., upper=1.).tolist() == [0., 0.3, 1.]


def test_pointwise_max_and_min_stay_in_the_slope_bounds():
    v_min = 0.4
    steep = CharCurve([0., 0.5, 2.], [0., 0.5, 1.1], v_min)
    shallow = CharCurve([0., 1., 2.], [0., 0.4, 1.4], v_min)
    t = np.linspace(0., 2., 4001)
    for joined in (np.maximum(steep(t), shallow(t)), np.minimum(steep(t), shallow(t))):
        assert joined[0] == 0.
        slopes = np.diff(joined) / np.diff(t)
        assert slopes.min() >= v_min * (1. - 1e-9)
        assert slopes.max() <= 1. + 1e-9
        CharCurve(t, joined, v_min)

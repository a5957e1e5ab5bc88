import numpy as np
import pytest

import config
from models.measure import Measure, PiecewiseDensity, classify_large_atoms


def test_atoms_at_same_position_are_merged():
    nu = Measure.space(atoms=[(0.3, 1.), (0.7, 0.), (0.3, 0.5)])
    assert nu.atom_positions.tolist() == [0.3]
    assert nu.atom_masses.tolist() == [1.5]
    assert nu.total_mass() == pytest.approx(1.5)


def test_negative_mass_is_rejected():
    with pytest.raises(ValueError, match="negative mass"):
        Measure.space(atoms=[(0.2, -1.)])


@pytest.mark.parametrize("position", [-0.1, 1.0, 1.5])
def test_space_atoms_live_on_half_open_interval(position):
    with pytest.raises(ValueError, match="atom out of domain"):
        Measure.space(atoms=[(position, 1.)])


def test_time_atoms_live_on_left_open_interval():
    with pytest.raises(ValueError, match="atom out of domain"):
        Measure.time(2., atoms=[(0., 1.)])
    assert Measure.time(2., atoms=[(2., 1.)]).mass_upto(2.) == 1.


def test_density_validation():
    with pytest.raises(ValueError):
        PiecewiseDensity([0., 0.5, 0.4], [1., 1.])
    with pytest.raises(ValueError):
        PiecewiseDensity([0., 1.], [-1.])
    with pytest.raises(ValueError):
        Measure.space(density=[(0.5, 1.5, 1.)])


def test_arrays_are_read_only():
    nu = Measure.space(density=[(0., 1., 1.)], atoms=[(0.5, 1.)])
    with pytest.raises(ValueError):
        nu.atom_positions[0] = 0.1
    with pytest.raises(ValueError):
        nu.density.values[0] = 2.


def test_mass_below_excludes_atom_at_x():
    nu = Measure.space(density=[(0., 1., 1.)], atoms=[(0.5, 1.)])
    assert nu.mass_below(0.5) == pytest.approx(0.5)
    assert nu.mass_below(0.6) == pytest.approx(1.6)
    np.testing.assert_allclose(nu.mass_below(np.array([0., 0.5, 1.])), [0., 0.5, 2.])


def test_mass_upto_includes_atom_at_t():
    mu = Measure.time(3., density=[(0., 2., 0.5)], atoms=[(1., 1.)])
    assert mu.mass_upto(0.999) == pytest.approx(0.4995)
    assert mu.mass_upto(1.) == pytest.approx(1.5)


def test_queries_check_the_domain():
    with pytest.raises(ValueError):
        Measure.time(1.).mass_below(0.5)
    with pytest.raises(ValueError):
        Measure.space().mass_upto(0.5)


def test_translate_restrict_moves_and_clips():
    nu = Measure.space(density=[(0., 1., 1.)], atoms=[(0.5, 1.), (0.8, 2.)])
    moved = nu.translate_restrict(0.25)
    assert moved.ac_total() == pytest.approx(0.75)
    assert moved.atom_positions.tolist() == [0.75]
    assert moved.mass_below(0.25) == pytest.approx(0.)


def test_translate_restrict_exit_tolerance():
    nu = Measure.space(atoms=[(0.5, 1.)])
    assert nu.translate_restrict(0.5).total_mass() == 0.
    almost = 0.5 - 1e-13
    assert nu.translate_restrict(almost).total_mass() == 1.
    assert nu.translate_restrict(almost, exit_tol=config.POSITION_TOL).total_mass() == 0.
    with pytest.raises(ValueError):
        nu.translate_restrict(-0.1)


def test_time_shift_restricts_and_translates():
    mu = Measure.time(3., density=[(0., 2., 1.)], atoms=[(1., 1.), (2.5, 2.)])
    shifted = mu.time_shift(1.5)
    assert shifted.upper == 1.5
    assert shifted.ac_total() == pytest.approx(0.5)
    assert shifted.atom_positions.tolist() == [1.]
    assert shifted.atom_masses.tolist() == [2.]
    with pytest.raises(ValueError):
        mu.time_shift(3.)


def test_sum_of_overlapping_densities():
    total = Measure.space(density=[(0., 0.5, 1.)]) + Measure.space(density=[(0.25, 1., 2.)], atoms=[(0.1, 1.)])
    assert total.ac_total() == pytest.approx(2.)
    assert total.density.values.tolist() == [1., 3., 2.]
    assert total.pp_total() == 1.
    with pytest.raises(ValueError):
        Measure.space() + Measure.time(1.)


def test_integrate_is_exact_on_atoms_and_midpoint_on_cells():
    nu = Measure.space(density=[(0., 1., 1.)], atoms=[(0.25, 2.)])
    assert nu.integrate(lambda x: x, dx=0.1) == pytest.approx(1.)
    assert Measure.space(density=[(0., 1., 1.)]).integrate(lambda x: x ** 2, dx=1e-3) == pytest.approx(1. / 3., abs=1e-6)


def test_density_quadrature_sub_cells():
    midpoints, weights = Measure.space(density=[(0., 0.5, 2.)]).density_quadrature(0.1)
    assert midpoints.size == 5
    assert weights.sum() == pytest.approx(1.)
    np.testing.assert_allclose(midpoints, [0.05, 0.15, 0.25, 0.35, 0.45])


def test_window_max():
    assert Measure.space(density=[(0., 1., 1.)]).density.window_max(0.3) == pytest.approx(0.3)
    bump = Measure.space(density=[(0.2, 0.4, 5.)]).density
    assert bump.window_max(0.1) == pytest.approx(0.5)
    assert bump.window_max(0.5) == pytest.approx(1.)
    assert bump.window_max(2.) == pytest.approx(1.)


def test_snapshot_form_round_trips_bitwise():
    nu = Measure.space(density=[(0.1, 0.3, 1. / 3.), (0.3, 0.7, 0.)], atoms=[(0.123456789, 0.1)])
    back = Measure.from_dict(config.SPACE, 1., nu.to_dict())
    assert np.array_equal(back.density.breakpoints, nu.density.breakpoints)
    assert np.array_equal(back.density.values, nu.density.values)
    assert np.array_equal(back.atom_positions, nu.atom_positions)
    assert back.allclose(nu)


def test_classify_large_atoms_minimal_heavy_set():
    rho0 = Measure.space(atoms=[(0.2, 1.), (0.6, 0.5), (0.9, 0.01)])
    mu = Measure.time(2., atoms=[(1.5, 0.2), (0.5, 0.3), (1., 0.01)])
    large = classify_large_atoms(rho0, mu, threshold=0.1)
    assert [a.position for a in large.rho] == [0.6, 0.2]
    assert large.rho_tail == pytest.approx(0.01)
    assert [a.position for a in large.mu] == [0.5, 1.5]
    assert large.mu_tail == pytest.approx(0.01)


def test_classify_large_atoms_when_all_are_small():
    large = classify_large_atoms(Measure.space(atoms=[(0.1, 0.01), (0.2, 0.02)]), Measure.time(1.), 0.1)
    assert large.rho == [] and large.mu == []
    assert large.rho_tail == pytest.approx(0.03)
    with pytest.raises(ValueError):
        classify_large_atoms(Measure.space(), Measure.time(1.), 0.)


def test_cdfs_are_monotone():
    nu = Measure.space(density=[(0.1, 0.6, 2.)], atoms=[(0.3, 1.), (0.8, 0.5)])
    mu = Measure.time(2., density=[(0.5, 1.5, 1.)], atoms=[(0.5, 1.), (2., 0.25)])
    assert np.all(np.diff(nu.mass_below(np.linspace(0., 1., 1001))) >= 0.)
    assert np.all(np.diff(mu.mass_upto(np.linspace(0., 2., 1001))) >= 0.)


@pytest.mark.parametrize("x", [0.3, 0.8])
def test_mass_below_is_left_continuous_at_atoms(x):
    nu = Measure.space(density=[(0.1, 0.6, 2.)], atoms=[(0.3, 1.), (0.8, 0.5)])
    mass = nu.atom_masses[nu.atom_positions == x][0]
    assert nu.mass_below(np.nextafter(x, 0.)) == pytest.approx(nu.mass_below(x), abs=1e-12)
    assert nu.mass_below(np.nextafter(x, 1.)) == pytest.approx(nu.mass_below(x) + mass, abs=1e-12)


@pytest.mark.parametrize("t", [0.5, 2.])
def test_mass_upto_is_right_continuous_at_atoms(t):
    mu = Measure.time(2., density=[(0.5, 1.5, 1.)], atoms=[(0.5, 1.), (2., 0.25)])
    mass = mu.atom_masses[mu.atom_positions == t][0]
    assert mu.mass_upto(np.nextafter(t, 3.)) == pytest.approx(mu.mass_upto(t), abs=1e-12)
    assert mu.mass_upto(np.nextafter(t, 0.)) == pytest.approx(mu.mass_upto(t) - mass, abs=1e-12)


def test_translate_by_zero_is_the_identity():
    nu = Measure.space(density=[(0., 0.4, 1.), (0.7, 1., 3.)], atoms=[(0., 1.), (0.5, 2.)])
    assert nu.translate_restrict(0.).allclose(nu)

"""
Finite nonnegative Borel measures on [0, 1) (space) or (0, T] (time)

A measure is an absolutely continuous part with a piecewise-constant density plus a finite list
of atoms. There is no singular-continuous part, and every operation below keeps it that way.
"""

from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

import config


class Atom(NamedTuple):
    position: float
    mass: float


class LargeAtoms(NamedTuple):
    """Large atoms of an initial measure and an influx, in exit order, with the masses left over."""
    rho: List[Atom]
    mu: List[Atom]
    rho_tail: float
    mu_tail: float


class PiecewiseDensity(object):
    """values[k] is the density on the cell between breakpoints[k] and breakpoints[k + 1]"""

    def __init__(self, breakpoints, values):
        breakpoints = np.array(breakpoints, dtype=float)
        values = np.array(values, dtype=float)
        if breakpoints.ndim != 1 or breakpoints.size < 2:
            raise ValueError("density needs at least two breakpoints")
        if values.shape != (breakpoints.size - 1,):
            raise ValueError("density needs one value per cell, got %d values for %d cells"
                             % (values.size, breakpoints.size - 1))
        if not np.all(np.isfinite(breakpoints)) or not np.all(np.isfinite(values)):
            raise ValueError("density breakpoints and values must be finite")
        if np.any(np.diff(breakpoints) <= 0):
            raise ValueError("density breakpoints must be strictly increasing")
        if np.any(values < 0):
            raise ValueError("negative density value")
        breakpoints.setflags(write=False)
        values.setflags(write=False)
        self.breakpoints = breakpoints
        self.values = values
        cumulative = np.concatenate(([0.], np.cumsum(values * np.diff(breakpoints))))
        cumulative.setflags(write=False)
        self.cumulative = cumulative

    @classmethod
    def zero(cls, lower, upper):
        return cls([lower, upper], [0.])

    @classmethod
    def from_cells(cls, lower, upper, lefts, rights, values):
        """Sum of constant densities values[i] on [lefts[i], rights[i]], clipped to [lower, upper].

        Overlapping cells add up; uncovered stretches get density zero.
        """
        lefts = np.clip(np.asarray(lefts, dtype=float).ravel(), lower, upper)
        rights = np.clip(np.asarray(rights, dtype=float).ravel(), lower, upper)
        values = np.asarray(values, dtype=float).ravel()
        keep = rights > lefts
        lefts, rights, values = lefts[keep], rights[keep], values[keep]
        if np.any(values < 0):
            raise ValueError("negative density value")
        if lefts.size == 0:
            return cls.zero(lower, upper)
        breakpoints = np.unique(np.concatenate(([lower, upper], lefts, rights)))
        order = np.argsort(lefts, kind="stable")
        if np.all(lefts[order][1:] >= rights[order][:-1]):
            # disjoint cells: copy values, no summation roundoff
            cell_values = np.zeros(breakpoints.size - 1)
            cell_values[np.searchsorted(breakpoints, lefts)] = values
            return cls(breakpoints, cell_values)
        delta = np.zeros(breakpoints.size)
        np.add.at(delta, np.searchsorted(breakpoints, lefts), values)
        np.add.at(delta, np.searchsorted(breakpoints, rights), -values)
        cell_values = np.maximum(np.cumsum(delta)[:-1], 0.)
        return cls(breakpoints, cell_values)

    @property
    def lower(self):
        return float(self.breakpoints[0])

    @property
    def upper(self):
        return float(self.breakpoints[-1])

    def integral(self):
        return float(self.cumulative[-1])

    def cdf(self, x):
        """Mass of the density to the left of x (exact, the cdf is piecewise linear)"""
        return np.interp(x, self.breakpoints, self.cumulative)

    def window_max(self, h):
        """Largest mass any interval of length h inside the support range carries.

        x -> cdf(x + h) - cdf(x) is piecewise linear with kinks where x or x + h hits a breakpoint,
        so the maximum is attained at one of those candidates.
        """
        lo, hi = self.lower, self.upper
        if h >= hi - lo:
            return self.integral()
        candidates = np.concatenate((self.breakpoints, self.breakpoints - h))
        candidates = np.clip(candidates, lo, hi - h)
        return float(np.max(self.cdf(candidates + h) - self.cdf(candidates)))

    def __repr__(self):
        return "PiecewiseDensity(%d cells, mass %.6g)" % (self.values.size, self.integral())


class Measure(object):
    """Finite nonnegative measure: density part + atoms

    Space measures live on [0, 1), time measures on (0, upper]. Atoms at the same position are merged.
    Instances are immutable.
    """

    def __init__(self, domain, upper, density: Optional[PiecewiseDensity] = None,
                 atoms: Iterable[Tuple[float, float]] = ()):
        if domain not in (config.SPACE, config.TIME):
            raise ValueError("unknown measure domain: %s" % domain)
        upper = float(upper)
        if domain == config.SPACE and upper != 1.0:
            raise ValueError("space measures live on [0, 1)")
        if not upper > 0:
            raise ValueError("time measures need a positive horizon, got %g" % upper)
        self.domain = domain
        self.upper = upper

        if density is None:
            density = PiecewiseDensity.zero(0., upper)
        if density.lower != 0. or density.upper != upper:
            raise ValueError("density must span the whole domain [0, %g]" % upper)
        self.density = density

        atoms = [(float(x), float(m)) for x, m in atoms]
        positions = np.array([x for x, _ in atoms], dtype=float)
        masses = np.array([m for _, m in atoms], dtype=float)
        if np.any(masses < 0):
            raise ValueError("negative mass")
        if domain == config.SPACE:
            outside = (positions < 0) | (positions >= 1)
        else:
            outside = (positions <= 0) | (positions > upper)
        if np.any(outside):
            raise ValueError("atom out of domain: %s" % positions[outside].tolist())
        keep = masses > 0
        positions, inverse = np.unique(positions[keep], return_inverse=True)
        masses = np.bincount(inverse, weights=masses[keep], minlength=positions.size).astype(float)
        positions.setflags(write=False)
        masses.setflags(write=False)
        self.atom_positions = positions
        self.atom_masses = masses
        self._atom_cumulative = np.concatenate(([0.], np.cumsum(masses)))

    # construction helpers

    @classmethod
    def zero(cls, domain=config.SPACE, upper=1.0):
        return cls(domain, upper)

    @classmethod
    def space(cls, density=(), atoms=()):
        """Space measure from (a, b, value) density cells and (x, m) atoms"""
        return cls(config.SPACE, 1.0, _density_from_triples(0., 1., density), atoms)

    @classmethod
    def time(cls, horizon, density=(), atoms=()):
        """Time measure on (0, horizon] from (a, b, value) density cells and (t, m) atoms"""
        return cls(config.TIME, horizon, _density_from_triples(0., horizon, density), atoms)

    # queries

    @property
    def atoms(self) -> List[Atom]:
        return [Atom(float(x), float(m)) for x, m in zip(self.atom_positions, self.atom_masses)]

    @property
    def is_space(self):
        return self.domain == config.SPACE

    def ac_total(self):
        return self.density.integral()

    def pp_total(self):
        return float(self._atom_cumulative[-1])

    def total_mass(self):
        return self.ac_total() + self.pp_total()

    def mass_below(self, x):
        """nu([0, x)): atoms sitting exactly at x are excluded"""
        if not self.is_space:
            raise ValueError("mass_below is a space query, got a %s measure" % self.domain)
        idx = np.searchsorted(self.atom_positions, x, side="left")
        result = self.density.cdf(x) + self._atom_cumulative[idx]
        return float(result) if np.ndim(result) == 0 else result

    def mass_upto(self, t):
        """nu((0, t]): atoms sitting exactly at t are included"""
        if self.is_space:
            raise ValueError("mass_upto is a time query, got a %s measure" % self.domain)
        idx = np.searchsorted(self.atom_positions, t, side="right")
        result = self.density.cdf(t) + self._atom_cumulative[idx]
        return float(result) if np.ndim(result) == 0 else result

    # transformations

    def translate_restrict(self, offset, exit_tol=0.0):
        """Pushforward by x -> x + offset, restricted to [0, 1)

        Atoms landing within exit_tol of 1 (or beyond) are dropped; density cells are shifted and clipped.
        """
        if not self.is_space:
            raise ValueError("translate_restrict acts on space measures")
        if offset < 0:
            raise ValueError("offset must be nonnegative, got %g" % offset)
        positions = self.atom_positions + offset
        keep = positions < 1.0 - exit_tol
        bp = self.density.breakpoints
        density = PiecewiseDensity.from_cells(0., 1., bp[:-1] + offset, bp[1:] + offset, self.density.values)
        return Measure(config.SPACE, 1.0, density, zip(positions[keep], self.atom_masses[keep]))

    def time_shift(self, shift):
        """The influx seen from time `shift` on: restriction to (shift, T], translated back to (0, T - shift]"""
        if self.is_space:
            raise ValueError("time_shift acts on time measures")
        upper = self.upper - shift
        if not upper > 0:
            raise ValueError("cannot shift a measure on (0, %g] by %g" % (self.upper, shift))
        bp = self.density.breakpoints
        density = PiecewiseDensity.from_cells(0., upper, bp[:-1] - shift, bp[1:] - shift, self.density.values)
        keep = self.atom_positions > shift
        positions = np.minimum(self.atom_positions[keep] - shift, upper)
        return Measure(config.TIME, upper, density, zip(positions, self.atom_masses[keep]))

    def with_atoms(self, atoms: Sequence[Tuple[float, float]]):
        """Same density, atoms replaced"""
        return Measure(self.domain, self.upper, self.density, atoms)

    def __add__(self, other):
        if not isinstance(other, Measure):
            return NotImplemented
        if other.domain != self.domain or other.upper != self.upper:
            raise ValueError("cannot add measures on different domains")
        bp1, bp2 = self.density.breakpoints, other.density.breakpoints
        density = PiecewiseDensity.from_cells(
            0., self.upper,
            np.concatenate((bp1[:-1], bp2[:-1])), np.concatenate((bp1[1:], bp2[1:])),
            np.concatenate((self.density.values, other.density.values)))
        atoms = list(zip(self.atom_positions, self.atom_masses)) + list(zip(other.atom_positions, other.atom_masses))
        return Measure(self.domain, self.upper, density, atoms)

    def integrate(self, f: Callable[[np.ndarray], np.ndarray], dx):
        """Integral of a vectorized f: exact on atoms, composite midpoint on sub-cells of length <= dx"""
        total = 0.
        if self.atom_positions.size:
            total += float(np.sum(self.atom_masses * f(self.atom_positions)))
        midpoints, weights = self.density_quadrature(dx)
        if midpoints.size:
            total += float(np.sum(weights * f(midpoints)))
        return total

    def density_quadrature(self, dx):
        """Midpoints and masses of the density split into sub-cells no longer than dx"""
        bp, values = self.density.breakpoints, self.density.values
        nonzero = values > 0
        lefts, widths, values = bp[:-1][nonzero], np.diff(bp)[nonzero], values[nonzero]
        if lefts.size == 0:
            return np.zeros(0), np.zeros(0)
        pieces = np.maximum(np.ceil(widths / dx).astype(int), 1)
        cell = np.repeat(np.arange(lefts.size), pieces)
        offsets = np.arange(cell.size) - np.repeat(np.cumsum(pieces) - pieces, pieces)
        step = widths[cell] / pieces[cell]
        midpoints = lefts[cell] + (offsets + 0.5) * step
        return midpoints, values[cell] * step

    # serialization

    def to_dict(self):
        bp, values = self.density.breakpoints, self.density.values
        return {
            "density": [[float(a), float(b), float(v)] for a, b, v in zip(bp[:-1], bp[1:], values)],
            "atoms": [[float(x), float(m)] for x, m in zip(self.atom_positions, self.atom_masses)],
        }

    @classmethod
    def from_dict(cls, domain, upper, d):
        return cls(domain, upper, _density_from_triples(0., upper, d.get("density", ())), d.get("atoms", ()))

    def allclose(self, other, atol=1e-12):
        if self.domain != other.domain or self.atom_positions.size != other.atom_positions.size:
            return False
        if not (np.allclose(self.atom_positions, other.atom_positions, atol=atol)
                and np.allclose(self.atom_masses, other.atom_masses, atol=atol)):
            return False
        grid = np.union1d(self.density.breakpoints, other.density.breakpoints)
        return bool(np.allclose(self.density.cdf(grid), other.density.cdf(grid), atol=atol))

    def __repr__(self):
        return "Measure(%s, ac %.6g, %d atoms, total %.6g)" % (
            self.domain, self.ac_total(), self.atom_positions.size, self.total_mass())


def _density_from_triples(lower, upper, triples):
    triples = [tuple(c) for c in triples]
    for cell in triples:
        if len(cell) != 3:
            raise ValueError("density cells are [a, b, value] triples, got %s" % (list(cell),))
        a, b, v = map(float, cell)
        if v < 0:
            raise ValueError("negative density value")
        if not (lower <= a < b <= upper):
            raise ValueError("density cell [%g, %g] is not inside [%g, %g]" % (a, b, lower, upper))
    if not triples:
        return PiecewiseDensity.zero(lower, upper)
    a, b, v = (np.array(col, dtype=float) for col in zip(*triples))
    return PiecewiseDensity.from_cells(lower, upper, a, b, v)


def translate_restrict(nu: Measure, offset, exit_tol=0.0):
    return nu.translate_restrict(offset, exit_tol)


def _minimal_heavy_prefix(atoms: List[Atom], threshold):
    heavy_first = sorted(atoms, key=lambda a: (-a.mass, a.position))
    masses = np.array([a.mass for a in heavy_first])
    # tails[k] = mass left after keeping the k heaviest
    tails = np.concatenate((np.cumsum(masses[::-1])[::-1], [0.]))
    n = int(np.argmax(tails < threshold))
    return heavy_first[:n], float(tails[n])


def classify_large_atoms(rho0: Measure, mu: Measure, threshold) -> LargeAtoms:
    """Minimal set of heaviest atoms whose complement weighs less than threshold, for rho0 and mu

    Large atoms of rho0 come back ordered by decreasing position (the order they exit in),
    those of mu by increasing time.
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive, got %g" % threshold)
    rho_large, rho_tail = _minimal_heavy_prefix(rho0.atoms, threshold)
    mu_large, mu_tail = _minimal_heavy_prefix(mu.atoms, threshold)
    return LargeAtoms(rho=sorted(rho_large, key=lambda a: -a.position),
                      mu=sorted(mu_large, key=lambda a: a.position),
                      rho_tail=rho_tail, mu_tail=mu_tail)

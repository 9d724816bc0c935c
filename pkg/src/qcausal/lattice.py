"""Free massive scalar field on a periodic 1+1D lattice.

The Heisenberg-picture field operators at lattice points have a c-number
commutator

    [phi(x, t), phi(x', t')] = i D(x - x', t - t'),
    D(dx, dt) = (1/N) sum_n sin(k_n dx - w_n dt) / w_n,

with k_n = 2 pi n / N and w_n = sqrt(m^2 + 4 sin^2(pi n / N)). D vanishes
identically at equal time, is exactly antisymmetric, and is confined to a
near-light-cone region whose edge this module extracts. Lattice spacing and
signal speed are 1; mass must be positive so every mode frequency is finite.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .topology import CommutationGraph

ANTISYM_TOL = 1e-12


@dataclass(frozen=True)
class LatticeSpec:
    sites: int
    mass: float
    time_steps: int
    time_step: float = 1.0

    def __post_init__(self):
        if self.sites < 8:
            raise ValueError("need at least 8 sites")
        if self.mass <= 0:
            raise ValueError("mass must be positive (zero mode otherwise)")
        if self.time_steps < 2:
            raise ValueError("need at least 2 time steps")
        if self.time_step <= 0:
            raise ValueError("time step must be positive")


@lru_cache(maxsize=32)
def _mode_tables(sites: int, mass: float):
    n = np.arange(sites)
    momenta = 2.0 * np.pi * n / sites
    omegas = np.sqrt(mass * mass + 4.0 * np.sin(np.pi * n / sites) ** 2)
    momenta.setflags(write=False)
    omegas.setflags(write=False)
    return momenta, omegas


def dispersion(spec: LatticeSpec, mode_index: int) -> float:
    """w = sqrt(m^2 + 4 sin^2(pi n / N))."""
    if not 0 <= mode_index < spec.sites:
        raise ValueError(f"mode index {mode_index} outside 0..{spec.sites - 1}")
    return float(_mode_tables(spec.sites, spec.mass)[1][mode_index])


def pauli_jordan(spec: LatticeSpec, dx: int, dt: float) -> float:
    """Commutator amplitude D(dx, dt); the operator commutator is i*D.

    dx is a separation mod N, reduced before evaluation so spatial
    periodicity holds exactly.
    """
    momenta, omegas = _mode_tables(spec.sites, spec.mass)
    return float(np.sum(np.sin(momenta * (dx % spec.sites) - omegas * dt) / omegas) / spec.sites)


def canonical_check(spec: LatticeSpec, dx: int) -> float:
    """-dD/d(dt) at dt=0, i.e. (1/N) sum_n cos(k_n dx).

    Equals the equal-time field-momentum commutator: 1 at dx = 0 mod N,
    0 elsewhere.
    """
    momenta, _ = _mode_tables(spec.sites, spec.mass)
    return float(np.sum(np.cos(momenta * (dx % spec.sites))) / spec.sites)


@dataclass(frozen=True, eq=False)
class CommutatorField:
    """Separation table (dx mod N, dt) -> D."""

    spec: LatticeSpec
    values: dict

    def __post_init__(self):
        sites = self.spec.sites
        if (0, 0.0) in self.values and abs(self.values[(0, 0.0)]) > ANTISYM_TOL:
            raise ValueError("D(0, 0) must vanish")
        for (dx, dt), value in self.values.items():
            partner = ((-dx) % sites, -dt)
            if partner in self.values and abs(value + self.values[partner]) > ANTISYM_TOL:
                raise ValueError(f"antisymmetry broken at separation {(dx, dt)}")

    def value(self, dx: int, dt: float) -> float:
        return self.values[(dx % self.spec.sites, dt)]


def _row(spec: LatticeSpec, dt: float) -> np.ndarray:
    """D(dx, dt) for dx = 0..N-1 in one vectorized mode sum."""
    momenta, omegas = _mode_tables(spec.sites, spec.mass)
    dx = np.arange(spec.sites)
    phases = momenta[:, None] * dx[None, :] - (omegas * dt)[:, None]
    return np.sin(phases).T @ (1.0 / omegas) / spec.sites


def commutator_table(spec: LatticeSpec, threads: int = 1) -> CommutatorField:
    """D on all separations reachable inside the time window.

    Rows are independent, so threads > 1 maps them onto a pool; assembly
    order is fixed by the separation key either way.
    """
    dts = [j * spec.time_step for j in range(-(spec.time_steps - 1), spec.time_steps)]
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda dt: _row(spec, dt), dts))
    else:
        rows = [_row(spec, dt) for dt in dts]
    values = {}
    for dt, row in zip(dts, rows):
        for dx in range(spec.sites):
            values[(dx, dt)] = float(row[dx])
    return CommutatorField(spec, values)


def commutation_graph(spec: LatticeSpec, eps: float) -> CommutationGraph:
    """Spacetime points as vertices; an edge means the operators commute.

    Vertices are (x, t) for x in 0..N-1, t in 0..T-1; edge present iff
    |D(x - x', (t - t') * h)| < eps.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    sites, steps = spec.sites, spec.time_steps
    commute = np.empty((sites, 2 * steps - 1), dtype=bool)
    for j in range(-(steps - 1), steps):
        commute[:, j + steps - 1] = np.abs(_row(spec, j * spec.time_step)) < eps

    labels = tuple(f"x{x}t{t}" for t in range(steps) for x in range(sites))
    xs = np.tile(np.arange(sites), steps)
    ts = np.repeat(np.arange(steps), sites)
    dx = (xs[:, None] - xs[None, :]) % sites
    dj = ts[:, None] - ts[None, :] + steps - 1
    adjacency = commute[dx, dj]
    np.fill_diagonal(adjacency, True)

    interior = ~np.eye(len(labels), dtype=bool)
    if adjacency[interior].all():
        warnings.warn(f"commutation graph is complete at eps={eps}", stacklevel=2)
    elif not adjacency[interior].any():
        warnings.warn(f"commutation graph is empty at eps={eps}", stacklevel=2)
    return CommutationGraph(labels, adjacency)


@dataclass(frozen=True)
class ConeProfile:
    """Cone edge: per time separation, the farthest non-commuting site."""

    per_time_extent: tuple
    fitted_speed: float
    eps: float

    def __post_init__(self):
        if any(extent < 0 for _, extent in self.per_time_extent):
            raise ValueError("extents must be non-negative")
        if self.fitted_speed <= 0:
            raise ValueError("fitted speed must be positive")

    def extents(self) -> np.ndarray:
        return np.array([extent for _, extent in self.per_time_extent])

    def broadening(self) -> int:
        """Largest overshoot of the extent past the unit-speed cone."""
        return max(0, max(int(e) - int(round(dt)) for dt, e in self.per_time_extent))


def cone_profile(spec: LatticeSpec, eps: float) -> ConeProfile:
    """Extents for integer time separations 1 .. (T-1)//2 and the
    least-squares front speed."""
    if spec.time_steps < 8:
        raise ValueError("cone profile needs at least 8 time steps")
    if eps <= 0:
        raise ValueError("eps must be positive")
    half = spec.sites // 2
    rows = []
    for j in range(1, (spec.time_steps + 1) // 2):
        dt = j * spec.time_step
        mags = np.abs(_row(spec, dt))[: half + 1]
        hits = np.nonzero(mags >= eps)[0]
        rows.append((dt, int(hits[-1]) if hits.size else 0))
    if all(extent == 0 for _, extent in rows):
        raise ValueError(f"no cone detected at eps={eps}")
    dts = np.array([dt for dt, _ in rows])
    extents = np.array([extent for _, extent in rows], dtype=float)
    speed = float(np.polyfit(dts, extents, 1)[0])
    return ConeProfile(tuple(rows), speed, eps)

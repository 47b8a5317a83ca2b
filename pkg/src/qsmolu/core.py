"""Shared domain types and pointwise field operations.

Everything downstream works with three ingredients defined here: a uniform
1-D grid (periodic or reflecting), real/complex fields living on it, and the
density-derived quantities

    Q = -hbar^2 (sqrt(rho))'' / (2 m sqrt(rho))      quantum potential
    W = -D (ln rho)'                                  osmotic velocity
    rho*A = D^2 rho'''                                mean stochastic forcing

with the universal diffusion coefficient D = hbar / (2 m).  Densities are
floored at ``DENSITY_FLOOR_REL * max(rho)`` before any log, sqrt or division,
because Q and W are singular at nodes and only nodeless states are in scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    DegenerateDensityError,
    GridMismatchError,
    GridResolutionError,
    NodeFormationError,
)

DENSITY_FLOOR_REL = 1e-12

PERIODIC = "periodic"
REFLECTING = "reflecting"


@dataclass(frozen=True)
class PhysicalConfig:
    """Physical constants of a run: hbar, mass, friction rate and k_B T.

    The derived diffusion coefficient is D = hbar / (2 mass); the friction
    coefficient entering the overdamped equations is B = gamma * mass.
    No unit system is imposed; scenario defaults use hbar = m = gamma = kT = 1.
    """

    hbar: float = 1.0
    mass: float = 1.0
    gamma: float = 1.0
    kT: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.kT < 0:
            raise ValueError(f"kT must be >= 0, got {self.kT}")

    @property
    def D(self) -> float:
        """Diffusion coefficient hbar / (2 mass)."""
        return self.hbar / (2.0 * self.mass)

    @property
    def B(self) -> float:
        """Friction coefficient gamma * mass."""
        return self.gamma * self.mass

    @property
    def beta(self) -> float:
        """Reciprocal temperature 1 / kT (inf at kT = 0)."""
        return np.inf if self.kT == 0 else 1.0 / self.kT


@dataclass(frozen=True)
class Grid:
    """Uniform 1-D mesh on [x_min, x_max] with n intervals.

    Node i sits at x_min + i*dx.  A periodic grid identifies node n with
    node 0 and carries n stored nodes; a reflecting grid stores all n+1.
    """

    x_min: float
    x_max: float
    n: int
    boundary: str = REFLECTING

    def __post_init__(self):
        if self.n < 8:
            raise ValueError(f"grid needs n >= 8, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.boundary not in (PERIODIC, REFLECTING):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def npoints(self) -> int:
        """Number of stored nodes (n for periodic, n+1 for reflecting)."""
        return self.n if self.boundary == PERIODIC else self.n + 1

    @cached_property
    def x(self) -> np.ndarray:
        xs = self.x_min + self.dx * np.arange(self.npoints)
        xs.flags.writeable = False
        return xs

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    def quadrature(self, values: np.ndarray) -> float:
        """Integral of a nodal field: periodic sum or trapezoid rule."""
        if self.boundary == PERIODIC:
            return float(np.sum(values) * self.dx)
        return float(np.trapezoid(values, dx=self.dx))

    def cell_widths(self) -> np.ndarray:
        """Finite-volume cell widths consistent with ``quadrature``."""
        w = np.full(self.npoints, self.dx)
        if self.boundary == REFLECTING:
            w[0] = w[-1] = 0.5 * self.dx
        return w


def same_grid(a: Grid, b: Grid) -> None:
    if a != b:
        raise GridMismatchError(f"grids differ: {a} vs {b}")


# -- finite differences ------------------------------------------------------
#
# Central second-order stencils; at reflecting edges one-sided second-order.


def d1(values: np.ndarray, grid: Grid) -> np.ndarray:
    """First derivative, O(dx^2)."""
    dx = grid.dx
    if grid.boundary == PERIODIC:
        return (np.roll(values, -1) - np.roll(values, 1)) / (2.0 * dx)
    out = np.empty_like(values, dtype=float)
    out[1:-1] = (values[2:] - values[:-2]) / (2.0 * dx)
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dx)
    out[-1] = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * dx)
    return out


def d2(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Second derivative, O(dx^2)."""
    dx2 = grid.dx ** 2
    if grid.boundary == PERIODIC:
        return (np.roll(values, -1) - 2.0 * values + np.roll(values, 1)) / dx2
    out = np.empty_like(values, dtype=float)
    out[1:-1] = (values[2:] - 2.0 * values[1:-1] + values[:-2]) / dx2
    out[0] = (2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) / dx2
    out[-1] = (2.0 * values[-1] - 5.0 * values[-2] + 4.0 * values[-3] - values[-4]) / dx2
    return out


def density_floor(values: np.ndarray) -> float:
    """Relative floor applied before log/sqrt/division."""
    return DENSITY_FLOOR_REL * float(np.max(values))


# -- fields ------------------------------------------------------------------


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class DensityField:
    """Nonnegative probability density on a grid, unit quadrature.

    The constructor normalizes unless ``normalize=False``, in which case the
    quadrature must already be 1 within 1e-10.
    """

    values: np.ndarray
    grid: Grid
    normalize: bool = field(default=True, repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.npoints,):
            raise GridMismatchError(
                f"density has {vals.shape} values, grid stores {self.grid.npoints} nodes")
        if np.any(vals < 0):
            raise ValueError("density values must be nonnegative")
        total = self.grid.quadrature(vals)
        if self.normalize:
            if total <= 0:
                raise ValueError("density integrates to zero")
            vals = vals / total
        elif abs(total - 1.0) > 1e-10:
            raise ValueError(f"density quadrature {total} deviates from 1 beyond 1e-10")
        object.__setattr__(self, "values", _frozen(vals))

    def mean(self) -> float:
        return self.grid.quadrature(self.grid.x * self.values)

    def variance(self) -> float:
        mu = self.mean()
        return self.grid.quadrature((self.grid.x - mu) ** 2 * self.values)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitude on a grid with unit L2 norm."""

    values: np.ndarray
    grid: Grid
    normalize: bool = field(default=True, repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.npoints,):
            raise GridMismatchError(
                f"wave function has {vals.shape} values, grid stores {self.grid.npoints} nodes")
        norm2 = self.grid.quadrature(np.abs(vals) ** 2)
        if self.normalize:
            if norm2 <= 0:
                raise ValueError("wave function has zero norm")
            vals = vals / np.sqrt(norm2)
        elif abs(norm2 - 1.0) > 1e-10:
            raise ValueError(f"squared norm {norm2} deviates from 1 beyond 1e-10")
        object.__setattr__(self, "values", _frozen(vals))

    def density(self) -> DensityField:
        return DensityField(np.abs(self.values) ** 2, self.grid)


@dataclass(frozen=True, eq=False)
class FlowState:
    """Hydrodynamic state: density rho, velocity V, and action phase S.

    S is defined up to an additive constant and satisfies mass*V = dS/dx
    within discretization error whenever both fields are populated; it may
    be None for states evolved purely in (rho, V) variables.
    """

    density: DensityField
    velocity: np.ndarray
    phase: np.ndarray | None = None

    def __post_init__(self):
        npts = self.density.grid.npoints
        v = np.asarray(self.velocity, dtype=float)
        if v.shape != (npts,):
            raise GridMismatchError("velocity field does not match grid")
        object.__setattr__(self, "velocity", _frozen(v))
        if self.phase is not None:
            s = np.asarray(self.phase, dtype=float)
            if s.shape != (npts,):
                raise GridMismatchError("phase field does not match grid")
            object.__setattr__(self, "phase", _frozen(s))

    @property
    def grid(self) -> Grid:
        return self.density.grid


# -- potentials ---------------------------------------------------------------


class Potential:
    """External potential U(x); subclasses provide value and gradient."""

    def value(self, x: np.ndarray, cfg: PhysicalConfig) -> np.ndarray:
        raise NotImplementedError

    def grad(self, x: np.ndarray, cfg: PhysicalConfig) -> np.ndarray:
        raise NotImplementedError

    def on_grid(self, grid: Grid, cfg: PhysicalConfig) -> np.ndarray:
        return self.value(grid.x, cfg)


@dataclass(frozen=True)
class Free(Potential):
    def value(self, x, cfg):
        return np.zeros_like(np.asarray(x, dtype=float))

    def grad(self, x, cfg):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Harmonic(Potential):
    """U = mass * omega^2 x^2 / 2."""

    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("harmonic omega must be positive")

    def value(self, x, cfg):
        return 0.5 * cfg.mass * self.omega ** 2 * np.asarray(x, dtype=float) ** 2

    def grad(self, x, cfg):
        return cfg.mass * self.omega ** 2 * np.asarray(x, dtype=float)


@dataclass(frozen=True)
class DoubleWell(Potential):
    """Quartic double well: U = barrier * ((2x/separation)^2 - 1)^2.

    Minima at +-separation/2, barrier height at x = 0.
    """

    barrier: float
    separation: float

    def __post_init__(self):
        if self.barrier < 0 or not self.separation > 0:
            raise ValueError("double well needs barrier >= 0 and separation > 0")

    def value(self, x, cfg):
        u = (2.0 * np.asarray(x, dtype=float) / self.separation) ** 2 - 1.0
        return self.barrier * u ** 2

    def grad(self, x, cfg):
        x = np.asarray(x, dtype=float)
        u = (2.0 * x / self.separation) ** 2 - 1.0
        return self.barrier * 2.0 * u * 8.0 * x / self.separation ** 2


@dataclass(frozen=True, eq=False)
class Tabulated(Potential):
    """Potential sampled on a grid; off-node queries use linear interpolation."""

    table: np.ndarray
    grid: Grid

    def __post_init__(self):
        vals = np.asarray(self.table, dtype=float)
        if vals.shape != (self.grid.npoints,):
            raise GridMismatchError(
                f"tabulated potential has {vals.shape} values for {self.grid.npoints} nodes")
        object.__setattr__(self, "table", _frozen(vals))

    def value(self, x, cfg):
        return np.interp(np.asarray(x, dtype=float), self.grid.x, self.table)

    def grad(self, x, cfg):
        g = d1(self.table, self.grid)
        return np.interp(np.asarray(x, dtype=float), self.grid.x, g)

    def on_grid(self, grid, cfg):
        same_grid(grid, self.grid)
        return self.table


# -- density-derived quantities ----------------------------------------------


def quantum_potential(rho: DensityField, cfg: PhysicalConfig) -> np.ndarray:
    """Quantum potential Q = -hbar^2 (sqrt rho)'' / (2 m sqrt rho) per node.

    Uses central second differences on the floored density; scaling rho by a
    constant leaves Q unchanged, so normalization does not matter here.
    """
    vals = np.maximum(rho.values, density_floor(rho.values))
    s = np.sqrt(vals)
    q = -(cfg.hbar ** 2 / (2.0 * cfg.mass)) * d2(s, rho.grid) / s
    bad = ~np.isfinite(q)
    if np.any(bad):
        raise DegenerateDensityError(int(np.argmax(bad)))
    return q


def osmotic_velocity(rho: DensityField, cfg: PhysicalConfig) -> np.ndarray:
    """Osmotic velocity W = -D d(ln rho)/dx per node (Fick closure)."""
    vals = np.maximum(rho.values, density_floor(rho.values))
    w = -cfg.D * d1(vals, rho.grid) / vals
    bad = ~np.isfinite(w)
    if np.any(bad):
        raise DegenerateDensityError(int(np.argmax(bad)))
    return w


def mean_stochastic_acceleration(rho: DensityField, cfg: PhysicalConfig) -> np.ndarray:
    """Mean stochastic force density rho*A = D^2 rho''' per node.

    Evaluated by three nested first differences; only the closure-identity
    diagnostics consume this, so accuracy beyond O(dx^2) is not needed.
    """
    if rho.grid.n < 16:
        raise GridResolutionError(
            f"third difference needs n >= 16, grid has n = {rho.grid.n}")
    vals = np.maximum(rho.values, density_floor(rho.values))
    g = rho.grid
    return cfg.D ** 2 * d1(d1(d1(vals, g), g), g)


def _phase_increments(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Principal-branch phase steps between neighbouring nodes.

    Periodic grids include the wrap increment (node n-1 back to node 0).
    """
    if grid.boundary == PERIODIC:
        nxt = np.roll(values, -1)
        return np.angle(nxt * np.conj(values))
    return np.angle(values[1:] * np.conj(values[:-1]))


def madelung_decompose(psi: WaveFunction, cfg: PhysicalConfig) -> FlowState:
    """Split psi into (rho, V, S) with S unwrapped along the grid, S(x_min) = 0.

    Only nodeless states are decomposable; an interior density below the
    floor raises NodeFormationError.
    """
    grid = psi.grid
    rho_vals = np.abs(psi.values) ** 2
    floor = density_floor(rho_vals)
    interior = slice(None) if grid.boundary == PERIODIC else slice(1, -1)
    under = rho_vals[interior] < floor
    if np.any(under):
        offset = 0 if grid.boundary == PERIODIC else 1
        raise NodeFormationError(int(np.argmax(under)) + offset)

    delta = _phase_increments(psi.values, grid)
    s = cfg.hbar * np.concatenate(([0.0], np.cumsum(delta[: grid.npoints - 1])))

    dx = grid.dx
    vel = np.empty(grid.npoints)
    if grid.boundary == PERIODIC:
        vel = cfg.hbar * (delta + np.roll(delta, 1)) / (2.0 * dx * cfg.mass)
    else:
        vel[1:-1] = (s[2:] - s[:-2]) / (2.0 * dx * cfg.mass)
        vel[0] = (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * dx * cfg.mass)
        vel[-1] = (3.0 * s[-1] - 4.0 * s[-2] + s[-3]) / (2.0 * dx * cfg.mass)

    return FlowState(DensityField(rho_vals, grid), vel, s)


def madelung_compose(flow: FlowState, cfg: PhysicalConfig) -> WaveFunction:
    """Assemble psi = sqrt(rho) exp(i S / hbar), renormalized."""
    if flow.phase is None:
        raise ValueError("compose needs a populated phase field")
    amp = np.sqrt(flow.density.values)
    return WaveFunction(amp * np.exp(1j * flow.phase / cfg.hbar), flow.grid)

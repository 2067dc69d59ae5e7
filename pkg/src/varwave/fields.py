"""Uniform 1-d grids, sampled fields, interpolation, quadrature, norms.

Everything downstream (both wave solvers, the marker resampler, the
diagnostics) flows through these primitives, so their contracts are narrow
and heavily tested: cubic interpolation is exact on cubics and at nodes,
quadrature is the piecewise-linear integral (trapezoid plus partial end
cells), and the norm bundle mirrors the solution-space metric used by the
fixed-point solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, DomainError

__all__ = [
    "Grid1D",
    "ComplexField",
    "StateNorms",
    "interpolate",
    "integrate",
    "norms",
    "state_distance",
    "centered_derivative",
    "write_snapshot_csv",
    "read_snapshot_csv",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform closed-interval grid with at least 16 nodes."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 16:
            raise ConfigError("grid needs at least 16 nodes")
        if not self.x_max > self.x_min:
            raise ConfigError("empty grid interval")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= self.x_min - 1e-12) and np.all(x <= self.x_max + 1e-12))


def interpolate(grid: Grid1D, samples: np.ndarray, x, fill=None):
    """Four-point Lagrange interpolation of nodal samples at query points.

    Exact for cubic polynomials and exact at grid nodes.  Queries outside the
    grid raise DomainError unless a fill value is supplied (used by the
    transport solver, whose characteristics leave through a constant far
    field).
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xq = np.atleast_1d(x).astype(float)
    samples = np.asarray(samples)

    inside = (xq >= grid.x_min - 1e-12 * grid.dx) & (xq <= grid.x_max + 1e-12 * grid.dx)
    if fill is None and not np.all(inside):
        raise DomainError("interpolation query outside the grid")

    pos = (xq - grid.x_min) / grid.dx
    pos = np.clip(pos, 0.0, grid.n - 1.0)
    jbase = np.clip(np.floor(pos).astype(int) - 1, 0, grid.n - 4)
    t = pos - (jbase + 1)  # offset from the second stencil node, in cells

    tm, t0, t1, t2 = t + 1.0, t, t - 1.0, t - 2.0
    w0 = -t0 * t1 * t2 / 6.0
    w1 = tm * t1 * t2 / 2.0
    w2 = -tm * t0 * t2 / 2.0
    w3 = tm * t0 * t1 / 6.0
    out = (w0 * samples[jbase] + w1 * samples[jbase + 1]
           + w2 * samples[jbase + 2] + w3 * samples[jbase + 3])

    # snap exact nodes so interpolation at a node returns the sample bitwise
    near = np.abs(pos - np.round(pos)) < 1e-9
    if np.any(near):
        idx = np.round(pos[near]).astype(int)
        out[near] = samples[idx]

    if fill is not None and not np.all(inside):
        out = np.where(inside, out, fill)
    return out[0] if scalar else out


def integrate(grid: Grid1D, samples: np.ndarray, a: Optional[float] = None,
              b: Optional[float] = None):
    """Integral of the piecewise-linear interpolant of samples over [a, b].

    Composite trapezoid over whole cells plus linear corrections for the
    partial cells at each end; exactly additive over subintervals.
    """
    a = grid.x_min if a is None else float(a)
    b = grid.x_max if b is None else float(b)
    if b < a:
        raise ConfigError("integration bounds reversed")
    if a < grid.x_min - 1e-12 or b > grid.x_max + 1e-12:
        raise DomainError("integration bounds outside the grid")
    a = min(max(a, grid.x_min), grid.x_max)
    b = min(max(b, grid.x_min), grid.x_max)
    if a == b:
        return samples.dtype.type(0.0) if hasattr(samples, "dtype") else 0.0

    dx = grid.dx
    samples = np.asarray(samples)

    def lin(xq):
        pos = (xq - grid.x_min) / dx
        j = min(int(pos), grid.n - 2)
        t = pos - j
        return (1.0 - t) * samples[j] + t * samples[j + 1], j, t

    fa, ja, ta = lin(a)
    fb, jb, tb = lin(b)
    if ja == jb:
        return 0.5 * (fa + fb) * (b - a)

    x_first = grid.x_min + (ja + 1) * dx
    x_last = grid.x_min + jb * dx
    total = 0.5 * (fa + samples[ja + 1]) * (x_first - a)
    total = total + 0.5 * (samples[jb] + fb) * (b - x_last)
    if jb > ja + 1:
        inner = samples[ja + 1:jb + 1]
        total = total + np.trapezoid(inner, dx=dx)
    return total


def centered_derivative(grid: Grid1D, samples: np.ndarray) -> np.ndarray:
    """Second-order spatial derivative: centered inside, one-sided at the ends."""
    return np.gradient(np.asarray(samples), grid.dx, edge_order=2)


# ---------------------------------------------------------------------------
# complex state

@dataclass
class ComplexField:
    """State (zeta, zeta_t) of the constant-speed complex wave equation.

    zeta = s e^{i psi} packs the order parameter and director angle; the far
    field is an equilibrium constant the boundary values are pinned to.
    """

    grid: Grid1D
    zeta: np.ndarray
    zeta_t: np.ndarray
    far_field: complex = 0.0 + 0.0j
    time: float = 0.0
    validate: bool = True

    def __post_init__(self):
        self.zeta = np.array(self.zeta, dtype=complex)
        self.zeta_t = np.array(self.zeta_t, dtype=complex)
        if self.zeta.shape != (self.grid.n,) or self.zeta_t.shape != (self.grid.n,):
            raise ConfigError("field arrays must match the grid")
        if self.validate:
            self.check()

    def check(self):
        sup = float(np.max(np.abs(self.zeta)))
        if sup >= 1.0:
            from .errors import StateEscapeError
            raise StateEscapeError(f"sup|zeta| = {sup:.6f} >= 1")
        for edge in (0, -1):
            if abs(self.zeta[edge] - self.far_field) > 1e-10:
                raise ConfigError("boundary value departs from the far field")
            if abs(self.zeta_t[edge]) > 1e-10:
                raise ConfigError("boundary time derivative is not zero")

    def zeta_x(self) -> np.ndarray:
        return centered_derivative(self.grid, self.zeta)

    def copy(self) -> "ComplexField":
        return ComplexField(self.grid, self.zeta.copy(), self.zeta_t.copy(),
                            self.far_field, self.time, validate=False)


@dataclass(frozen=True)
class StateNorms:
    """Norm components of the solution-space metric for one state."""

    sup_zeta: float
    h1_dist: float
    sup_zeta_t: float
    l2_zeta_t: float
    w0_mass: float


def norms(f: ComplexField, p=None) -> StateNorms:
    """Norm bundle of a state: sup and H^1 distance to the far field, sup/L2
    of the velocity, and the L^1 mass of W0(|zeta|) when a potential is given."""
    g = f.grid
    dz = f.zeta - f.far_field
    zx = f.zeta_x()
    l2 = lambda arr: float(np.sqrt(max(integrate(g, np.abs(arr) ** 2).real, 0.0)))
    w0_mass = 0.0
    if p is not None:
        w0_mass = float(integrate(g, p.eval_0(np.abs(f.zeta))))
    return StateNorms(
        sup_zeta=float(np.max(np.abs(f.zeta))),
        h1_dist=l2(dz) + l2(zx),
        sup_zeta_t=float(np.max(np.abs(f.zeta_t))),
        l2_zeta_t=l2(f.zeta_t),
        w0_mass=w0_mass,
    )


def state_distance(f1: ComplexField, f2: ComplexField, p=None) -> float:
    """Metric distance between two states on the same grid.

    Sup and L^2 norms of the differences of zeta, zeta_x, zeta_t, plus the
    L^1 difference of the potential densities; this is the contraction metric
    of the windowed fixed-point solver.
    """
    if f1.grid != f2.grid:
        raise ConfigError("states live on different grids")
    g = f1.grid
    dz = f1.zeta - f2.zeta
    dzx = centered_derivative(g, dz)
    dzt = f1.zeta_t - f2.zeta_t
    l2 = lambda arr: float(np.sqrt(max(integrate(g, np.abs(arr) ** 2).real, 0.0)))
    d = (float(np.max(np.abs(dz))) + float(np.max(np.abs(dzx)))
         + l2(dz) + l2(dzx)
         + float(np.max(np.abs(dzt))) + l2(dzt))
    if p is not None:
        d += float(integrate(g, np.abs(p.eval_0(np.abs(f1.zeta)) - p.eval_0(np.abs(f2.zeta)))))
    return d


# ---------------------------------------------------------------------------
# snapshot serialization

SNAPSHOT_HEADER = "x,re_zeta,im_zeta,re_zeta_t,im_zeta_t"


def write_snapshot_csv(path, f: ComplexField):
    """One row per node: x, Re zeta, Im zeta, Re zeta_t, Im zeta_t."""
    xs = f.grid.nodes
    with open(path, "w") as fh:
        fh.write(SNAPSHOT_HEADER + "\n")
        for i in range(f.grid.n):
            fh.write(f"{xs[i]:.17g},{f.zeta[i].real:.17g},{f.zeta[i].imag:.17g},"
                     f"{f.zeta_t[i].real:.17g},{f.zeta_t[i].imag:.17g}\n")


def read_snapshot_csv(path, far_field=0.0 + 0.0j, time=0.0) -> ComplexField:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.ndim != 2 or data.shape[1] != 5:
        raise ConfigError("snapshot csv must have five columns")
    x = data[:, 0]
    n = x.size
    grid = Grid1D(float(x[0]), float(x[-1]), n)
    if not np.allclose(x, grid.nodes, rtol=0.0, atol=1e-9 * grid.dx):
        raise ConfigError("snapshot nodes are not uniform")
    zeta = data[:, 1] + 1j * data[:, 2]
    zeta_t = data[:, 3] + 1j * data[:, 4]
    return ComplexField(grid, zeta, zeta_t, far_field=far_field, time=time)

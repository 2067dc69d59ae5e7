"""Energy/flux densities, conservation residuals, and convergence-order fits.

Two local laws are monitored on smooth solutions:

    E_t - (c^2 F)_x = 0          F_t - (E - 2 W0)_x = 0

with E the energy density and F = (s^2 phi omega + v r) / c in transport
variables (equivalently Re(conj(zeta_t) zeta_x) in the constant-speed complex
form, where c^2 F needs the explicit c^2 factor).  Residuals are measured by
centered differences across snapshot triples, so the first and last reported
steps carry no residual.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError
from .fields import Grid1D, centered_derivative, integrate

__all__ = [
    "EnergyReport",
    "energy_density_polar",
    "energy_density_complex",
    "conservation_residuals",
    "fit_order",
    "write_energy_csv",
]


@dataclass
class EnergyReport:
    """Per-step conservation record for one run."""

    time: float
    total_E: float
    total_F: float
    residual_E: float  # NaN where a centered-in-time residual is undefined
    residual_F: float
    sup_state: float
    apriori_violated: bool


def energy_density_polar(psi, s, phi, v, omega, r, p, ws):
    """Energy and flux densities from transport variables.

    Returns (E, F, c2F, EmW): density, flux, c^2*flux, and E - 2 W0(s).
    """
    c = ws.c(psi)
    w0 = p.eval_0(np.asarray(s, dtype=float))
    E = 0.5 * (s**2 * (phi**2 + omega**2) + v**2 + r**2) + w0
    base = s**2 * phi * omega + v * r
    F = base / c
    return E, F, c * base, E - 2.0 * w0


def energy_density_complex(zeta, zeta_t, zeta_x, p, c):
    """Energy and flux densities of the complex constant-speed form."""
    az = np.abs(zeta)
    w0 = p.eval_0(az)
    E = 0.5 * np.abs(zeta_t) ** 2 + 0.5 * c**2 * np.abs(zeta_x) ** 2 + w0
    F = (np.conj(zeta_t) * zeta_x).real
    return E, F, c**2 * F, E - 2.0 * w0


def conservation_residuals(grid: Grid1D, triple_E, triple_c2F, triple_F, triple_EmW, dt: float):
    """L^1 residuals of both local laws at the middle time of a snapshot triple.

    triple_* are (E^{k-1}, E^k, E^{k+1}) etc.  Time derivatives are centered
    over 2*dt, space derivatives centered on the middle snapshot.
    """
    E_prev, E_mid, E_next = triple_E
    F_prev, F_mid, F_next = triple_F
    dE_dt = (E_next - E_prev) / (2.0 * dt)
    dF_dt = (F_next - F_prev) / (2.0 * dt)
    resE = dE_dt - centered_derivative(grid, triple_c2F[1])
    resF = dF_dt - centered_derivative(grid, triple_EmW[1])
    # one-sided boundary stencils are lower order; restrict to the interior
    interior = np.zeros(grid.n)
    interior[1:-1] = 1.0
    return (float(integrate(grid, np.abs(resE) * interior)),
            float(integrate(grid, np.abs(resF) * interior)))


def fit_order(pairs) -> float:
    """Least-squares slope of log(error) against log(h).

    pairs is a sequence of (h, err) with h values distinct; every error must
    be positive, otherwise a rate is meaningless and we refuse to fit.
    """
    pairs = sorted(pairs, key=lambda he: -float(he[0]))
    if len(pairs) < 3:
        raise ConfigError("order fit needs at least three (h, err) pairs")
    h = np.array([float(a) for a, _ in pairs])
    e = np.array([float(b) for _, b in pairs])
    if np.any(h <= 0.0) or np.any(e <= 0.0):
        raise ConfigError("order fit needs positive h and err")
    if np.any(np.diff(h) >= 0.0):
        raise ConfigError("order fit needs distinct h values")
    slope = np.polyfit(np.log(h), np.log(e), 1)[0]
    return float(slope)


ENERGY_HEADER = "t,total_E,total_F,residual_E,residual_F,sup_state,apriori_violated"


def write_energy_csv(path, reports):
    with open(path, "w") as fh:
        fh.write(ENERGY_HEADER + "\n")
        for r in reports:
            fh.write(f"{r.time:.17g},{r.total_E:.17g},{r.total_F:.17g},"
                     f"{r.residual_E:.17g},{r.residual_F:.17g},"
                     f"{r.sup_state:.17g},{int(r.apriori_violated)}\n")

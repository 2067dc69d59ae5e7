"""Named initial-data profile families shared by the CLI and the demos.

Each factory returns a Profile: a callable with an exact derivative
attached, so solvers that want compatible gradient fields never have to
re-differentiate numerically.  The bump-slope family is the derivative of a
Gaussian, the canonical zero-mass density profile for embeddings that need
a localized antiderivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np

from .errors import ConfigError

__all__ = [
    "Profile",
    "gaussian",
    "sine_packet",
    "bump_slope",
    "constant",
    "zero",
    "make_profile",
    "PROFILE_FAMILIES",
]


@dataclass(frozen=True)
class Profile:
    """A smooth profile and its derivative, with the defining parameters."""

    fn: Callable
    dfn: Callable
    family: str
    params: Dict[str, float] = field(default_factory=dict)

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def derivative(self, x):
        return self.dfn(np.asarray(x, dtype=float))


def gaussian(amplitude: float = 1.0, center: float = 0.0,
             width: float = 1.0) -> Profile:
    """amplitude * exp(-((x - center)/width)^2)."""
    if width <= 0.0:
        raise ConfigError("gaussian width must be positive")
    a, c, w = float(amplitude), float(center), float(width)

    def fn(x):
        return a * np.exp(-((x - c) / w) ** 2)

    def dfn(x):
        return a * np.exp(-((x - c) / w) ** 2) * (-2.0 * (x - c) / (w * w))

    return Profile(fn, dfn, "gaussian",
                   {"amplitude": a, "center": c, "width": w})


def sine_packet(amplitude: float = 1.0, center: float = 0.0,
                width: float = 1.0, k: float = math.pi) -> Profile:
    """amplitude * sin(k (x - center)) * exp(-((x - center)/width)^2)."""
    if width <= 0.0:
        raise ConfigError("sine-packet width must be positive")
    a, c, w, kk = float(amplitude), float(center), float(width), float(k)

    def fn(x):
        q = x - c
        return a * np.sin(kk * q) * np.exp(-(q / w) ** 2)

    def dfn(x):
        q = x - c
        env = np.exp(-(q / w) ** 2)
        return a * env * (kk * np.cos(kk * q) - 2.0 * q / (w * w) * np.sin(kk * q))

    return Profile(fn, dfn, "sine-packet",
                   {"amplitude": a, "center": c, "width": w, "k": kk})


def bump_slope(amplitude: float = 1.0, center: float = 0.0,
               width: float = 1.0) -> Profile:
    """d/dx of a Gaussian bump: odd, compactly concentrated, zero mass.

    Normalized so the extreme values are +/- amplitude.
    """
    if width <= 0.0:
        raise ConfigError("bump-slope width must be positive")
    a, c, w = float(amplitude), float(center), float(width)
    # raw profile -2q/w^2 exp(-(q/w)^2) peaks at |q| = w/sqrt(2)
    peak = (math.sqrt(2.0) / w) * math.exp(-0.5)

    def fn(x):
        q = x - c
        return (a / peak) * (-2.0 * q / (w * w)) * np.exp(-(q / w) ** 2)

    def dfn(x):
        q = x - c
        return (a / peak) * np.exp(-(q / w) ** 2) \
            * (4.0 * q * q / w ** 4 - 2.0 / (w * w))

    return Profile(fn, dfn, "bump-slope",
                   {"amplitude": a, "center": c, "width": w})


def constant(value: float = 0.0) -> Profile:
    val = float(value)
    return Profile(lambda x: np.full_like(x, val, dtype=float),
                   lambda x: np.zeros_like(x, dtype=float),
                   "constant", {"value": val})


def zero() -> Profile:
    return Profile(lambda x: np.zeros_like(x, dtype=float),
                   lambda x: np.zeros_like(x, dtype=float), "zero", {})


PROFILE_FAMILIES = {
    "gaussian": gaussian,
    "sine-packet": sine_packet,
    "bump-slope": bump_slope,
    "constant": constant,
    "zero": zero,
}


def make_profile(spec: Dict) -> Profile:
    """Build a profile from {"family": name, **params}."""
    if "family" not in spec:
        raise ConfigError("profile spec needs a 'family' key")
    fam = spec["family"]
    if fam not in PROFILE_FAMILIES:
        raise ConfigError(f"unknown profile family '{fam}'; available: "
                          + ", ".join(sorted(PROFILE_FAMILIES)))
    params = {k: v for k, v in spec.items() if k != "family"}
    try:
        return PROFILE_FAMILIES[fam](**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for profile family '{fam}': {exc}")

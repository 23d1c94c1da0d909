"""
Group and peak velocities of the ballistic part of the walk.

All quantities depend on the dispersion cos(omega) = rho cos(k - gamma) - mu.
The peak velocity is the maximum of |d omega / dk| over the Brillouin zone;
it has a closed form away from the curve rho + |mu| = 1, where the maximum
moves onto a band edge and a numeric search takes over.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coins import C2Params, DispersionData
from .errors import BandEdge, DomainError

DISC_TOL = 1e-12
BAND_EDGE_TOL = 1e-12
FALLBACK_GRID = 4096
GOLDEN_TOL = 1e-10

CLOSED_FORM = "closed_form"
NUMERIC_FALLBACK = "numeric_fallback"


@dataclass(frozen=True)
class DispersionParams:
    rho: float
    mu: float
    gamma: float = 0.0

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be non-negative; fold the sign into gamma")

    @classmethod
    def from_data(cls, d: DispersionData):
        return cls(rho=d.rho, mu=d.mu, gamma=d.gamma)

    @property
    def discriminant(self):
        r, m = self.rho, self.mu
        return (1 - r * r - m * m) ** 2 - 4 * r * r * m * m


@dataclass(frozen=True)
class PeakVelocityResult:
    v_peak: float
    k0: float
    method: str
    Delta: Optional[float] = None


def _band_terms(p, h):
    """1 + arg and 1 - arg for arg = rho cos h - mu, free of cancellation near the edges."""
    h = np.asarray(h, dtype=float)
    gap_plus, gap_minus = 1 - p.mu - p.rho, 1 + p.mu - p.rho
    # rounding noise in rho + |mu| = 1 would move the maximum off the band edge
    gap_plus = 0.0 if abs(gap_plus) <= BAND_EDGE_TOL else gap_plus
    gap_minus = 0.0 if abs(gap_minus) <= BAND_EDGE_TOL else gap_minus
    one_plus = gap_plus + 2 * p.rho * np.cos(h / 2) ** 2
    one_minus = gap_minus + 2 * p.rho * np.sin(h / 2) ** 2
    return one_plus, one_minus


def _velocity(p, h):
    one_plus, one_minus = _band_terms(p, h)
    with np.errstate(divide="ignore", invalid="ignore"):
        return p.rho * np.sin(h) / np.sqrt(one_plus * one_minus)


def group_velocity(p: DispersionParams, k):
    """d omega / dk = rho sin(k - gamma) / sqrt(1 - (rho cos(k - gamma) - mu)^2)."""
    h = float(k) - p.gamma
    one_plus, one_minus = _band_terms(p, h)
    if min(one_plus, one_minus) <= BAND_EDGE_TOL:
        raise BandEdge(f"dispersion touches +-1 at k={float(k):.6g}")
    return float(p.rho * math.sin(h) / math.sqrt(one_plus * one_minus))


def _golden_max(f, a, b, tol=GOLDEN_TOL):
    invphi = (math.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def numeric_peak_velocity(p: DispersionParams, n_grid=FALLBACK_GRID):
    """Maximize |d omega / dk| on a grid, then refine by golden-section search.

    Band-edge points, where the formula is 0/0, are dropped from the grid;
    the search approaches them from inside and picks up the one-sided limit.
    """
    if p.rho == 0:
        return PeakVelocityResult(0.0, p.gamma, NUMERIC_FALLBACK)
    h = -np.pi + 2 * np.pi * np.arange(n_grid) / n_grid
    v = np.abs(_velocity(p, h))
    v = np.where(np.isfinite(v), v, -1.0)
    i = int(np.argmax(v))
    step = 2 * np.pi / n_grid

    def f(x):
        val = abs(float(_velocity(p, x)))
        return val if math.isfinite(val) else -1.0

    x, fx = _golden_max(f, h[i] - step, h[i] + step)
    if fx < v[i]:
        x, fx = h[i], v[i]
    return PeakVelocityResult(v_peak=min(float(fx), 1.0), k0=float(x + p.gamma), method=NUMERIC_FALLBACK)


def peak_velocity(p: DispersionParams) -> PeakVelocityResult:
    """Largest |d omega / dk| over k; independent of gamma.

    The closed form solves the vanishing of the second derivative for
    Delta = cos(k0 - gamma). The root is written as -2 rho mu / (s + sqrt(disc))
    with s = 1 - rho^2 - mu^2, algebraically equal to the textbook form but
    free of cancellation when rho mu is small.
    """
    r, m = p.rho, p.mu
    if r == 0:
        return PeakVelocityResult(0.0, p.gamma, CLOSED_FORM, None)
    if m == 0:
        return PeakVelocityResult(r, p.gamma + math.pi / 2, CLOSED_FORM, 0.0)
    disc = p.discriminant
    if disc <= DISC_TOL:
        return numeric_peak_velocity(p)
    s = 1 - r * r - m * m
    delta = -2 * r * m / (s + math.sqrt(disc))
    delta = min(1.0, max(-1.0, delta))
    v = r * math.sqrt(1 - delta * delta) / math.sqrt(1 - (m - r * delta) ** 2)
    # both signs of k0 - gamma = +-arccos(Delta) give the same |v|
    return PeakVelocityResult(min(v, 1.0), p.gamma + math.acos(delta), CLOSED_FORM, delta)


# --- family parameters ------------------------------------------------------

def c1_dispersion_params(theta13, theta23, gamma_shift=0.0) -> DispersionParams:
    """rho, mu, gamma of the first family; ``gamma_shift`` is gamma2 + gamma4."""
    prod = math.cos(theta13) * math.cos(theta23)
    gamma = gamma_shift + (math.pi if prod < 0 else 0.0)
    mu = (1 + math.sin(theta13)) * math.sin(theta23) ** 2 / 2
    return DispersionParams(rho=abs(prod), mu=mu, gamma=gamma)


def c2_dispersion_params(delta, kappa, theta23, gamma1=0.0) -> DispersionParams:
    """rho, mu, gamma of the second family; raises InvalidC2Params outside its domain."""
    p = C2Params.from_kappa(kappa, delta, theta23, gamma1=gamma1).check()
    c23 = math.cos(p.theta23)
    gamma = gamma1 + (math.pi if c23 < 0 else 0.0)
    mu = math.sin(p.delta) * math.sin(p.theta23) ** 2 / (2 * math.sin(p.delta + p.kappa))
    return DispersionParams(rho=p.B * abs(c23), mu=mu, gamma=gamma)


def c1_cusp_curve(theta13):
    """The two theta23 in [0, pi] with cos(theta23) = +-cos(theta13) / (1 + sin(theta13))."""
    denom = 1 + math.sin(theta13)
    if denom <= 0:
        raise DomainError("cusp curve undefined at theta13 = -pi/2")
    r = math.cos(theta13) / denom
    if abs(r) > 1 + 1e-12:
        raise DomainError(f"|cos theta23| = {abs(r):.6g} > 1 for theta13 = {theta13:.6g}")
    r = max(-1.0, min(1.0, r))
    return math.acos(r), math.acos(-r)


def c1_vmax(theta23):
    """Largest first-family peak velocity at fixed theta23 (reached on the cusp curve)."""
    x = abs(math.cos(theta23))
    return math.sqrt(x * math.cos(2 * math.atan((1 - x) / (1 + x))))


def c2_vmax(kappa):
    """Largest second-family peak velocity at fixed kappa, reached at theta23 = 0, delta = pi/2 - kappa."""
    return abs(math.cos(kappa))

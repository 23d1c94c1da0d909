"""
Momentum-space evolution operator and a brute-force spectral scan.

The scan diagonalizes D(e^{-ik}, 1, e^{ik}) C on a uniform Brillouin-zone
grid, stitches the eigenvalues into continuous tracks and flags tracks
that do not move with k. It is the numerical oracle for the analytic
classifier in :mod:`qwalk3.coins`.
"""

from dataclasses import dataclass
from itertools import permutations
from typing import Optional

import numpy as np

from . import linalg
from .coins import CoinClass, classify_coin, extract_dispersion_params, matrix_of
from .errors import DomainError, TrackingFailure

CONSTANT_TRACK_TOL = 1e-8
ARCCOS_SLACK = 1e-12
# largest phase jump between neighbouring grid points accepted by tracking
MAX_TRACK_STEP = np.pi / 8

_PERMS = [list(p) for p in permutations(range(3))]


@dataclass(frozen=True)
class SpectralScan:
    k_grid: np.ndarray
    tracks: np.ndarray  # (3, N) unit-modulus eigenvalue tracks
    deviations: np.ndarray  # max unwrapped-phase deviation of each track from its mean
    constant_tracks: tuple

    @property
    def constant_track_index(self) -> Optional[int]:
        return self.constant_tracks[0] if len(self.constant_tracks) == 1 else None

    @property
    def moving_tracks(self):
        return tuple(j for j in range(3) if j not in self.constant_tracks)

    def omega_samples(self, reference=None):
        """Signed phases of the two moving tracks relative to ``reference``.

        ``reference`` defaults to the principal square root of the product
        of the moving eigenvalues at the first grid point, so that for a
        normalized localizing coin the tracks read exp(+-i omega(k)).
        """
        if self.constant_track_index is None:
            raise TrackingFailure("omega is defined only when exactly one track is constant")
        a, b = self.moving_tracks
        if reference is None:
            reference = np.sqrt(self.tracks[a, 0] * self.tracks[b, 0])
        return np.angle(self.tracks[a] / reference), np.angle(self.tracks[b] / reference)


def shift_diagonal(k):
    k = np.asarray(k, dtype=float)
    d = np.zeros(k.shape + (3, 3), dtype=complex)
    d[..., 0, 0] = np.exp(-1j * k)
    d[..., 1, 1] = 1.0
    d[..., 2, 2] = np.exp(1j * k)
    return d


def evolution_at_k(C, k):
    """D(e^{-ik}, 1, e^{ik}) C; ``k`` may be an array, giving a stack."""
    return shift_diagonal(k) @ matrix_of(C)


def brillouin_grid(n):
    return -np.pi + 2 * np.pi * np.arange(n) / n


def _match(prev, prev2, current):
    """Order ``current`` to continue the tracks ending in ``prev``.

    Tracks are extrapolated linearly in phase from the last two samples so
    that branches which cross (e.g. a double eigenvalue at a band edge) are
    followed straight through instead of bouncing.
    """
    if prev2 is None:
        pred = prev
    else:
        pred = prev * (prev / prev2)
    costs = [np.sum(np.abs(np.angle(current[p] / pred))) for p in _PERMS]
    best = _PERMS[int(np.argmin(costs))]
    return current[best]


def spectral_scan(C, n_samples=256, constant_tol=CONSTANT_TRACK_TOL):
    if n_samples < 64:
        raise ValueError("n_samples must be at least 64")
    k = brillouin_grid(n_samples)
    lam = linalg.unitary_eigenvalues(evolution_at_k(C, k))
    tracks = np.empty((n_samples, 3), dtype=complex)
    tracks[0] = lam[0]
    for i in range(1, n_samples):
        tracks[i] = _match(tracks[i - 1], tracks[i - 2] if i > 1 else None, lam[i])
        step = np.abs(np.angle(tracks[i] / tracks[i - 1]))
        if np.max(step) > MAX_TRACK_STEP:
            raise TrackingFailure(f"eigenvalue tracks jump by {np.max(step):.3f} rad at k={k[i]:.4f}")
    tracks = tracks.T
    phases = np.unwrap(np.angle(tracks), axis=1)
    dev = np.max(np.abs(phases - phases.mean(axis=1, keepdims=True)), axis=1)
    const = tuple(int(j) for j in np.flatnonzero(dev < constant_tol))
    return SpectralScan(k_grid=k, tracks=tracks, deviations=dev, constant_tracks=const)


def dispersion_omega(rho, mu, gamma, k):
    """omega(k) = arccos(rho cos(k - gamma) - mu) in [0, pi]."""
    arg = rho * np.cos(np.asarray(k) - gamma) - mu
    if np.any(np.abs(arg) > 1 + ARCCOS_SLACK):
        raise DomainError(f"arccos argument {float(np.max(np.abs(arg))):.15g} outside [-1, 1]")
    return np.arccos(np.clip(arg, -1.0, 1.0))


def verify_dispersion(C, scan=None, classification=None):
    """Largest |cos omega_track(k) - (rho cos(k - gamma) - mu)| over the scan.

    Tracks are read off the gauge-normalized coin, where the moving
    eigenvalues are exactly exp(+-i omega).
    """
    cls = classification or classify_coin(C)
    if cls.coin_class is CoinClass.NO_POINT_SPECTRUM:
        raise DomainError("coin has no point spectrum; there is no dispersion relation to verify")
    scan = scan or spectral_scan(C)
    d = extract_dispersion_params(C, cls)
    target = d.rho * np.cos(scan.k_grid - d.gamma) - d.mu
    normed = scan.tracks * np.exp(1j * cls.gauge_phase)
    const = np.exp(1j * d.phi)
    # at each k drop the sample closest to the constant eigenvalue; where a
    # moving branch crosses it both choices give the same value
    cols = np.arange(normed.shape[1])
    drop = np.argmin(np.abs(normed - const), axis=0)
    keep = np.ones(normed.shape, dtype=bool)
    keep[drop, cols] = False
    moving = normed.T[keep.T].reshape(-1, 2)
    return float(np.max(np.abs(moving.real - target[:, None])))


def disp1_residual(C, k):
    """Reality and value check of 2 cos omega = C_LL e^{-ik} + C_SS + C_RR e^{ik} - e^{i phi}.

    Returns the complex right-hand side; callers compare its real part to
    the tracked eigenvalues and its imaginary part to zero.
    """
    M = matrix_of(C)
    k = np.asarray(k, dtype=float)
    eph = linalg.det3(M)
    return M[0, 0] * np.exp(-1j * k) + M[1, 1] + M[2, 2] * np.exp(1j * k) - eph

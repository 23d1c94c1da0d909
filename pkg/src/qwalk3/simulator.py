"""
Position-space evolution of the three-state walk on a truncated line.

Amplitudes live in a dense (3, 2 * X + 1) array covering x = -X..X, rows
ordered (L, S, R). One step applies the coin at every site and then moves
the L component one site left, keeps S in place and moves R one site right.
"""

from dataclasses import dataclass

import numpy as np

from .coins import matrix_of
from .errors import InsufficientSignal, LatticeOverflow

FRONT_MIN_VELOCITY = 0.05
MIN_FIT_LENGTH = 256

_BASIS = {"L": (1, 0, 0), "S": (0, 1, 0), "R": (0, 0, 1)}


@dataclass
class WalkState:
    t: int
    amplitudes: np.ndarray  # (3, 2 * half_width + 1)

    @property
    def half_width(self):
        return (self.amplitudes.shape[1] - 1) // 2

    @property
    def positions(self):
        return np.arange(-self.half_width, self.half_width + 1)

    def probabilities(self):
        """P(x) summed over the coin, one entry per site."""
        return np.sum(np.abs(self.amplitudes) ** 2, axis=0)

    def total_probability(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def at(self, x):
        return self.amplitudes[:, x + self.half_width]

    @classmethod
    def localized(cls, coin_state, half_width):
        amps = np.zeros((3, 2 * half_width + 1), dtype=complex)
        amps[:, half_width] = coin_state
        return cls(0, amps)


def _coin_vector(initial):
    if isinstance(initial, str):
        if initial not in _BASIS:
            raise ValueError(f"initial coin state must be one of L, S, R, mixed; got {initial!r}")
        return np.array(_BASIS[initial], dtype=complex)
    v = np.asarray(initial, dtype=complex)
    if v.shape != (3,) or abs(np.linalg.norm(v) - 1) > 1e-12:
        raise ValueError("initial coin state must be a unit 3-vector")
    return v


def step(state: WalkState, C) -> WalkState:
    """One coin application followed by the conditional shift."""
    a = state.amplitudes
    if np.any(a[:, 0]) or np.any(a[:, -1]):
        raise LatticeOverflow(f"amplitude reached the lattice boundary at t={state.t}")
    b = matrix_of(C) @ a
    out = np.empty_like(b)
    out[0, :-1] = b[0, 1:]
    out[0, -1] = 0
    out[1] = b[1]
    out[2, 1:] = b[2, :-1]
    out[2, 0] = 0
    return WalkState(state.t + 1, out)


def evolve(C, coin_state, T, half_width=None):
    """Run T steps from the origin; returns the final state and the origin series P(0, t)."""
    half_width = T + 1 if half_width is None else half_width
    M = matrix_of(C)
    state = WalkState.localized(_coin_vector(coin_state), half_width)
    series = np.empty(T + 1)
    series[0] = np.sum(np.abs(state.at(0)) ** 2)
    for _ in range(T):
        state = step(state, M)
        series[state.t] = np.sum(np.abs(state.at(0)) ** 2)
    return state, series


@dataclass(frozen=True)
class SimulationSummary:
    origin_series: np.ndarray
    tail_average_trapping: float
    front_velocity_estimate: float
    final_distribution: np.ndarray  # P(x, T) per x
    final_components: np.ndarray  # (3, n_sites) coin-resolved probabilities
    positions: np.ndarray


def tail_average(series):
    """Mean of P(0, t) over t in [T/2, T]."""
    T = len(series) - 1
    return float(np.mean(series[T // 2:]))


def front_velocity(positions, distribution, T, v_min=FRONT_MIN_VELOCITY):
    """Position of the largest P(x, T) with x > v_min T, divided by T."""
    mask = positions > v_min * T
    if not mask.any() or T == 0:
        return 0.0
    p = np.where(mask, distribution, -1.0)
    x = positions[int(np.argmax(p))]
    return float(x / T) if p.max() > 0 else 0.0


def simulate(C, initial="mixed", T=1000, half_width=None) -> SimulationSummary:
    """Evolve from the origin for T steps.

    ``initial`` is a unit coin vector, one of ``"L"``, ``"S"``, ``"R"``, or
    ``"mixed"``; the mixed start averages the probabilities of the three
    basis runs.
    """
    if T < 16:
        raise ValueError("T must be at least 16")
    starts = ["L", "S", "R"] if isinstance(initial, str) and initial == "mixed" else [initial]
    series = 0
    comps = 0
    for s in starts:
        state, ser = evolve(C, s, T, half_width)
        series = series + ser
        comps = comps + np.abs(state.amplitudes) ** 2
    series = series / len(starts)
    comps = comps / len(starts)
    dist = comps.sum(axis=0)
    pos = state.positions
    return SimulationSummary(
        origin_series=series,
        tail_average_trapping=tail_average(series),
        front_velocity_estimate=front_velocity(pos, dist, T),
        final_distribution=dist,
        final_components=comps,
        positions=pos,
    )


def _local_maxima(y):
    inner = (y[1:-1] >= y[:-2]) & (y[1:-1] > y[2:])
    return np.flatnonzero(inner) + 1


def decay_exponent(origin_series, p_infinity=0.0, floor=1e-14):
    """Log-log slope of the upper envelope of |P(0, t) - P_inf| over t in [T/4, T].

    The envelope is the set of local maxima of the residual, which skips
    the zero crossings of the oscillating cross terms.
    """
    y = np.abs(np.asarray(origin_series, dtype=float) - p_infinity)
    if len(y) < MIN_FIT_LENGTH:
        raise InsufficientSignal(f"need at least {MIN_FIT_LENGTH} samples, got {len(y)}")
    T = len(y) - 1
    t = np.arange(len(y))
    window = slice(max(T // 4, 1), T + 1)
    tw, yw = t[window], y[window]
    if np.max(yw) < floor:
        raise InsufficientSignal("residual vanishes; nothing to fit")
    idx = _local_maxima(yw)
    idx = idx[yw[idx] > floor]
    if len(idx) < 8:
        # monotone residual: fit all points above the floor
        idx = np.flatnonzero(yw > floor)
    if len(idx) < 2:
        raise InsufficientSignal("too few points above the noise floor")
    slope, _ = np.polyfit(np.log(tw[idx]), np.log(yw[idx]), 1)
    return float(slope)

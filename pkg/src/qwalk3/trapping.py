"""
Asymptotic trapping at the origin for the two localizing coin families.

The stationary state of either family is a single harmonic,
v(k) = p + q e^{ik}, so its squared norm is n(k) = a - 2 b cos(k - c) and
every overlap integral reduces to I_n = int e^{ink} / n(k) dk / 2pi for
n in {-1, 0, 1}. The limiting amplitude of coin component m for a walker
started in coin state j is

    psi^j_m = I0 (conj(p_j) p_m + conj(q_j) q_m) + I1 conj(p_j) q_m + I_{-1} conj(q_j) p_m,

and the trapping probability for the maximally mixed start is the mean of
the three squared norms. Every closed form here is checked against
Gauss-Legendre quadrature of its defining integral.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .coins import C1Params, C2Params, classify_coin, matrix_of
from .errors import ClosedFormMismatch, DomainError, NonConvergence, PoleOnContour
from .spectrum import evolution_at_k

POLE_TOL = 1e-12
QUAD_TOL = 1e-12
MISMATCH_TOL = 1e-8
GL_NODES = 16
MAX_PANELS = 1 << 14

FamilyParams = Union[C1Params, C2Params]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_NODES)


# --- quadrature -------------------------------------------------------------

def _gauss_legendre(f, a, b, panels):
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    x = (mid[:, None] + half[:, None] * _GL_X).ravel()
    w = (half[:, None] * _GL_W).ravel()
    fx = f(x)
    return np.tensordot(w, fx, axes=(0, 0))


def periodic_average(f, tol=QUAD_TOL, max_panels=MAX_PANELS):
    """int_{-pi}^{pi} f(k) dk / 2pi by composite Gauss-Legendre with panel doubling.

    ``f`` maps an array of k of shape (n,) to values of shape (n, ...). The
    panel count doubles until two successive estimates agree to ``tol``.
    """
    panels = 2
    prev = _gauss_legendre(f, -np.pi, np.pi, panels) / (2 * np.pi)
    while panels < max_panels:
        panels *= 2
        cur = _gauss_legendre(f, -np.pi, np.pi, panels) / (2 * np.pi)
        if np.max(np.abs(cur - prev)) < tol:
            return cur
        prev = cur
    raise NonConvergence(f"quadrature did not settle below {tol:g} with {max_panels} panels")


# --- stationary state -------------------------------------------------------

def stationary_components(params: FamilyParams):
    """Vectors (p, q) with v(k) = p + q e^{ik}, indexed (L, S, R)."""
    e = lambda x: np.exp(1j * x)  # noqa: E731
    if isinstance(params, C1Params):
        s, c = math.sin(params.theta13 / 2), math.cos(params.theta13 / 2)
        s23, c23 = math.sin(params.theta23), math.cos(params.theta23)
        g2, g4, g5 = params.gamma2, params.gamma4, params.gamma5
        p = np.array([-e(-g5) * (s + c) * s23, e(g4 - g5) * (s + c) * c23, 0.0])
        q = np.array([0.0, e(-(g2 + g5)) * (s - c), -(s + c) * s23 + 0j])
        return p, q
    if isinstance(params, C2Params):
        params.check()
        sd = math.sin(params.delta)
        s23, c23 = math.sin(params.theta23), math.cos(params.theta23)
        g1, g2, g4, g5 = params.gamma1, params.gamma2, params.gamma4, params.gamma5
        r = signed_root(params)
        p = np.array([e(g2 + g4) * sd * s23, -e(g1 + g4) * sd * c23, 0.0])
        q = np.array([0.0, e(g4) * r, e(g1 + g5) * sd * s23])
        return p, q
    raise TypeError(f"expected C1Params or C2Params, got {type(params).__name__}")


def signed_root(params: C2Params):
    """B sin(delta + kappa): sqrt(sin delta sin(delta + 2 kappa)) carrying the sign of sin(delta + kappa)."""
    return params.B * math.sin(params.delta + params.kappa)


def constant_eigenvalue(params: FamilyParams):
    """The k-independent eigenvalue exp(i phi) of the family's walk operator."""
    if isinstance(params, C1Params):
        return 1.0 + 0j
    return complex(np.exp(1j * params.kappa))


def stationary_state(params: FamilyParams, k):
    """Non-normalized eigenvector v(k) for the constant eigenvalue; shape (..., 3)."""
    p, q = stationary_components(params)
    k = np.asarray(k, dtype=float)
    return p + q * np.exp(1j * k)[..., None]


# --- norm and residue integrals ---------------------------------------------

@dataclass(frozen=True)
class NormFactors:
    """n(k) = |v(k)|^2 = a - 2 b cos(k - c)."""

    a: float
    b: float
    c: float

    def __call__(self, k):
        return self.a - 2 * self.b * np.cos(np.asarray(k) - self.c)


def norm_factors(params: FamilyParams) -> NormFactors:
    if isinstance(params, C1Params):
        s13, c13 = math.sin(params.theta13), math.cos(params.theta13)
        s23, c23 = math.sin(params.theta23), math.cos(params.theta23)
        return NormFactors(a=2 + (1 + s13) * s23**2, b=c13 * c23, c=params.gamma2 + params.gamma4)
    params.check()
    sd, s2 = math.sin(params.delta), math.sin(params.delta + 2 * params.kappa)
    s23, c23 = math.sin(params.theta23), math.cos(params.theta23)
    return NormFactors(a=sd * (sd * (1 + s23**2) + s2), b=sd * c23 * signed_root(params), c=params.gamma1)


@dataclass(frozen=True)
class ResidueIntegrals:
    """I_n = int e^{ink} / n(k) dk / 2pi for n = 0, 1; I_{-1} = conj(I1).

    ``I1_signed`` is I1 exp(-ic): real, carrying the sign of b.
    """

    I0: float
    I1: complex
    I1_signed: float

    @property
    def Im1(self):
        return complex(np.conj(self.I1))


def residue_integrals(nf: NormFactors) -> ResidueIntegrals:
    """Closed forms from the single pole of 1/n(k) inside the unit circle."""
    a, b = nf.a, nf.b
    if a <= 2 * abs(b) + POLE_TOL:
        raise PoleOnContour(f"a={a:.6g} <= 2|b|={2 * abs(b):.6g}: the stationary norm vanishes on the circle")
    x = 4 * b * b / (a * a)
    I0 = 1 / (a * math.sqrt(1 - x))
    # (a I0 - 1) / (2b) with a I0 - 1 = (1 - x)^{-1/2} - 1 computed without cancellation
    signed = 0.0 if b == 0 else math.expm1(-0.5 * math.log1p(-x)) / (2 * b)
    return ResidueIntegrals(I0, complex(signed * np.exp(1j * nf.c)), signed)


def residue_integrals_quadrature(nf: NormFactors, tol=QUAD_TOL):
    """(I_{-1}, I0, I1) by quadrature; the oracle for :func:`residue_integrals`."""
    def f(k):
        n = nf(k)
        return np.stack([np.exp(-1j * k) / n, 1 / n + 0j, np.exp(1j * k) / n], axis=-1)

    return tuple(complex(z) for z in periodic_average(f, tol))


# --- limiting amplitudes ----------------------------------------------------

def amplitude_matrix(p, q, ri: ResidueIntegrals):
    """Psi[j, m] = psi^j_m assembled from the stationary-state harmonics."""
    pc, qc = np.conj(p), np.conj(q)
    return (ri.I0 * (np.outer(pc, p) + np.outer(qc, q))
            + ri.I1 * np.outer(pc, q) + ri.Im1 * np.outer(qc, p))


def amplitude_matrix_quadrature(params: FamilyParams, tol=QUAD_TOL):
    """Psi[j, m] = int conj(v_j(k)) v_m(k) / |v(k)|^2 dk / 2pi by direct quadrature."""
    def f(k):
        v = stationary_state(params, k)
        n = np.sum(np.abs(v) ** 2, axis=-1)
        return np.conj(v)[:, :, None] * v[:, None, :] / n[:, None, None]

    return periodic_average(f, tol)


def mixed_trapping(psi):
    """Origin probability for the maximally mixed start: mean squared norm of the rows."""
    return float(np.sum(np.abs(psi) ** 2) / 3)


def p_infinity_closed_form(params: FamilyParams, ri: ResidueIntegrals = None):
    """Family formula for the mixed-start trapping probability.

    Written in terms of I0 and the real, signed J = I1 exp(-ic); the
    gamma phases drop out entirely (first family) or enter only through
    kappa (second family).
    """
    ri = ri or residue_integrals(norm_factors(params))
    I0, J = ri.I0, ri.I1_signed
    if isinstance(params, C1Params):
        s13, c13 = math.sin(params.theta13), math.cos(params.theta13)
        s23, c23 = math.sin(params.theta23), math.cos(params.theta23)
        return (I0**2 / 3 * (1 + c23**4 + 0.5 * (2 + s23**2) ** 2 + (s13**2 + 2 * s13 - 0.5) * s23**4)
                - 4 / 3 * I0 * J * c13 * c23 * (1 + c23**2 + (2 + s13) * s23**2)
                - 4 / 3 * J**2 * (1 + s13) * (c23**2 * s13 - 1))
    sd, s2 = math.sin(params.delta), math.sin(params.delta + 2 * params.kappa)
    s23, c23 = math.sin(params.theta23), math.cos(params.theta23)
    r = signed_root(params)
    u = c23**2 * sd + s2
    return (I0**2 / 3 * sd**2 * (u**2 + 2 * sd**2 * s23**4 + 2 * sd * s23**2 * u)
            + 2 / 3 * J**2 * sd**3 * (sd * s23**2 + (1 + c23**2) * s2)
            - 4 / 3 * I0 * J * c23 * sd**2 * ((1 + s23**2) * sd + s2) * r)


@dataclass(frozen=True)
class TrappingResult:
    psi_L: np.ndarray
    psi_S: np.ndarray
    psi_R: np.ndarray
    P_infinity: float
    P_quadrature: float = float("nan")
    max_amplitude_error: float = float("nan")

    @property
    def psi(self):
        return np.vstack([self.psi_L, self.psi_S, self.psi_R])


def limiting_amplitudes(params: FamilyParams, check=True, tol=MISMATCH_TOL) -> TrappingResult:
    """Limiting amplitudes and mixed-start trapping probability of a family coin.

    With ``check`` the closed forms are compared against quadrature of the
    defining integrals and ClosedFormMismatch is raised above ``tol``.
    """
    p, q = stationary_components(params)
    ri = residue_integrals(norm_factors(params))
    psi = amplitude_matrix(p, q, ri)
    P = float(p_infinity_closed_form(params, ri))
    P_quad, err = float("nan"), float("nan")
    if check:
        psi_q = amplitude_matrix_quadrature(params)
        P_quad = mixed_trapping(psi_q)
        err = float(np.max(np.abs(psi - psi_q)))
        if err > tol or abs(P - P_quad) > tol:
            raise ClosedFormMismatch(
                f"closed form disagrees with quadrature (amplitudes {err:.3e}, P {abs(P - P_quad):.3e})",
                closed_form=P, quadrature=P_quad,
            )
    return TrappingResult(psi[0], psi[1], psi[2], P, P_quad, err)


# --- arbitrary localizing coins ---------------------------------------------

def _null_vectors(A):
    """Unit null vectors of a stack of rank-2 3x3 matrices (largest row-pair cross product)."""
    crosses = np.stack([np.cross(A[:, 0], A[:, 1]), np.cross(A[:, 0], A[:, 2]), np.cross(A[:, 1], A[:, 2])], axis=1)
    norms = np.linalg.norm(crosses, axis=-1)
    best = np.argmax(norms, axis=1)
    v = crosses[np.arange(len(A)), best]
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def coin_amplitude_matrix(C, tol=QUAD_TOL):
    """Psi for any coin with exactly one k-independent eigenvalue.

    Integrates the projector onto the constant-eigenvalue eigenvector of the
    walk operator over the Brillouin zone; the projector is insensitive to
    eigenvector phases, so no family parametrization is needed.
    """
    cls = classify_coin(C)
    if not cls.coin_class.localizing:
        return np.zeros((3, 3), dtype=complex)
    M = matrix_of(C)
    if abs(M[0, 0]) <= 1e-10 and abs(M[2, 2]) <= 1e-10:
        raise DomainError("coin has a purely point spectrum; the origin probability does not settle")
    lam0 = cls.constant_eigenvalue

    def f(k):
        U = evolution_at_k(M, k)
        u = _null_vectors(U - lam0 * np.eye(3))
        return np.conj(u)[:, :, None] * u[:, None, :]

    return periodic_average(f, tol)


def coin_trapping(C):
    """Mixed-start trapping probability of an arbitrary coin (0 without point spectrum)."""
    return mixed_trapping(coin_amplitude_matrix(C))


def eigenvector_residual(params: FamilyParams, k):
    """max over k of |U(k) v - e^{i phi} v| / |v|."""
    from .coins import build_c1, build_c2

    C = build_c1(params) if isinstance(params, C1Params) else build_c2(params)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    v = stationary_state(params, k)
    Uv = np.einsum("kij,kj->ki", evolution_at_k(C, k), v)
    res = np.linalg.norm(Uv - constant_eigenvalue(params) * v, axis=-1) / np.linalg.norm(v, axis=-1)
    return float(np.max(res))


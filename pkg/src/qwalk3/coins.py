"""
Coin operators for three-state walks on a line.

Covers the nine-angle parametrization of U(3), the two complete families
of coins whose walks keep a k-independent eigenvalue, and an analytic
classifier that sorts an arbitrary unitary coin into the no-point-spectrum
case, the trivial branches, or one of the two localizing classes.
"""

import enum
import math
from dataclasses import asdict, dataclass, fields
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import InconsistentCoin, InvalidC2Params, NotUnitary

CLASSIFY_TOL = 1e-10
C2_SINGULAR_TOL = 1e-14


def wrap_angle(x):
    """Map an angle to (-pi, pi]."""
    return math.pi - (math.pi - float(x)) % (2 * math.pi)


class _Angles:
    """Mixin for frozen dataclasses of angles: normalize on construction."""

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            if not math.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value}")
            object.__setattr__(self, f.name, wrap_angle(value))

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class CoinParams(_Angles):
    """Mixing angles, CP-like phase and five free phases of a U(3) coin."""

    theta12: float = 0.0
    theta13: float = 0.0
    theta23: float = 0.0
    delta: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    gamma3: float = 0.0
    gamma4: float = 0.0
    gamma5: float = 0.0


@dataclass(frozen=True)
class C1Params(_Angles):
    gamma2: float = 0.0
    gamma4: float = 0.0
    gamma5: float = 0.0
    theta13: float = 0.0
    theta23: float = 0.0


@dataclass(frozen=True)
class C2Params(_Angles):
    """Parameters of the second localizing family.

    Only defined where ``|sin(kappa)| <= |sin(delta + kappa)|``; see
    :meth:`check`.
    """

    gamma1: float = 0.0
    gamma2: float = 0.0
    gamma4: float = 0.0
    gamma5: float = 0.0
    delta: float = 0.0
    theta23: float = 0.0

    @property
    def kappa(self):
        return self.gamma2 + self.gamma4 - self.gamma1

    @property
    def A(self):
        return 1.0 / math.sin(self.delta + self.kappa)

    @property
    def s13(self):
        return -math.sin(self.kappa) * self.A

    @property
    def root(self):
        """sqrt(sin(delta) sin(delta + 2 kappa)), clipped at zero."""
        k, d = self.kappa, self.delta
        # sin d sin(d+2k) = sin^2(d+k) - sin^2 k; the second form is exact at the boundary
        return math.sqrt(max(0.0, math.sin(d + k) ** 2 - math.sin(k) ** 2))

    @property
    def B(self):
        return abs(self.A) * self.root

    def is_valid(self):
        sdk = math.sin(self.delta + self.kappa)
        return abs(sdk) > C2_SINGULAR_TOL and abs(math.sin(self.kappa)) <= abs(sdk)

    def check(self):
        if not self.is_valid():
            raise InvalidC2Params(
                f"need |sin kappa| <= |sin(delta+kappa)| != 0; got kappa={self.kappa:.6g}, delta={self.delta:.6g}"
            )
        return self

    @classmethod
    def from_kappa(cls, kappa, delta, theta23, gamma1=0.0, gamma4=0.0, gamma5=0.0):
        """Pick gamma2 so that gamma2 + gamma4 - gamma1 equals ``kappa``."""
        return cls(gamma1=gamma1, gamma2=kappa + gamma1 - gamma4, gamma4=gamma4, gamma5=gamma5,
                   delta=delta, theta23=theta23)


@dataclass(frozen=True)
class UnitaryCoin:
    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix).copy()
        if m.ndim != 2:
            raise ValueError("coin must be a single 3x3 matrix")
        if not linalg.is_unitary(m, linalg.UNITARY_TOL):
            raise NotUnitary("coin matrix is not unitary within 1e-12")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def det(self):
        return complex(linalg.det3(self.matrix))


def matrix_of(C):
    if isinstance(C, UnitaryCoin):
        return C.matrix
    return linalg.as_matrix(C)


class CoinClass(enum.Enum):
    NO_POINT_SPECTRUM = "NoPointSpectrum"
    PURE_POINT_THETA13 = "PurePoint_Theta13"
    PURE_POINT_THETA12_THETA23 = "PurePoint_Theta12Theta23"
    DECOUPLED = "Decoupled"
    CLASS1 = "Class1"
    CLASS2 = "Class2"

    @property
    def localizing(self):
        return self is not CoinClass.NO_POINT_SPECTRUM


@dataclass(frozen=True)
class Classification:
    """Verdict of :func:`classify_coin`.

    ``gauge_phase`` is the global phase beta with exp(i beta) C in the
    normalized form (constant eigenvalue exp(i det_phase), the other two a
    conjugate pair); ``det_phase`` refers to that normalized coin.
    ``also_class2`` marks first-class coins that sit on the kappa = 0 slice of
    the second family.
    """

    coin_class: CoinClass
    det_phase: float
    gauge_phase: float = 0.0
    also_class2: bool = False
    residual: float = 0.0

    @property
    def constant_eigenvalue(self):
        """k-independent eigenvalue of the original (un-normalized) coin."""
        if self.coin_class in (CoinClass.NO_POINT_SPECTRUM,):
            return None
        return complex(np.exp(1j * (self.det_phase - self.gauge_phase)))


class DispersionData(NamedTuple):
    rho: float
    gamma: float
    mu: float
    phi: float


# --- constructors -----------------------------------------------------------

def build_unitary(p: CoinParams) -> UnitaryCoin:
    c12, s12 = math.cos(p.theta12), math.sin(p.theta12)
    c13, s13 = math.cos(p.theta13), math.sin(p.theta13)
    c23, s23 = math.cos(p.theta23), math.sin(p.theta23)
    g1, g2, g3, g4, g5 = p.gamma1, p.gamma2, p.gamma3, p.gamma4, p.gamma5
    ed = np.exp(1j * p.delta)
    e = lambda x: np.exp(1j * x)  # noqa: E731
    m = np.array([
        [e(g1) * c12 * c13,
         e(g2) * c13 * s12,
         e(-(p.delta - g3)) * s13],
        [-e(g4) * (c23 * s12 + ed * c12 * s13 * s23),
         e(-(g1 - g2 - g4)) * (c12 * c23 - ed * s12 * s13 * s23),
         e(-(g1 - g3 - g4)) * c13 * s23],
        [e(g5) * (s12 * s23 - ed * c12 * c23 * s13),
         -e(-(g1 - g2 - g5)) * (c12 * s23 + ed * c23 * s12 * s13),
         e(-(g1 - g3 - g5)) * c13 * c23],
    ])
    return UnitaryCoin(m)


def build_c1(p: C1Params) -> UnitaryCoin:
    c13, s13 = math.cos(p.theta13), math.sin(p.theta13)
    c23, s23 = math.cos(p.theta23), math.sin(p.theta23)
    g2, g4, g5 = p.gamma2, p.gamma4, p.gamma5
    e = lambda x: np.exp(1j * x)  # noqa: E731
    m = np.array([
        [e(g2 + g4) * c13 * c23, e(g2) * c13 * s23, e(-g5) * s13],
        [-e(g4) * c23 * (1 + s13) * s23, c23**2 - s13 * s23**2, e(-(g2 + g5)) * c13 * s23],
        [e(g5) * (s23**2 - c23**2 * s13), -e(-(g4 - g5)) * c23 * (1 + s13) * s23, e(-(g2 + g4)) * c13 * c23],
    ])
    return UnitaryCoin(m)


def build_c2(p: C2Params) -> UnitaryCoin:
    p.check()
    c23, s23 = math.cos(p.theta23), math.sin(p.theta23)
    g1, g2, g4, g5 = p.gamma1, p.gamma2, p.gamma4, p.gamma5
    d, k = p.delta, p.kappa
    A, B = p.A, p.B
    Ask = A * math.sin(k)
    e = lambda x: np.exp(1j * x)  # noqa: E731
    m = np.array([
        [e(g1) * c23 * B, e(g2) * B * s23, -e(-(d + g5)) * Ask],
        [-e(g1 - g2) * A * s23 * c23 * math.sin(d),
         e(k) * (c23**2 + e(d) * Ask * s23**2),
         e(-(g1 - g4 + g5)) * B * s23],
        [e(g5) * (s23**2 + e(d) * c23**2 * Ask),
         -e(-(g4 - g5)) * A * s23 * c23 * math.sin(d),
         e(-g1) * c23 * B],
    ])
    return UnitaryCoin(m)


def c_rho(rho):
    """One-parameter eigenvector deformation of the Grover coin."""
    r2 = rho * rho
    off = rho * math.sqrt(2 - 2 * r2)
    return UnitaryCoin(np.array([[-r2, off, 1 - r2], [off, -1 + 2 * r2, off], [1 - r2, off, -r2]], dtype=complex))


def c_rho_params(rho):
    """C1 angles that reproduce :func:`c_rho`."""
    return C1Params(theta13=math.asin(1 - rho * rho), theta23=math.acos(-rho / math.sqrt(2 - rho * rho)))


def c_phi(phi):
    """One-parameter eigenvalue deformation of the Grover coin."""
    c, s = math.cos(phi), math.sin(phi)
    return UnitaryCoin(np.array([
        [-c / 3, 2 * c / 3, 2 * c / 3 - 1j * s],
        [2 * c / 3, -c / 3 - 1j * s, 2 * c / 3],
        [2 * c / 3 - 1j * s, 2 * c / 3, -c / 3],
    ]))


def c_phi_params(phi):
    """C2 angles that reproduce :func:`c_phi` exactly.

    Valid for 0 < |phi| < pi/2: the family's C_LL = -cos(theta23) B with B >= 0
    cannot reach the sign of -cos(phi)/3 beyond that range, and phi = 0
    (the Grover coin) is only a limit of the family.
    """
    if not 0 < abs(phi) < math.pi / 2:
        raise ValueError("c_phi_params needs 0 < |phi| < pi/2")
    # arccot on (0, pi)
    x = 2 / (3 * math.tan(phi))
    arccot = math.pi / 2 - math.atan(x)
    return C2Params(gamma1=math.pi, gamma2=math.pi, gamma4=-phi, gamma5=-phi,
                    delta=phi + arccot, theta23=-math.atan(2))


def grover():
    return UnitaryCoin(np.array([[-1, 2, 2], [2, -1, 2], [2, 2, -1]], dtype=complex) / 3)


def grover_params():
    return C1Params(theta13=math.asin(2 / 3), theta23=math.acos(-1 / math.sqrt(5)))


def dft3():
    w = np.exp(2j * np.pi / 3)
    return UnitaryCoin(np.array([[1, 1, 1], [1, w, w * w], [1, w * w, w]]) / math.sqrt(3))


def identity():
    return UnitaryCoin(np.eye(3, dtype=complex))


# --- random draws -----------------------------------------------------------

def random_coin_params(rng) -> CoinParams:
    return CoinParams(*rng.uniform(-math.pi, math.pi, size=9))


def random_unitary(rng) -> UnitaryCoin:
    """Haar-distributed U(3) coin (QR of a complex Gaussian with the phase fix)."""
    z = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return UnitaryCoin(q * (d / np.abs(d)))


def random_c1_params(rng) -> C1Params:
    return C1Params(*rng.uniform(-math.pi, math.pi, size=5))


def random_c2_params(rng, margin=0.05) -> C2Params:
    """Valid second-family parameters kept ``margin`` away from the boundary.

    The margin also keeps sin(delta) away from zero, where the stationary
    state shrinks to nothing.
    """
    while True:
        g1, g2, g4, g5, d, t23 = rng.uniform(-math.pi, math.pi, size=6)
        p = C2Params(g1, g2, g4, g5, d, t23)
        if abs(math.sin(p.delta + p.kappa)) - abs(math.sin(p.kappa)) > margin and abs(math.sin(p.delta)) > margin:
            return p


# --- analysis ---------------------------------------------------------------

def compute_minors(C):
    """(m_L, m_S, m_R): principal 2x2 minors of the coin."""
    return tuple(complex(m) for m in linalg.principal_minors(matrix_of(C)))


def point_spectrum_residual(N):
    """Largest violation of the point-spectrum conditions for a normalized coin N."""
    N = linalg.as_matrix(N)
    eph = complex(linalg.det3(N))
    ephc = 1 / eph
    LL, LS, LR = N[0]
    SL, SS, SR = N[1]
    RL, RS, RR = N[2]
    r11 = LL - ephc * (LL * SS - LS * SL)
    r33 = RR - ephc * (RR * SS - SR * RS)
    r33c = RR - np.conj(LL)
    r22 = (SS - eph) - ephc * (LL * RR - LR * RL - 1)
    mu_im = ((eph - SS) / 2).imag
    return float(max(abs(r11), abs(r33), abs(r33c), abs(r22), abs(mu_im)))


def _gauge(M, tol):
    """Global phase beta in (-pi/2, pi/2] making C_LL = conj(C_RR), or None."""
    LL, RR = M[0, 0], M[2, 2]
    if abs(abs(LL) - abs(RR)) > tol:
        return None
    z = np.conj(RR) / LL
    beta = float(np.angle(z)) / 2
    if beta <= -math.pi / 2:
        beta += math.pi
    return beta


def classify_coin(C, tol=CLASSIFY_TOL) -> Classification:
    """Sort a unitary coin by whether its walk has a k-independent eigenvalue.

    The conditions are tested on the coin multiplied by the unique global
    phase (up to sign) that makes C_LL and C_RR conjugate, so coins that
    differ only by a global phase get the same verdict. Among localizing
    coins: vanishing C_LL = C_RR gives the purely point branches, a
    decoupled S state the decoupled branch, and otherwise the determinant
    phase of the normalized coin separates the first family (det = +-1)
    from the second.
    """
    M = matrix_of(C)
    if not linalg.is_unitary(M, tol):
        raise NotUnitary(f"coin is not unitary within {tol:g}")
    if abs(M[0, 0]) <= tol and abs(M[2, 2]) <= tol:
        kind = (CoinClass.PURE_POINT_THETA13 if abs(abs(M[0, 2]) - 1) <= tol
                else CoinClass.PURE_POINT_THETA12_THETA23)
        return Classification(kind, float(np.angle(linalg.det3(M))))
    beta = _gauge(M, tol)
    if beta is None:
        return Classification(CoinClass.NO_POINT_SPECTRUM, float(np.angle(linalg.det3(M))))
    N = np.exp(1j * beta) * M
    res = point_spectrum_residual(N)
    phi = float(np.angle(linalg.det3(N)))
    if res > tol:
        return Classification(CoinClass.NO_POINT_SPECTRUM, phi, beta, residual=res)
    if abs(abs(N[1, 1]) - 1) <= tol:
        return Classification(CoinClass.DECOUPLED, phi, beta, residual=res)
    if abs(math.sin(phi)) <= tol:
        return Classification(CoinClass.CLASS1, phi, beta, also_class2=bool(abs(N[0, 2]) <= tol), residual=res)
    return Classification(CoinClass.CLASS2, phi, beta, residual=res)


def normalized_matrix(C, classification=None):
    """exp(i beta) C for the classifier's gauge phase beta (the stored coin is untouched)."""
    cls = classification or classify_coin(C)
    return np.exp(1j * cls.gauge_phase) * matrix_of(C)


def extract_dispersion_params(C, classification=None, tol=CLASSIFY_TOL) -> DispersionData:
    """(rho, gamma, mu, phi) of cos(omega) = rho cos(k - gamma) - mu."""
    cls = classification or classify_coin(C, tol)
    if not cls.coin_class.localizing:
        raise InconsistentCoin("coin has no point spectrum; dispersion parameters are undefined")
    N = normalized_matrix(C, cls)
    if abs(N[0, 0] - np.conj(N[2, 2])) > tol:
        raise InconsistentCoin("C_LL != conj(C_RR) after normalization")
    eph = complex(linalg.det3(N))
    mu = (eph - N[1, 1]) / 2
    if abs(mu.imag) > tol:
        raise InconsistentCoin(f"mu has imaginary part {mu.imag:.3e}")
    rho = float(abs(N[0, 0]))
    gamma = float(np.angle(N[0, 0]))
    if rho <= tol:
        rho, gamma = 0.0, 0.0
    return DispersionData(rho=rho, gamma=gamma, mu=float(mu.real), phi=float(np.angle(eph)))


# --- JSON coin files --------------------------------------------------------

_FAMILIES = {"general": (CoinParams, build_unitary), "c1": (C1Params, build_c1), "c2": (C2Params, build_c2)}


def coin_to_json(C):
    M = matrix_of(C)
    return {"matrix": [[[float(z.real), float(z.imag)] for z in row] for row in M]}


def params_from_dict(family, params):
    cls = _FAMILIES[family][0]
    known = {f.name for f in fields(cls)}
    unknown = set(params) - known
    if unknown:
        raise ValueError(f"unknown parameters for family {family!r}: {sorted(unknown)}")
    return cls(**{k: float(v) for k, v in params.items()})


def coin_from_json(obj):
    """Read either ``{"matrix": ...}`` or ``{"class": ..., "params": ...}``."""
    if not isinstance(obj, dict):
        raise ValueError("coin JSON must be an object")
    if "matrix" in obj:
        rows = obj["matrix"]
        m = np.array([[complex(re, im) for re, im in row] for row in rows])
        if m.shape != (3, 3):
            raise ValueError(f"matrix must be 3x3, got {m.shape}")
        return m
    if "class" in obj:
        family = obj["class"]
        if family not in _FAMILIES:
            raise ValueError(f"unknown coin class {family!r}")
        p = params_from_dict(family, obj.get("params", {}))
        return _FAMILIES[family][1](p).matrix
    raise ValueError('coin JSON needs a "matrix" or a "class" key')

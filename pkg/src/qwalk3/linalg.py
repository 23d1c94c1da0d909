"""
Small dense complex linear algebra for 3-vectors and 3x3 matrices.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``,
indexed in the coin order (L, S, R). Eigenvalues come from the cubic
characteristic polynomial (Cardano) followed by Newton polishing; the
eigenvalue routine is vectorized over leading axes so that whole
Brillouin-zone grids can be diagonalized in one call.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEigenvector, NonConvergence

RESIDUAL_TOL = 1e-10
UNITARY_TOL = 1e-12
POLISH_TOL = 1e-13
MAX_POLISH_ITER = 100

_OMEGA3 = np.exp(2j * np.pi / 3)


@dataclass(frozen=True)
class EigenSystem:
    """Eigenpairs of a 3x3 matrix.

    ``eigenvectors[:, j]`` is the unit-norm eigenvector for ``eigenvalues[j]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def residuals(self, M):
        M = np.asarray(M, dtype=complex)
        return np.linalg.norm(M @ self.eigenvectors - self.eigenvectors * self.eigenvalues, axis=0)


def as_matrix(M):
    M = np.asarray(M, dtype=complex)
    if M.shape[-2:] != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {M.shape}")
    return M


def diag3(a, b, c):
    return np.diag(np.array([a, b, c], dtype=complex))


def mat_mul(A, B):
    return as_matrix(A) @ as_matrix(B)


def is_unitary(M, tol=UNITARY_TOL):
    """True iff every entry of M^dagger M - I is at most ``tol`` in modulus."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = as_matrix(M)
    dev = M.conj().swapaxes(-1, -2) @ M - np.eye(3)
    return bool(np.max(np.abs(dev)) <= tol)


def det3(M):
    M = as_matrix(M)
    return (
        M[..., 0, 0] * (M[..., 1, 1] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 1])
        - M[..., 0, 1] * (M[..., 1, 0] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 0])
        + M[..., 0, 2] * (M[..., 1, 0] * M[..., 2, 1] - M[..., 1, 1] * M[..., 2, 0])
    )


def principal_minors(M):
    """The 2x2 principal minors obtained by deleting row/column L, S, R."""
    M = as_matrix(M)
    m_L = M[..., 1, 1] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 1]
    m_S = M[..., 0, 0] * M[..., 2, 2] - M[..., 0, 2] * M[..., 2, 0]
    m_R = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    return m_L, m_S, m_R


def char_poly(M):
    """Coefficients (a, b, c) of det(lambda I - M) = lambda^3 - a lambda^2 + b lambda - c."""
    M = as_matrix(M)
    a = np.trace(M, axis1=-2, axis2=-1)
    m_L, m_S, m_R = principal_minors(M)
    return a, m_L + m_S + m_R, det3(M)


def _cardano(a, b, c):
    # depressed cubic t^3 + p t + q with lambda = t + a/3
    shift = a / 3
    p = b - a * a / 3
    q = -2 * a**3 / 27 + a * b / 3 - c
    disc = np.sqrt(q * q / 4 + p**3 / 27)
    w1 = -q / 2 + disc
    w2 = -q / 2 - disc
    w = np.where(np.abs(w1) >= np.abs(w2), w1, w2)
    u = np.power(w, 1 / 3)
    roots = []
    for j in range(3):
        uj = u * _OMEGA3**j
        safe = np.where(uj == 0, 1.0, uj)
        t = np.where(uj == 0, 0.0, uj - p / (3 * safe))
        roots.append(t + shift)
    return np.stack(roots, axis=-1)


def eigenvalues(M, tol=POLISH_TOL, max_iter=MAX_POLISH_ITER):
    """Eigenvalues of one or a stack of 3x3 matrices, shape ``(..., 3)``.

    Roots of the characteristic cubic, polished by Newton steps until
    ``|p(lambda)| < tol``. Steps that do not decrease ``|p|`` are rejected,
    which keeps clustered roots from jumping onto a neighbour.
    """
    a, b, c = (np.asarray(x) for x in char_poly(M))
    lam = _cardano(a, b, c)
    a, b, c = a[..., None], b[..., None], c[..., None]

    def poly(x):
        return ((x - a) * x + b) * x - c

    val = poly(lam)
    for _ in range(max_iter):
        todo = np.abs(val) >= tol
        if not todo.any():
            break
        dp = (3 * lam - 2 * a) * lam + b
        ok = todo & (np.abs(dp) > 1e-300)
        step = np.where(ok, val / np.where(ok, dp, 1.0), 0.0)
        trial = lam - step
        tval = poly(trial)
        better = ok & (np.abs(tval) < np.abs(val))
        if not better.any():
            break
        lam = np.where(better, trial, lam)
        val = np.where(better, tval, val)
    if np.any(np.abs(val) >= tol):
        worst = float(np.max(np.abs(val)))
        raise NonConvergence(f"characteristic polynomial residual {worst:.3e} after polishing")
    return lam


def _unit(v):
    return v / np.linalg.norm(v)


def _complement_basis(u):
    """Orthonormal pair spanning the Hermitian complement of unit vector u."""
    k = int(np.argmin(np.abs(u)))
    e = np.zeros(3, dtype=complex)
    e[k] = 1.0
    w1 = _unit(e - u * np.conj(u[k]))
    w2 = _unit(np.conj(np.cross(u, w1)))
    return np.column_stack([w1, w2])


def _null_vector(A):
    """Null vector of a 3x3 matrix of rank <= 2.

    Uses the cross product of the most independent row pair; rank-deficient
    input falls back to the complement of the dominant row.
    """
    rows = A
    pairs = [(0, 1), (0, 2), (1, 2)]
    crosses = [np.cross(rows[i], rows[j]) for i, j in pairs]
    norms = [np.linalg.norm(x) for x in crosses]
    best = int(np.argmax(norms))
    row_norms = np.linalg.norm(rows, axis=1)
    scale = float(np.max(row_norms))
    if scale == 0.0:
        return np.array([1.0, 0.0, 0.0], dtype=complex), 3
    if norms[best] > 1e-12 * scale * scale:
        return _unit(crosses[best]), 1
    r = rows[int(np.argmax(row_norms))]
    return _complement_basis(_unit(np.conj(r)))[:, 0], 2


def _eigvecs_2x2(B):
    """Orthonormal eigenvectors of a normal 2x2 matrix (columns)."""
    h = (B[0, 0] - B[1, 1]) / 2
    d = np.sqrt(h * h + B[0, 1] * B[1, 0])
    # pick the sign/form that avoids cancellation in lambda - diagonal
    if abs(h + d) < abs(h - d):
        d = -d
    cand = np.array([h + d, B[1, 0]])
    norm = np.linalg.norm(cand)
    if norm <= 1e-300:
        cand = np.array([B[0, 1], d - h])
        norm = np.linalg.norm(cand)
    w1 = np.array([1.0, 0.0], dtype=complex) if norm <= 1e-300 else cand / norm
    w2 = np.array([-np.conj(w1[1]), np.conj(w1[0])])
    return np.column_stack([w1, w2])


def _eigvecs(M):
    # Work on the traceless part scaled to unit Frobenius norm: for a normal
    # matrix its eigenvalues sum to zero with unit 2-norm, so they cannot
    # all cluster and the cubic is well conditioned up to one close pair,
    # which the 2x2 step below resolves.
    M0 = M - np.trace(M) / 3 * np.eye(3)
    s = np.linalg.norm(M0)
    if s == 0.0:
        return np.eye(3, dtype=complex)
    M0 = M0 / s
    lam = eigenvalues(M0)
    gaps = np.array([min(abs(lam[i] - lam[j]) for j in range(3) if j != i) for i in range(3)])
    i0 = int(np.argmax(gaps))
    v0, nullity = _null_vector(M0 - lam[i0] * np.eye(3))
    if nullity > 1:
        raise DegenerateEigenvector(
            f"isolated eigenvalue {lam[i0]:.6g} (gap {gaps[i0]:.3e}) has a multi-dimensional null space"
        )
    Q = _complement_basis(v0)
    W = Q @ _eigvecs_2x2(Q.conj().T @ M0 @ Q)
    return np.column_stack([v0, W])


def eigensystem(M, tol=POLISH_TOL):
    """Eigenvalues and orthonormal eigenvectors of a unitary 3x3 matrix.

    The most isolated root gets its eigenvector from a null-space cross
    product; the other two are resolved inside its orthogonal complement by
    a 2x2 problem, which covers repeated eigenvalues without a special case
    (normality keeps the complement invariant). Reported eigenvalues are the
    Rayleigh quotients of the final vectors, which agree with the polished
    cubic roots and stay accurate when roots nearly coincide.
    """
    M = as_matrix(M)
    if M.ndim != 2:
        raise ValueError("eigensystem expects a single 3x3 matrix")
    eigenvalues(M, tol=tol)
    vecs = _eigvecs(M)
    lam = np.einsum("ij,ik,kj->j", vecs.conj(), M, vecs)
    order = np.argsort(np.angle(lam), kind="stable")
    return EigenSystem(eigenvalues=lam[order], eigenvectors=vecs[:, order])


def unitary_eigenvalues(M, cluster_tol=1e-4):
    """Eigenvalues of a stack of unitary 3x3 matrices, accurate near coincidences.

    Roots of the cubic lose half their digits where two of them nearly
    coincide; those matrices are redone through :func:`eigensystem`, whose
    Rayleigh quotients stay accurate to rounding there.
    """
    M = as_matrix(M)
    lam = eigenvalues(M)
    flat_M = M.reshape(-1, 3, 3)
    flat = lam.reshape(-1, 3).copy()
    gaps = np.min(np.abs(flat[:, [0, 0, 1]] - flat[:, [1, 2, 2]]), axis=1)
    for i in np.flatnonzero(gaps < cluster_tol):
        flat[i] = eigensystem(flat_M[i]).eigenvalues
    return flat.reshape(lam.shape)

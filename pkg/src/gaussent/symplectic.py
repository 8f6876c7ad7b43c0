"""Symplectic linear algebra on real quadrature covariance matrices.

Vectors of quadratures are stored in the xp-block ordering
``(x_1, ..., x_m, p_1, ..., p_m)`` unless stated otherwise. The mode-wise
ordering ``(x_1, p_1, ..., x_m, p_m)`` is only used for file I/O and for
writing down textbook matrices.
"""

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.stats import unitary_group

from .errors import InvalidInputError, InvalidShapeError

#: Absolute tolerance for structural identities on unit-scale matrices.
ATOL = 1e-10
#: Relative tolerance for identities on larger matrices.
RTOL = 1e-8


class Ordering(enum.Enum):
    """Quadrature ordering convention."""

    XP = "xp"
    MODEWISE = "modewise"


@dataclass(frozen=True)
class WilliamsonDecomposition:
    """Result of ``V = S diag(nu, nu) S^T``.

    Attributes:
        S: Symplectic matrix in xp-block ordering.
        nu: Symplectic eigenvalues in descending order.
    """

    S: np.ndarray
    nu: np.ndarray

    def normal_form(self):
        """Return the diagonal matrix ``diag(nu, nu)``."""
        return np.diag(np.concatenate([self.nu, self.nu]))

    def reconstruct(self):
        return self.S @ self.normal_form() @ self.S.T


def mode_count(M):
    """Return the number of modes of a square ``2m x 2m`` matrix.

    Raises:
        InvalidShapeError: if ``M`` is not square with even dimension.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidShapeError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] % 2:
        raise InvalidShapeError(f"dimension {M.shape[0]} is odd")
    return M.shape[0] // 2


def omega(m, ordering=Ordering.XP):
    """Symplectic form of ``m`` modes.

    Args:
        m: Number of modes, at least 1.
        ordering: Quadrature ordering of the returned matrix.

    Returns:
        The ``2m x 2m`` antisymmetric matrix Omega.
    """
    if m < 1:
        raise InvalidInputError(f"mode count must be positive, got {m}")
    eye = np.eye(m)
    zero = np.zeros((m, m))
    om = np.block([[zero, eye], [-eye, zero]])
    if Ordering(ordering) is Ordering.MODEWISE:
        om = reorder(om, Ordering.XP, Ordering.MODEWISE)
    return om


def _xp_to_modewise_perm(m):
    perm = np.empty(2 * m, dtype=int)
    perm[0::2] = np.arange(m)
    perm[1::2] = np.arange(m, 2 * m)
    return perm


def permutation_matrix(m):
    """Permutation ``P`` with ``v_modewise = P @ v_xp``."""
    P = np.zeros((2 * m, 2 * m))
    P[np.arange(2 * m), _xp_to_modewise_perm(m)] = 1.0
    return P


def reorder(V, source, target):
    """Convert a matrix between quadrature orderings by exact permutation.

    Args:
        V: Square matrix of even dimension.
        source: Ordering of ``V``.
        target: Desired ordering.

    Returns:
        A new array congruent to ``V`` under the permutation.
    """
    V = np.asarray(V, dtype=float)
    m = mode_count(V)
    source, target = Ordering(source), Ordering(target)
    if source is target:
        return V.copy()
    perm = _xp_to_modewise_perm(m)
    if source is Ordering.XP:
        return V[np.ix_(perm, perm)]
    inv = np.argsort(perm)
    return V[np.ix_(inv, inv)]


def is_symplectic(S, tol=ATOL):
    """Check ``S Omega S^T = Omega`` in the max-entry norm."""
    S = np.asarray(S, dtype=float)
    m = mode_count(S)
    om = omega(m)
    return bool(np.max(np.abs(S @ om @ S.T - om)) <= tol)


def _check_pd(V, what="matrix"):
    V = np.asarray(V, dtype=float)
    mode_count(V)
    if not np.all(np.isfinite(V)):
        raise InvalidInputError(f"{what} has non-finite entries")
    scale = max(1.0, np.max(np.abs(V)))
    if np.max(np.abs(V - V.T)) > RTOL * scale:
        raise InvalidInputError(f"{what} is not symmetric")
    V = 0.5 * (V + V.T)
    w, U = np.linalg.eigh(V)
    if w[0] <= 0:
        raise InvalidInputError(f"{what} is not positive definite (min eigenvalue {w[0]:.3e})")
    return V, w, U


def _sqrt_pd(w, U, power=0.5):
    return (U * w**power) @ U.T


def symplectic_eigenvalues(V):
    """Symplectic eigenvalues of a positive definite matrix.

    Computed as the positive spectrum of the Hermitian matrix
    ``i V^{1/2} Omega V^{1/2}``, which is similar to ``i Omega V``.

    Args:
        V: Symmetric positive definite ``2m x 2m`` matrix in xp ordering.

    Returns:
        Array of ``m`` values in descending order.
    """
    V, w, U = _check_pd(V)
    m = V.shape[0] // 2
    root = _sqrt_pd(w, U)
    herm = 1j * (root @ omega(m) @ root)
    ev = np.linalg.eigvalsh(herm)
    return np.sort(ev[m:])[::-1].copy()


def is_xp_form(V, tol=ATOL):
    """True if the x-p cross block of ``V`` vanishes to ``tol`` (relative)."""
    V = np.asarray(V, dtype=float)
    m = mode_count(V)
    scale = max(1.0, np.max(np.abs(V)))
    return bool(np.max(np.abs(V[:m, m:]), initial=0.0) <= tol * scale)


def _williamson_xp(V, m):
    # Block-diagonal construction: O diagonalizes Q^{1/2} P Q^{1/2} = O D^2 O^T,
    # M = Q^{1/2} O D^{-1/2}; then diag(M, M^{-T}) maps diag(D, D) to V.
    Q = V[:m, :m]
    P = V[m:, m:]
    wq, Uq = np.linalg.eigh(Q)
    q_half = _sqrt_pd(wq, Uq)
    d2, O = np.linalg.eigh(q_half @ P @ q_half)
    order = np.argsort(d2)[::-1]
    d2, O = d2[order], O[:, order]
    d = np.sqrt(d2)
    M = q_half @ O / np.sqrt(d)
    Minv = (np.sqrt(d)[:, None] * O.T) @ _sqrt_pd(wq, Uq, -0.5)
    S = sla.block_diag(M, Minv.T)
    return WilliamsonDecomposition(S=S, nu=d)


def williamson(V):
    """Williamson decomposition ``V = S diag(nu, nu) S^T``.

    Matrices already in xp-form get a block-diagonal ``S = diag(M, M^{-T})``.
    Otherwise the real Schur form of the antisymmetric matrix
    ``V^{-1/2} Omega V^{-1/2}`` provides the symplectic basis.

    Args:
        V: Symmetric positive definite matrix in xp ordering.

    Returns:
        WilliamsonDecomposition with ``nu`` sorted in descending order.

    Raises:
        InvalidInputError: if ``V`` is not symmetric positive definite.
    """
    V, w, U = _check_pd(V)
    m = V.shape[0] // 2
    if is_xp_form(V, tol=1e-14):
        return _williamson_xp(V, m)

    inv_root = _sqrt_pd(w, U, -0.5)
    W = inv_root @ omega(m) @ inv_root
    W = 0.5 * (W - W.T)
    T, K = sla.schur(W, output="real")
    x_cols, p_cols, t = [], [], []
    for j in range(m):
        a, b = 2 * j, 2 * j + 1
        tj = 0.5 * (T[a, b] - T[b, a])
        if tj < 0:
            a, b = b, a
            tj = -tj
        x_cols.append(K[:, a])
        p_cols.append(K[:, b])
        t.append(tj)
    t = np.array(t)
    order = np.argsort(t)  # ascending t is descending nu
    nu = 1.0 / t[order]
    Kxp = np.column_stack([np.column_stack(x_cols)[:, order], np.column_stack(p_cols)[:, order]])
    scale = np.concatenate([nu, nu]) ** -0.5
    S = _sqrt_pd(w, U) @ Kxp * scale
    return WilliamsonDecomposition(S=S, nu=nu)


def is_pure_qcm(V, tol=1e-8):
    """True if every symplectic eigenvalue of ``V`` is within ``tol`` of 1."""
    nu = symplectic_eigenvalues(V)
    return bool(np.all(np.abs(nu - 1.0) <= tol))


def is_bona_fide(V, tol=1e-9):
    """Check the uncertainty relation ``V + i Omega >= 0`` up to ``tol``."""
    V = np.asarray(V, dtype=float)
    m = mode_count(V)
    herm = V + 1j * omega(m)
    herm = 0.5 * (herm + herm.conj().T)
    return bool(np.linalg.eigvalsh(herm)[0] >= -tol)


def orthogonal_symplectic(U):
    """Real orthogonal symplectic matrix of a complex unitary ``U``."""
    X, Y = U.real, U.imag
    return np.block([[X, -Y], [Y, X]])


def gl_symplectic(M):
    """Block-diagonal symplectic ``diag(M^{-1}, M^T)`` of an invertible ``M``."""
    return sla.block_diag(np.linalg.inv(M), M.T)


def hamiltonian_exp(K):
    """Symplectic matrix ``expm(Omega K)`` for a symmetric ``K``."""
    K = np.asarray(K, dtype=float)
    m = mode_count(K)
    return sla.expm(omega(m) @ (0.5 * (K + K.T)))


def random_unitary(m, rng):
    """Haar-random ``m x m`` unitary (scipy's sampler needs ``m > 1``)."""
    if m == 1:
        return np.array([[np.exp(2j * np.pi * rng.uniform())]])
    return unitary_group.rvs(m, random_state=rng)


def random_symplectic(m, rng, squeezing=1.0):
    """Random symplectic matrix built from rotations and GL-embedded squeezers.

    Args:
        m: Number of modes.
        rng: ``numpy.random.Generator``.
        squeezing: Scale of the log singular values of the squeezer.

    Returns:
        A ``2m x 2m`` symplectic matrix.
    """
    O1 = orthogonal_symplectic(random_unitary(m, rng))
    O2 = orthogonal_symplectic(random_unitary(m, rng))
    G = rng.standard_normal((m, m))
    u, _, vt = np.linalg.svd(G)
    M = u @ np.diag(np.exp(squeezing * rng.uniform(-1, 1, m))) @ vt
    return O1 @ gl_symplectic(M) @ O2

"""Normal covariance matrices: removable x-p correlations under local symplectics."""

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import least_squares

from . import symplectic as sp
from .errors import InvalidInputError, InvalidPartitionError
from .model import QCM, Partition, _as_names, from_modewise

NORMAL_TOL = 1e-7
COMMUTATOR_TOL = 1e-9


class Certificate(enum.Enum):
    NORMAL_BY_CONSTRUCTION = "NormalByConstruction"
    NUMERICALLY_NORMAL = "NumericallyNormal"
    OBSTRUCTION_FOUND = "ObstructionFound"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class NormalityReport:
    """Outcome of a normality test.

    Attributes:
        residual: Frobenius norm of the normalized x-p cross block
            (see :func:`normalized_cross`) of the best transform found.
        certificate: Kind of evidence.
        obstruction: ``(commutator norm, |b1 - b2|)`` for the analytic
            certificate, else None.
        transformed: Best transformed QCM (None if not computed).
        local: Mapping ``"A"``/``"B"`` to the local symplectics used.
    """

    residual: float
    certificate: Certificate
    obstruction: tuple = None
    transformed: QCM = None
    local: dict = None


def cross_block(M):
    """The x-p cross block ``Pi^x M (Pi^p)^T`` of an xp-ordered matrix."""
    m = sp.mode_count(M)
    return M[:m, m:]


def _inv_sqrt(M):
    w, U = np.linalg.eigh(M)
    return (U / np.sqrt(w)) @ U.T


def normalized_cross(M):
    """``V_xx^{-1/2} V_xp V_pp^{-1/2}`` of a positive definite xp-ordered matrix.

    It vanishes exactly when the cross block does, and its singular values
    do not change under symplectics ``diag(N, N^{-T})`` (squeezing included),
    so it cannot be made small by unbounded squeezing alone.
    """
    m = sp.mode_count(M)
    return _inv_sqrt(M[:m, :m]) @ M[:m, m:] @ _inv_sqrt(M[m:, m:])


def cross_correlation_norm(M):
    """Frobenius norm of :func:`normalized_cross`."""
    return float(np.linalg.norm(normalized_cross(M)))


def _bipartite(state, a, b):
    names = state.partition.names
    if a is None or b is None:
        if len(names) != 2:
            raise InvalidPartitionError(f"specify the bipartition of {list(names)}")
        a, b = (names[0],), (names[1],)
    a, b = _as_names(a), _as_names(b)
    part = state.partition
    ma, mb = part.modes_of(a), part.modes_of(b)
    return state.block(a + b), ma, mb


def _local(S_a, S_b, ma, mb):
    """Global xp-ordered matrix of ``S_A (+) S_B`` from subsystem xp-ordered blocks."""
    part = Partition.of(A=ma, B=mb)
    out = np.zeros((2 * (ma + mb), 2 * (ma + mb)))
    for name, S in (("A", S_a), ("B", S_b)):
        idx = part.indices((name,))
        out[np.ix_(idx, idx)] = S
    return out


def two_mode_standard_form(state, a=None, b=None):
    """Local symplectics bringing a 1+1 mode QCM to its standard form.

    Each local block is first made proportional to the identity, then local
    rotations diagonalize the coupling block by a signed singular value
    decomposition.

    Returns:
        Tuple ``(S_A, S_B, V_std)`` with ``V_std = (S_A + S_B) V (S_A + S_B)^T``
        having blocks ``diag(a, a)``, ``diag(b, b)`` and a diagonal coupling.
    """
    M, ma, mb = _bipartite(state, a, b)
    if ma != 1 or mb != 1:
        raise InvalidPartitionError("standard form needs one mode on each side")
    ia, ib = [0, 2], [1, 3]
    blocks = []
    for idx in (ia, ib):
        Vl = M[np.ix_(idx, idx)]
        w, U = np.linalg.eigh(Vl)
        if w[0] <= 0:
            raise InvalidInputError("local block is not positive definite")
        blocks.append(np.sqrt(np.sqrt(np.prod(w))) * (U / np.sqrt(w)) @ U.T)
    S_a1, S_b1 = blocks
    C = S_a1 @ M[np.ix_(ia, ib)] @ S_b1.T
    U, s, Wt = np.linalg.svd(C)
    W = Wt.T
    if np.linalg.det(U) < 0:
        U[:, 1] *= -1
        s[1] *= -1
    if np.linalg.det(W) < 0:
        W[:, 1] *= -1
        s[1] *= -1
    S_a, S_b = U.T @ S_a1, W.T @ S_b1
    L = _local(S_a, S_b, 1, 1)
    V_std = L @ M @ L.T
    V_std = 0.5 * (V_std + V_std.T)
    # entries that vanish by construction are set exactly
    V_std[np.ix_([0, 1], [2, 3])] = 0.0
    V_std[np.ix_([2, 3], [0, 1])] = 0.0
    return S_a, S_b, QCM(V_std, Partition.of(A=1, B=1))


def _sym_from(v, n):
    K = np.zeros((n, n))
    K[np.triu_indices(n)] = v
    return K + K.T - np.diag(np.diag(K))


def _local_symplectic(theta, m):
    n = 2 * m
    K = _sym_from(theta, n)
    return expm(sp.omega(m) @ K)


def is_normal(state, a=None, b=None, restarts=8, seed=0, max_nfev=2000):
    """Search for local symplectics removing all x-p cross terms.

    Minimizes the normalized cross block of ``(S_A + S_B) V (S_A + S_B)^T``
    with ``S = expm(Omega K)`` over symmetric ``K`` by nonlinear least
    squares from the identity and random starts. The plain cross-block norm
    is not used as objective: unbounded local squeezing can shrink it
    towards zero without reaching xp-form. Only normality can be
    established this way; failure yields ``INCONCLUSIVE``.

    Args:
        state: Bona fide QCM.
        a: First group of subsystems.
        b: Second group.
        restarts: Number of starts.
        seed: RNG seed.
        max_nfev: Function evaluation cap per start.

    Returns:
        NormalityReport. Two-mode and pure inputs are labelled
        ``NORMAL_BY_CONSTRUCTION``; the residual is still the optimizer's.
    """
    M, ma, mb = _bipartite(state, a, b)
    na, nb = ma * (2 * ma + 1), mb * (2 * mb + 1)
    def transform(x):
        S_a = _local_symplectic(x[:na], ma)
        S_b = _local_symplectic(x[na:], mb)
        L = _local(S_a, S_b, ma, mb)
        return L @ M @ L.T, S_a, S_b

    def residuals(x):
        Vt, _, _ = transform(x)
        return normalized_cross(Vt).ravel()

    rng = np.random.default_rng(seed)
    best = None
    for r in range(restarts):
        x0 = np.zeros(na + nb) if r == 0 else 0.5 * rng.standard_normal(na + nb)
        res = least_squares(residuals, x0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            max_nfev=max_nfev)
        Vt, S_a, S_b = transform(res.x)
        resid = cross_correlation_norm(Vt)
        if best is None or resid < best[0]:
            best = (resid, Vt, S_a, S_b)
        if resid < 1e-12:
            break
    resid, Vt, S_a, S_b = best
    Vt = 0.5 * (Vt + Vt.T)
    transformed = QCM(Vt, Partition.of(A=ma, B=mb))
    if (ma == 1 and mb == 1) or sp.is_pure_qcm(M):
        cert = Certificate.NORMAL_BY_CONSTRUCTION
    elif resid < NORMAL_TOL:
        cert = Certificate.NUMERICALLY_NORMAL
    else:
        cert = Certificate.INCONCLUSIVE
    return NormalityReport(resid, cert, None, transformed, {"A": S_a, "B": S_b})


def non_normal_family(a, b1, b2, F, G, restarts=8, seed=0):
    """The 1+2 mode QCM ``[[a I, F, G], [F^T, b1 I, 0], [G^T, 0, b2 I]]`` (mode-wise blocks).

    With ``b1 != b2`` and ``[F F^T, G G^T] != 0`` no local symplectic removes
    its x-p cross terms; that analytic certificate is reported as
    ``OBSTRUCTION_FOUND``. Otherwise the numeric search decides between
    ``NUMERICALLY_NORMAL`` and ``INCONCLUSIVE``.

    Args:
        a: A-mode variance, at least 3.
        b1: B1-mode variance, at least 2.
        b2: B2-mode variance, at least 2.
        F: 2x2 coupling of A and B1 with operator norm at most 1.
        G: 2x2 coupling of A and B2 with operator norm at most 1.

    Returns:
        Tuple ``(V, report)`` with partition ``A`` (1 mode), ``B`` (2 modes).
    """
    F = np.asarray(F, dtype=float)
    G = np.asarray(G, dtype=float)
    if F.shape != (2, 2) or G.shape != (2, 2):
        raise InvalidInputError("F and G must be 2x2")
    if np.linalg.norm(F, 2) > 1 + 1e-12 or np.linalg.norm(G, 2) > 1 + 1e-12:
        raise InvalidInputError("F and G must have operator norm at most 1")
    if a < 3 or b1 < 2 or b2 < 2:
        raise InvalidInputError("need a >= 3 and b1, b2 >= 2")
    eye, zero = np.eye(2), np.zeros((2, 2))
    mw = np.block([[a * eye, F, G], [F.T, b1 * eye, zero], [G.T, zero, b2 * eye]])
    V = from_modewise(mw, Partition.of(A=1, B=2))
    FF, GG = F @ F.T, G @ G.T
    comm = float(np.linalg.norm(FF @ GG - GG @ FF, 2))
    gap = abs(b1 - b2)
    numeric = is_normal(V, restarts=restarts, seed=seed)
    if gap > 0 and comm > COMMUTATOR_TOL:
        report = NormalityReport(numeric.residual, Certificate.OBSTRUCTION_FOUND, (comm, gap),
                                 numeric.transformed, numeric.local)
    else:
        report = numeric
    return V, report

"""Log-determinant entropies and mutual informations of covariance matrices.

All quantities are in bits.
"""

from dataclasses import dataclass, field

import numpy as np

from . import symplectic as sp
from .errors import ConvergenceError, InvalidInputError, NumericInconsistencyError, InvalidPartitionError
from .model import QCM, _as_names
from .schur import schur_complement

DEFAULT_SCHEDULE = (1e-1, 1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class MeasureValue:
    """A computed quantity with named diagnostics.

    Attributes:
        value: The value in bits.
        diagnostics: Auxiliary numbers (condition numbers, error estimates).
    """

    value: float
    diagnostics: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)


def logdet(M):
    """Natural log-determinant of a positive definite matrix via Cholesky.

    Raises:
        InvalidInputError: if ``M`` is not positive definite.
    """
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    try:
        L = np.linalg.cholesky(0.5 * (M + M.T))
    except np.linalg.LinAlgError as exc:
        raise InvalidInputError("matrix is not positive definite") from exc
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def logdet_entropy(V):
    """Renyi-2 entropy ``(1/2) log2 det V`` of a Gaussian state."""
    V = V.matrix if isinstance(V, QCM) else V
    return logdet(V) / (2.0 * np.log(2.0))


def bosonic_g(x):
    """Entropy ``(x+1) log2(x+1) - x log2 x`` of a thermal state with mean photon number ``x``."""
    x = float(x)
    if x < 0:
        raise InvalidInputError(f"bosonic entropy needs x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    return float((x + 1) * np.log2(x + 1) - x * np.log2(x))


def von_neumann_entropy(V):
    """Von Neumann entropy from the symplectic eigenvalues."""
    V = V.matrix if isinstance(V, QCM) else V
    nu = sp.symplectic_eigenvalues(V)
    return float(sum(bosonic_g(max(n - 1.0, 0.0) / 2.0) for n in nu))


def _resolve(state, groups):
    part = state.partition
    out = []
    for g in groups:
        g = _as_names(g)
        part.check_names(g)
        out.append(g)
    flat = [n for g in out for n in g]
    if len(set(flat)) != len(flat):
        raise InvalidPartitionError(f"groups overlap: {groups}")
    return out


def default_split(state):
    """``(first, rest)`` split when none is given and there are two subsystems."""
    names = state.partition.names
    if len(names) != 2:
        raise InvalidPartitionError(f"specify a split for subsystems {list(names)}")
    return (names[0],), (names[1],)


def mutual_info_matrix(M, ia, ib):
    """``I_M`` of a plain matrix with index lists ``ia`` and ``ib``."""
    iab = np.concatenate([ia, ib])
    val = logdet(M[np.ix_(ia, ia)]) + logdet(M[np.ix_(ib, ib)]) - logdet(M[np.ix_(iab, iab)])
    return val / (2.0 * np.log(2.0))


def im_mutual(state, a=None, b=None):
    """Log-determinant mutual information ``M(V_A) + M(V_B) - M(V_AB)``.

    Args:
        state: QCM.
        a: Names of the first group (defaults to the first subsystem).
        b: Names of the second group (defaults to the second subsystem).
    """
    if a is None or b is None:
        a, b = default_split(state)
    a, b = _resolve(state, (a, b))
    part = state.partition
    return mutual_info_matrix(state.matrix, part.indices(a), part.indices(b))


def conditional_info_matrix(M, ia, ib, ie):
    """Conditional ``I_M(A:B|E)`` of a plain matrix by the determinant ratio."""
    if len(ie) == 0:
        return mutual_info_matrix(M, ia, ib)
    ae = np.concatenate([ia, ie])
    be = np.concatenate([ib, ie])
    abe = np.concatenate([ia, ib, ie])

    def ld(idx):
        return logdet(M[np.ix_(idx, idx)])

    return (ld(ae) + ld(be) - ld(ie) - ld(abe)) / (2.0 * np.log(2.0))


def conditional_info_schur(M, ia, ib, ie):
    """Conditional ``I_M(A:B|E)`` as ``I_M(A:B)`` of the complement ``M / M_E``."""
    keep = np.concatenate([ia, ib])
    cond = schur_complement(M, ie, keep)
    na = len(ia)
    return mutual_info_matrix(cond, np.arange(na), np.arange(na, keep.size))


def im_conditional(state, a, b, e=(), tol=1e-8):
    """Conditional log-determinant mutual information ``I_M(A:B|E)``.

    Evaluated both by the determinant ratio and as the unconditional value
    of the Schur complement ``V / V_E``.

    Raises:
        NumericInconsistencyError: if the two routes differ by more than ``tol``
            (relative to ``max(1, |value|)``).
        SingularBlockError: if ``V_E`` is too ill-conditioned.
    """
    a, b, e = _resolve(state, (a, b, e))
    part = state.partition
    ia, ib, ie = part.indices(a), part.indices(b), part.indices(e)
    direct = conditional_info_matrix(state.matrix, ia, ib, ie)
    if not e:
        return direct
    via_schur = conditional_info_schur(state.matrix, ia, ib, ie)
    if abs(direct - via_schur) > tol * max(1.0, abs(direct)):
        raise NumericInconsistencyError(
            f"conditional mutual information routes disagree: {direct!r} vs {via_schur!r}")
    return direct


def _xp_indices(part, names):
    modes = part.mode_indices(names)
    return modes, modes + part.modes


def xp_decompose_matrix(M, mode_a, mode_b, m):
    """Split ``I_M`` of an xp-ordered matrix into x and p-given-x parts.

    Args:
        M: Matrix in xp ordering on ``m`` modes.
        mode_a: Mode indices of the first group.
        mode_b: Mode indices of the second group.
        m: Total number of modes.

    Returns:
        Tuple ``(I_x, I_p_given_x)``.
    """
    xa, xb = np.asarray(mode_a), np.asarray(mode_b)
    x_idx = np.concatenate([xa, xb])
    i_x = mutual_info_matrix(M, xa, xb)
    p_idx = x_idx + m
    cond = schur_complement(M, x_idx, p_idx)
    na = xa.size
    i_p = mutual_info_matrix(cond, np.arange(na), np.arange(na, x_idx.size))
    return i_x, i_p


def im_xp_decompose(state, a=None, b=None):
    """Return ``(I_M(A_x:B_x) of V^x, I_M(A_p:B_p) of V/V^x)``.

    For ``V`` in xp-form the two parts sum to ``im_mutual``. With nonzero
    x-p cross blocks they do not in general: the A block of ``V/V^x`` is
    conditioned on ``B_x`` as well, so it differs from ``V_A/V_A^x``.
    """
    if a is None or b is None:
        a, b = default_split(state)
    a, b = _resolve(state, (a, b))
    ab = a + b
    sub = state.sub(ab)
    ma = sub.partition.mode_indices(a)
    mb = sub.partition.mode_indices(b)
    return xp_decompose_matrix(sub.matrix, ma, mb, sub.modes)


def homodyne_limit_im(state, a=None, b=None, schedule=DEFAULT_SCHEDULE):
    """Limit of ``I_M`` under x-homodyne seeds ``diag(t, 1/t)`` as ``t -> 0``.

    The sequence ``I_M(V + Gamma_A(t) + Gamma_B(t))`` approaches its limit
    linearly in ``t``; the last two points are combined by first-order
    Richardson extrapolation.

    Args:
        state: QCM, positive definite.
        a: First group of subsystems.
        b: Second group of subsystems.
        schedule: Strictly decreasing positive values of ``t``, at least two.

    Returns:
        MeasureValue whose diagnostics hold ``error_estimate``, the last raw
        value and the lower spectral bound ``kappa_inv``.

    Raises:
        ConvergenceError: if successive differences grow.
        InvalidInputError: on a bad schedule or non positive definite input.
    """
    sched = np.asarray(schedule, dtype=float)
    if sched.size < 2 or np.any(sched <= 0) or np.any(np.diff(sched) >= 0):
        raise InvalidInputError("schedule must hold at least two strictly decreasing positive values")
    if a is None or b is None:
        a, b = default_split(state)
    a, b = _resolve(state, (a, b))
    sub = state.sub(a + b)
    M = sub.matrix
    kappa_inv = float(np.linalg.eigvalsh(M)[0])
    if kappa_inv <= 0:
        raise InvalidInputError("homodyne limit needs a positive definite matrix")
    m = sub.modes
    na = sub.partition.modes_of(a)
    ia = np.concatenate([np.arange(na), np.arange(na) + m])
    ib = np.concatenate([np.arange(na, m), np.arange(na, m) + m])
    values = []
    for t in sched:
        seed = np.diag(np.concatenate([np.full(m, t), np.full(m, 1.0 / t)]))
        values.append(mutual_info_matrix(M + seed, ia, ib))
    values = np.array(values)
    steps = np.abs(np.diff(values))
    # allow round-off sized growth once the sequence has settled
    for k in range(1, steps.size):
        if steps[k] > steps[k - 1] * (1 + 1e-6) + 1e-12:
            raise ConvergenceError(f"homodyne sequence not converging: differences {steps.tolist()}")
    t1, t2 = sched[-2], sched[-1]
    f1, f2 = values[-2], values[-1]
    limit = (t1 * f2 - t2 * f1) / (t1 - t2)
    return MeasureValue(float(limit), {
        "error_estimate": float(abs(limit - f2)),
        "last_value": float(f2),
        "kappa_inv": kappa_inv,
    })

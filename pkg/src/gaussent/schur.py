"""Schur complements of partitioned symmetric matrices and Gaussian conditioning."""

import numpy as np

from .errors import InvalidPartitionError, SingularBlockError

#: Blocks with a larger 2-norm condition number are refused.
COND_LIMIT = 1e12


def symmetrize(M):
    return 0.5 * (M + M.T)


def complement_indices(n, block):
    """Indices of ``range(n)`` not in ``block``, in increasing order."""
    block = np.asarray(block, dtype=int)
    mask = np.ones(n, dtype=bool)
    mask[block] = False
    return np.flatnonzero(mask)


def schur_complement(R, block, keep=None):
    """Schur complement ``R/X = Y - Z^T X^{-1} Z`` of the block ``X = R[block, block]``.

    Args:
        R: Symmetric matrix.
        block: Indices of the block ``X`` to eliminate.
        keep: Indices of ``Y`` in the desired output order. Defaults to the
            complement of ``block`` in increasing order.

    Returns:
        The symmetrized complement on the ``keep`` indices.

    Raises:
        SingularBlockError: if ``X`` has condition number above ``COND_LIMIT``.
    """
    R = np.asarray(R, dtype=float)
    block = np.asarray(block, dtype=int)
    if keep is None:
        keep = complement_indices(R.shape[0], block)
    keep = np.asarray(keep, dtype=int)
    if block.size == 0:
        return symmetrize(R[np.ix_(keep, keep)])
    X = R[np.ix_(block, block)]
    Z = R[np.ix_(block, keep)]
    Y = R[np.ix_(keep, keep)]
    cond = np.linalg.cond(X)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularBlockError(f"block condition number {cond:.3e} exceeds {COND_LIMIT:.0e}", cond)
    return symmetrize(Y - Z.T @ np.linalg.solve(X, Z))


def measurement_update(state, seed, measured):
    """Covariance of the unmeasured subsystems after a Gaussian measurement.

    The result ``(V + Gamma_M)/(V_M + Gamma_M)`` does not depend on the
    measurement outcome.

    Args:
        state: QCM on all subsystems.
        seed: QCM matrix (xp ordering) of the measurement seed on the
            measured subsystems, or a QCM whose partition names them.
        measured: Names of the measured subsystems.

    Returns:
        QCM on the remaining subsystems in their original order.

    Raises:
        InvalidPartitionError: if the seed dimension does not match.
    """
    from .model import QCM

    if isinstance(measured, str):
        measured = (measured,)
    measured = tuple(measured)
    part = state.partition
    part.check_names(measured)
    rest = tuple(n for n in part.names if n not in measured)
    seed_matrix = seed.matrix if isinstance(seed, QCM) else np.asarray(seed, dtype=float)
    idx_m = part.indices(measured)
    if seed_matrix.shape != (idx_m.size, idx_m.size):
        raise InvalidPartitionError(
            f"seed has shape {seed_matrix.shape}, measured subsystems need {idx_m.size}")
    if isinstance(seed, QCM) and seed.partition.modes != part.modes_of(measured):
        raise InvalidPartitionError("seed partition does not match the measured subsystems")
    R = state.matrix.copy()
    R[np.ix_(idx_m, idx_m)] += seed_matrix
    out = schur_complement(R, idx_m, part.indices(rest))
    return QCM(out, part.restrict(rest))

"""Gaussian states and channels: covariance matrices with named subsystems.

A ``QCM`` stores a quantum covariance matrix in xp-block ordering together
with a ``Partition`` naming its subsystems. The quadratures of a group of
subsystems, taken in the listed order, occupy ``Partition.indices(group)``;
that index list is itself in xp-block ordering for the group, so sub-blocks
extracted with it are valid xp-ordered covariance matrices.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import symplectic as sp
from .errors import InvalidChannelError, InvalidInputError, InvalidPartitionError, InvalidShapeError

SYMMETRY_TOL = 1e-10
BONA_FIDE_TOL = 1e-9

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


def squeezing_parameter(s_db):
    """Squeezing parameter ``r`` of an ``s_db`` decibel two-mode squeezer."""
    return s_db * np.log(10.0) / 20.0


@dataclass(frozen=True)
class Partition:
    """Ordered named subsystems with mode counts.

    Attributes:
        subsystems: Tuple of ``(name, modes)`` pairs.
    """

    subsystems: tuple

    def __post_init__(self):
        subs = tuple((str(n), int(k)) for n, k in self.subsystems)
        names = [n for n, _ in subs]
        if len(set(names)) != len(names):
            raise InvalidPartitionError(f"duplicate subsystem names in {names}")
        if any(k < 0 for _, k in subs):
            raise InvalidPartitionError("mode counts must be nonnegative")
        object.__setattr__(self, "subsystems", subs)

    @classmethod
    def of(cls, **modes):
        """Build a partition from keyword arguments, e.g. ``Partition.of(A=1, B=1)``."""
        return cls(tuple(modes.items()))

    @property
    def names(self):
        return tuple(n for n, _ in self.subsystems)

    @property
    def modes(self):
        return sum(k for _, k in self.subsystems)

    def modes_of(self, names):
        self.check_names(names)
        lookup = dict(self.subsystems)
        return sum(lookup[n] for n in names)

    def check_names(self, names):
        unknown = [n for n in names if n not in self.names]
        if unknown:
            raise InvalidPartitionError(f"unknown subsystem(s) {unknown}; have {list(self.names)}")
        if len(set(names)) != len(names):
            raise InvalidPartitionError(f"repeated subsystem in {list(names)}")

    def mode_indices(self, names):
        """Global mode indices of the listed subsystems, in listed order."""
        self.check_names(names)
        start, offsets = 0, {}
        for n, k in self.subsystems:
            offsets[n] = np.arange(start, start + k)
            start += k
        if not names:
            return np.zeros(0, dtype=int)
        return np.concatenate([offsets[n] for n in names]).astype(int)

    def indices(self, names):
        """Matrix indices of the listed subsystems in xp-block ordering."""
        modes = self.mode_indices(tuple(names))
        return np.concatenate([modes, modes + self.modes])

    def restrict(self, names):
        lookup = dict(self.subsystems)
        return Partition(tuple((n, lookup[n]) for n in names))


def _as_names(names):
    if isinstance(names, str):
        return (names,)
    return tuple(names)


@dataclass(frozen=True)
class QCM:
    """Covariance matrix in xp-block ordering with a named partition.

    Construction checks shape and symmetry; the uncertainty relation is
    checked separately by ``check_bona_fide`` since intermediate matrices in
    some computations (seeds added to states) need not be validated again.
    """

    matrix: np.ndarray
    partition: Partition = field(default=None)

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float)
        m = sp.mode_count(M)
        part = self.partition
        if part is None:
            part = Partition((("A", m),))
        if part.modes != m:
            raise InvalidPartitionError(f"partition has {part.modes} modes, matrix has {m}")
        if not np.all(np.isfinite(M)):
            raise InvalidInputError("matrix has non-finite entries")
        scale = max(1.0, np.max(np.abs(M)))
        if np.max(np.abs(M - M.T)) > SYMMETRY_TOL * scale:
            raise InvalidInputError("symmetry check failed: matrix is not symmetric")
        M = 0.5 * (M + M.T)
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "partition", part)

    @property
    def modes(self):
        return self.partition.modes

    def block(self, names):
        """Sub-matrix of the listed subsystems (xp-ordered)."""
        idx = self.partition.indices(_as_names(names))
        return self.matrix[np.ix_(idx, idx)]

    def sub(self, names):
        """Reduced state on the listed subsystems."""
        names = _as_names(names)
        return QCM(self.block(names), self.partition.restrict(names))

    def regroup(self, groups):
        """Merge subsystems into new named groups.

        Args:
            groups: Mapping ``new_name -> sequence of old names``; every old
                subsystem must appear exactly once.

        Returns:
            QCM whose modes are reordered so each group is contiguous.
        """
        used = [n for olds in groups.values() for n in olds]
        if sorted(used) != sorted(self.partition.names):
            raise InvalidPartitionError("regroup must use every subsystem exactly once")
        order = tuple(used)
        part = Partition(tuple((new, self.partition.modes_of(tuple(olds))) for new, olds in groups.items()))
        return QCM(self.block(order), part)

    def is_bona_fide(self, tol=BONA_FIDE_TOL):
        return sp.is_bona_fide(self.matrix, tol)

    def check_bona_fide(self, tol=BONA_FIDE_TOL):
        """Raise ``InvalidInputError`` if the uncertainty relation fails."""
        if not self.is_bona_fide(tol):
            raise InvalidInputError("bona fide check failed: V + i Omega is not positive semidefinite")
        return self

    def is_pure(self, tol=1e-8):
        return sp.is_pure_qcm(self.matrix, tol)

    def symplectic_eigenvalues(self):
        return sp.symplectic_eigenvalues(self.matrix)

    def to_modewise(self):
        return sp.reorder(self.matrix, sp.Ordering.XP, sp.Ordering.MODEWISE)

    def congruence(self, S):
        """Return ``S V S^T`` with the same partition."""
        S = np.asarray(S, dtype=float)
        return QCM(S @ self.matrix @ S.T, self.partition)

    def local_congruence(self, local):
        """Apply symplectics subsystem-wise.

        Args:
            local: Mapping ``name -> S`` with ``S`` in that subsystem's xp ordering.
        """
        return self.congruence(local_operator(self.partition, local))


def local_operator(partition, local):
    """Embed subsystem matrices into a global block-diagonal operator."""
    n = 2 * partition.modes
    out = np.eye(n)
    for name, S in local.items():
        idx = partition.indices((name,))
        out[np.ix_(idx, idx)] = S
    return out


def from_modewise(matrix, partition):
    """QCM from a matrix given in mode-wise ordering."""
    return QCM(sp.reorder(matrix, sp.Ordering.MODEWISE, sp.Ordering.XP), partition)


def vacuum(partition):
    return QCM(np.eye(2 * partition.modes), partition)


def tmsv(s_db):
    """Two-mode squeezed vacuum with ``s_db`` decibels of squeezing.

    Args:
        s_db: Squeezing in dB, nonnegative.

    Returns:
        Pure two-mode QCM on ``A|B``.
    """
    if s_db < 0:
        raise InvalidInputError(f"squeezing must be nonnegative, got {s_db}")
    return pure_loss_state(1.0, s_db)


def pure_loss_state(lam, s_db):
    """TMSV with its A mode sent through a pure-loss channel of transmissivity ``lam``.

    Args:
        lam: Transmissivity in ``[0, 1]``.
        s_db: Squeezing in dB, nonnegative.

    Returns:
        Two-mode QCM on ``A|B``.
    """
    if not 0.0 <= lam <= 1.0:
        raise InvalidInputError(f"transmissivity must lie in [0, 1], got {lam}")
    if s_db < 0:
        raise InvalidInputError(f"squeezing must be nonnegative, got {s_db}")
    r = squeezing_parameter(s_db)
    c, sh = np.cosh(2 * r), np.sinh(2 * r)
    eye = np.eye(2)
    mw = np.block([
        [(lam * c + 1 - lam) * eye, np.sqrt(lam) * sh * PAULI_Z],
        [np.sqrt(lam) * sh * PAULI_Z, c * eye],
    ])
    return from_modewise(mw, Partition.of(A=1, B=1))


def pure_loss_dilation(lam, s_db):
    """Pure three-mode state ``A|B|E`` whose AB marginal is ``pure_loss_state``.

    The TMSV mode A is mixed with a vacuum mode E on a beam splitter with
    mode matrix ``[[sqrt(lam), sqrt(1-lam)], [sqrt(1-lam), -sqrt(lam)]]``.
    This phase convention for the E output gives the AE marginal positive
    coupling ``(cosh 2r - 1) sqrt(lam (1-lam))``.
    """
    if not 0.0 <= lam <= 1.0:
        raise InvalidInputError(f"transmissivity must lie in [0, 1], got {lam}")
    r = squeezing_parameter(s_db)
    c, sh = np.cosh(2 * r), np.sinh(2 * r)
    eye = np.eye(2)
    zero = np.zeros((2, 2))
    t, u = np.sqrt(lam), np.sqrt(1 - lam)
    splitter = np.block([
        [t * eye, zero, u * eye],
        [zero, eye, zero],
        [u * eye, zero, -t * eye],
    ])
    initial = np.block([
        [c * eye, sh * PAULI_Z, zero],
        [sh * PAULI_Z, c * eye, zero],
        [zero, zero, eye],
    ])
    return from_modewise(splitter @ initial @ splitter.T, Partition.of(A=1, B=1, E=1))


@dataclass(frozen=True)
class GaussianChannel:
    """Gaussian channel ``V -> X V X^T + Y``.

    Attributes:
        X: ``2m' x 2m`` real matrix (xp ordering on both sides).
        Y: ``2m' x 2m'`` real symmetric matrix.
    """

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        Y = np.atleast_2d(np.asarray(self.Y, dtype=float))
        if X.shape[0] % 2 or X.shape[1] % 2:
            raise InvalidShapeError(f"X has odd dimension {X.shape}")
        if Y.shape != (X.shape[0], X.shape[0]):
            raise InvalidShapeError(f"Y shape {Y.shape} does not match X {X.shape}")
        if np.max(np.abs(Y - Y.T), initial=0.0) > SYMMETRY_TOL * max(1.0, np.max(np.abs(Y))):
            raise InvalidInputError("Y is not symmetric")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", 0.5 * (Y + Y.T))

    @property
    def modes_in(self):
        return self.X.shape[1] // 2

    @property
    def modes_out(self):
        return self.X.shape[0] // 2

    def cp_matrix(self):
        """Hermitian matrix ``Y + i Omega' - i X Omega X^T``."""
        om_in = sp.omega(self.modes_in)
        om_out = sp.omega(self.modes_out)
        H = self.Y + 1j * om_out - 1j * self.X @ om_in @ self.X.T
        return 0.5 * (H + H.conj().T)

    def cp_eigenvalue(self):
        """Smallest eigenvalue of the complete positivity matrix."""
        return float(np.linalg.eigvalsh(self.cp_matrix())[0])

    def cp_margin(self):
        """Single-mode margin ``sqrt(det Y) - |1 - det X|``."""
        if self.modes_in != 1 or self.modes_out != 1:
            raise InvalidShapeError("the determinant margin is defined for single-mode channels")
        return float(np.sqrt(np.linalg.det(self.Y)) - abs(1.0 - np.linalg.det(self.X)))

    def is_cp(self, tol=BONA_FIDE_TOL):
        return self.cp_eigenvalue() >= -tol

    def compose(self, other):
        """Channel applying ``other`` first, then ``self``."""
        return GaussianChannel(self.X @ other.X, self.X @ other.Y @ self.X.T + self.Y)


def identity_channel(m=1):
    return GaussianChannel(np.eye(2 * m), np.zeros((2 * m, 2 * m)))


def pure_loss_channel(lam):
    """Single-mode pure-loss channel with transmissivity ``lam``."""
    if not 0.0 <= lam <= 1.0:
        raise InvalidInputError(f"transmissivity must lie in [0, 1], got {lam}")
    return GaussianChannel(np.sqrt(lam) * np.eye(2), (1 - lam) * np.eye(2))


def channel_apply(channel, state, on=None, out_name=None, tol=BONA_FIDE_TOL):
    """Apply a Gaussian channel to one subsystem, identity elsewhere.

    Args:
        channel: The channel.
        state: Input QCM.
        on: Name of the subsystem the channel acts on. Defaults to the only
            subsystem when there is one.
        out_name: Name of the output subsystem (defaults to ``on``).
        tol: Tolerance of the complete positivity check.

    Returns:
        Output QCM; the acted-on subsystem keeps its position.

    Raises:
        InvalidChannelError: if the channel is not completely positive.
        InvalidPartitionError: if the channel input size does not match.
    """
    if not channel.is_cp(tol):
        raise InvalidChannelError(
            f"complete positivity fails (min eigenvalue {channel.cp_eigenvalue():.3e})")
    part = state.partition
    if on is None:
        if len(part.names) != 1:
            raise InvalidPartitionError("specify the subsystem the channel acts on")
        on = part.names[0]
    part.check_names((on,))
    if part.modes_of((on,)) != channel.modes_in:
        raise InvalidPartitionError(
            f"channel acts on {channel.modes_in} modes, subsystem {on} has {part.modes_of((on,))}")
    out_name = on if out_name is None else out_name
    new_subs = []
    for n, k in part.subsystems:
        if n == on:
            new_subs.append((out_name, channel.modes_out))
        else:
            new_subs.append((n, k))
    new_part = Partition(tuple(new_subs))
    Xb = np.zeros((2 * new_part.modes, 2 * part.modes))
    Yb = np.zeros((2 * new_part.modes, 2 * new_part.modes))
    for (n_old, _), (n_new, _) in zip(part.subsystems, new_part.subsystems):
        i_old = part.indices((n_old,))
        i_new = new_part.indices((n_new,))
        if n_old == on:
            Xb[np.ix_(i_new, i_old)] = channel.X
            Yb[np.ix_(i_new, i_new)] = channel.Y
        else:
            Xb[i_new, i_old] = 1.0
    return QCM(Xb @ state.matrix @ Xb.T + Yb, new_part)


def purify(state, env_name="E", minimal=False, tol=1e-10):
    """Purification of a mixed state by a Gaussian environment.

    From ``V = S diag(nu, nu) S^T`` the environment is coupled to each
    Williamson mode through a two-mode squeezer with ``cosh 2r = nu``.

    Args:
        state: Bona fide QCM.
        env_name: Name given to the purifying subsystem.
        minimal: If True, environment modes attached to unit symplectic
            eigenvalues (which decouple in vacuum) are dropped.
        tol: Threshold on ``nu - 1`` used when ``minimal`` is set.

    Returns:
        Pure QCM on the original subsystems followed by ``env_name``.
    """
    part = state.partition
    if env_name in part.names:
        raise InvalidPartitionError(f"subsystem name {env_name!r} already in use")
    m = part.modes
    dec = sp.williamson(state.matrix)
    nu = np.maximum(dec.nu, 1.0)
    keep = np.flatnonzero(nu - 1.0 > tol) if minimal else np.arange(m)
    k = keep.size
    new_part = Partition(part.subsystems + ((env_name, k),))
    n = 2 * (m + k)
    gamma = np.zeros((n, n))
    i_sys = new_part.indices(part.names)
    i_env = new_part.indices((env_name,))
    lam = np.concatenate([nu, nu])
    gamma[np.ix_(i_sys, i_sys)] = dec.S @ np.diag(lam) @ dec.S.T
    if k:
        nu_k = nu[keep]
        coupling = np.sqrt(nu_k**2 - 1.0)
        # columns of S for the kept Williamson modes carry the env correlations
        cols = np.concatenate([keep, keep + m])
        C = dec.S[:, cols] @ np.diag(np.concatenate([coupling, -coupling]))
        gamma[np.ix_(i_sys, i_env)] = C
        gamma[np.ix_(i_env, i_sys)] = C.T
        gamma[np.ix_(i_env, i_env)] = np.diag(np.concatenate([nu_k, nu_k]))
    return QCM(gamma, new_part)


def homodyne_seed(t, modes=1, name="A"):
    """Pure seed ``diag(t I, I / t)``; ``t -> 0`` measures the x quadratures.

    Args:
        t: Positive squeezing of the seed.
        modes: Number of modes.
        name: Subsystem name.
    """
    if not t > 0:
        raise InvalidInputError(f"seed parameter must be positive, got {t}")
    return QCM(np.diag(np.concatenate([np.full(modes, t), np.full(modes, 1.0 / t)])),
               Partition(((name, modes),)))


def direct_sum(*states):
    """Direct sum of states; subsystem ``X`` of the ``k``-th summand becomes ``Xk``.

    Modes are ordered summand by summand.
    """
    subs = []
    mats = []
    for k, st in enumerate(states, start=1):
        subs.extend((f"{n}{k}", mk) for n, mk in st.partition.subsystems)
        mats.append(st)
    part = Partition(tuple(subs))
    n = 2 * part.modes
    M = np.zeros((n, n))
    for k, st in enumerate(mats, start=1):
        idx = part.indices(tuple(f"{nm}{k}" for nm in st.partition.names))
        M[np.ix_(idx, idx)] = st.matrix
    return QCM(M, part)


def random_qcm(partition, rng, squeezing=1.0, max_thermal=2.0, local=True):
    """Random bona fide QCM ``S diag(nu, nu) S^T``.

    Args:
        partition: Target partition.
        rng: ``numpy.random.Generator``.
        squeezing: Scale of the random global symplectic.
        max_thermal: Symplectic eigenvalues are drawn from ``[1, 1 + max_thermal]``.
        local: If True, follow with random local symplectics on each subsystem.
    """
    m = partition.modes
    nu = 1.0 + max_thermal * rng.uniform(size=m)
    S = sp.random_symplectic(m, rng, squeezing)
    V = S @ np.diag(np.concatenate([nu, nu])) @ S.T
    state = QCM(0.5 * (V + V.T), partition)
    if local:
        state = state.local_congruence({
            n: sp.random_symplectic(k, rng, 0.5 * squeezing) for n, k in partition.subsystems if k})
    return state


def random_pure_qcm(partition, rng, squeezing=1.0):
    S = sp.random_symplectic(partition.modes, rng, squeezing)
    return QCM(S @ S.T, partition)


def to_json_dict(state, ordering=sp.Ordering.XP):
    """Serializable dictionary of a QCM in the requested ordering."""
    ordering = sp.Ordering(ordering)
    M = state.matrix if ordering is sp.Ordering.XP else state.to_modewise()
    return {
        "ordering": ordering.value,
        "subsystems": [{"name": n, "modes": k} for n, k in state.partition.subsystems],
        "matrix": [[float(v) for v in row] for row in M],
    }


def from_json_dict(data, check=True):
    """Parse the QCM file format.

    Raises:
        InvalidInputError: naming the failed check (schema, finiteness,
            symmetry or bona fide).
    """
    try:
        ordering = sp.Ordering(data.get("ordering", "xp"))
        subs = tuple((str(s["name"]), int(s["modes"])) for s in data["subsystems"])
        M = np.array(data["matrix"], dtype=float)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InvalidInputError(f"schema check failed: {exc}") from exc
    part = Partition(subs)
    if M.shape != (2 * part.modes, 2 * part.modes):
        raise InvalidInputError(
            f"shape check failed: matrix {M.shape} for {part.modes} modes")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError("finiteness check failed: matrix has non-finite entries")
    if np.max(np.abs(M - M.T)) > SYMMETRY_TOL:
        raise InvalidInputError("symmetry check failed: matrix is not symmetric within 1e-10")
    M = sp.reorder(M, ordering, sp.Ordering.XP)
    state = QCM(M, part)
    if check:
        state.check_bona_fide(BONA_FIDE_TOL)
    return state


def load_qcm(path, check=True):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"schema check failed: invalid JSON ({exc})") from exc
    return from_json_dict(data, check=check)

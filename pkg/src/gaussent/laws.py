"""Randomized structural law suites for the library.

Each law draws one random instance from a ``numpy.random.Generator`` and
returns ``(passed, instance)`` where ``instance`` is a JSON-serializable
dictionary sufficient to replay a failure. Suites are lists of named laws;
``run_suite`` evaluates every law on ``trials`` instances with a generator
seeded by ``(seed, law index)`` so results are reproducible law by law.
"""

from dataclasses import dataclass, field

import numpy as np

from . import symplectic as sp
from .entanglement import gie_numeric, reof_numeric
from .infomeasures import (
    homodyne_limit_im,
    im_mutual,
    im_xp_decompose,
    logdet_entropy,
    mutual_info_matrix,
)
from .model import QCM, Partition, random_pure_qcm, random_qcm
from .normality import two_mode_standard_form
from .schur import schur_complement

#: Relative tolerance of exact identities.
IDENTITY_TOL = 1e-8
HOMODYNE_TOL = 1e-4
CONJECTURE_TOL = 2e-2
SPLITS = ((1, 1), (1, 2), (2, 1))


def _matrix(M):
    return [[float(v) for v in row] for row in np.asarray(M)]


def _random_pd(rng, n=None):
    n = n or int(rng.integers(2, 7))
    A = rng.standard_normal((n, n))
    return A @ A.T + 0.1 * np.eye(n)


def _random_block(rng, n):
    k = int(rng.integers(1, n))
    return np.sort(rng.choice(n, size=k, replace=False))


def _close(x, y, tol=IDENTITY_TOL):
    return bool(abs(x - y) <= tol * max(1.0, abs(x), abs(y)))


def _random_state(rng):
    ma, mb = SPLITS[int(rng.integers(len(SPLITS)))]
    return random_qcm(Partition.of(A=ma, B=mb), rng, squeezing=1.0, max_thermal=1.5)


# Schur complement laws


def schur_determinant(rng):
    R = _random_pd(rng)
    block = _random_block(rng, R.shape[0])
    X = R[np.ix_(block, block)]
    lhs = np.linalg.slogdet(R)[1]
    rhs = np.linalg.slogdet(X)[1] + np.linalg.slogdet(schur_complement(R, block))[1]
    return _close(lhs, rhs), {"R": _matrix(R), "block": block.tolist()}


def schur_inertia(rng):
    n = int(rng.integers(3, 7))
    k = int(rng.integers(2, n))
    A = rng.standard_normal((n, k))
    R = A @ A.T
    block = np.sort(rng.choice(n, size=int(rng.integers(1, k)), replace=False))

    def rank(M):
        return int(np.sum(np.abs(np.linalg.eigvalsh(M)) > 1e-8 * max(1.0, np.abs(M).max())))

    comp = schur_complement(R, block)
    ok = rank(R) == rank(R[np.ix_(block, block)]) + rank(comp)
    return ok, {"R": _matrix(R), "block": block.tolist()}


def schur_block_positivity(rng):
    n = int(rng.integers(2, 7))
    A = rng.standard_normal((n, n))
    # shift so that roughly half the instances are positive definite
    R = A @ A.T - rng.uniform(0.0, 1.0) * np.linalg.eigvalsh(A @ A.T)[-1] * 0.2 * np.eye(n)
    block = _random_block(rng, n)
    X = R[np.ix_(block, block)]
    if np.min(np.abs(np.linalg.eigvalsh(X))) < 1e-6:
        return True, {}
    pd_r = np.linalg.eigvalsh(R)[0] > 0
    pd_x = np.linalg.eigvalsh(X)[0] > 0
    pd_c = np.linalg.eigvalsh(schur_complement(R, block))[0] > 0
    return bool(pd_r == (pd_x and pd_c)), {"R": _matrix(R), "block": block.tolist()}


def schur_congruence(rng):
    R = _random_pd(rng)
    n = R.shape[0]
    block = _random_block(rng, n)
    rest = np.setdiff1d(np.arange(n), block)
    Mx = rng.standard_normal((block.size, block.size)) + 2 * np.eye(block.size)
    Ny = rng.standard_normal((rest.size, rest.size)) + 2 * np.eye(rest.size)
    T = np.zeros((n, n))
    T[np.ix_(block, block)] = Mx
    T[np.ix_(rest, rest)] = Ny
    lhs = schur_complement(T @ R @ T.T, block)
    rhs = Ny @ schur_complement(R, block) @ Ny.T
    ok = np.max(np.abs(lhs - rhs)) <= IDENTITY_TOL * max(1.0, np.max(np.abs(rhs)))
    return bool(ok), {"R": _matrix(R), "block": block.tolist()}


def schur_monotonicity(rng):
    R = _random_pd(rng)
    n = R.shape[0]
    lo = np.linalg.eigvalsh(R)[0]
    B = rng.standard_normal((n, n))
    D = B @ B.T
    R2 = R - 0.9 * lo / np.linalg.eigvalsh(D)[-1] * D
    block = _random_block(rng, n)
    diff = schur_complement(R, block) - schur_complement(R2, block)
    return bool(np.linalg.eigvalsh(diff)[0] > -1e-9), {"R": _matrix(R), "R_smaller": _matrix(R2),
                                                      "block": block.tolist()}


def schur_variational(rng):
    R = _random_pd(rng)
    n = R.shape[0]
    block = _random_block(rng, n)
    rest = np.setdiff1d(np.arange(n), block)
    comp = schur_complement(R, block)
    lifted = np.zeros_like(R)
    lifted[np.ix_(rest, rest)] = comp
    gap = np.linalg.eigvalsh(R - lifted)[0]
    ok = gap > -1e-9 * max(1.0, np.abs(R).max())
    v = rng.standard_normal(rest.size)
    lifted[np.ix_(rest, rest)] = comp + 1e-6 * np.abs(R).max() * np.outer(v, v) / (v @ v)
    ok = ok and np.linalg.eigvalsh(R - lifted)[0] < 0
    return bool(ok), {"R": _matrix(R), "block": block.tolist()}


# Symplectic laws


def williamson_reconstruction(rng):
    m = int(rng.integers(1, 5))
    V = _random_pd(rng, 2 * m) + 0.5 * np.eye(2 * m)
    dec = sp.williamson(V)
    sym = np.max(np.abs(dec.S @ sp.omega(m) @ dec.S.T - sp.omega(m))) < 1e-10 * max(
        1.0, np.max(np.abs(dec.S)) ** 2)
    rec = np.max(np.abs(dec.reconstruct() - V)) < 1e-8 * np.max(np.abs(V))
    return bool(sym and rec), {"V": _matrix(V)}


def williamson_determinant(rng):
    m = int(rng.integers(1, 5))
    V = _random_pd(rng, 2 * m)
    nu = sp.symplectic_eigenvalues(V)
    lhs = 2.0 * np.sum(np.log(nu))
    return _close(lhs, np.linalg.slogdet(V)[1]), {"V": _matrix(V)}


def symplectic_invariance(rng):
    m = int(rng.integers(1, 5))
    V = _random_pd(rng, 2 * m)
    S = sp.random_symplectic(m, rng, squeezing=0.5)
    a = sp.symplectic_eigenvalues(V)
    b = sp.symplectic_eigenvalues(S @ V @ S.T)
    return bool(np.max(np.abs(a - b)) <= 1e-8 * max(1.0, a.max())), {"V": _matrix(V), "S": _matrix(S)}


def purity_determinant(rng):
    m = int(rng.integers(1, 4))
    part = Partition.of(A=m)
    if rng.uniform() < 0.5:
        V = random_pure_qcm(part, rng).matrix
    else:
        V = random_qcm(part, rng).matrix
    det_ok = abs(np.linalg.det(V) - 1.0) < 1e-8 * 2 * m
    return bool(sp.is_pure_qcm(V) == det_ok), {"V": _matrix(V)}


# Log-determinant mutual information laws


def im_local_invariance(rng):
    state = _random_state(rng)
    local = {n: sp.random_symplectic(k, rng, 0.7) for n, k in state.partition.subsystems}
    moved = state.local_congruence(local)
    return _close(im_mutual(state), im_mutual(moved)), {"V": _matrix(state.matrix),
                                                        "partition": state.partition.subsystems}


def im_rescaling(rng):
    state = _random_state(rng)
    part = state.partition
    t = float(np.exp(rng.uniform(-2, 2)))
    ia, ib = part.indices(("A",)), part.indices(("B",))
    ok = _close(mutual_info_matrix(state.matrix, ia, ib), mutual_info_matrix(t * state.matrix, ia, ib))
    return ok, {"V": _matrix(state.matrix), "t": t, "partition": state.partition.subsystems}


def im_data_processing(rng):
    state = _random_state(rng)
    part = state.partition
    ia, ib = part.indices(("A",)), part.indices(("B",))
    B = rng.standard_normal((ia.size, ia.size))
    noisy = state.matrix.copy()
    noisy[np.ix_(ia, ia)] += B @ B.T
    ok = mutual_info_matrix(noisy, ia, ib) <= mutual_info_matrix(state.matrix, ia, ib) + 1e-9
    return bool(ok), {"V": _matrix(state.matrix), "K_A": _matrix(B @ B.T),
                      "partition": state.partition.subsystems}


def im_inversion(rng):
    state = _random_state(rng)
    part = state.partition
    ia, ib = part.indices(("A",)), part.indices(("B",))
    inv = np.linalg.inv(state.matrix)
    ok = _close(mutual_info_matrix(state.matrix, ia, ib), mutual_info_matrix(0.5 * (inv + inv.T), ia, ib))
    return ok, {"V": _matrix(state.matrix), "partition": state.partition.subsystems}


def im_xp_sum(rng):
    state = _random_state(rng)
    i_x, i_p = im_xp_decompose(state)
    return _close(i_x + i_p, im_mutual(state)), {"V": _matrix(state.matrix),
                                                "partition": state.partition.subsystems}


def im_xp_sum_xp_form(rng):
    """The xp decomposition on states with vanishing x-p cross blocks."""
    ma, mb = SPLITS[int(rng.integers(len(SPLITS)))]
    m = ma + mb
    nu = 1.0 + 1.5 * rng.uniform(size=m)
    M = rng.standard_normal((m, m)) + 2 * np.eye(m)
    X = M @ np.diag(nu) @ M.T
    Minv = np.linalg.inv(M)
    P = Minv.T @ np.diag(nu) @ Minv
    zero = np.zeros((m, m))
    state = QCM(np.block([[X, zero], [zero, P]]), Partition.of(A=ma, B=mb))
    i_x, i_p = im_xp_decompose(state)
    return _close(i_x + i_p, im_mutual(state)), {"V": _matrix(state.matrix),
                                                "partition": state.partition.subsystems}


def im_uniform_continuity(rng):
    state = _random_state(rng)
    part = state.partition
    ia, ib = part.indices(("A",)), part.indices(("B",))
    V = state.matrix
    E = rng.standard_normal(V.shape)
    E = 0.5 * (E + E.T)
    W = V + rng.uniform(0.01, 0.5) * np.linalg.eigvalsh(V)[0] * E / np.linalg.norm(E, 2)
    kappa = 1.0 / min(np.linalg.eigvalsh(V)[0], np.linalg.eigvalsh(W)[0])
    trace_norm = np.sum(np.abs(np.linalg.eigvalsh(V - W)))
    lhs = abs(mutual_info_matrix(V, ia, ib) - mutual_info_matrix(W, ia, ib))
    ok = lhs <= kappa * np.log2(np.e) * trace_norm + 1e-9
    return bool(ok), {"V": _matrix(V), "W": _matrix(W), "partition": state.partition.subsystems}


def im_pure_identity(rng):
    ma, mb = SPLITS[int(rng.integers(len(SPLITS)))]
    state = random_pure_qcm(Partition.of(A=ma, B=mb), rng)
    ok = _close(im_mutual(state), 2.0 * logdet_entropy(state.block(("A",))))
    return ok, {"V": _matrix(state.matrix), "partition": state.partition.subsystems}


def homodyne_pure_identity(rng):
    """Homodyne limit of a pure state in xp-form equals ``M(gamma_A)``.

    Two-mode pure states are brought to standard form; multimode ones are
    drawn directly in xp-form as ``diag(Q, Q^{-1})``.
    """
    if rng.uniform() < 0.5:
        state = random_pure_qcm(Partition.of(A=1, B=1), rng)
        _, _, state = two_mode_standard_form(state)
    else:
        ma, mb = SPLITS[int(rng.integers(len(SPLITS)))]
        m = ma + mb
        G = rng.standard_normal((m, m))
        Q = G @ G.T + 0.2 * np.eye(m)
        Q = Q / np.exp(np.mean(np.log(np.linalg.eigvalsh(Q))))
        state = QCM(np.block([[Q, np.zeros((m, m))], [np.zeros((m, m)), np.linalg.inv(Q)]]),
                    Partition.of(A=ma, B=mb))
    value = homodyne_limit_im(state).value
    ok = abs(value - logdet_entropy(state.block(("A",)))) <= HOMODYNE_TOL
    return bool(ok), {"V": _matrix(state.matrix), "partition": state.partition.subsystems}


# Two-mode equality of the intrinsic entanglement and the REoF


def conjecture_equality(rng):
    state = random_qcm(Partition.of(A=1, B=1), rng, squeezing=1.5, max_thermal=1.0)
    reof = reof_numeric(state, restarts=4, seed=int(rng.integers(2**31))).value
    est = gie_numeric(state, seed=int(rng.integers(2**31)))
    ok = abs(est.lower - reof) <= CONJECTURE_TOL and abs(est.upper - reof) <= CONJECTURE_TOL
    return bool(ok), {"V": _matrix(state.matrix), "reof": reof, "gie_lower": est.lower,
                      "gie_upper": est.upper}


SUITES = {
    "schur": {
        "determinant_factorization": schur_determinant,
        "inertia_additivity": schur_inertia,
        "block_positivity": schur_block_positivity,
        "congruence_covariance": schur_congruence,
        "monotonicity": schur_monotonicity,
        "variational": schur_variational,
    },
    "symplectic": {
        "williamson_reconstruction": williamson_reconstruction,
        "eigenvalue_determinant": williamson_determinant,
        "congruence_invariance": symplectic_invariance,
        "purity_determinant": purity_determinant,
    },
    "infomeasures": {
        "local_symplectic_invariance": im_local_invariance,
        "rescaling_invariance": im_rescaling,
        "data_processing": im_data_processing,
        "inversion": im_inversion,
        "xp_decomposition_sum": im_xp_sum,
        "xp_decomposition_sum_xp_form": im_xp_sum_xp_form,
        "uniform_continuity": im_uniform_continuity,
        "pure_state_identity": im_pure_identity,
        "homodyne_pure_identity": homodyne_pure_identity,
    },
    "conjecture": {
        "two_mode_gie_equals_reof": conjecture_equality,
    },
}


@dataclass
class LawOutcome:
    """Pass/fail counts of one law.

    Attributes:
        suite: Suite name.
        law: Law name.
        passed: Number of passing trials.
        failed: Number of failing trials.
        failures: Replay records ``{"trial", "seed", "instance"}`` of failures,
            or ``{"trial", "seed", "error"}`` when the law raised.
    """

    suite: str
    law: str
    passed: int = 0
    failed: int = 0
    failures: list = field(default_factory=list)


def run_suite(name, trials, seed=0):
    """Run every law of a suite on ``trials`` random instances.

    Args:
        name: Suite name, a key of ``SUITES``.
        trials: Instances per law, at least one.
        seed: Base seed.

    Returns:
        List of LawOutcome, one per law.
    """
    outcomes = []
    for k, (law, fn) in enumerate(SUITES[name].items()):
        out = LawOutcome(name, law)
        rng = np.random.default_rng([seed, k])
        for trial in range(trials):
            try:
                ok, instance = fn(rng)
            except Exception as exc:  # a raising law is a failing trial
                out.failed += 1
                out.failures.append({"trial": trial, "seed": [seed, k], "error": repr(exc)})
                continue
            if ok:
                out.passed += 1
            else:
                out.failed += 1
                out.failures.append({"trial": trial, "seed": [seed, k], "instance": instance})
        outcomes.append(out)
    return outcomes

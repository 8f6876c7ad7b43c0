"""Gaussian entanglement measures and secret-key bounds.

The Renyi-2 Gaussian entanglement of formation (REoF) of a bipartite QCM
``V`` is the smallest ``M(gamma_A) = (1/2) log2 det gamma_A`` over pure
QCMs ``gamma <= V``. It upper bounds the Gaussian intrinsic entanglement
(GIE), a conditional log-det mutual information optimized over Gaussian
measurement seeds of the two parties and of an eavesdropper holding the
purification. Both upper bound Gaussian secret-key rates.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import brentq, minimize

from . import symplectic as sp
from .errors import ConvergenceError, InvalidInputError, InvalidPartitionError
from .infomeasures import bosonic_g, homodyne_limit_im, logdet, von_neumann_entropy
from .model import (
    PAULI_Z,
    GaussianChannel,
    Partition,
    QCM,
    _as_names,
    channel_apply,
    direct_sum,
    pure_loss_dilation,
    pure_loss_state,
    purify,
    squeezing_parameter,
)
from .params import PureQcmParam

LN2 = np.log(2.0)
BARRIER_SCHEDULE = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
DEFAULT_RESTARTS = 8
DEFAULT_SEED = 0
#: Symplectic eigenvalues closer to 1 than this are treated as vacuum modes.
ACTIVE_TOL = 1e-9
#: Norm cap of eavesdropper seed parameters (squeezing up to exp(12)).
SEED_MAX_NORM = 12.0
FAMILY_FIT_TOL = 1e-9


@dataclass(frozen=True)
class OptimizerResult:
    """Outcome of a multi-start optimization.

    Attributes:
        value: Best objective value in bits.
        argument: Matrix attaining it (pure QCM or seed, see diagnostics).
        theta: Parameter vector of the argument.
        feasibility_residual: Largest eigenvalue of ``gamma - V`` (negative
            or zero when feasible).
        restarts: Number of starts performed.
        converged: True if the best value was reproduced by a second start
            (or the problem had no free parameters).
        diagnostics: Additional named values.
    """

    value: float
    argument: np.ndarray
    theta: np.ndarray
    feasibility_residual: float
    restarts: int
    converged: bool
    diagnostics: dict = field(default_factory=dict)


def bipartite_matrix(state, a=None, b=None):
    """Restrict a QCM to groups ``a`` and ``b`` with the ``a`` modes first.

    Returns:
        Tuple ``(matrix, modes_a, modes_b)`` with the matrix in xp ordering.
    """
    if a is None or b is None:
        names = state.partition.names
        if len(names) != 2:
            raise InvalidPartitionError(f"specify the bipartition of {list(names)}")
        a, b = (names[0],), (names[1],)
    a, b = _as_names(a), _as_names(b)
    if set(a) & set(b):
        raise InvalidPartitionError("the two groups overlap")
    part = state.partition
    return state.block(a + b), part.modes_of(a), part.modes_of(b)


def _chol_logdet_inv(M):
    """Log-determinant and inverse of a positive definite matrix (None if not PD)."""
    try:
        c = cho_factor(M, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        return None, None
    ld = 2.0 * np.sum(np.log(np.diag(c[0])))
    inv = cho_solve(c, np.eye(M.shape[0]), check_finite=False)
    return ld, inv


def _agreement(values, best, tol=1e-6):
    return int(np.sum(np.asarray(values) <= best + tol * max(1.0, abs(best))))


def _run_starts(fun, starts, method="BFGS", options=None):
    """Minimize from each start; returns list of (value, x, success, nfev)."""
    runs = []
    for x0 in starts:
        res = minimize(fun, x0, jac=True, method=method, options=options or {})
        # status 2 is a line-search precision loss, the usual stop at flat optima
        runs.append((float(res.fun), res.x, bool(res.success or res.status == 2), int(res.nfev)))
    return runs


def reof_numeric(state, a=None, b=None, restarts=DEFAULT_RESTARTS, seed=DEFAULT_SEED,
                 schedule=BARRIER_SCHEDULE):
    """Upper bound on the REoF by direct search over pure ``gamma <= V``.

    In the Williamson frame ``V = S diag(nu, nu) S^T`` any feasible pure
    ``gamma`` is ``S (G + I) S^T`` where ``G`` is a pure QCM on the modes with
    ``nu > 1`` obeying ``G <= diag(nu, nu)`` and the vacuum sits on the
    remaining modes. ``G`` is searched with a log-det barrier on
    ``diag(nu, nu) - G`` whose weight follows ``schedule``, starting from
    ``G = I`` (the pure state ``S S^T``) and from random perturbations of it.

    Args:
        state: Bona fide QCM.
        a: Names of the first party (defaults to the first subsystem).
        b: Names of the second party (defaults to the second subsystem).
        restarts: Number of starting points.
        seed: Seed for ``numpy.random.default_rng``.
        schedule: Decreasing barrier weights.

    Returns:
        OptimizerResult with the optimal pure QCM on ``a + b`` as argument.
    """
    M, ma, mb = bipartite_matrix(state, a, b)
    m = ma + mb
    ia = np.concatenate([np.arange(ma), m + np.arange(ma)])
    dec = sp.williamson(M)
    nu = dec.nu
    active = np.flatnonzero(nu - 1.0 > ACTIVE_TOL)
    k = active.size
    if k == 0:
        value = logdet(M[np.ix_(ia, ia)]) / (2 * LN2)
        return OptimizerResult(value, M.copy(), np.zeros(0), 0.0, 0, True,
                               {"active_modes": 0, "route": "pure input"})
    cols = np.concatenate([active, active + m])
    rest = np.setdiff1d(np.arange(2 * m), cols)
    S_act = dec.S[np.ix_(ia, cols)]
    S_rest = dec.S[np.ix_(ia, rest)]
    base = S_rest @ S_rest.T
    lam = np.diag(np.concatenate([nu[active], nu[active]]))
    param = PureQcmParam(k)

    def objective(theta, mu):
        G, pullback = param.value_and_pullback(theta)
        ld_a, inv_a = _chol_logdet_inv(S_act @ G @ S_act.T + base)
        ld_gap, inv_gap = _chol_logdet_inv(lam - G)
        if ld_a is None or ld_gap is None:
            return np.inf, np.zeros_like(theta)
        val = ld_a / (2 * LN2) - mu * ld_gap
        grad_G = S_act.T @ inv_a @ S_act / (2 * LN2) + mu * inv_gap
        return val, pullback(grad_G)

    def plain(theta):
        G = param.matrix(theta)
        return logdet(S_act @ G @ S_act.T + base) / (2 * LN2)

    rng = np.random.default_rng(seed)
    values, thetas, successes, nfev = [], [], [], 0
    for r in range(restarts):
        theta = np.zeros(param.dim) if r == 0 else param.random(rng, 0.5)
        while not np.isfinite(objective(theta, schedule[0])[0]):
            theta = 0.5 * theta
        ok = True
        for mu in schedule:
            res = minimize(objective, theta, args=(mu,), jac=True, method="BFGS",
                           options={"gtol": 1e-10, "maxiter": 500})
            if np.isfinite(res.fun):
                theta = res.x
            nfev += res.nfev
            ok = ok and (res.success or res.status == 2)
        values.append(plain(theta))
        thetas.append(theta)
        successes.append(ok)
    best = int(np.argmin(values))
    theta = thetas[best]
    gp = np.eye(2 * m)
    gp[np.ix_(cols, cols)] = param.matrix(theta)
    gamma = dec.S @ gp @ dec.S.T
    gamma = 0.5 * (gamma + gamma.T)
    resid = float(np.linalg.eigvalsh(gamma - M)[-1])
    agree = _agreement(values, values[best])
    converged = agree >= min(2, restarts) and successes[best]
    return OptimizerResult(float(values[best]), gamma, theta, resid, restarts, bool(converged), {
        "active_modes": int(k), "agreeing_starts": agree, "function_evaluations": nfev,
        "route": "barrier"})


def _conditional_objective(W, ia, ib, ie, scale=1.0):
    """``scale * I_M(A:B|E)`` of ``W + Gamma_E`` and its gradient in ``Gamma_E``."""
    ae = np.concatenate([ia, ie])
    be = np.concatenate([ib, ie])
    abe = np.concatenate([ia, ib, ie])
    ke = ie.size
    na, nb = ia.size, ib.size

    def evaluate(gamma_e):
        Wg = W.copy()
        Wg[np.ix_(ie, ie)] += gamma_e
        parts = []
        for idx in (ae, be, ie, abe):
            ld, inv = _chol_logdet_inv(Wg[np.ix_(idx, idx)])
            if ld is None:
                return np.inf, None
            parts.append((ld, inv))
        (l1, i1), (l2, i2), (l3, i3), (l4, i4) = parts
        val = (l1 + l2 - l3 - l4) / (2 * LN2)
        grad = i1[na:, na:] + i2[nb:, nb:] - i3 - i4[na + nb:, na + nb:]
        return scale * val, scale * grad / (2 * LN2)

    return evaluate, ke


def _homodyne_objective(W, ia, ib, ie, ma, mb):
    """x-homodyne limit ``I_M(A_x:B_x)`` of the state conditioned on ``Gamma_E``.

    ``ia``/``ib`` are xp-ordered index lists of A and B in ``W`` (x first).
    """
    iab = np.concatenate([ia, ib])
    C = W[np.ix_(iab, ie)]
    W_ab = W[np.ix_(iab, iab)]
    W_e = W[np.ix_(ie, ie)]
    # x indices of A and B inside the AB ordering [A_x, A_p, B_x, B_p]
    xa = np.arange(ma)
    xb = 2 * ma + np.arange(mb)
    xx = np.concatenate([xa, xb])

    def evaluate(gamma_e):
        ld_e, K = _chol_logdet_inv(W_e + gamma_e)
        if ld_e is None:
            return np.inf, None
        tau = W_ab - C @ K @ C.T
        tau = 0.5 * (tau + tau.T)
        blocks = []
        for idx in (xa, xb, xx):
            ld, inv = _chol_logdet_inv(tau[np.ix_(idx, idx)])
            if ld is None:
                return np.inf, None
            blocks.append((ld, inv))
        (l1, i1), (l2, i2), (l3, i3) = blocks
        val = (l1 + l2 - l3) / (2 * LN2)
        Q = np.zeros_like(tau)
        Q[np.ix_(xa, xa)] += i1
        Q[np.ix_(xb, xb)] += i2
        Q[np.ix_(xx, xx)] -= i3
        grad = K @ C.T @ Q @ C @ K / (2 * LN2)
        return val, grad

    return evaluate


def _seed_search(evaluate, modes, rng, starts, thermal=False, max_norm=SEED_MAX_NORM):
    """Minimize ``evaluate(Gamma_E)`` over pure (optionally scaled thermal) seeds.

    Seeds are ``(1 + rho^2) * G(theta)`` when ``thermal`` is set, else ``G(theta)``.

    Returns:
        Tuple ``(best value, best seed, list of start values, all succeeded)``.
    """
    param = PureQcmParam(modes, max_norm=max_norm)

    def fun(x):
        theta = x[:param.dim]
        G, pullback = param.value_and_pullback(theta)
        nu = 1.0
        if thermal:
            nu = 1.0 + x[-1] ** 2
        val, grad_seed = evaluate(nu * G)
        if grad_seed is None:
            return np.inf, np.zeros_like(x)
        g = pullback(nu * grad_seed)
        if thermal:
            g = np.concatenate([g, [2.0 * x[-1] * np.sum(grad_seed * G)]])
        return val, g

    dim = param.dim + (1 if thermal else 0)
    x0s = [np.zeros(dim)] + [rng.standard_normal(dim) for _ in range(max(0, starts - 1))]
    runs = _run_starts(fun, x0s, options={"gtol": 1e-9, "maxiter": 400})
    vals = [v for v, _, _, _ in runs]
    best = int(np.argmin(vals))
    x = runs[best][1]
    seed = param.matrix(x[:param.dim]) * ((1.0 + x[-1] ** 2) if thermal else 1.0)
    return vals[best], seed, vals, all(s for _, _, s, _ in runs)


def _purified(M, ma, mb):
    part = Partition.of(A=ma, B=mb)
    P = purify(QCM(M, part), env_name="E", minimal=True)
    pp = P.partition
    return P.matrix, pp.indices(("A",)), pp.indices(("B",)), pp.indices(("E",)), pp.modes_of(("E",))


def reof_squashed(state, a=None, b=None, restarts=DEFAULT_RESTARTS, seed=DEFAULT_SEED):
    """Upper bound on the REoF through the eavesdropper-conditioning route.

    Minimizes ``(1/2) I_M(A:B|E)`` of ``gamma_ABE + Gamma_E`` over pure seeds
    ``Gamma_E`` on the purifying system, where ``gamma_ABE`` purifies ``V``.
    Each seed yields a pure conditional state ``tau <= V`` whose value
    ``M(tau_A)`` equals the objective.

    Returns:
        OptimizerResult whose argument is the conditional pure state ``tau``
        and whose diagnostics contain the seed.
    """
    M, ma, mb = bipartite_matrix(state, a, b)
    W, ia, ib, ie, ke = _purified(M, ma, mb)
    if ke == 0:
        ia_ab = np.concatenate([np.arange(ma), ma + mb + np.arange(ma)])
        value = logdet(M[np.ix_(ia_ab, ia_ab)]) / (2 * LN2)
        return OptimizerResult(value, M.copy(), np.zeros(0), 0.0, 0, True, {"environment_modes": 0})
    evaluate, _ = _conditional_objective(W, ia, ib, ie, scale=0.5)
    rng = np.random.default_rng(seed)
    value, gamma_e, vals, ok = _seed_search(evaluate, ke, rng, restarts)
    tau = _condition(W, ia, ib, ie, gamma_e)
    resid = float(np.linalg.eigvalsh(tau - M)[-1])
    agree = _agreement(vals, value)
    return OptimizerResult(float(value), tau, np.zeros(0), resid, restarts,
                           bool(agree >= min(2, restarts)),
                           {"environment_modes": int(ke), "seed": gamma_e, "agreeing_starts": agree,
                            "all_starts_succeeded": ok})


def _condition(W, ia, ib, ie, gamma_e):
    # A and B precede E in the purification, so sorted indices are xp-ordered over AB
    iab = np.sort(np.concatenate([ia, ib]))
    Wg = W.copy()
    Wg[np.ix_(ie, ie)] += gamma_e
    C = Wg[np.ix_(iab, ie)]
    tau = Wg[np.ix_(iab, iab)] - C @ np.linalg.solve(Wg[np.ix_(ie, ie)], C.T)
    return 0.5 * (tau + tau.T)


@dataclass(frozen=True)
class GieEstimate:
    """Numerical bracket of the Gaussian intrinsic entanglement.

    Iterates as ``(lower, upper)``.

    Attributes:
        lower: Best sup-inf value found over party seeds.
        upper: Inf over pure eavesdropper seeds of the classical log-det
            mutual information of the conditional pure state.
        partial: True if some inner search did not report success.
        diagnostics: Candidate values and frames used.
    """

    lower: float
    upper: float
    partial: bool = False
    diagnostics: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.lower, self.upper))


def _local_frame(M, ma, mb, seed):
    """Local symplectic bringing ``M`` to xp-form, if one is found."""
    from .normality import is_normal, two_mode_standard_form

    part = Partition.of(A=ma, B=mb)
    if ma == 1 and mb == 1:
        S_a, S_b, V_std = two_mode_standard_form(QCM(M, part))
        return V_std.matrix, "two-mode standard form"
    report = is_normal(QCM(M, part), seed=seed)
    if report.certificate.name in ("NORMAL_BY_CONSTRUCTION", "NUMERICALLY_NORMAL") and report.transformed is not None:
        return report.transformed.matrix, "numerical xp-form"
    return M, "identity (no xp-form found)"


def gie_numeric(state, a=None, b=None, budget=4, seed=DEFAULT_SEED):
    """Bracket the Gaussian intrinsic entanglement.

    The lower value maximizes, over candidate party seeds, the infimum over
    eavesdropper seeds of ``I_M(A:B|E)`` on ``gamma_ABE + Gamma_A + Gamma_B +
    Gamma_E``. Candidates are: x-homodyne seeds in a local frame where ``V``
    is in xp-form (evaluated in the limit ``t -> 0``), heterodyne seeds, and
    ``budget`` random thermal-scaled pure seeds. The inner infimum runs over
    thermal-scaled pure seeds. The upper value is the infimum over pure
    eavesdropper seeds of the classical mutual information of the
    conditional pure state, which equals ``M(tau_A)`` for pure ``tau``.

    Args:
        state: Bona fide QCM.
        a: First party names.
        b: Second party names.
        budget: Number of starts of each inner search and of random candidates.
        seed: RNG seed.

    Returns:
        GieEstimate.
    """
    M, ma, mb = bipartite_matrix(state, a, b)
    rng = np.random.default_rng(seed)
    W, ia, ib, ie, ke = _purified(M, ma, mb)
    diag = {}
    if ke == 0:
        value = logdet(M[np.ix_(ia, ia)]) / (2 * LN2)
        return GieEstimate(value, value, False, {"environment_modes": 0})

    upper_eval, _ = _conditional_objective(W, ia, ib, ie, scale=0.5)
    upper, gamma_e, _, ok_up = _seed_search(upper_eval, ke, rng, budget)
    diag["upper_seed"] = gamma_e
    if ma == 1 and mb == 1:
        # classical mutual information of the conditional pure state via homodyne
        # detection in its standard form, as an independent check of the upper value
        from .normality import two_mode_standard_form

        tau = _condition(W, ia, ib, ie, gamma_e)
        _, _, tau_std = two_mode_standard_form(QCM(tau, Partition.of(A=1, B=1)))
        diag["upper_homodyne_check"] = homodyne_limit_im(
            tau_std, schedule=(1e-3, 1e-4, 1e-5, 1e-6)).value

    # lower: work in a local frame where V is in xp-form; GIE is invariant under it
    Mf, frame = _local_frame(M, ma, mb, seed)
    diag["frame"] = frame
    Wf, ja, jb, je, _ = _purified(Mf, ma, mb)
    candidates = {}
    partial = not ok_up
    homodyne = _homodyne_objective(Wf, ja, jb, je, ma, mb)
    val, _, _, ok = _seed_search(homodyne, ke, rng, budget, thermal=True)
    candidates["homodyne_limit"] = val
    partial = partial or not ok

    def finite_candidate(seed_a, seed_b):
        Wc = Wf.copy()
        Wc[np.ix_(ja, ja)] += seed_a
        Wc[np.ix_(jb, jb)] += seed_b
        ev, _ = _conditional_objective(Wc, ja, jb, je)
        v, _, _, ok_c = _seed_search(ev, ke, rng, budget, thermal=True)
        return v, ok_c

    # heterodyne on both sides
    candidates["heterodyne"], ok = finite_candidate(np.eye(2 * ma), np.eye(2 * mb))
    partial = partial or not ok
    pa, pb = PureQcmParam(ma), PureQcmParam(mb)
    for j in range(budget):
        seed_a = (1.0 + rng.exponential(0.5)) * pa.matrix(pa.random(rng, 1.0))
        seed_b = (1.0 + rng.exponential(0.5)) * pb.matrix(pb.random(rng, 1.0))
        candidates[f"random_{j}"], ok = finite_candidate(seed_a, seed_b)
        partial = partial or not ok
    lower = max(candidates.values())
    diag["candidates"] = candidates
    diag["lower_le_upper"] = bool(lower <= upper + 1e-2)
    return GieEstimate(float(lower), float(upper), bool(partial), diag)


def saddle_check(state, a=None, b=None, budget=4, seed=DEFAULT_SEED):
    """Gap ``|lower - upper|`` between the sup-inf and inf-sup estimates."""
    est = gie_numeric(state, a, b, budget=budget, seed=seed)
    return abs(est.lower - est.upper)


def reof_closed_form(lam, s_db):
    """REoF of the TMSV sent through pure loss, in bits.

    Args:
        lam: Transmissivity in ``[0, 1]``.
        s_db: Squeezing in dB.
    """
    _check_family_args(lam, s_db)
    sh2 = np.sinh(squeezing_parameter(s_db)) ** 2
    return float(np.log2((1 + (1 + lam) * sh2) / (1 + (1 - lam) * sh2)))


def optimal_squeezing(lam, s_db):
    """Squeezing parameter ``r'`` of the optimal TMSV, ``tanh r' = sqrt(lam) tanh r``."""
    _check_family_args(lam, s_db)
    return float(np.arctanh(np.sqrt(lam) * np.tanh(squeezing_parameter(s_db))))


def one_way_distillable(lam, s_db):
    """One-way distillable entanglement ``g(sinh^2 r) - g((1-lam) sinh^2 r)``."""
    _check_family_args(lam, s_db)
    sh2 = np.sinh(squeezing_parameter(s_db)) ** 2
    return bosonic_g(sh2) - bosonic_g((1 - lam) * sh2)


def coherent_information(state, a=None, b=None):
    """Coherent information ``S(B) - S(AB)`` from symplectic eigenvalues."""
    M, ma, mb = bipartite_matrix(state, a, b)
    m = ma + mb
    ib = np.concatenate([ma + np.arange(mb), m + ma + np.arange(mb)])
    return von_neumann_entropy(M[np.ix_(ib, ib)]) - von_neumann_entropy(M)


def _check_family_args(lam, s_db):
    if not 0.0 <= lam <= 1.0:
        raise InvalidInputError(f"transmissivity must lie in [0, 1], got {lam}")
    if s_db < 0:
        raise InvalidInputError(f"squeezing must be nonnegative, got {s_db}")


def degrading_channel(lam, s_db):
    """Channel on B mapping the pure-loss state to its environment marginal on AE."""
    _check_family_args(lam, s_db)
    r = squeezing_parameter(s_db)
    c = np.cosh(2 * r)
    X = np.sqrt(1 - lam) * np.tanh(r) * PAULI_Z
    Y = ((2 - lam) * c + lam) / (c + 1) * np.eye(2)
    return GaussianChannel(X, Y)


@dataclass(frozen=True)
class DegradabilityCertificate:
    """Attributes:
        residual: Max-entry distance between the degraded state and the AE marginal.
        cp_margin: ``sqrt(det Y) - |1 - det X|`` of the degrading channel.
        cp_eigenvalue: Smallest eigenvalue of the complete positivity matrix.
    """

    residual: float
    cp_margin: float
    cp_eigenvalue: float


def degradability_certificate(lam, s_db):
    """Check that the degrading channel maps ``V_{lam,s}`` on B to the AE marginal.

    Raises:
        InvalidChannelError: if the degrading channel is not completely positive.
    """
    ch = degrading_channel(lam, s_db)
    degraded = channel_apply(ch, pure_loss_state(lam, s_db), on="B", out_name="E")
    target = pure_loss_dilation(lam, s_db).sub(("A", "E"))
    residual = float(np.max(np.abs(degraded.matrix - target.matrix)))
    return DegradabilityCertificate(residual, ch.cp_margin(), ch.cp_eigenvalue())


def fit_pure_loss(state):
    """Fit ``(lam, s_db)`` of the pure-loss family to a two-mode QCM.

    Returns:
        Tuple ``(lam, s_db, residual)``; residual is ``inf`` when no fit exists.
    """
    M, ma, mb = bipartite_matrix(state)
    if ma != 1 or mb != 1:
        return None, None, np.inf
    c = 0.5 * (M[1, 1] + M[3, 3])
    if c < 1.0:
        return None, None, np.inf
    r = 0.5 * np.arccosh(c)
    s_db = 20.0 * r / np.log(10.0)
    if c - 1.0 > 1e-12:
        lam = float(np.clip((0.5 * (M[0, 0] + M[2, 2]) - 1.0) / (c - 1.0), 0.0, 1.0))
    else:
        lam = 1.0
    resid = float(np.max(np.abs(pure_loss_state(lam, s_db).matrix - M)))
    return lam, s_db, resid


@dataclass(frozen=True)
class KeyBounds:
    """Secret-key upper bounds derived from the REoF.

    Attributes:
        reof: REoF value used.
        one_way_bound: Bound on one-way Gaussian key rates (equals reof).
        two_way_bound: Bound on two-way Gaussian key rates (twice reof).
        glmpc_bound: Bound for local measurements with public communication.
        gie_lower: Lower estimate of the Gaussian intrinsic entanglement.
        gie_upper: Upper estimate of the Gaussian intrinsic entanglement.
        diagnostics: Source of the reof value and optimizer flags.
    """

    reof: float
    one_way_bound: float
    two_way_bound: float
    glmpc_bound: float
    gie_lower: float
    gie_upper: float
    diagnostics: dict = field(default_factory=dict)


def reof_value(state, a=None, b=None, restarts=DEFAULT_RESTARTS, seed=DEFAULT_SEED):
    """REoF using the closed form when ``state`` is a pure-loss state, else the optimizer.

    Returns:
        Tuple ``(value, diagnostics)``.
    """
    if a is None and b is None and len(state.partition.names) == 2:
        lam, s_db, resid = fit_pure_loss(state)
        if resid < FAMILY_FIT_TOL:
            return reof_closed_form(lam, s_db), {"source": "closed form", "lambda": lam, "s_db": s_db}
    res = reof_numeric(state, a, b, restarts=restarts, seed=seed)
    return res.value, {"source": "optimizer", "converged": res.converged,
                       "feasibility_residual": res.feasibility_residual}


def key_bounds(state, a=None, b=None, restarts=DEFAULT_RESTARTS, seed=DEFAULT_SEED, budget=4):
    """Assemble the REoF-based key bounds and the GIE estimate."""
    value, diag = reof_value(state, a, b, restarts=restarts, seed=seed)
    gie = gie_numeric(state, a, b, budget=budget, seed=seed)
    diag = dict(diag, gie_partial=gie.partial)
    return KeyBounds(value, value, 2 * value, value, gie.lower, gie.upper, diag)


def _reof_minus_distillable(lam, s_db):
    return reof_closed_form(lam, s_db) - one_way_distillable(lam, s_db)


@dataclass(frozen=True)
class CrossingAnalysis:
    """Where the REoF bound drops below the one-way distillable entanglement.

    Attributes:
        r0: Threshold squeezing parameter solving ``cosh^2(r) ln coth(r) = 1``.
        s0_db: The same threshold in dB.
        lambda0: Mapping ``s_db -> crossing transmissivity`` (None below threshold).
    """

    r0: float
    s0_db: float
    lambda0: dict


def threshold_squeezing():
    """Root of ``cosh^2(r) ln coth(r) = 1``."""
    return brentq(lambda r: np.cosh(r) ** 2 * np.log(1.0 / np.tanh(r)) - 1.0, 0.05, 2.0, xtol=1e-14)


def crossing_lambda(s_db, grid=2000):
    """Transmissivity above which the REoF is below the distillable entanglement.

    Returns:
        The crossing ``lambda_0(s)``, or None when the REoF never exceeds it.

    Raises:
        ConvergenceError: if a sign change is seen but cannot be bracketed.
    """
    lams = np.linspace(0.0, 1.0, grid + 1)[1:]
    diff = np.array([_reof_minus_distillable(x, s_db) for x in lams])
    pos = np.flatnonzero(diff > 1e-12)
    if pos.size == 0:
        return None
    j = pos[-1]
    if j == lams.size - 1:
        raise ConvergenceError(f"no crossing bracketed at s = {s_db} dB: REoF exceeds at lambda = 1")
    return brentq(_reof_minus_distillable, lams[j], lams[j + 1], args=(s_db,), xtol=1e-14)


def crossing_analysis(s_values=(2.0, 5.0, 10.0, 15.0)):
    """Threshold squeezing and crossing transmissivities."""
    r0 = threshold_squeezing()
    s0 = 20.0 * r0 / np.log(10.0)
    table = {float(s): (crossing_lambda(s) if s > s0 else None) for s in s_values}
    return CrossingAnalysis(float(r0), float(s0), table)


def sweep_rows(s_values, steps):
    """Rows ``(lambda, s_db, reof, d_one_way)`` on ``lambda = i/steps``, ``i = 1..steps``."""
    if steps < 2:
        raise InvalidInputError("need at least two lambda steps")
    rows = []
    for s in s_values:
        for i in range(1, steps + 1):
            lam = i / steps
            rows.append((lam, float(s), reof_closed_form(lam, s), one_way_distillable(lam, s)))
    return rows


@dataclass(frozen=True)
class AdditivityReport:
    """Attributes:
        deviation: ``|numeric(V^{+n}) - n * value(V)|``.
        numeric: Optimizer value on the direct sum.
        reference: ``n`` times the single-copy value.
        converged: Optimizer flag on the direct sum.
    """

    deviation: float
    numeric: float
    reference: float
    converged: bool


def additivity_check(state, n=2, restarts=DEFAULT_RESTARTS, seed=DEFAULT_SEED):
    """Compare the REoF of ``n`` copies with ``n`` times the single-copy value."""
    if n < 1:
        raise InvalidInputError("need at least one copy")
    names = state.partition.names
    if len(names) != 2:
        raise InvalidPartitionError("additivity check needs a bipartite state")
    single, _ = reof_value(state, restarts=restarts, seed=seed)
    big = direct_sum(*([state] * n))
    a = tuple(f"{names[0]}{k}" for k in range(1, n + 1))
    b = tuple(f"{names[1]}{k}" for k in range(1, n + 1))
    res = reof_numeric(big, a, b, restarts=restarts, seed=seed)
    ref = n * single
    return AdditivityReport(float(abs(res.value - ref)), float(res.value), float(ref), res.converged)

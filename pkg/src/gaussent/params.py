"""Smooth parametrization of pure covariance matrices.

A pure QCM on ``k`` modes is ``expm(L)`` with ``L = [[a, b], [b, -a]]`` and
``a, b`` real symmetric ``k x k``. Such ``L`` is both symmetric and
Hamiltonian, so ``expm(L)`` is a positive definite symplectic matrix; every
pure QCM arises this way (its matrix logarithm has that form). This is the
polar part of ``S S^T`` with ``S = expm(Omega K)``; the rotational part of
``S`` does not change ``S S^T`` and is left out.
"""

import numpy as np


def _symmetric_basis(k):
    out = []
    for i in range(k):
        for j in range(i, k):
            E = np.zeros((k, k))
            E[i, j] = E[j, i] = 1.0
            out.append(E)
    return out


class PureQcmParam:
    """Map from ``k (k + 1)`` real parameters to pure QCMs, with gradients.

    Args:
        modes: Number of modes ``k``.
        max_norm: If given, parameters are squashed radially so their
            Euclidean norm stays below this value. Pure states far out
            (squeezing ``exp(max_norm)``) approximate homodyne limits while
            keeping matrices well conditioned.
    """

    def __init__(self, modes, max_norm=None):
        self.modes = int(modes)
        self.max_norm = max_norm
        k = self.modes
        zero = np.zeros((k, k))
        basis = []
        for E in _symmetric_basis(k):
            basis.append(np.block([[E, zero], [zero, -E]]))
        for E in _symmetric_basis(k):
            basis.append(np.block([[zero, E], [E, zero]]))
        self.basis = np.array(basis).reshape(len(basis), 2 * k, 2 * k)

    @property
    def dim(self):
        return self.basis.shape[0]

    def _squash(self, theta):
        if self.max_norm is None:
            return theta, 1.0, 0.0
        n = np.linalg.norm(theta)
        if n < 1e-300:
            return theta, 1.0, 0.0
        z = self.max_norm
        h = z * np.tanh(n / z) / n
        # derivative of h with respect to n
        dh = (1.0 - np.tanh(n / z) ** 2 - h) / n
        return theta * h, h, dh

    def generator(self, theta):
        eff, _, _ = self._squash(np.asarray(theta, dtype=float))
        return np.tensordot(eff, self.basis, axes=1)

    def matrix(self, theta):
        """Pure QCM of the parameter vector."""
        w, U = np.linalg.eigh(self.generator(theta))
        return (U * np.exp(w)) @ U.T

    def value_and_pullback(self, theta):
        """Return the pure QCM and a function mapping ``dF/dG`` to ``dF/dtheta``."""
        theta = np.asarray(theta, dtype=float)
        eff, h, dh = self._squash(theta)
        L = np.tensordot(eff, self.basis, axes=1)
        w, U = np.linalg.eigh(L)
        ew = np.exp(w)
        G = (U * ew) @ U.T
        diff = w[:, None] - w[None, :]
        close = np.abs(diff) < 1e-12
        safe = np.where(close, 1.0, diff)
        # divided differences of exp, with the diagonal limit exp(w)
        F = np.where(close, 0.5 * (ew[:, None] + ew[None, :]),
                     ew[None, :] * np.expm1(np.where(close, 0.0, diff)) / safe)

        def pullback(grad_G):
            grad_G = 0.5 * (grad_G + grad_G.T)
            H = F * (U.T @ grad_G @ U)
            grad_L = U @ H @ U.T
            g = np.tensordot(self.basis, grad_L, axes=([1, 2], [0, 1]))
            if self.max_norm is None:
                return g
            n = np.linalg.norm(theta)
            if n < 1e-300:
                return g * h
            return h * g + dh * (theta @ g) * theta / n

        return G, pullback

    def random(self, rng, scale=1.0):
        return scale * rng.standard_normal(self.dim)

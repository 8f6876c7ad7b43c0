import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussent import symplectic as sp
from gaussent.errors import InvalidInputError, InvalidPartitionError
from gaussent.model import QCM, Partition, pure_loss_state, random_pure_qcm, random_qcm, tmsv
from gaussent.normality import (
    Certificate,
    cross_block,
    cross_correlation_norm,
    is_normal,
    non_normal_family,
    two_mode_standard_form,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Z = np.diag([1.0, -1.0])
# couplings whose F F^T and G G^T do not commute
F_OBSTRUCTED = np.array([[0.6, 0.2], [0.0, 0.3]])
G_OBSTRUCTED = np.array([[0.5, 0.0], [0.4, 0.2]])


def local_move(state, rng, scale=0.7):
    part = state.partition
    return state.local_congruence({name: sp.random_symplectic(part.modes_of((name,)), rng, scale)
                                   for name in part.names})


class TestStandardForm:
    @pytest.mark.parametrize("state", [tmsv(6.0), pure_loss_state(0.4, 9.0)], ids=["tmsv", "pure_loss"])
    def test_family_is_already_standard(self, state):
        _, _, std = two_mode_standard_form(state)
        assert np.max(np.abs(std.matrix - state.matrix)) < 1e-10

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_recovers_moved_state(self, seed):
        rng = np.random.default_rng(seed)
        state = random_qcm(Partition.of(A=1, B=1), rng)
        _, _, std = two_mode_standard_form(state)
        _, _, again = two_mode_standard_form(local_move(state, rng))
        assert np.max(np.abs(again.matrix - std.matrix)) < 1e-9 * np.max(np.abs(std.matrix))

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_transform_is_local_symplectic(self, seed):
        state = random_qcm(Partition.of(A=1, B=1), np.random.default_rng(seed))
        S_a, S_b, std = two_mode_standard_form(state)
        assert sp.is_symplectic(S_a, tol=1e-9) and sp.is_symplectic(S_b, tol=1e-9)
        moved = state.local_congruence({"A": S_a, "B": S_b})
        np.testing.assert_allclose(moved.matrix, std.matrix, atol=1e-9 * np.max(np.abs(std.matrix)))
        np.testing.assert_array_equal(cross_block(std.matrix), np.zeros((2, 2)))
        np.testing.assert_allclose(std.symplectic_eigenvalues(), state.symplectic_eigenvalues(), rtol=1e-9)

    def test_needs_one_mode_each(self):
        with pytest.raises(InvalidPartitionError):
            two_mode_standard_form(random_qcm(Partition.of(A=1, B=2), np.random.default_rng(0)))


class TestCrossCorrelation:
    def test_xp_form_is_zero(self):
        assert cross_correlation_norm(tmsv(5.0).matrix) == 0.0

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_invariant_under_squeezing(self, seed):
        rng = np.random.default_rng(seed)
        V = random_qcm(Partition.of(A=1, B=2), rng).matrix
        N = rng.standard_normal((3, 3)) + 3 * np.eye(3)
        S = np.block([[N, np.zeros((3, 3))], [np.zeros((3, 3)), np.linalg.inv(N).T]])
        assert cross_correlation_norm(S @ V @ S.T) == pytest.approx(cross_correlation_norm(V), rel=1e-8)


class TestIsNormal:
    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_two_mode_states(self, seed):
        state = random_qcm(Partition.of(A=1, B=1), np.random.default_rng(seed))
        report = is_normal(state)
        assert report.residual < 1e-7
        assert report.certificate is Certificate.NORMAL_BY_CONSTRUCTION

    def test_pure_three_mode_state(self):
        gamma = random_pure_qcm(Partition.of(A=1, B=2), np.random.default_rng(1))
        report = is_normal(gamma)
        assert report.residual < 1e-7
        assert report.certificate is Certificate.NORMAL_BY_CONSTRUCTION

    def test_moved_xp_form_state(self):
        rng = np.random.default_rng(2)
        X = random_qcm(Partition.of(A=1, B=2), rng).matrix[:3, :3]
        V = QCM(np.block([[X, np.zeros((3, 3))], [np.zeros((3, 3)), np.linalg.inv(X) * 2.0]]),
                Partition.of(A=1, B=2))
        report = is_normal(local_move(V, rng))
        assert report.residual < 1e-7
        assert report.certificate is Certificate.NUMERICALLY_NORMAL

    def test_transform_reproduces_report(self):
        state = random_qcm(Partition.of(A=1, B=1), np.random.default_rng(4))
        report = is_normal(state)
        moved = state.local_congruence(report.local)
        np.testing.assert_allclose(moved.matrix, report.transformed.matrix, atol=1e-9)
        assert cross_correlation_norm(moved.matrix) == pytest.approx(report.residual, abs=1e-9)


class TestNonNormalFamily:
    def test_obstructed_instance(self):
        V, report = non_normal_family(3.0, 2.0, 3.0, F_OBSTRUCTED, G_OBSTRUCTED)
        assert V.is_bona_fide()
        assert report.certificate is Certificate.OBSTRUCTION_FOUND
        comm, gap = report.obstruction
        assert comm > 1e-3 and gap == 1.0
        assert report.residual > 1e-3

    def test_equal_couplings_are_normal(self):
        _, report = non_normal_family(3.0, 2.0, 3.0, F_OBSTRUCTED, F_OBSTRUCTED)
        assert report.obstruction is None
        assert report.certificate is not Certificate.OBSTRUCTION_FOUND

    def test_commuting_pauli_couplings_are_normal(self):
        _, report = non_normal_family(3.0, 2.0, 3.0, PAULI_Z / 2, (PAULI_X + PAULI_Z) / 2)
        assert report.obstruction is None
        assert report.residual < 1e-7

    @pytest.mark.parametrize("args", [
        (2.0, 2.0, 3.0, F_OBSTRUCTED, G_OBSTRUCTED),
        (3.0, 1.0, 3.0, F_OBSTRUCTED, G_OBSTRUCTED),
        (3.0, 2.0, 3.0, 2.0 * np.eye(2), G_OBSTRUCTED),
        (3.0, 2.0, 3.0, np.eye(3), G_OBSTRUCTED),
    ])
    def test_bad_parameters(self, args):
        with pytest.raises(InvalidInputError):
            non_normal_family(*args)

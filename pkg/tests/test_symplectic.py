import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussent import symplectic as sp
from gaussent.errors import InvalidInputError, InvalidShapeError
from gaussent.laws import SUITES
from gaussent.model import tmsv

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestOrdering:
    def test_modewise_omega_is_block_diagonal(self):
        J = np.array([[0.0, 1.0], [-1.0, 0.0]])
        expected = np.block([[J, np.zeros((2, 2))], [np.zeros((2, 2)), J]])
        np.testing.assert_array_equal(sp.omega(2, sp.Ordering.MODEWISE), expected)

    def test_reorder_maps_omega(self):
        moved = sp.reorder(sp.omega(3), sp.Ordering.XP, sp.Ordering.MODEWISE)
        np.testing.assert_array_equal(moved, sp.omega(3, sp.Ordering.MODEWISE))

    def test_same_ordering_is_identity(self):
        V = np.arange(16.0).reshape(4, 4)
        np.testing.assert_array_equal(sp.reorder(V, "xp", "xp"), V)

    @given(seeds)
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((4, 4))
        V = A + A.T
        back = sp.reorder(sp.reorder(V, "xp", "modewise"), "modewise", "xp")
        np.testing.assert_array_equal(back, V)

    def test_odd_dimension_rejected(self):
        with pytest.raises(InvalidShapeError):
            sp.mode_count(np.eye(3))


class TestWilliamson:
    def test_single_mode_xp_form(self):
        dec = sp.williamson(np.diag([4.0, 1.0]))
        np.testing.assert_allclose(dec.nu, [2.0])
        np.testing.assert_allclose(dec.S, np.diag([np.sqrt(2.0), 1.0 / np.sqrt(2.0)]), atol=1e-12)

    def test_thermal_state(self):
        dec = sp.williamson(3.0 * np.eye(4))
        np.testing.assert_allclose(dec.nu, [3.0, 3.0])

    def test_pure_state_has_unit_eigenvalues(self):
        np.testing.assert_allclose(sp.symplectic_eigenvalues(tmsv(10.0).matrix), [1.0, 1.0], atol=1e-10)

    def test_eigenvalues_sorted_descending(self):
        V = np.diag([1.0, 5.0, 2.0, 1.0, 5.0, 2.0])
        np.testing.assert_allclose(sp.symplectic_eigenvalues(V), [5.0, 2.0, 1.0])

    def test_not_positive_definite_raises(self):
        with pytest.raises(InvalidInputError):
            sp.williamson(np.diag([1.0, -1.0]))

    @settings(max_examples=50, deadline=None)
    @given(seeds, st.integers(min_value=1, max_value=4))
    def test_decomposition_invariants(self, seed, m):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((2 * m, 2 * m))
        V = A @ A.T + 0.2 * np.eye(2 * m)
        dec = sp.williamson(V)
        om = sp.omega(m)
        scale = max(1.0, np.max(np.abs(dec.S)) ** 2)
        assert np.max(np.abs(dec.S @ om @ dec.S.T - om)) < 1e-10 * scale
        assert np.max(np.abs(dec.reconstruct() - V)) < 1e-8 * np.max(np.abs(V))
        np.testing.assert_allclose(np.prod(dec.nu) ** 2, np.linalg.det(V), rtol=1e-8)

    def test_xp_form_route_gives_gl_symplectic(self):
        X = np.array([[3.0, 1.0], [1.0, 2.0]])
        P = np.array([[2.0, -0.5], [-0.5, 1.5]])
        V = np.block([[X, np.zeros((2, 2))], [np.zeros((2, 2)), P]])
        assert sp.is_xp_form(V)
        dec = sp.williamson(V)
        assert sp.is_xp_form(dec.S)
        np.testing.assert_allclose(dec.reconstruct(), V, atol=1e-12)


class TestChecks:
    def test_vacuum_is_pure_and_bona_fide(self):
        assert sp.is_pure_qcm(np.eye(2))
        assert sp.is_bona_fide(np.eye(2))

    def test_sub_vacuum_is_not_bona_fide(self):
        assert not sp.is_bona_fide(0.5 * np.eye(2))

    def test_thermal_is_not_pure(self):
        assert not sp.is_pure_qcm(1.5 * np.eye(2))

    @given(seeds, st.integers(min_value=1, max_value=4))
    def test_random_symplectic_is_symplectic(self, seed, m):
        S = sp.random_symplectic(m, np.random.default_rng(seed))
        assert sp.is_symplectic(S, tol=1e-9 * max(1.0, np.max(np.abs(S)) ** 2))

    def test_hamiltonian_exponential_is_symplectic(self):
        K = np.array([[1.0, 0.3], [0.3, -0.2]])
        assert sp.is_symplectic(sp.hamiltonian_exp(K))


class TestLaws:
    @pytest.mark.parametrize("law", sorted(SUITES["symplectic"]))
    @settings(max_examples=30, deadline=None)
    @given(seed=seeds)
    def test_law_holds(self, law, seed):
        ok, instance = SUITES["symplectic"][law](np.random.default_rng(seed))
        assert ok, instance

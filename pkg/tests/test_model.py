import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussent import symplectic as sp
from gaussent.errors import (
    InvalidChannelError,
    InvalidInputError,
    InvalidPartitionError,
    InvalidShapeError,
)
from gaussent.model import (
    PAULI_Z,
    QCM,
    GaussianChannel,
    Partition,
    channel_apply,
    direct_sum,
    from_json_dict,
    homodyne_seed,
    identity_channel,
    load_qcm,
    pure_loss_channel,
    pure_loss_dilation,
    pure_loss_state,
    purify,
    random_qcm,
    squeezing_parameter,
    tmsv,
    to_json_dict,
    vacuum,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestPartition:
    def test_indices_are_xp_ordered(self):
        part = Partition.of(A=1, B=2)
        np.testing.assert_array_equal(part.indices(("A",)), [0, 3])
        np.testing.assert_array_equal(part.indices(("B",)), [1, 2, 4, 5])
        np.testing.assert_array_equal(part.indices(("B", "A")), [1, 2, 0, 4, 5, 3])

    def test_duplicate_names_rejected(self):
        with pytest.raises(InvalidPartitionError):
            Partition((("A", 1), ("A", 1)))

    def test_unknown_name_rejected(self):
        with pytest.raises(InvalidPartitionError):
            Partition.of(A=1).indices(("C",))


class TestQcm:
    def test_symmetry_enforced(self):
        with pytest.raises(InvalidInputError, match="symmetry"):
            QCM(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_mode_count_must_match(self):
        with pytest.raises(InvalidPartitionError):
            QCM(np.eye(4), Partition.of(A=1))

    def test_matrix_is_read_only(self):
        state = vacuum(Partition.of(A=1))
        with pytest.raises(ValueError):
            state.matrix[0, 0] = 2.0

    def test_regroup(self):
        state = random_qcm(Partition.of(A=1, B=1, C=1), np.random.default_rng(0))
        grouped = state.regroup({"X": ("C", "A"), "Y": ("B",)})
        np.testing.assert_allclose(grouped.block("X"), state.block(("C", "A")))
        assert grouped.partition.subsystems == (("X", 2), ("Y", 1))


class TestFamilies:
    def test_squeezing_parameter(self):
        assert squeezing_parameter(20.0) == pytest.approx(np.log(10.0))

    def test_tmsv_is_pure(self):
        assert tmsv(10.0).is_pure()

    def test_pure_loss_blocks(self):
        lam, s = 0.3, 7.0
        r = squeezing_parameter(s)
        c, sh = np.cosh(2 * r), np.sinh(2 * r)
        mw = pure_loss_state(lam, s).to_modewise()
        np.testing.assert_allclose(mw[:2, :2], (lam * c + 1 - lam) * np.eye(2))
        np.testing.assert_allclose(mw[:2, 2:], np.sqrt(lam) * sh * PAULI_Z)
        np.testing.assert_allclose(mw[2:, 2:], c * np.eye(2))

    def test_pure_loss_symplectic_eigenvalues(self):
        lam, s = 0.5, 5.0
        c = np.cosh(2 * squeezing_parameter(s))
        nu = pure_loss_state(lam, s).symplectic_eigenvalues()
        np.testing.assert_allclose(nu, [lam + (1 - lam) * c, 1.0], atol=1e-12)

    @pytest.mark.parametrize("lam", [0.0, 0.2, 0.7, 1.0])
    def test_dilation_is_pure_with_right_marginal(self, lam):
        dil = pure_loss_dilation(lam, 6.0)
        assert dil.is_pure()
        np.testing.assert_allclose(dil.block(("A", "B")), pure_loss_state(lam, 6.0).matrix, atol=1e-12)

    def test_dilation_ae_marginal(self):
        lam, s = 0.4, 5.0
        c = np.cosh(2 * squeezing_parameter(s))
        ae = sp.reorder(pure_loss_dilation(lam, s).block(("A", "E")), "xp", "modewise")
        expected_off = np.sqrt(lam * (1 - lam)) * (c - 1) * np.eye(2)
        np.testing.assert_allclose(ae[:2, 2:], expected_off, atol=1e-12)
        np.testing.assert_allclose(ae[2:, 2:], ((1 - lam) * c + lam) * np.eye(2), atol=1e-12)

    def test_channel_output_matches_family(self):
        out = channel_apply(pure_loss_channel(0.6), tmsv(8.0), on="A")
        np.testing.assert_allclose(out.matrix, pure_loss_state(0.6, 8.0).matrix, atol=1e-12)

    def test_bad_transmissivity(self):
        with pytest.raises(InvalidInputError):
            pure_loss_state(1.5, 3.0)


class TestChannels:
    def test_pure_loss_composition(self):
        a, b = pure_loss_channel(0.3), pure_loss_channel(0.8)
        ab = a.compose(b)
        ref = pure_loss_channel(0.24)
        np.testing.assert_allclose(ab.X, ref.X, atol=1e-12)
        np.testing.assert_allclose(ab.Y, ref.Y, atol=1e-12)

    def test_identity_channel_is_cp(self):
        assert identity_channel(2).is_cp()

    def test_non_cp_channel_rejected(self):
        amplifier_without_noise = GaussianChannel(2.0 * np.eye(2), np.zeros((2, 2)))
        with pytest.raises(InvalidChannelError):
            channel_apply(amplifier_without_noise, tmsv(3.0), on="A")

    def test_shape_mismatch(self):
        with pytest.raises(InvalidShapeError):
            GaussianChannel(np.eye(2), np.eye(4))

    def test_cp_margin_pure_loss(self):
        # sqrt(det Y) - |1 - det X| = (1 - lam) - (1 - lam)
        assert pure_loss_channel(0.4).cp_margin() == pytest.approx(0.0, abs=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_cp_channels_preserve_bona_fide(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((2, 2))
        # smallest noise allowed by complete positivity, plus random PSD noise
        Y = abs(np.linalg.det(X) - 1.0) * np.eye(2)
        B = rng.standard_normal((2, 2))
        channel = GaussianChannel(X, Y + 0.1 * B @ B.T)
        assert channel.is_cp()
        state = random_qcm(Partition.of(A=1, B=1), rng)
        assert channel_apply(channel, state, on="B").is_bona_fide()


class TestPurify:
    @settings(max_examples=30, deadline=None)
    @given(seeds, st.sampled_from([(1, 1), (1, 2), (2, 1)]))
    def test_marginal_and_purity(self, seed, split):
        state = random_qcm(Partition.of(A=split[0], B=split[1]), np.random.default_rng(seed))
        pure = purify(state)
        np.testing.assert_allclose(pure.block(("A", "B")), state.matrix,
                                   atol=1e-9 * np.max(np.abs(state.matrix)))
        assert pure.is_pure(tol=1e-7)

    def test_minimal_drops_vacuum_modes(self):
        pure = purify(pure_loss_state(0.5, 5.0), minimal=True)
        assert pure.partition.subsystems[-1] == ("E", 1)
        assert pure.is_pure()

    def test_pure_input_needs_no_environment(self):
        assert purify(tmsv(5.0), minimal=True).partition.modes_of(("E",)) == 0

    def test_name_clash(self):
        with pytest.raises(InvalidPartitionError):
            purify(tmsv(5.0), env_name="A")


class TestSeedsAndSums:
    @pytest.mark.parametrize("t", [1e-3, 1.0, 1e3])
    def test_homodyne_seed_is_pure(self, t):
        assert homodyne_seed(t).is_pure()

    def test_balanced_seed_is_identity(self):
        np.testing.assert_array_equal(homodyne_seed(1.0).matrix, np.eye(2))

    def test_non_positive_seed(self):
        with pytest.raises(InvalidInputError):
            homodyne_seed(0.0)

    def test_direct_sum_of_pure_states(self):
        both = direct_sum(tmsv(5.0), tmsv(5.0))
        assert both.partition.names == ("A1", "B1", "A2", "B2")
        np.testing.assert_allclose(both.symplectic_eigenvalues(), np.ones(4), atol=1e-10)

    def test_direct_sum_blocks(self):
        v = pure_loss_state(0.5, 5.0)
        both = direct_sum(v, tmsv(3.0))
        np.testing.assert_allclose(both.block(("A1", "B1")), v.matrix)
        np.testing.assert_allclose(both.block(("A2", "B2")), tmsv(3.0).matrix)


class TestJson:
    @pytest.mark.parametrize("ordering", ["xp", "modewise"])
    def test_round_trip(self, ordering, tmp_path):
        state = random_qcm(Partition.of(A=1, B=2), np.random.default_rng(3))
        path = tmp_path / "state.json"
        path.write_text(json.dumps(to_json_dict(state, ordering)))
        back = load_qcm(path)
        np.testing.assert_array_equal(back.matrix, state.matrix)
        assert back.partition == state.partition

    def test_round_trip_preserves_symplectic_eigenvalues(self):
        state = random_qcm(Partition.of(A=2, B=1), np.random.default_rng(4))
        back = from_json_dict(to_json_dict(state, "modewise"))
        np.testing.assert_allclose(back.symplectic_eigenvalues(), state.symplectic_eigenvalues(),
                                   rtol=1e-12)

    @pytest.mark.parametrize("mutate, check", [
        (lambda d: d.pop("matrix"), "schema"),
        (lambda d: d.__setitem__("matrix", [[1.0, 0.0], [0.0, 1.0]]), "shape"),
        (lambda d: d["matrix"][0].__setitem__(0, float("nan")), "finiteness"),
        (lambda d: d["matrix"][0].__setitem__(1, 0.3), "symmetry"),
        (lambda d: d.__setitem__("matrix", (0.5 * np.eye(4)).tolist()), "bona fide"),
    ])
    def test_validation_names_the_check(self, mutate, check):
        data = to_json_dict(tmsv(3.0))
        mutate(data)
        with pytest.raises(InvalidInputError, match=check):
            from_json_dict(data)

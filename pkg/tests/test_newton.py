import numpy as np
import pytest

from holonewt import Dataset, NetworkTopology, forward
from holonewt.fdcheck import fd_hessians
from holonewt.gradient import cogradient_conj
from holonewt.linalg import SingularMatrix
from holonewt.newton import (
    backward_tables,
    conj_curvature_output,
    curvature_hidden,
    curvature_output,
    hessian_pair,
    newton_update,
    pseudo_newton_update,
    residual_curvature_output,
)

from helpers import complex_uniform, random_instance


def single_linear_neuron_tables():
    t = NetworkTopology((1, 1), ("identity",))
    w = [np.zeros((1, 1), dtype=complex)]
    ds = Dataset(np.array([[1.0]]), np.array([[1.0]]))
    return t, w, ds, backward_tables(t, w, ds)


class TestCurvatureTables:
    def test_output_identity_is_one(self):
        t = NetworkTopology((2, 2), ("identity",))
        rng = np.random.default_rng(0)
        w = [complex_uniform(rng, (2, 2))]
        trace = forward(t, w, complex_uniform(rng, (3, 2)))
        curv = curvature_output(t, trace)
        idx = np.arange(2)
        np.testing.assert_array_equal(curv[:, idx, idx], np.ones((3, 2)))

    def test_output_sigmoid_zero_net(self):
        """g'(0)^2 = 0.0625 on the diagonal."""
        t = NetworkTopology((1, 1), ("sigmoid",))
        w = [np.zeros((1, 1), dtype=complex)]
        trace = forward(t, w, np.array([[1.0]]))
        np.testing.assert_allclose(curvature_output(t, trace), [[[0.0625]]], rtol=1e-15)

    def test_output_off_diagonal_exactly_zero(self):
        t = NetworkTopology((2, 3, 2), ("sigmoid", "sigmoid"))
        rng = np.random.default_rng(1)
        w = [complex_uniform(rng, (3, 2)), complex_uniform(rng, (2, 3))]
        trace = forward(t, w, complex_uniform(rng, (4, 2)))
        curv = curvature_output(t, trace)
        off = ~np.eye(2, dtype=bool)
        assert np.all(curv[:, off] == 0)

    def test_output_diagonal_real_nonnegative(self):
        """|g'(net)|^2 whenever g has real Taylor coefficients."""
        t, w, ds = random_instance((2, 3, 1), "taylor3", 5)
        trace = forward(t, w, ds.inputs)
        curv = curvature_output(t, trace)
        diag = curv[:, 0, 0]
        assert np.max(np.abs(diag.imag)) <= 1e-16
        assert np.all(diag.real >= 0)

    def test_hidden_zero_weights_annihilate(self):
        t = NetworkTopology((2, 2, 1), ("taylor3", "taylor3"))
        rng = np.random.default_rng(2)
        w = [complex_uniform(rng, (2, 2)), np.zeros((1, 2), dtype=complex)]
        trace = forward(t, w, complex_uniform(rng, (3, 2)))
        curv2 = curvature_output(t, trace)
        curv1 = curvature_hidden(t, trace, curv2, w[1], 1)
        np.testing.assert_array_equal(curv1, np.zeros((3, 2, 2)))

    def test_hidden_chain_1_1_1(self):
        """Identity 1-1-1 net: hidden curvature is |w2|^2."""
        t = NetworkTopology((1, 1, 1), ("identity", "identity"))
        w2 = 2.0 - 1.0j
        w = [np.array([[0.7 + 0.2j]]), np.array([[w2]])]
        trace = forward(t, w, np.array([[1.5]]))
        curv2 = curvature_output(t, trace)
        curv1 = curvature_hidden(t, trace, curv2, w[1], 1)
        np.testing.assert_allclose(curv1, [[[5.0]]], rtol=1e-15)


class TestResidualAndConjTables:
    def test_identity_activation_residual_zero(self):
        t, w, ds, tables = single_linear_neuron_tables()
        for resid in tables.residual_curvature:
            np.testing.assert_array_equal(resid, np.zeros_like(resid))

    def test_output_zero_residual(self):
        t = NetworkTopology((1, 1), ("sigmoid",))
        w = [np.zeros((1, 1), dtype=complex)]
        ds = Dataset(np.array([[1.0]]), np.array([[0.5]]))
        trace = forward(t, w, ds.inputs)
        np.testing.assert_array_equal(
            residual_curvature_output(t, trace, ds.targets), [[0.0]]
        )

    def test_output_sigmoid_zero_net_vanishes(self):
        """g''(0) = 0 kills the table even with residual 0.5."""
        t = NetworkTopology((1, 1), ("sigmoid",))
        w = [np.zeros((1, 1), dtype=complex)]
        ds = Dataset(np.array([[1.0]]), np.array([[0.0]]))
        trace = forward(t, w, ds.inputs)
        np.testing.assert_allclose(
            residual_curvature_output(t, trace, ds.targets), [[0.0]], atol=1e-16
        )

    def test_conj_table_zero_at_output(self):
        t = NetworkTopology((2, 3, 2), ("sigmoid", "sigmoid"))
        rng = np.random.default_rng(3)
        w = [complex_uniform(rng, (3, 2)), complex_uniform(rng, (2, 3))]
        trace = forward(t, w, complex_uniform(rng, (4, 2)))
        np.testing.assert_array_equal(
            conj_curvature_output(t, trace), np.zeros((4, 2, 2))
        )

    def test_identity_network_tables_all_zero(self):
        t, w, ds = random_instance((2, 3, 1), "identity", 7)
        tables = backward_tables(t, w, ds)
        for resid in tables.residual_curvature:
            np.testing.assert_array_equal(resid, np.zeros_like(resid))
        for cc in tables.conj_curvature:
            np.testing.assert_array_equal(cc, np.zeros_like(cc))


class TestHessianAssembly:
    def test_single_linear_neuron_h_ww(self):
        _, _, _, tables = single_linear_neuron_tables()
        h_ww, h_wbar_w = hessian_pair(tables, 1)
        np.testing.assert_array_equal(h_ww, [[1.0]])
        np.testing.assert_array_equal(h_wbar_w, [[0.0]])

    def test_output_layer_block_diagonal(self):
        """With C outputs the output-layer blocks are per-node: the entry
        coupling weights of different output nodes is exactly zero."""
        t, w, ds = random_instance((2, 3, 2), "sigmoid", 11)
        tables = backward_tables(t, w, ds)
        h_ww, h_wbar_w = hessian_pair(tables, 2)
        k = 3
        for h in (h_ww, h_wbar_w):
            assert h.shape == (6, 6)
            assert np.all(h[:k, k:] == 0)
            assert np.all(h[k:, :k] == 0)

    def test_identity_network_h_wbar_w_zero(self):
        t, w, ds = random_instance((2, 4, 1), "identity", 13)
        tables = backward_tables(t, w, ds)
        for p in (1, 2):
            _, h_wbar_w = hessian_pair(tables, p)
            np.testing.assert_array_equal(h_wbar_w, np.zeros_like(h_wbar_w))

    def test_h_ww_hermitian(self):
        for seed in range(5):
            t, w, ds = random_instance((2, 3, 1), "sigmoid", 20 + seed)
            tables = backward_tables(t, w, ds)
            for p in (1, 2):
                h_ww, _ = hessian_pair(tables, p)
                scale = max(np.max(np.abs(h_ww)), 1e-30)
                assert np.max(np.abs(h_ww - h_ww.conj().T)) / scale <= 1e-12

    @pytest.mark.parametrize("act", ["sigmoid", "taylor3"])
    def test_matches_fd_oracle(self, act):
        """Spot check; the 100-seed battery lives in the acceptance suite."""
        for seed in range(5):
            t, w, ds = random_instance((2, 3, 1), act, 40 + seed)
            tables = backward_tables(t, w, ds)
            for p in (1, 2):
                h_ww, h_wbar_w = hessian_pair(tables, p)
                fd_ww, fd_wbar_w = fd_hessians(t, w, ds, p)
                scale = max(np.linalg.norm(fd_ww), np.linalg.norm(fd_wbar_w))
                assert np.linalg.norm(h_ww - fd_ww) / scale <= 1e-5
                assert np.linalg.norm(h_wbar_w - fd_wbar_w) / scale <= 1e-5


class TestUpdates:
    def test_single_linear_neuron_newton(self):
        _, _, _, tables = single_linear_neuron_tables()
        h_ww, h_wbar_w = hessian_pair(tables, 1)
        cog = cogradient_conj(tables.deltas[0], tables.trace, 1)
        np.testing.assert_array_equal(newton_update(h_ww, h_wbar_w, cog), [1.0])
        np.testing.assert_array_equal(pseudo_newton_update(h_ww, cog), [1.0])

    def test_zero_cogradient_zero_update(self):
        h = np.eye(3, dtype=complex)
        np.testing.assert_array_equal(
            pseudo_newton_update(h, np.zeros(3, dtype=complex)), np.zeros(3)
        )

    def test_newton_reduces_to_pseudo_when_uncoupled(self):
        """H_wbar_w = 0 degenerates the coupled formula exactly."""
        rng = np.random.default_rng(30)
        a = complex_uniform(rng, (4, 4))
        a = a @ a.conj().T + 4 * np.eye(4)
        v = complex_uniform(rng, (4,))
        zero = np.zeros((4, 4), dtype=complex)
        np.testing.assert_array_equal(
            newton_update(a, zero, v), pseudo_newton_update(a, v)
        )

    def test_newton_equals_pseudo_on_identity_network(self):
        t, w, ds = random_instance((3, 2), "identity", 31, n_samples=4)
        tables = backward_tables(t, w, ds)
        h_ww, h_wbar_w = hessian_pair(tables, 1)
        cog = cogradient_conj(tables.deltas[0], tables.trace, 1)
        nodes = t.widths[1]
        np.testing.assert_array_equal(
            newton_update(h_ww, h_wbar_w, cog, nodes),
            pseudo_newton_update(h_ww, cog, nodes),
        )

    def test_per_node_solve_equals_full_solve_when_block_diagonal(self):
        """On an exactly block-diagonal system the per-node solve and a
        dense solve of the whole matrix agree; the output layer is the
        case that matters."""
        t, w, ds = random_instance((2, 3, 2), "taylor3", 32, n_samples=5)
        tables = backward_tables(t, w, ds)
        h_ww, h_wbar_w = hessian_pair(tables, 2)
        cog = cogradient_conj(tables.deltas[1], tables.trace, 2)
        blockwise = pseudo_newton_update(h_ww, cog, n_nodes=2)
        dense = np.linalg.solve(h_ww, -cog)
        np.testing.assert_allclose(blockwise, dense, rtol=1e-12, atol=1e-15)

    def test_newton_solves_the_coupled_system(self):
        """The returned dw satisfies the stacked optimality conditions
        H_ww dw + H_wbar_w conj(dw) = -(dE/dw)*."""
        t, w, ds = random_instance((2, 3, 2), "sigmoid", 33, n_samples=5)
        tables = backward_tables(t, w, ds)
        h_ww, h_wbar_w = hessian_pair(tables, 2)
        cog = cogradient_conj(tables.deltas[1], tables.trace, 2)
        dw = newton_update(h_ww, h_wbar_w, cog, n_nodes=2)
        residual = h_ww @ dw + h_wbar_w @ np.conj(dw) + cog
        assert np.linalg.norm(residual) <= 1e-10 * max(np.linalg.norm(cog), 1.0)

    def test_singular_block_raises(self):
        h = np.zeros((2, 2), dtype=complex)
        h[0, 0] = 1.0
        with pytest.raises(SingularMatrix):
            pseudo_newton_update(h, np.array([1.0, 1.0], dtype=complex))
        with pytest.raises(SingularMatrix):
            newton_update(h, np.zeros((2, 2), dtype=complex), np.ones(2, dtype=complex))

    def test_per_node_blocks_are_independent(self):
        """Entries outside the diagonal blocks cannot influence the
        per-node solution."""
        rng = np.random.default_rng(34)
        a = complex_uniform(rng, (6, 6)) + 6 * np.eye(6)
        v = complex_uniform(rng, (6,))
        masked = a.copy()
        masked[:3, 3:] = 0
        masked[3:, :3] = 0
        np.testing.assert_array_equal(
            pseudo_newton_update(a, v, n_nodes=2),
            pseudo_newton_update(masked, v, n_nodes=2),
        )

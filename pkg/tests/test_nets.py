import numpy as np
import pytest

from uavris.nets import (
    Adam,
    Mlp,
    flatten_gradients,
    mlp_forward,
    mlp_forward_cached,
    mlp_gradients,
    soft_update,
)


def finite_diff_param_grad(net, x, loss_fn, eps=1e-6):
    """Central finite differences of loss_fn(forward(net, x)) w.r.t. every
    parameter, in the flat layout."""
    grad = np.zeros_like(net.flat)
    for i in range(net.flat.size):
        orig = net.flat[i]
        net.flat[i] = orig + eps
        hi = loss_fn(mlp_forward(net, x))
        net.flat[i] = orig - eps
        lo = loss_fn(mlp_forward(net, x))
        net.flat[i] = orig
        grad[i] = (hi - lo) / (2 * eps)
    return grad


def analytic_param_grad(net, x, loss_fn, upstream_fn):
    out, cache = mlp_forward_cached(net, x)
    w_g, b_g, _ = mlp_gradients(net, cache, upstream_fn(out))
    return flatten_gradients(w_g, b_g)


class TestForward:
    def test_identity_weights_linear(self):
        rng = np.random.default_rng(0)
        net = Mlp.create([2, 2], rng)
        net.weights[0][:] = np.eye(2)
        net.biases[0][:] = [1.0, -1.0]
        np.testing.assert_allclose(mlp_forward(net, np.array([3.0, 4.0])), [4.0, 3.0])

    def test_relu_clips_hidden(self):
        rng = np.random.default_rng(0)
        net = Mlp.create([1, 1, 1], rng)
        net.weights[0][:] = [[-1.0]]
        net.biases[0][:] = [0.0]
        net.weights[1][:] = [[1.0]]
        net.biases[1][:] = [0.5]
        # positive input -> negative pre-activation -> ReLU zero -> bias only
        assert mlp_forward(net, np.array([2.0]))[0] == pytest.approx(0.5)

    def test_tanh_output_bounded(self):
        rng = np.random.default_rng(1)
        net = Mlp.create([3, 16, 4], rng, output_activation="tanh")
        out = mlp_forward(net, rng.standard_normal((50, 3)) * 10)
        assert (np.abs(out) <= 1.0).all()

    def test_batch_matches_single(self):
        rng = np.random.default_rng(2)
        net = Mlp.create([4, 8, 2], rng)
        xs = rng.standard_normal((5, 4))
        batch = mlp_forward(net, xs)
        for i in range(5):
            np.testing.assert_allclose(mlp_forward(net, xs[i]), batch[i], rtol=1e-12)

    def test_bad_input_size(self):
        net = Mlp.create([4, 2], np.random.default_rng(0))
        with pytest.raises(ValueError):
            mlp_forward(net, np.zeros(3))

    def test_copy_is_independent(self):
        net = Mlp.create([2, 3, 1], np.random.default_rng(0))
        dup = net.copy()
        dup.flat += 1.0
        assert not np.allclose(net.flat, dup.flat)


class TestGradients:
    def _check(self, net, x, loss_fn, upstream_fn, rtol=1e-6):
        analytic = analytic_param_grad(net, x, loss_fn, upstream_fn)
        numeric = finite_diff_param_grad(net, x, loss_fn)
        scale = max(np.max(np.abs(numeric)), 1e-8)
        np.testing.assert_allclose(analytic, numeric, atol=rtol * scale)

    def test_sum_loss_identity_output(self):
        rng = np.random.default_rng(3)
        net = Mlp.create([3, 8, 2], rng)
        x = rng.standard_normal(3)
        self._check(net, x, lambda o: o.sum(), lambda o: np.ones_like(o))

    def test_squared_loss_tanh_output(self):
        rng = np.random.default_rng(4)
        net = Mlp.create([2, 6, 6, 2], rng, output_activation="tanh")
        x = rng.standard_normal(2)
        self._check(net, x, lambda o: np.sum(o**2), lambda o: 2 * o)

    def test_batch_gradients_sum(self):
        rng = np.random.default_rng(5)
        net = Mlp.create([2, 5, 1], rng)
        xs = rng.standard_normal((4, 2))
        out, cache = mlp_forward_cached(net, xs)
        w_g, b_g, _ = mlp_gradients(net, cache, np.ones_like(out))
        batch_grad = flatten_gradients(w_g, b_g)
        single_sum = np.zeros_like(batch_grad)
        for i in range(4):
            single_sum += analytic_param_grad(
                net, xs[i], lambda o: o.sum(), lambda o: np.ones_like(o)
            )
        np.testing.assert_allclose(batch_grad, single_sum, rtol=1e-10)

    def test_input_gradient(self):
        rng = np.random.default_rng(6)
        net = Mlp.create([3, 7, 2], rng, output_activation="tanh")
        x = rng.standard_normal(3)
        _, cache = mlp_forward_cached(net, x)
        out = mlp_forward(net, x)
        _, _, in_grad = mlp_gradients(net, cache, np.ones_like(out))
        eps = 1e-6
        for i in range(3):
            xp, xm = x.copy(), x.copy()
            xp[i] += eps
            xm[i] -= eps
            num = (mlp_forward(net, xp).sum() - mlp_forward(net, xm).sum()) / (2 * eps)
            assert in_grad[i] == pytest.approx(num, abs=1e-6)


class TestAdam:
    def test_first_step_magnitude(self):
        # with any nonzero gradient the first Adam step has size ~lr per coord
        opt = Adam(lr=0.01)
        p = np.array([1.0, -2.0])
        opt.step(p, np.array([0.3, -40.0]))
        np.testing.assert_allclose(p, [1.0 - 0.01, -2.0 + 0.01], atol=1e-6)

    def test_quadratic_convergence(self):
        # minimize ||p - target||^2
        opt = Adam(lr=0.05)
        p = np.zeros(3)
        target = np.array([1.0, -0.5, 2.0])
        for _ in range(2000):
            opt.step(p, 2 * (p - target))
        np.testing.assert_allclose(p, target, atol=1e-4)

    def test_size_change_rejected(self):
        opt = Adam(lr=0.1)
        opt.step(np.zeros(2), np.ones(2))
        with pytest.raises(ValueError):
            opt.step(np.zeros(3), np.ones(3))


class TestSoftUpdate:
    def test_blend(self):
        rng = np.random.default_rng(7)
        main = Mlp.create([2, 3], rng)
        target = Mlp.create([2, 3], rng)
        before = target.flat.copy()
        soft_update(target, main, 0.25)
        np.testing.assert_allclose(target.flat, 0.75 * before + 0.25 * main.flat)

    def test_tau_one_copies(self):
        rng = np.random.default_rng(8)
        main = Mlp.create([2, 3], rng)
        target = Mlp.create([2, 3], rng)
        soft_update(target, main, 1.0)
        np.testing.assert_array_equal(target.flat, main.flat)
        # views must still alias the flat vector after the in-place update
        np.testing.assert_array_equal(target.weights[0], main.weights[0])

    def test_structure_mismatch(self):
        rng = np.random.default_rng(9)
        with pytest.raises(ValueError):
            soft_update(Mlp.create([2, 3], rng), Mlp.create([3, 2], rng), 0.5)

    def test_bad_tau(self):
        rng = np.random.default_rng(9)
        net = Mlp.create([2, 2], rng)
        with pytest.raises(ValueError):
            soft_update(net.copy(), net, 0.0)


class TestCreate:
    def test_param_count(self):
        net = Mlp.create([3, 5, 2], np.random.default_rng(0))
        assert net.flat.size == (3 + 1) * 5 + (5 + 1) * 2

    def test_bad_dims(self):
        with pytest.raises(ValueError):
            Mlp.create([3], np.random.default_rng(0))
        with pytest.raises(ValueError):
            Mlp.create([3, 0, 2], np.random.default_rng(0))

    def test_bad_activation(self):
        with pytest.raises(ValueError):
            Mlp.create([2, 2], np.random.default_rng(0), output_activation="relu")
